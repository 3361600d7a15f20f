#pragma once

#include <variant>

#include "oxo/linalg.hpp"
#include "oxo/rng.hpp"

namespace oxo::geom {

using linalg::Matrix;
using linalg::Vector;

struct Ball {
  Vector center;
  double radius = 0.0;
};

struct Box {
  Vector lower;
  Vector upper;
};

// Bounded convex feasible region: Euclidean ball or axis-aligned box.
class DecisionSet {
 public:
  static DecisionSet ball(Vector center, double radius);
  static DecisionSet box(Vector lower, Vector upper);

  std::size_t dim() const;
  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
  bool is_box() const { return std::holds_alternative<Box>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }
  const Box& as_box() const { return std::get<Box>(shape_); }

  // Membership in the set expanded by tol in Euclidean distance.
  bool contains(const Vector& x, double tol) const;

  // sup over x,y in K of ||x-y||_2, exact for both shapes.
  double diameter() const;

  // sup over x,y in K of ||x-y||_q for q >= 1 (q may be infinity).
  double diameter_lq(double q) const;

  // Closed-form Euclidean projection.
  Vector project_euclidean(const Vector& y) const;

  // Uniform sample from the set.
  Vector sample(RandomSource& rng) const;

  // Same shape grown by margin >= 0 in every direction.
  DecisionSet dilated(double margin) const;

 private:
  std::variant<Ball, Box> shape_;
};

// argmin_{x in K} ||x - y||_a computed by accelerated projected gradient on
// the quadratic 0.5 (x-y)^T a (x-y). Closed forms are used when a is a
// multiple of the identity (Euclidean projection) and when a is diagonal over
// a box (coordinatewise clamp). Throws invalid_input for non-PD a and a
// ConvergenceError carrying the best iterate when max_iter is exhausted.
Vector project_weighted(const DecisionSet& set, const Matrix& a,
                        const Vector& y, double tol = 1e-10,
                        int max_iter = 10000);

// z with each coordinate uniform on [x_i - r_prime, x_i + r_prime].
Vector sample_linf_ball(const Vector& x, double r_prime, RandomSource& rng);

}  // namespace oxo::geom
