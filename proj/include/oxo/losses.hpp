#pragma once

#include <optional>
#include <string>
#include <variant>

#include "oxo/geometry.hpp"
#include "oxo/linalg.hpp"
#include "oxo/rng.hpp"

namespace oxo::losses {

using geom::DecisionSet;
using linalg::Matrix;
using linalg::Vector;

// f(x) = (a^T x - b)^2
struct SquareLoss {
  Vector a;
  double b = 0.0;
};

// f(x) = -log(a^T x), defined for a^T x > 0
struct LogLoss {
  Vector a;
};

// f(x) = max(q1(x), q2(x)) with square-loss branches; convex, exp-concave,
// non-smooth along the tie surface.
struct MaxQuadratic {
  SquareLoss q1;
  SquareLoss q2;
};

// f(x) = c^T x. Exact-recovery reference for the estimation circuits (a
// linear phase has zero curvature error); not an adversary family.
struct LinearLoss {
  Vector c;
};

class LossFunction {
 public:
  LossFunction(SquareLoss f) : f_(std::move(f)) {}
  LossFunction(LogLoss f) : f_(std::move(f)) {}
  LossFunction(MaxQuadratic f) : f_(std::move(f)) {}
  LossFunction(LinearLoss f) : f_(std::move(f)) {}

  double value(const Vector& x) const;
  // f(x + delta) - f(x) evaluated without catastrophic cancellation; the
  // simulator feeds deltas many orders of magnitude below |f|.
  double value_diff(const Vector& x, const Vector& delta) const;
  Vector gradient(const Vector& x) const;
  // grad f(x + delta) - grad f(x), cancellation-free per family.
  Vector gradient_diff(const Vector& x, const Vector& delta) const;
  Matrix hessian(const Vector& x) const;

  bool smooth() const { return !std::holds_alternative<MaxQuadratic>(f_); }
  std::size_t dim() const;
  std::string family_name() const;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(f_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(f_);
  }

 private:
  std::variant<SquareLoss, LogLoss, MaxQuadratic, LinearLoss> f_;
};

struct LossConstants {
  double G = 0.0;                // Lipschitz constant of f
  std::optional<double> beta;    // smoothness of f (unset for non-smooth)
  std::optional<double> L;       // Lipschitz constant of grad f
  double alpha = 0.0;            // exp-concavity parameter
  bool smooth = true;
};

// Concavity test for e^{-alpha f} along random segments in k: for each pair
// (u, v) and lambda in {0.25, 0.5, 0.75} checks the chord inequality with
// slack tol.
bool expconcavity_certificate(const LossFunction& f, const DecisionSet& k,
                              double alpha, int segments, RandomSource& rng,
                              double tol = 1e-9);

// Sampled certificates with a 1.25 safety factor on G/beta/L; alpha is the
// largest value surviving the concavity certificate, shrunk by 1.25 and
// re-verified.
LossConstants certify_constants(const LossFunction& f, const DecisionSet& k,
                                int samples, RandomSource& rng);

// Closed-form constants (suprema over k) for the supported families.
LossConstants exact_constants(const LossFunction& f, const DecisionSet& k);

enum class AdversaryKind {
  oblivious_square,   // seeded random square losses
  rotating_square,    // deterministic rotating directions, seeded offsets
  oblivious_log,      // seeded log losses, positive on the (dilated) set
  adaptive_square,    // square loss whose minimizer is displaced from x_t
  oblivious_maxquad,  // seeded max-of-two-quadratics losses
};

AdversaryKind adversary_kind_from_string(const std::string& s);
std::string to_string(AdversaryKind k);

// Emits one loss per round. Oblivious kinds ignore x_t and are a pure
// function of (seed, t); the adaptive kind reads the committed decision.
class Adversary {
 public:
  Adversary(AdversaryKind kind, std::uint64_t seed, const DecisionSet& domain,
            double offset = 0.5);

  // t must advance by exactly one per round; repeated calls with the same t
  // return the same loss.
  LossFunction next(const Vector& x_t, long t);

  // Constants valid for every loss this adversary can emit, evaluated on
  // eval_set (pass the dilated set covering all circuit evaluation points).
  LossConstants uniform_constants(const DecisionSet& eval_set) const;

  AdversaryKind kind() const { return kind_; }
  const DecisionSet& domain() const { return domain_; }

 private:
  AdversaryKind kind_;
  std::uint64_t seed_;
  DecisionSet domain_;
  double offset_;
  long last_t_ = 0;
};

// x* minimizing the cumulative loss over k within tol, by multi-start
// projected (sub)gradient descent with analytic gradients.
Vector best_fixed(const std::vector<LossFunction>& fs, const DecisionSet& k,
                  double tol, RandomSource& rng, int starts = 5);

double total_value(const std::vector<LossFunction>& fs, const Vector& x);

}  // namespace oxo::losses
