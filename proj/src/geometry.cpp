#include "oxo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oxo::geom {

using linalg::all_finite;

DecisionSet DecisionSet::ball(Vector center, double radius) {
  if (center.empty() || !all_finite(center) || !(radius > 0.0))
    fail(ErrorCategory::invalid_input, "ball: need finite center, radius > 0");
  DecisionSet s;
  s.shape_ = Ball{std::move(center), radius};
  return s;
}

DecisionSet DecisionSet::box(Vector lower, Vector upper) {
  if (lower.empty() || lower.size() != upper.size() || !all_finite(lower) ||
      !all_finite(upper))
    fail(ErrorCategory::invalid_input, "box: bounds malformed");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      fail(ErrorCategory::invalid_input, "box: need lower < upper");
  DecisionSet s;
  s.shape_ = Box{std::move(lower), std::move(upper)};
  return s;
}

std::size_t DecisionSet::dim() const {
  if (is_ball()) return as_ball().center.size();
  return as_box().lower.size();
}

bool DecisionSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim())
    fail(ErrorCategory::invalid_input, "contains: dimension mismatch");
  if (is_ball()) {
    const Ball& b = as_ball();
    return linalg::norm2(linalg::sub(x, b.center)) <= b.radius + tol;
  }
  const Box& b = as_box();
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double out = std::max({b.lower[i] - x[i], x[i] - b.upper[i], 0.0});
    d2 += out * out;
  }
  return std::sqrt(d2) <= tol;
}

double DecisionSet::diameter() const {
  if (is_ball()) return 2.0 * as_ball().radius;
  const Box& b = as_box();
  return linalg::norm2(linalg::sub(b.upper, b.lower));
}

double DecisionSet::diameter_lq(double q) const {
  const double n = static_cast<double>(dim());
  if (is_ball()) {
    const double r = as_ball().radius;
    if (std::isinf(q) || q >= 2.0) return 2.0 * r;
    // For q < 2 the l_q norm of the extreme diagonal direction dominates.
    return 2.0 * r * std::pow(n, 1.0 / q - 0.5);
  }
  const Box& b = as_box();
  const Vector d = linalg::sub(b.upper, b.lower);
  if (std::isinf(q)) return linalg::norm_inf(d);
  double s = 0.0;
  for (double x : d) s += std::pow(std::abs(x), q);
  return std::pow(s, 1.0 / q);
}

Vector DecisionSet::project_euclidean(const Vector& y) const {
  if (y.size() != dim())
    fail(ErrorCategory::invalid_input, "project_euclidean: dimension mismatch");
  if (is_ball()) {
    const Ball& b = as_ball();
    const Vector d = linalg::sub(y, b.center);
    const double nd = linalg::norm2(d);
    if (nd <= b.radius) return y;
    return linalg::add(b.center, linalg::scale(d, b.radius / nd));
  }
  const Box& b = as_box();
  Vector r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    r[i] = std::clamp(y[i], b.lower[i], b.upper[i]);
  return r;
}

Vector DecisionSet::sample(RandomSource& rng) const {
  const std::size_t n = dim();
  if (is_box()) {
    const Box& b = as_box();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(b.lower[i], b.upper[i]);
    return x;
  }
  const Ball& b = as_ball();
  Vector dir(n);
  double nd = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) dir[i] = rng.normal();
    nd = linalg::norm2(dir);
  } while (nd == 0.0);
  const double rad =
      b.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
  return linalg::add(b.center, linalg::scale(dir, rad / nd));
}

DecisionSet DecisionSet::dilated(double margin) const {
  if (margin < 0.0)
    fail(ErrorCategory::invalid_input, "dilated: negative margin");
  if (is_ball()) {
    const Ball& b = as_ball();
    return DecisionSet::ball(b.center, b.radius + margin);
  }
  const Box& b = as_box();
  Vector lo = b.lower, hi = b.upper;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= margin;
    hi[i] += margin;
  }
  return DecisionSet::box(std::move(lo), std::move(hi));
}

namespace {

bool is_scaled_identity(const Matrix& a) {
  const double d0 = a(0, 0);
  const double tol = 1e-14 * std::max(1.0, std::abs(d0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double want = (i == j) ? d0 : 0.0;
      if (std::abs(a(i, j) - want) > tol) return false;
    }
  return true;
}

bool is_diagonal(const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) != 0.0) return false;
  return true;
}

}  // namespace

Vector project_weighted(const DecisionSet& set, const Matrix& a,
                        const Vector& y, double tol, int max_iter) {
  const std::size_t n = set.dim();
  if (a.rows() != n || a.cols() != n || y.size() != n)
    fail(ErrorCategory::invalid_input, "project_weighted: dimension mismatch");
  if (!all_finite(a) || !all_finite(y))
    fail(ErrorCategory::invalid_input, "project_weighted: non-finite input");
  if (!(tol > 0.0))
    fail(ErrorCategory::invalid_input, "project_weighted: tol must be > 0");

  // Interior point is a fixed point under any norm.
  if (set.contains(y, 0.0)) return y;

  if (is_scaled_identity(a)) {
    if (!(a(0, 0) > 0.0))
      fail(ErrorCategory::invalid_input, "project_weighted: a not PD");
    return set.project_euclidean(y);
  }
  if (set.is_box() && is_diagonal(a)) {
    for (std::size_t i = 0; i < n; ++i)
      if (!(a(i, i) > 0.0))
        fail(ErrorCategory::invalid_input, "project_weighted: a not PD");
    return set.project_euclidean(y);  // separable quadratic: clamp per axis
  }

  const linalg::EigenSym es = linalg::eigen_sym(a);
  const double mu = es.values.front();
  if (!(mu > 0.0))
    fail(ErrorCategory::invalid_input, "project_weighted: a not PD");

  // Accelerated projected gradient on q(x) = 0.5 (x-y)^T a (x-y) with step
  // 1/trace(a) (trace bounds lambda_max for PSD a) and the constant momentum
  // of the strongly convex regime. Stopping uses the plain fixed-point map
  // T(x) = P(x - step a(x-y)), a (1 - mu step) contraction, so the residual
  // ||x - T(x)|| certifies ||T(x) - argmin|| <= residual / (mu step).
  const double lip = linalg::trace(a);
  const double step = 1.0 / lip;
  const double residual_target = tol * mu * step;
  const double momentum = (std::sqrt(lip) - std::sqrt(mu)) /
                          (std::sqrt(lip) + std::sqrt(mu));
  Vector x = set.project_euclidean(y);
  Vector prev = x;
  double best_residual = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector v = x;
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += momentum * (x[i] - prev[i]);
    Vector next = v;
    linalg::axpy(next, -step, linalg::matvec(a, linalg::sub(v, y)));
    next = set.project_euclidean(next);
    prev = std::move(x);
    x = std::move(next);

    Vector mapped = x;
    linalg::axpy(mapped, -step, linalg::matvec(a, linalg::sub(x, y)));
    mapped = set.project_euclidean(mapped);
    const double residual = linalg::norm2(linalg::sub(mapped, x));
    if (residual <= residual_target) return mapped;
    if (residual < 0.9 * best_residual) {
      best_residual = residual;
      stalled = 0;
    } else if (++stalled >= 50) {
      prev = x;  // momentum restart
      stalled = 0;
    }
  }
  throw ConvergenceError("project_weighted: iteration budget exhausted", x);
}

Vector sample_linf_ball(const Vector& x, double r_prime, RandomSource& rng) {
  if (r_prime < 0.0)
    fail(ErrorCategory::invalid_input, "sample_linf_ball: negative radius");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = rng.uniform(x[i] - r_prime, x[i] + r_prime);
  return z;
}

}  // namespace oxo::geom
