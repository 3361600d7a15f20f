#include "oxo/losses.hpp"

#include <algorithm>
#include <cmath>

namespace oxo::losses {

using linalg::add;
using linalg::axpy;
using linalg::dot;
using linalg::norm2;
using linalg::outer;
using linalg::scale;
using linalg::sub;

namespace {

double square_value(const SquareLoss& f, const Vector& x) {
  const double s = dot(f.a, x) - f.b;
  return s * s;
}

// (a.(x+d)-b)^2 - (a.x-b)^2 = (a.d) * (2(a.x-b) + a.d)
double square_value_diff(const SquareLoss& f, const Vector& x,
                         const Vector& d) {
  const double s = dot(f.a, d);
  return s * (2.0 * (dot(f.a, x) - f.b) + s);
}

Vector square_gradient(const SquareLoss& f, const Vector& x) {
  return scale(f.a, 2.0 * (dot(f.a, x) - f.b));
}

double log_inner(const LogLoss& f, const Vector& x) {
  const double p = dot(f.a, x);
  if (!(p > 0.0))
    fail(ErrorCategory::domain, "log_loss: a^T x <= 0");
  return p;
}

}  // namespace

double LossFunction::value(const Vector& x) const {
  if (is<SquareLoss>()) return square_value(as<SquareLoss>(), x);
  if (is<LogLoss>()) return -std::log(log_inner(as<LogLoss>(), x));
  if (is<LinearLoss>()) return dot(as<LinearLoss>().c, x);
  const MaxQuadratic& m = as<MaxQuadratic>();
  return std::max(square_value(m.q1, x), square_value(m.q2, x));
}

double LossFunction::value_diff(const Vector& x, const Vector& delta) const {
  if (is<SquareLoss>()) return square_value_diff(as<SquareLoss>(), x, delta);
  if (is<LinearLoss>()) return dot(as<LinearLoss>().c, delta);
  if (is<LogLoss>()) {
    const LogLoss& f = as<LogLoss>();
    const double p = log_inner(f, x);
    const double s = dot(f.a, delta);
    if (!(p + s > 0.0))
      fail(ErrorCategory::domain, "log_loss: a^T (x+delta) <= 0");
    return -std::log1p(s / p);
  }
  const MaxQuadratic& m = as<MaxQuadratic>();
  const double v1 = square_value(m.q1, x);
  const double v2 = square_value(m.q2, x);
  const double d1 = square_value_diff(m.q1, x, delta);
  const double d2 = square_value_diff(m.q2, x, delta);
  const int before = (v1 >= v2) ? 0 : 1;
  const int after = (v1 + d1 >= v2 + d2) ? 0 : 1;
  if (before == after) return before == 0 ? d1 : d2;
  // Branch switch: the values are close at the crossing, so the residual
  // v_after - v_before stays of the order of the diffs.
  return after == 0 ? (v1 - v2) + d1 : (v2 - v1) + d2;
}

Vector LossFunction::gradient(const Vector& x) const {
  if (is<SquareLoss>()) return square_gradient(as<SquareLoss>(), x);
  if (is<LinearLoss>()) return as<LinearLoss>().c;
  if (is<LogLoss>()) {
    const LogLoss& f = as<LogLoss>();
    return scale(f.a, -1.0 / log_inner(f, x));
  }
  const MaxQuadratic& m = as<MaxQuadratic>();
  // First branch wins exact ties (any subgradient is valid downstream).
  if (square_value(m.q1, x) >= square_value(m.q2, x))
    return square_gradient(m.q1, x);
  return square_gradient(m.q2, x);
}

Vector LossFunction::gradient_diff(const Vector& x, const Vector& delta) const {
  if (is<LinearLoss>()) return Vector(x.size(), 0.0);
  if (is<SquareLoss>()) {
    const SquareLoss& f = as<SquareLoss>();
    return scale(f.a, 2.0 * dot(f.a, delta));
  }
  if (is<LogLoss>()) {
    const LogLoss& f = as<LogLoss>();
    const double p = log_inner(f, x);
    const double s = dot(f.a, delta);
    if (!(p + s > 0.0))
      fail(ErrorCategory::domain, "log_loss: a^T (x+delta) <= 0");
    return scale(f.a, s / (p * (p + s)));
  }
  const MaxQuadratic& m = as<MaxQuadratic>();
  const double v1 = square_value(m.q1, x);
  const double v2 = square_value(m.q2, x);
  const double d1 = square_value_diff(m.q1, x, delta);
  const double d2 = square_value_diff(m.q2, x, delta);
  const int before = (v1 >= v2) ? 0 : 1;
  const int after = (v1 + d1 >= v2 + d2) ? 0 : 1;
  if (before == after) {
    const SquareLoss& q = before == 0 ? m.q1 : m.q2;
    return scale(q.a, 2.0 * dot(q.a, delta));
  }
  const Vector shifted = add(x, delta);
  const SquareLoss& qa = after == 0 ? m.q1 : m.q2;
  const SquareLoss& qb = before == 0 ? m.q1 : m.q2;
  return sub(square_gradient(qa, shifted), square_gradient(qb, x));
}

Matrix LossFunction::hessian(const Vector& x) const {
  if (is<LinearLoss>()) return Matrix(x.size(), x.size());
  if (is<SquareLoss>()) {
    const SquareLoss& f = as<SquareLoss>();
    return outer(scale(f.a, 2.0), f.a);
  }
  if (is<LogLoss>()) {
    const LogLoss& f = as<LogLoss>();
    const double p = log_inner(f, x);
    return outer(scale(f.a, 1.0 / (p * p)), f.a);
  }
  const MaxQuadratic& m = as<MaxQuadratic>();
  const double v1 = square_value(m.q1, x);
  const double v2 = square_value(m.q2, x);
  if (v1 == v2)
    fail(ErrorCategory::domain, "max_quadratic: not differentiable at a tie");
  const SquareLoss& q = v1 > v2 ? m.q1 : m.q2;
  return outer(scale(q.a, 2.0), q.a);
}

std::size_t LossFunction::dim() const {
  if (is<SquareLoss>()) return as<SquareLoss>().a.size();
  if (is<LogLoss>()) return as<LogLoss>().a.size();
  if (is<LinearLoss>()) return as<LinearLoss>().c.size();
  return as<MaxQuadratic>().q1.a.size();
}

std::string LossFunction::family_name() const {
  if (is<SquareLoss>()) return "square_loss";
  if (is<LogLoss>()) return "log_loss";
  if (is<LinearLoss>()) return "linear_loss";
  return "max_quadratic";
}

bool expconcavity_certificate(const LossFunction& f, const DecisionSet& k,
                              double alpha, int segments, RandomSource& rng,
                              double tol) {
  static const double lambdas[] = {0.25, 0.5, 0.75};
  for (int s = 0; s < segments; ++s) {
    const Vector u = k.sample(rng);
    const Vector v = k.sample(rng);
    const double gu = std::exp(-alpha * f.value(u));
    const double gv = std::exp(-alpha * f.value(v));
    for (double lam : lambdas) {
      Vector mid = scale(u, lam);
      axpy(mid, 1.0 - lam, v);
      const double gm = std::exp(-alpha * f.value(mid));
      if (gm < lam * gu + (1.0 - lam) * gv - tol) return false;
    }
  }
  return true;
}

namespace {

// sup_{x in k} ||x||_2
double max_norm2(const DecisionSet& k) {
  if (k.is_ball()) {
    const geom::Ball& b = k.as_ball();
    return norm2(b.center) + b.radius;
  }
  const geom::Box& b = k.as_box();
  double s = 0.0;
  for (std::size_t i = 0; i < b.lower.size(); ++i) {
    const double m = std::max(std::abs(b.lower[i]), std::abs(b.upper[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

// sup_{x in k} |a^T x - b|
double max_abs_affine(const Vector& a, double b, const DecisionSet& k) {
  if (k.is_ball()) {
    const geom::Ball& bb = k.as_ball();
    return std::abs(dot(a, bb.center) - b) + norm2(a) * bb.radius;
  }
  const geom::Box& bx = k.as_box();
  double center = -b, spread = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    center += a[i] * 0.5 * (bx.lower[i] + bx.upper[i]);
    spread += std::abs(a[i]) * 0.5 * (bx.upper[i] - bx.lower[i]);
  }
  return std::abs(center) + spread;
}

// inf_{x in k} a^T x
double min_affine(const Vector& a, const DecisionSet& k) {
  if (k.is_ball()) {
    const geom::Ball& bb = k.as_ball();
    return dot(a, bb.center) - norm2(a) * bb.radius;
  }
  const geom::Box& bx = k.as_box();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * (a[i] >= 0.0 ? bx.lower[i] : bx.upper[i]);
  return s;
}

LossConstants square_exact(const SquareLoss& f, const DecisionSet& k) {
  const double na = norm2(f.a);
  const double m = max_abs_affine(f.a, f.b, k);
  LossConstants c;
  c.G = 2.0 * na * m;
  c.beta = 2.0 * na * na;
  c.L = c.beta;
  c.alpha = m > 0.0 ? std::min(1.0 / (2.0 * m * m), 1e6) : 1e6;
  c.smooth = true;
  return c;
}

}  // namespace

LossConstants exact_constants(const LossFunction& f, const DecisionSet& k) {
  if (f.is<SquareLoss>()) return square_exact(f.as<SquareLoss>(), k);
  if (f.is<LinearLoss>()) {
    LossConstants c;
    c.G = norm2(f.as<LinearLoss>().c);
    c.beta = 0.0;
    c.L = 0.0;
    c.alpha = 0.0;  // linear functions are exp-concave only at alpha = 0
    c.smooth = true;
    return c;
  }
  if (f.is<LogLoss>()) {
    const LogLoss& l = f.as<LogLoss>();
    const double m = min_affine(l.a, k);
    if (!(m > 0.0))
      fail(ErrorCategory::domain, "log_loss: a^T x not positive on the set");
    LossConstants c;
    const double na = norm2(l.a);
    c.G = na / m;
    c.beta = na * na / (m * m);
    c.L = c.beta;
    c.alpha = 1.0;  // e^{log(a^T x)} = a^T x is linear, hence concave
    c.smooth = true;
    return c;
  }
  const MaxQuadratic& m = f.as<MaxQuadratic>();
  const LossConstants c1 = square_exact(m.q1, k);
  const LossConstants c2 = square_exact(m.q2, k);
  LossConstants c;
  c.G = std::max(c1.G, c2.G);
  c.alpha = std::min(c1.alpha, c2.alpha);
  c.smooth = false;
  return c;
}

LossConstants certify_constants(const LossFunction& f, const DecisionSet& k,
                                int samples, RandomSource& rng) {
  if (samples < 100)
    fail(ErrorCategory::invalid_input, "certify_constants: samples >= 100");
  double max_grad = 0.0;
  double max_curv = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = k.sample(rng);
    max_grad = std::max(max_grad, norm2(f.gradient(x)));
    if (f.smooth())
      max_curv = std::max(max_curv, linalg::trace(f.hessian(x)));
  }
  LossConstants c;
  c.smooth = f.smooth();
  c.G = 1.25 * std::max(max_grad, 1e-12);
  if (c.smooth) {
    c.beta = 1.25 * std::max(max_curv, 1e-12);
    c.L = c.beta;
  }

  // Largest alpha surviving the chord certificate, then a 1.25 margin.
  const int segs = 200;
  double pass = 0.0, cand = 1.0;
  for (int i = 0; i < 40 && pass == 0.0; ++i) {
    if (expconcavity_certificate(f, k, cand, segs, rng))
      pass = cand;
    else
      cand *= 0.5;
  }
  if (pass == 0.0)
    fail(ErrorCategory::internal, "certify_constants: no passing alpha found");
  double hi = pass * 2.0;
  if (expconcavity_certificate(f, k, hi, segs, rng)) {
    while (hi < 1e6 && expconcavity_certificate(f, k, hi * 2.0, segs, rng))
      hi *= 2.0;
    pass = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (pass + hi);
    if (expconcavity_certificate(f, k, mid, segs, rng))
      pass = mid;
    else
      hi = mid;
  }
  double alpha = pass / 1.25;
  int shrink = 0;
  while (!expconcavity_certificate(f, k, alpha, segs, rng)) {
    alpha *= 0.5;
    if (++shrink > 60)
      fail(ErrorCategory::internal,
           "certify_constants: certificate keeps failing");
  }
  c.alpha = alpha;
  return c;
}

AdversaryKind adversary_kind_from_string(const std::string& s) {
  if (s == "oblivious_square") return AdversaryKind::oblivious_square;
  if (s == "rotating_square") return AdversaryKind::rotating_square;
  if (s == "oblivious_log") return AdversaryKind::oblivious_log;
  if (s == "adaptive_square") return AdversaryKind::adaptive_square;
  if (s == "oblivious_maxquad") return AdversaryKind::oblivious_maxquad;
  fail(ErrorCategory::invalid_input, "unknown adversary kind: " + s);
}

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::oblivious_square: return "oblivious_square";
    case AdversaryKind::rotating_square: return "rotating_square";
    case AdversaryKind::oblivious_log: return "oblivious_log";
    case AdversaryKind::adaptive_square: return "adaptive_square";
    case AdversaryKind::oblivious_maxquad: return "oblivious_maxquad";
  }
  return "?";
}

Adversary::Adversary(AdversaryKind kind, std::uint64_t seed,
                     const DecisionSet& domain, double offset)
    : kind_(kind), seed_(seed), domain_(domain), offset_(offset) {}

namespace {

Vector random_unit(RandomSource& rng, std::size_t n) {
  Vector a(n);
  double na = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) a[i] = rng.normal();
    na = norm2(a);
  } while (na == 0.0);
  return scale(a, 1.0 / na);
}

// Unit coefficient vector for log losses, componentwise in
// [0.6, 1.4]/norm so the inner product stays positive on positive sets.
Vector random_log_direction(RandomSource& rng, std::size_t n) {
  Vector a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = rng.uniform(0.6, 1.4);
  return scale(a, 1.0 / norm2(a));
}

constexpr double kGoldenAngle = 2.399963229728653;

}  // namespace

LossFunction Adversary::next(const Vector& x_t, long t) {
  // The loss is a pure function of (seed, t, x_t); re-querying the current
  // round is allowed and reproduces the same loss.
  if (t != last_t_ + 1 && t != last_t_)
    fail(ErrorCategory::invalid_input, "adversary: t must advance by one");
  last_t_ = t;
  RandomSource rs = derive_stream(seed_, "adversary-round",
                                  static_cast<std::uint64_t>(t));
  const std::size_t n = domain_.dim();
  switch (kind_) {
    case AdversaryKind::oblivious_square: {
      const Vector a = random_unit(rs, n);
      const Vector m = domain_.sample(rs);
      return LossFunction(SquareLoss{a, dot(a, m)});
    }
    case AdversaryKind::rotating_square: {
      Vector a(n, 0.0);
      if (n == 1) {
        a[0] = 1.0;
      } else {
        const double psi = kGoldenAngle * static_cast<double>(t);
        const std::size_t i = static_cast<std::size_t>(t) % n;
        const std::size_t j = (i + 1) % n;
        a[i] = std::cos(psi);
        a[j] = std::sin(psi);
      }
      const double b = rs.uniform(-offset_, offset_);
      return LossFunction(SquareLoss{a, b});
    }
    case AdversaryKind::oblivious_log:
      return LossFunction(LogLoss{random_log_direction(rs, n)});
    case AdversaryKind::adaptive_square: {
      const Vector a = random_unit(rs, n);
      const double sign = rs.uniform01() < 0.5 ? -1.0 : 1.0;
      return LossFunction(SquareLoss{a, dot(a, x_t) + sign * offset_});
    }
    case AdversaryKind::oblivious_maxquad: {
      const Vector a1 = random_unit(rs, n);
      const Vector m1 = domain_.sample(rs);
      const Vector a2 = random_unit(rs, n);
      const Vector m2 = domain_.sample(rs);
      return LossFunction(
          MaxQuadratic{SquareLoss{a1, dot(a1, m1)}, SquareLoss{a2, dot(a2, m2)}});
    }
  }
  fail(ErrorCategory::internal, "adversary: unhandled kind");
}

LossConstants Adversary::uniform_constants(const DecisionSet& eval_set) const {
  LossConstants c;
  const double xmax = max_norm2(eval_set);
  const double mmax = max_norm2(domain_);
  switch (kind_) {
    case AdversaryKind::oblivious_square:
    case AdversaryKind::rotating_square:
    case AdversaryKind::adaptive_square:
    case AdversaryKind::oblivious_maxquad: {
      double bmax = 0.0;
      if (kind_ == AdversaryKind::rotating_square)
        bmax = offset_;
      else if (kind_ == AdversaryKind::adaptive_square)
        bmax = mmax + offset_;
      else
        bmax = mmax;
      const double m = xmax + bmax;  // sup |a^T x - b| for unit a
      c.G = 2.0 * m;
      c.alpha = 1.0 / (2.0 * m * m);
      c.smooth = kind_ != AdversaryKind::oblivious_maxquad;
      if (c.smooth) {
        c.beta = 2.0;
        c.L = 2.0;
      }
      return c;
    }
    case AdversaryKind::oblivious_log: {
      // Worst case over the coefficient family [0.6,1.4]^n normalized.
      const std::size_t n = eval_set.dim();
      Vector amin(n, 0.6 / (1.4 * std::sqrt(static_cast<double>(n))));
      const double m = min_affine(amin, eval_set);
      if (!(m > 1e-3))
        fail(ErrorCategory::invalid_input,
             "oblivious_log: set too close to the log domain boundary");
      c.G = 1.0 / m;
      c.beta = 1.0 / (m * m);
      c.L = c.beta;
      c.alpha = 1.0;
      c.smooth = true;
      return c;
    }
  }
  fail(ErrorCategory::internal, "adversary: unhandled kind");
}

double total_value(const std::vector<LossFunction>& fs, const Vector& x) {
  double s = 0.0;
  for (const LossFunction& f : fs) s += f.value(x);
  return s;
}

namespace {

Vector total_gradient(const std::vector<LossFunction>& fs, const Vector& x) {
  Vector g(x.size(), 0.0);
  for (const LossFunction& f : fs) axpy(g, 1.0, f.gradient(x));
  return g;
}

// Projected gradient with the exact smoothness constant of the stream;
// certified means the gradient-mapping optimality bound ||G_L|| * diam fell
// below tol (for convex F, F(x+) - F* <= ||G_L(x)|| * D).
std::pair<Vector, bool> pgd_smooth(const std::vector<LossFunction>& fs,
                                   const DecisionSet& k, Vector x, double tol,
                                   int max_iter) {
  const double diam = k.diameter();
  double lip = 0.0;
  for (const LossFunction& f : fs)
    lip += exact_constants(f, k).beta.value_or(0.0);
  if (!(lip > 0.0)) lip = 1.0;  // all-linear stream
  for (int it = 0; it < max_iter; ++it) {
    const Vector g = total_gradient(fs, x);
    Vector p = x;
    axpy(p, -1.0 / lip, g);
    p = k.project_euclidean(p);
    const double residual = lip * norm2(sub(x, p));
    x = std::move(p);
    if (residual * diam <= tol) return {x, true};
  }
  return {x, false};
}

Vector subgradient_descent(const std::vector<LossFunction>& fs,
                           const DecisionSet& k, Vector x, int max_iter) {
  Vector best = x;
  double best_val = total_value(fs, x);
  const double diam = k.diameter();
  for (int it = 1; it <= max_iter; ++it) {
    const Vector g = total_gradient(fs, x);
    const double ng = norm2(g);
    if (ng == 0.0) break;
    const double step = diam / (ng * std::sqrt(static_cast<double>(it)));
    axpy(x, -step, g);
    x = k.project_euclidean(x);
    const double v = total_value(fs, x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  // Pattern-search polish around the incumbent.
  const std::size_t n = k.dim();
  double scale_step = diam / 8.0;
  while (scale_step > 1e-10) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vector trial = best;
        trial[i] += sgn * scale_step;
        trial = k.project_euclidean(trial);
        const double v = total_value(fs, trial);
        if (v < best_val) {
          best_val = v;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) scale_step *= 0.5;
  }
  return best;
}

}  // namespace

Vector best_fixed(const std::vector<LossFunction>& fs, const DecisionSet& k,
                  double tol, RandomSource& rng, int starts) {
  if (fs.empty())
    fail(ErrorCategory::invalid_input, "best_fixed: empty loss sequence");
  bool smooth_all = true;
  for (const LossFunction& f : fs) smooth_all = smooth_all && f.smooth();

  Vector best;
  double best_val = 0.0;
  bool any_certified = false;
  for (int s = 0; s < std::max(starts, 1); ++s) {
    Vector x0 = s == 0 ? k.project_euclidean(Vector(k.dim(), 0.0))
                       : k.sample(rng);
    Vector x;
    bool certified = false;
    if (smooth_all) {
      auto [sol, ok] = pgd_smooth(fs, k, std::move(x0), tol, 5000);
      x = std::move(sol);
      certified = ok;
    } else {
      x = subgradient_descent(fs, k, std::move(x0), 3000);
    }
    const double v = total_value(fs, x);
    if (best.empty() || v < best_val) {
      best_val = v;
      best = std::move(x);
    }
    any_certified = any_certified || certified;
  }
  if (smooth_all && !any_certified)
    throw ConvergenceError("best_fixed: no start met the tolerance", best);
  return best;
}

}  // namespace oxo::losses
