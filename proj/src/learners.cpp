#include "oxo/learners.hpp"

#include <cmath>

namespace oxo::learn {

using linalg::axpy;
using linalg::dot;
using linalg::matvec;
using linalg::norm1;
using linalg::norm2;
using linalg::scale;
using linalg::sub;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

double ParameterSchedule::r(long t) const {
  const double nn = static_cast<double>(n);
  const double tt = static_cast<double>(t);
  switch (r_kind) {
    case RKind::smooth_inverse_t:
      return rho * G / (kPi * nn * nn * nn * (nn / rho + 1.0) * beta * tt);
    case RKind::nonsmooth_inverse_t2:
      return rho * p_smooth /
             (kPi * std::pow(nn, 4.5) * (nn / rho + 1.0) * tt * tt);
    case RKind::fixed:
      return r_fixed;
    case RKind::none:
      break;
  }
  fail(ErrorCategory::invalid_input, "schedule: r(t) not configured");
}

double ParameterSchedule::r_prime(long t) const {
  if (r_kind != RKind::nonsmooth_inverse_t2)
    fail(ErrorCategory::invalid_input, "schedule: r'(t) only in non-smooth mode");
  return 1.0 / (static_cast<double>(t) * std::sqrt(static_cast<double>(n)));
}

double ParameterSchedule::beta_substitute(long t) const {
  if (r_kind != RKind::nonsmooth_inverse_t2)
    fail(ErrorCategory::invalid_input,
         "schedule: beta substitute only in non-smooth mode");
  return static_cast<double>(n) * G / (p_smooth * r_prime(t));
}

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0))
    fail(ErrorCategory::invalid_input,
         std::string("schedule: ") + name + " must be positive");
}

}  // namespace

ParameterSchedule qons_schedule(long T, int n, double G, double D, double alpha,
                                double beta, double rho) {
  check_positive(G, "G");
  check_positive(D, "D");
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(rho, "rho");
  ParameterSchedule s;
  s.eta = std::min(1.0 / (8.0 * G * D), alpha / 2.0);
  s.epsilon = 1.0 / (s.eta * s.eta * D * D);
  s.rho = rho;
  s.delta = static_cast<double>(T) * rho;
  s.r_kind = ParameterSchedule::RKind::smooth_inverse_t;
  s.n = n;
  s.G = G;
  s.beta = beta;
  return s;
}

ParameterSchedule nonsmooth_qons_schedule(long T, int n, double G, double D,
                                          double alpha, double rho,
                                          double p_smooth) {
  check_positive(G, "G");
  check_positive(D, "D");
  check_positive(alpha, "alpha");
  check_positive(rho, "rho");
  check_positive(p_smooth, "p_smooth");
  ParameterSchedule s;
  s.eta = std::min(1.0 / (8.0 * G * D), alpha / 2.0);
  s.epsilon = 1.0 / (s.eta * s.eta * D * D);
  s.rho = rho;
  s.delta = static_cast<double>(T) * (rho + p_smooth);
  s.p_smooth = p_smooth;
  s.r_kind = ParameterSchedule::RKind::nonsmooth_inverse_t2;
  s.n = n;
  s.G = G;
  return s;
}

ParameterSchedule ons_hessian_schedule(double D, double L) {
  check_positive(D, "D");
  check_positive(L, "L");
  ParameterSchedule s;
  s.eta = 1.0 / (2.0 * D * L);
  s.epsilon = L;
  return s;
}

LearnerState init_state(const DecisionSet& k, const ParameterSchedule& sched,
                        RandomSource& rng) {
  LearnerState s;
  s.schedule = sched;
  s.x = k.sample(rng);
  const std::size_t n = k.dim();
  s.a = Matrix::scaled_identity(n, sched.epsilon);
  s.a_inv = Matrix::scaled_identity(n, 1.0 / sched.epsilon);
  s.t = 0;
  return s;
}

LearnerState rank1_newton_step(const LearnerState& s, const Vector& g,
                               double step_denom, const DecisionSet& k) {
  if (!(step_denom > 0.0))
    fail(ErrorCategory::invalid_input, "rank1_newton_step: step must be > 0");
  LearnerState next = s;
  linalg::add_outer_inplace(next.a, g);
  linalg::symmetrize(next.a);
  next.a_inv = linalg::smw_rank1_inverse_update(s.a_inv, g);
  Vector target = s.x;
  axpy(target, -1.0 / step_denom, matvec(next.a_inv, g));
  next.x = geom::project_weighted(k, next.a, target);
  next.t = s.t + 1;
  return next;
}

LearnerState ons_step(const LearnerState& s, const LossFunction& f,
                      const DecisionSet& k) {
  return rank1_newton_step(s, f.gradient(s.x), s.schedule.gamma, k);
}

LearnerState qons_step(const LearnerState& s,
                       const qsim::QuantumGradEstimate& est,
                       const DecisionSet& k) {
  return rank1_newton_step(s, est.gradient, s.schedule.eta, k);
}

FdGradient fd_gradient(const LossFunction& f, const Vector& x, double h,
                       double beta) {
  if (!(h > 0.0))
    fail(ErrorCategory::invalid_input, "fd_gradient: h must be > 0");
  const std::size_t n = x.size();
  FdGradient out;
  out.gradient.resize(n);
  Vector step(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    step[i] = h;
    const double up = f.value_diff(x, step);
    step[i] = -h;
    const double down = f.value_diff(x, step);
    step[i] = 0.0;
    out.gradient[i] = (up - down) / (2.0 * h);
  }
  out.error_bound_l1 = static_cast<double>(n) * beta * h / 2.0;
  out.queries_used = static_cast<int>(2 * n);
  return out;
}

LearnerState adagrad_step(const LearnerState& s, const Vector& grad_est,
                          const DecisionSet& k) {
  const ParameterSchedule& sc = s.schedule;
  if (sc.p_exponent < 0.5 || sc.p_exponent > 1.0)
    fail(ErrorCategory::invalid_input, "adagrad_step: p must be in [0.5, 1]");
  if (!(sc.gamma > 0.0))
    fail(ErrorCategory::invalid_input, "adagrad_step: gamma must be > 0");
  LearnerState next = s;
  linalg::add_outer_inplace(next.a, grad_est);
  linalg::symmetrize(next.a);
  next.a_inv = linalg::smw_rank1_inverse_update(s.a_inv, grad_est);
  const Matrix gt = linalg::diag_power(next.a, 1.0 - sc.p_exponent);
  const Matrix gt_inv = linalg::diag_power(next.a, -(1.0 - sc.p_exponent));
  Vector target = s.x;
  axpy(target, -1.0 / sc.gamma, matvec(gt_inv, grad_est));
  next.x = geom::project_weighted(k, gt, target);
  next.t = s.t + 1;
  return next;
}

LearnerState ons_hessian_step(const LearnerState& s, const Vector& grad,
                              const Matrix& hess, const DecisionSet& k,
                              bool clip_estimated) {
  LearnerState next = s;
  Matrix h = hess;
  if (clip_estimated) h = linalg::clip_psd(h);
  next.a = linalg::add(s.a, h);
  linalg::symmetrize(next.a);
  if (!linalg::cholesky_psd(next.a, 0.0))
    fail(ErrorCategory::degenerate,
         "ons_hessian_step: accumulated matrix lost positive definiteness");
  next.a_inv = linalg::invert(next.a);
  linalg::symmetrize(next.a_inv);
  Vector target = s.x;
  axpy(target, -1.0 / s.schedule.eta, matvec(next.a_inv, grad));
  next.x = geom::project_weighted(k, next.a, target);
  next.t = s.t + 1;
  return next;
}

NonsmoothStep nonsmooth_qons_step(const LearnerState& s, const LossFunction& f,
                                  const DecisionSet& k, qsim::SimMode mode,
                                  RandomSource& measure_rng,
                                  RandomSource& sample_rng, int grid_budget,
                                  qsim::ExecPolicy pol) {
  const ParameterSchedule& sc = s.schedule;
  const long t = s.t + 1;
  NonsmoothStep out;
  out.z = geom::sample_linf_ball(s.x, sc.r_prime(t), sample_rng);
  out.estimate = qsim::estimate_gradient(
      f, out.z, t, sc.rho, sc.G, sc.beta_substitute(t), sc.r(t), mode,
      measure_rng, grid_budget, pol);
  out.state = rank1_newton_step(s, out.estimate.gradient, sc.eta, k);
  return out;
}

double expconcave_lb_gap(const LossFunction& f, const Vector& x,
                         const Vector& y, double eta) {
  const Vector g = f.gradient(x);
  const Vector d = sub(y, x);
  const double gd = dot(g, d);
  return f.value(y) - (f.value(x) + gd + 0.5 * eta * gd * gd);
}

double qnsgb_gap(const LossFunction& f, const Vector& x, const Vector& y,
                 const Vector& grad_est, double eta, double D, double G) {
  const Vector d = sub(y, x);
  const double gd = dot(grad_est, d);
  const double err = norm1(sub(f.gradient(x), grad_est));
  const double rhs = f.value(x) + gd + 0.5 * eta * gd * gd -
                     (9.0 * D / 8.0) * err - D / (16.0 * G) * err * err;
  return f.value(y) - rhs;
}

double qnsgbs_gap(const LossFunction& f, const Vector& x, const Vector& y,
                  const Vector& z, const Vector& grad_est, double eta, double D,
                  double G, double r_prime) {
  const Vector d = sub(y, x);
  const double gd = dot(grad_est, d);
  const double err = norm1(sub(f.gradient(z), grad_est));
  const double sqrt_n = std::sqrt(static_cast<double>(x.size()));
  const double rhs = f.value(x) + gd + 0.5 * eta * gd * gd -
                     (9.0 * D / 8.0) * err - D / (16.0 * G) * err * err -
                     3.0 * G * sqrt_n * r_prime -
                     static_cast<double>(x.size()) * r_prime * r_prime * G / 2.0;
  return f.value(y) - rhs;
}

}  // namespace oxo::learn
