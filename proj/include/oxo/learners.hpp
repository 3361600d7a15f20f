#pragma once

#include "oxo/geometry.hpp"
#include "oxo/losses.hpp"
#include "oxo/qsim.hpp"

namespace oxo::learn {

using geom::DecisionSet;
using linalg::Matrix;
using linalg::Vector;
using losses::LossFunction;

// Step sizes, matrix seed and the per-round grid/sampling radii prescribed by
// the regret theorems. r(t), r_prime(t) and beta_substitute(t) evaluate the
// closed-form schedules; which ones are live depends on r_kind.
struct ParameterSchedule {
  double eta = 0.0;
  double epsilon = 1.0;
  double gamma = 0.0;
  double p_exponent = 0.5;
  double rho = 0.0;
  double delta = 0.0;
  double p_smooth = 0.0;

  enum class RKind { none, smooth_inverse_t, nonsmooth_inverse_t2, fixed };
  RKind r_kind = RKind::none;
  double r_fixed = 0.0;
  int n = 0;
  double G = 0.0;
  double beta = 0.0;

  double r(long t) const;
  double r_prime(long t) const;         // non-smooth sampling radius 1/(t sqrt(n))
  double beta_substitute(long t) const; // n G / (p_smooth r'(t))
};

// eta = min(1/(8GD), alpha/2), epsilon = 1/(eta^2 D^2),
// r_t = rho G / (pi n^3 (n/rho + 1) beta t), delta = T rho.
ParameterSchedule qons_schedule(long T, int n, double G, double D, double alpha,
                                double beta, double rho);

// Same eta/epsilon; r_t = rho p / (pi n^{9/2} (n/rho + 1) t^2),
// r'_t = 1/(t sqrt(n)), smoothness substitute beta_t = n G / (p r'_t).
ParameterSchedule nonsmooth_qons_schedule(long T, int n, double G, double D,
                                          double alpha, double rho,
                                          double p_smooth);

// eta = 1/(2DL), epsilon = L.
ParameterSchedule ons_hessian_schedule(double D, double L);

struct LearnerState {
  Vector x;
  Matrix a;
  Matrix a_inv;
  long t = 0;  // completed rounds
  ParameterSchedule schedule;
};

// x_1 random in K, A_0 = epsilon I.
LearnerState init_state(const DecisionSet& k, const ParameterSchedule& sched,
                        RandomSource& rng);

// Rank-one quasi-Newton update shared by the exact, estimated and
// finite-difference variants: A += g g^T (inverse by Sherman-Morrison),
// x' = weighted projection of x - (1/step_denom) A^{-1} g.
LearnerState rank1_newton_step(const LearnerState& s, const Vector& g,
                               double step_denom, const DecisionSet& k);

// Exact-gradient online Newton step with step 1/gamma.
LearnerState ons_step(const LearnerState& s, const LossFunction& f,
                      const DecisionSet& k);

// Online Newton step driven by an estimated gradient, step 1/eta.
LearnerState qons_step(const LearnerState& s,
                       const qsim::QuantumGradEstimate& est,
                       const DecisionSet& k);

struct FdGradient {
  Vector gradient;
  double error_bound_l1 = 0.0;  // n beta h / 2 for beta-smooth f
  int queries_used = 0;         // 2n zeroth-order queries
};

// Central differences per coordinate.
FdGradient fd_gradient(const LossFunction& f, const Vector& x, double h,
                       double beta);

// Diagonal adaptive update: A += g g^T, G_t = diag(A)^{1-p},
// x' = weighted projection of x - (1/gamma) G_t^{-1} g.
LearnerState adagrad_step(const LearnerState& s, const Vector& grad_est,
                          const DecisionSet& k);

// Full-rank update A += H (H clipped to the PSD cone when it came from the
// estimator), inverse recomputed directly, step 1/eta on the exact gradient.
LearnerState ons_hessian_step(const LearnerState& s, const Vector& grad,
                              const Matrix& hess, const DecisionSet& k,
                              bool clip_estimated = false);

struct NonsmoothStep {
  LearnerState state;
  Vector z;  // sample point the gradient was estimated at
  qsim::QuantumGradEstimate estimate;
};

// Non-smooth pipeline: sample z in the sup-norm ball of radius r'_t, estimate
// the gradient there with the t^2 schedule and the smoothness substitute, use
// it as the round's gradient estimate in the standard update.
NonsmoothStep nonsmooth_qons_step(const LearnerState& s, const LossFunction& f,
                                  const DecisionSet& k, qsim::SimMode mode,
                                  RandomSource& measure_rng,
                                  RandomSource& sample_rng,
                                  int grid_budget = qsim::kDefaultGridBudget,
                                  qsim::ExecPolicy pol = qsim::ExecPolicy::parallel);

// Slack of the exp-concave lower bound
// f(y) >= f(x) + grad^T (y-x) + (eta/2) (grad^T (y-x))^2; negative = violated.
double expconcave_lb_gap(const LossFunction& f, const Vector& x,
                         const Vector& y, double eta);

// Slack of the estimated-gradient lower bound with l1 error terms
// (gradient error measured at x).
double qnsgb_gap(const LossFunction& f, const Vector& x, const Vector& y,
                 const Vector& grad_est, double eta, double D, double G);

// Non-smooth variant: error measured at the sample point z, with the extra
// -3 G sqrt(n) r' - n r'^2 G / 2 terms.
double qnsgbs_gap(const LossFunction& f, const Vector& x, const Vector& y,
                  const Vector& z, const Vector& grad_est, double eta, double D,
                  double G, double r_prime);

}  // namespace oxo::learn
