#include <doctest.h>

#include <cmath>

#include "oxo/learners.hpp"

using namespace oxo;
using namespace oxo::learn;
using losses::LinearLoss;
using losses::LossFunction;
using losses::SquareLoss;
using linalg::Matrix;
using linalg::Vector;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

LearnerState state_at(const DecisionSet& k, const ParameterSchedule& sched,
                      Vector x) {
  LearnerState s;
  s.schedule = sched;
  s.x = std::move(x);
  s.a = Matrix::scaled_identity(k.dim(), sched.epsilon);
  s.a_inv = Matrix::scaled_identity(k.dim(), 1.0 / sched.epsilon);
  return s;
}
}  // namespace

TEST_CASE("theorem schedule values") {
  const ParameterSchedule s = qons_schedule(100, 2, 1.0, 2.0, 1.0, 1.0, 0.1);
  CHECK(s.eta == 0.0625);    // min(1/16, 1/2)
  CHECK(s.epsilon == 64.0);  // 1/(eta^2 D^2)
  CHECK(s.delta == doctest::Approx(10.0));
  CHECK(s.r(1) == doctest::Approx(0.1 / (kPi * 8.0 * 21.0)).epsilon(1e-12));
  for (long t : {1L, 3L, 10L})
    CHECK(s.r(2 * t) == doctest::Approx(s.r(t) / 2.0).epsilon(1e-14));
}

TEST_CASE("non-smooth schedule values") {
  const ParameterSchedule s =
      nonsmooth_qons_schedule(200, 2, 1.0, 2.0, 1.0, 0.1, 0.1);
  CHECK(s.r(1) == doctest::Approx(0.01 / (kPi * std::pow(2.0, 4.5) * 21.0))
                      .epsilon(1e-12));
  CHECK(s.r(1) == doctest::Approx(6.70e-6).epsilon(1e-2));
  CHECK(s.r_prime(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.r_prime(4) == doctest::Approx(s.r_prime(1) / 4.0).epsilon(1e-14));
  CHECK(s.beta_substitute(1) ==
        doctest::Approx(2.0 * 1.0 / (0.1 * s.r_prime(1))).epsilon(1e-12));
  CHECK(s.delta == doctest::Approx(200 * 0.2));
}

TEST_CASE("hessian schedule values") {
  const ParameterSchedule s = ons_hessian_schedule(2.0, 1.0);
  CHECK(s.eta == 0.25);
  CHECK(s.epsilon == 1.0);
}

TEST_CASE("ons hand-worked one-dimensional step") {
  const DecisionSet k = DecisionSet::box({-1.0}, {1.0});
  ParameterSchedule sched;
  sched.gamma = 1.0;
  sched.epsilon = 1.0;
  LearnerState s = state_at(k, sched, {0.5});
  const LossFunction f{SquareLoss{{1.0}, 0.0}};  // f = x^2, grad = 2x
  const LearnerState next = ons_step(s, f, k);
  // g = 1, A = 2, x' = 0.5 - (1/1) * (1/2) * 1 = 0.
  CHECK(next.a(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(next.x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(next.t == 1);
}

TEST_CASE("zero gradient is a fixed point") {
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched;
  sched.gamma = 0.5;
  sched.epsilon = 2.0;
  LearnerState s = state_at(k, sched, {0.25, -0.5});
  const LossFunction flat{LinearLoss{{0.0, 0.0}}};
  const LearnerState next = ons_step(s, flat, k);
  CHECK(next.x[0] == s.x[0]);
  CHECK(next.x[1] == s.x[1]);
  CHECK(linalg::max_abs_diff(next.a, s.a) == 0.0);
}

TEST_CASE("accumulated matrix equals the recomputed definition") {
  RandomSource rng(71);
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched;
  sched.gamma = 0.1;
  sched.epsilon = 1.5;
  LearnerState s = state_at(k, sched, {0.3, 0.3});
  Matrix recomputed = Matrix::scaled_identity(2, sched.epsilon);
  for (int t = 0; t < 200; ++t) {
    const LossFunction f{SquareLoss{
        {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, rng.uniform(-1.0, 1.0)}};
    const Vector g = f.gradient(s.x);
    linalg::add_outer_inplace(recomputed, g);
    s = ons_step(s, f, k);
    CHECK(k.contains(s.x, 1e-8));
  }
  CHECK(linalg::max_abs_diff(s.a, recomputed) <= 1e-8);
  CHECK(linalg::max_abs_diff(linalg::matmul(s.a_inv, s.a),
                             Matrix::identity(2)) <= 1e-8);
}

TEST_CASE("qons with an exact estimate reduces to ons") {
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched;
  sched.gamma = 0.25;
  sched.eta = 0.25;
  sched.epsilon = 4.0;
  LearnerState s = state_at(k, sched, {0.4, -0.2});
  const LossFunction f{SquareLoss{{0.6, 0.8}, 0.1}};

  qsim::QuantumGradEstimate est;
  est.gradient = f.gradient(s.x);
  const LearnerState via_qons = qons_step(s, est, k);
  const LearnerState via_ons = ons_step(s, f, k);
  CHECK(linalg::norm2(linalg::sub(via_qons.x, via_ons.x)) <= 1e-14);

  qsim::QuantumGradEstimate zero;
  zero.gradient = {0.0, 0.0};
  const LearnerState fixed = qons_step(s, zero, k);
  CHECK(fixed.x[0] == s.x[0]);
  CHECK(fixed.x[1] == s.x[1]);
}

TEST_CASE("qons state evolution replays from recorded estimates") {
  RandomSource rng(72);
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched = qons_schedule(50, 2, 2.0, k.diameter(), 0.5, 2.0, 0.2);
  LearnerState s = state_at(k, sched, {0.1, 0.1});
  std::vector<qsim::QuantumGradEstimate> log;
  LearnerState run = s;
  for (int t = 0; t < 30; ++t) {
    qsim::QuantumGradEstimate est;
    est.gradient = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    log.push_back(est);
    run = qons_step(run, est, k);
  }
  LearnerState replay = s;
  for (const auto& est : log) replay = qons_step(replay, est, k);
  CHECK(replay.x[0] == run.x[0]);
  CHECK(replay.x[1] == run.x[1]);
  CHECK(linalg::max_abs_diff(replay.a, run.a) == 0.0);
}

TEST_CASE("finite differences") {
  const LossFunction f{SquareLoss{{1.0}, 0.0}};
  const FdGradient fd = fd_gradient(f, {1.0}, 1e-5, 2.0);
  CHECK(fd.gradient[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fd.queries_used == 2);
  CHECK(fd.error_bound_l1 == doctest::Approx(1e-5));

  const LossFunction lin{LinearLoss{{0.7, -0.3}}};
  const FdGradient fl = fd_gradient(lin, {0.2, 0.2}, 0.1, 0.0);
  CHECK(fl.gradient[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fl.gradient[1] == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(fl.queries_used == 4);

  RandomSource rng(73);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const LossFunction q{SquareLoss{a, rng.uniform(-0.5, 0.5)}};
    const double beta = 2.0 * linalg::dot(a, a);
    const Vector x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double h = 1e-4;
    const FdGradient g = fd_gradient(q, x, h, beta);
    const double err = linalg::norm1(linalg::sub(g.gradient, q.gradient(x)));
    CHECK(err <= 2.0 * beta * h / 2.0 + 1e-9);
  }

  CHECK_THROWS_AS(fd_gradient(f, {1.0}, 0.0, 1.0), Error);
}

TEST_CASE("adagrad steps") {
  const DecisionSet k = DecisionSet::box({-1.0}, {1.0});
  ParameterSchedule sched;
  sched.gamma = 1.0;
  sched.epsilon = 1.0;
  sched.p_exponent = 0.5;
  LearnerState s = state_at(k, sched, {0.0});
  const LearnerState next = adagrad_step(s, {1.0}, k);
  // A = 2, G = sqrt(2), x' = -1/sqrt(2).
  CHECK(next.x[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));

  // p = 1 reduces to projected gradient descent with step 1/gamma.
  ParameterSchedule pg = sched;
  pg.p_exponent = 1.0;
  LearnerState s2 = state_at(k, pg, {0.5});
  const LearnerState n2 = adagrad_step(s2, {2.0}, k);
  CHECK(n2.x[0] == doctest::Approx(-1.0).epsilon(1e-12));  // 0.5 - 2 clamped

  ParameterSchedule bad = sched;
  bad.p_exponent = 0.3;
  LearnerState s3 = state_at(k, bad, {0.0});
  CHECK_THROWS_AS(adagrad_step(s3, {1.0}, k), Error);
}

TEST_CASE("hessian update learner") {
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched = ons_hessian_schedule(2.0, 1.0);
  CHECK(sched.eta == 0.25);

  // Constant-Hessian stream: A_T = eps I + 2 T a a^T.
  const Vector a = {0.6, 0.8};
  const LossFunction f{SquareLoss{a, 0.0}};
  sched.epsilon = 1.0;
  LearnerState s = state_at(k, sched, {0.5, 0.5});
  const int rounds = 25;
  for (int t = 0; t < rounds; ++t)
    s = ons_hessian_step(s, f.gradient(s.x), f.hessian(s.x), k);
  Matrix want = Matrix::scaled_identity(2, 1.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      want(i, j) += 2.0 * rounds * a[i] * a[j];
  CHECK(linalg::max_abs_diff(s.a, want) <= 1e-8);
  CHECK(linalg::max_abs_diff(linalg::matmul(s.a_inv, s.a),
                             Matrix::identity(2)) <= 1e-8);

  // Zero-Hessian (linear) losses keep A at eps I: the update reduces to
  // projected gradient with step 1/(eta eps); here 0 - 4 * 0.5 clamps to -1.
  LearnerState lin_state = state_at(k, sched, {0.0, 0.0});
  const LossFunction lin{LinearLoss{{0.5, 0.0}}};
  const LearnerState n1 =
      ons_hessian_step(lin_state, lin.gradient(lin_state.x),
                       lin.hessian(lin_state.x), k);
  CHECK(linalg::max_abs_diff(n1.a, lin_state.a) == 0.0);
  CHECK(n1.x[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(n1.x[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("estimated hessians are clipped into the PSD cone") {
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched = ons_hessian_schedule(2.0, 1.0);
  LearnerState s = state_at(k, sched, {0.2, 0.2});
  Matrix indef(2, 2);
  indef(0, 0) = 0.5;
  indef(1, 1) = -0.4;  // decode noise can produce this
  const LearnerState next =
      ons_hessian_step(s, {0.1, 0.1}, indef, k, /*clip_estimated=*/true);
  CHECK(linalg::cholesky_psd(next.a, 0.0));
  CHECK(next.a(1, 1) == doctest::Approx(sched.epsilon).epsilon(1e-12));
}

TEST_CASE("non-smooth pipeline step") {
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  ParameterSchedule sched =
      nonsmooth_qons_schedule(50, 2, 8.0, k.diameter(), 0.02, 0.1, 0.1);
  RandomSource init(3);
  LearnerState s = init_state(k, sched, init);
  const LossFunction mq{losses::MaxQuadratic{SquareLoss{{0.6, 0.8}, 0.2},
                                             SquareLoss{{-0.8, 0.6}, -0.1}}};
  RandomSource measure(4), sample(5);
  const NonsmoothStep step =
      nonsmooth_qons_step(s, mq, k, qsim::SimMode::full, measure, sample);
  CHECK(linalg::norm_inf(linalg::sub(step.z, s.x)) <= sched.r_prime(1) + 1e-15);
  CHECK(step.estimate.queries_used == 4);
  CHECK(k.contains(step.state.x, 1e-8));

  // Degenerate sampling radius: z equals x, so the step coincides with the
  // plain estimated-gradient update driven by the same measurement stream.
  RandomSource rng_a(9), rng_b(9), rng_z(10);
  const Vector z = geom::sample_linf_ball(s.x, 0.0, rng_z);
  CHECK(z[0] == s.x[0]);
  CHECK(z[1] == s.x[1]);
  const LossFunction smooth{SquareLoss{{0.6, 0.8}, 0.2}};
  const auto est_a = qsim::estimate_gradient(
      smooth, z, 1, sched.rho, sched.G, 2.0, sched.r(1), qsim::SimMode::full,
      rng_a);
  const auto est_b = qsim::estimate_gradient(
      smooth, s.x, 1, sched.rho, sched.G, 2.0, sched.r(1), qsim::SimMode::full,
      rng_b);
  const LearnerState na = qons_step(s, est_a, k);
  const LearnerState nb = qons_step(s, est_b, k);
  CHECK(na.x[0] == nb.x[0]);
  CHECK(na.x[1] == nb.x[1]);
}

TEST_CASE("exp-concave lower bound and estimated-gradient lemma gaps") {
  RandomSource rng(74);
  const DecisionSet k = DecisionSet::box({-1.0, -1.0}, {1.0, 1.0});
  for (int rep = 0; rep < 2000; ++rep) {
    const LossFunction f{SquareLoss{
        {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, rng.uniform(-1.0, 1.0)}};
    const losses::LossConstants c = losses::exact_constants(f, k);
    const double d = k.diameter();
    const double eta = std::min(1.0 / (8.0 * c.G * d), c.alpha / 2.0);
    const Vector x = k.sample(rng);
    const Vector y = k.sample(rng);
    CHECK(expconcave_lb_gap(f, x, y, eta) >= -1e-9);

    Vector est = f.gradient(x);
    est[0] += rng.uniform(-1.0, 1.0);
    est[1] += rng.uniform(-1.0, 1.0);
    CHECK(qnsgb_gap(f, x, y, est, eta, d, c.G) >= -1e-9);

    // With a zero-error estimate the lemma reduces to the lower bound.
    const Vector exact = f.gradient(x);
    const double lb = expconcave_lb_gap(f, x, y, eta);
    const double qn = qnsgb_gap(f, x, y, exact, eta, d, c.G);
    CHECK(qn == doctest::Approx(lb).epsilon(1e-12).scale(1.0));
  }
}
