#include "oxo/qsim.hpp"

#include <cmath>

namespace oxo::qsim {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

void validate_common(int n, int b, int c, double r, double scale,
                     int grid_budget) {
  if (n < 1) fail(ErrorCategory::invalid_input, "params: n >= 1 required");
  if (b < 2 || c < 2)
    fail(ErrorCategory::invalid_input, "params: b >= 2 and c >= 2 required");
  if (!(r > 0.0) || !(scale > 0.0))
    fail(ErrorCategory::invalid_input, "params: r > 0 and scale > 0 required");
  if (grid_budget < 2 * n || grid_budget > 30)
    fail(ErrorCategory::invalid_input, "params: grid_budget out of range");
}

std::size_t grid_size(const CircuitParams& p) {
  return std::size_t{1} << (static_cast<std::size_t>(p.n) * p.b);
}

int digit(std::size_t idx, int axis, int n, int b) {
  const int shift = b * (n - 1 - axis);
  return static_cast<int>((idx >> shift) & ((std::size_t{1} << b) - 1));
}

}  // namespace

CircuitParams gradient_params(long t, int n, double rho, double G, double beta,
                              double schedule_r, int grid_budget) {
  if (!(rho > 0.0) || rho > 1.0)
    fail(ErrorCategory::invalid_input, "gradient_params: need 0 < rho <= 1");
  if (!(G > 0.0) || !(beta > 0.0) || !(schedule_r > 0.0))
    fail(ErrorCategory::invalid_input,
         "gradient_params: G, beta, r must be positive");
  if (n < 1 || grid_budget < 2 * n || grid_budget > 30)
    fail(ErrorCategory::invalid_input,
         "gradient_params: grid_budget must lie in [2n, 30]");
  const double ratio = G * rho / (4.0 * kPi * n * n * beta * schedule_r);
  if (!(ratio > 1.0))
    fail(ErrorCategory::invalid_input,
         "gradient_params: b formula non-positive (r too large)");
  const double b_raw = std::log2(ratio);
  const double c_raw = std::log2(16.0 * kPi * n / rho) - 1.0;
  const int b_cap = grid_budget / n;
  CircuitParams p;
  p.n = n;
  p.t = t;
  p.rho = rho;
  p.r = schedule_r;
  p.scale = G;
  p.grid_budget = grid_budget;
  const int b_ceil = static_cast<int>(std::ceil(b_raw));
  const int c_ceil = static_cast<int>(std::ceil(c_raw));
  p.b = std::clamp(b_ceil, 2, b_cap);
  p.c = std::clamp(c_ceil, 2, 24);
  p.clamped = (b_ceil != p.b) || (c_ceil != p.c);
  validate_common(n, p.b, p.c, p.r, p.scale, grid_budget);
  return p;
}

CircuitParams make_params(int b, int c, int n, double r, double scale,
                          int grid_budget) {
  validate_common(n, b, c, r, scale, grid_budget);
  CircuitParams p;
  p.b = b;
  p.c = c;
  p.n = n;
  p.r = r;
  p.scale = scale;
  p.grid_budget = grid_budget;
  return p;
}

double scaled_oracle_value(const LossFunction& f, const Vector& x,
                           const CircuitParams& p, const std::vector<int>& u) {
  if (static_cast<int>(u.size()) != p.n || x.size() != u.size())
    fail(ErrorCategory::invalid_input, "scaled_oracle_value: dimension mismatch");
  const double cell = p.r / std::pow(2.0, p.b);
  const double half = std::pow(2.0, p.b - 1);
  Vector delta(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0 || u[i] >= (1 << p.b))
      fail(ErrorCategory::invalid_input, "scaled_oracle_value: u out of range");
    delta[i] = cell * (static_cast<double>(u[i]) - half);
  }
  const double pref = std::pow(2.0, p.b) / (2.0 * p.scale * p.r);
  return pref * f.value_diff(x, delta);
}

namespace {

// Shared grid walk: fills amplitudes from a per-point scaled-oracle value,
// applying the c-bit value-register rounding before exponentiation.
template <class OracleFn>
PhaseState build_state_impl(const CircuitParams& p, OracleFn&& oracle,
                            ExecPolicy pol) {
  if (p.n * p.b > p.grid_budget)
    fail(ErrorCategory::resource,
         "build_phase_state: n*b exceeds the grid budget");
  PhaseState s;
  s.n = p.n;
  s.b = p.b;
  s.amp.resize(grid_size(p));
  const double norm = std::pow(2.0, -0.5 * p.n * p.b);
  const double reg = std::pow(2.0, p.c);
  const long long reg_mask = (1LL << p.c) - 1;
  kernels::fill_phase_grid(
      s.amp.data(), s.amp.size(), norm,
      [&](std::size_t idx) {
        const double fval = oracle(idx);
        long long q = std::llround(fval * reg);
        q &= reg_mask;  // phase is periodic with period 2^c
        return static_cast<double>(q) / reg;
      },
      pol);
  return s;
}

}  // namespace

PhaseState build_phase_state(const LossFunction& f, const Vector& x,
                             const CircuitParams& p, ExecPolicy pol) {
  if (static_cast<int>(x.size()) != p.n)
    fail(ErrorCategory::invalid_input, "build_phase_state: dimension mismatch");
  const double cell = p.r / std::pow(2.0, p.b);
  const double half = std::pow(2.0, p.b - 1);
  const double pref = std::pow(2.0, p.b) / (2.0 * p.scale * p.r);
  const int n = p.n, b = p.b;
  Vector delta(x.size());
  auto oracle = [&, delta](std::size_t idx) mutable {
    for (int k = 0; k < n; ++k)
      delta[k] = cell * (static_cast<double>(digit(idx, k, n, b)) - half);
    return pref * f.value_diff(x, delta);
  };
  return build_state_impl(p, oracle, pol);
}

void apply_centered_iqft(PhaseState& s, ExecPolicy pol) {
  kernels::centered_iqft(s.amp.data(), s.n, s.b, pol);
}

std::vector<int> sample_outcome(const PhaseState& s, RandomSource& rng) {
  const double total = kernels::sum_sq(s.amp.data(), s.amp.size(),
                                       kernels::ExecPolicy::serial);
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t pick = s.amp.size() - 1;
  for (std::size_t i = 0; i < s.amp.size(); ++i) {
    acc += std::norm(s.amp[i]);
    if (acc > target) {
      pick = i;
      break;
    }
  }
  std::vector<int> m(s.n);
  for (int k = 0; k < s.n; ++k) m[k] = digit(pick, k, s.n, s.b);
  return m;
}

std::vector<int> iqft_measure(const PhaseState& state, const CircuitParams& p,
                              RandomSource& rng, ExecPolicy pol) {
  if (state.n != p.n || state.b != p.b)
    fail(ErrorCategory::invalid_input, "iqft_measure: state/params mismatch");
  PhaseState copy = state;
  apply_centered_iqft(copy, pol);
  return sample_outcome(copy, rng);
}

Vector decode_gradient(const std::vector<int>& m, const CircuitParams& p) {
  if (static_cast<int>(m.size()) != p.n)
    fail(ErrorCategory::invalid_input, "decode_gradient: dimension mismatch");
  const double unit = 2.0 * p.scale / std::pow(2.0, p.b);
  const double half = std::pow(2.0, p.b - 1);
  Vector g(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 0 || m[i] >= (1 << p.b))
      fail(ErrorCategory::invalid_input, "decode_gradient: m out of range");
    g[i] = unit * (static_cast<double>(m[i]) - half);
  }
  return g;
}

double qgb_error_bound(int n, double rho, double beta, double r) {
  if (!(rho > 0.0) || rho > 1.0)
    fail(ErrorCategory::invalid_input, "qgb_error_bound: need 0 < rho <= 1");
  const double nn = static_cast<double>(n);
  return 8.0 * kPi * nn * nn * nn * (nn / rho + 1.0) * beta * r / rho;
}

std::vector<double> fejer_distribution(double theta, int b) {
  const int n_points = 1 << b;
  std::vector<double> pr(n_points, 0.0);
  double total = 0.0;
  for (int m = 0; m < n_points; ++m) {
    const int w = m - n_points / 2;
    const double delta = theta - static_cast<double>(w) / n_points;
    const double frac = delta - std::round(delta);
    double val;
    if (std::abs(frac) < 1e-15) {
      val = 1.0;
    } else {
      const double s = std::sin(kPi * frac * n_points);
      const double d = std::sin(kPi * frac);
      const double ratio = s / d;
      val = ratio * ratio / (static_cast<double>(n_points) * n_points);
    }
    pr[m] = val;
    total += val;
  }
  for (double& v : pr) v /= total;
  return pr;
}

SimMode sim_mode_from_string(const std::string& s) {
  if (s == "full") return SimMode::full;
  if (s == "idealized") return SimMode::idealized;
  fail(ErrorCategory::invalid_input, "unknown simulator mode: " + s);
}

std::string to_string(SimMode m) {
  return m == SimMode::full ? "full" : "idealized";
}

QuantumGradEstimate estimate_gradient(const LossFunction& f, const Vector& x,
                                      long t, double rho, double G,
                                      double beta, double schedule_r,
                                      SimMode mode, RandomSource& rng,
                                      int grid_budget, ExecPolicy pol) {
  QuantumGradEstimate est;
  est.params = gradient_params(t, static_cast<int>(x.size()), rho, G, beta,
                               schedule_r, grid_budget);
  est.error_bound_l1 =
      qgb_error_bound(est.params.n, rho, beta, schedule_r);
  est.queries_used = 4;
  if (mode == SimMode::full) {
    PhaseState s = build_phase_state(f, x, est.params, pol);
    apply_centered_iqft(s, pol);
    est.outcomes = sample_outcome(s, rng);
  } else {
    if (!f.smooth())
      fail(ErrorCategory::invalid_input,
           "estimate_gradient: idealized mode requires a smooth loss");
    const Vector g = f.gradient(x);
    est.outcomes.resize(est.params.n);
    for (int i = 0; i < est.params.n; ++i) {
      const double theta = g[i] / (2.0 * G);
      const std::vector<double> pr = fejer_distribution(theta, est.params.b);
      const double target = rng.uniform01();
      double acc = 0.0;
      int pick = static_cast<int>(pr.size()) - 1;
      for (std::size_t m = 0; m < pr.size(); ++m) {
        acc += pr[m];
        if (acc > target) {
          pick = static_cast<int>(m);
          break;
        }
      }
      est.outcomes[i] = pick;
    }
  }
  est.gradient = decode_gradient(est.outcomes, est.params);
  return est;
}

Matrix estimate_hessian(const LossFunction& f, const Vector& x,
                        const CircuitParams& p, RandomSource& rng,
                        ExecPolicy pol) {
  if (static_cast<int>(x.size()) != p.n)
    fail(ErrorCategory::invalid_input, "estimate_hessian: dimension mismatch");
  const double cell = p.r / std::pow(2.0, p.b);
  const double half = std::pow(2.0, p.b - 1);
  const double pref = std::pow(2.0, p.b) / (2.0 * p.scale * p.r);
  const int n = p.n, b = p.b;
  Matrix h(x.size(), x.size());
  Vector delta(x.size());
  for (int row = 0; row < n; ++row) {
    auto oracle = [&, delta](std::size_t idx) mutable {
      for (int k = 0; k < n; ++k)
        delta[k] = cell * (static_cast<double>(digit(idx, k, n, b)) - half);
      return pref * f.gradient_diff(x, delta)[row];
    };
    PhaseState s = build_state_impl(p, oracle, pol);
    apply_centered_iqft(s, pol);
    const std::vector<int> m = sample_outcome(s, rng);
    const Vector decoded = decode_gradient(m, p);
    for (int j = 0; j < n; ++j) h(row, j) = decoded[j];
  }
  return h;
}

std::vector<double> outcome_distribution(const PhaseState& s) {
  std::vector<double> pr(s.amp.size());
  for (std::size_t i = 0; i < pr.size(); ++i) pr[i] = std::norm(s.amp[i]);
  return pr;
}

double state_norm_sq(const PhaseState& s, ExecPolicy pol) {
  return kernels::sum_sq(s.amp.data(), s.amp.size(), pol);
}

}  // namespace oxo::qsim
