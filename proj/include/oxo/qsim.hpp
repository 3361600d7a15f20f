#pragma once

#include <complex>
#include <string>
#include <vector>

#include "oxo/losses.hpp"
#include "oxo/qsim_kernels.hpp"
#include "oxo/rng.hpp"

namespace oxo::qsim {

using kernels::ExecPolicy;
using linalg::Matrix;
using linalg::Vector;
using losses::LossFunction;

inline constexpr int kDefaultGridBudget = 24;

// Geometry of one estimation circuit: b qubits per coordinate register,
// c qubits in the value register, grid scale r, and the normalization
// constant (G in gradient mode, L in Hessian mode).
struct CircuitParams {
  int b = 0;
  int c = 0;
  int n = 0;
  double r = 0.0;
  double scale = 0.0;
  long t = 0;
  double rho = 0.0;
  bool clamped = false;
  int grid_budget = kDefaultGridBudget;
};

// b = ceil(log2(G rho / (4 pi n^2 beta r))) clamped to [2, grid_budget/n],
// c = ceil(log2(16 pi n / rho) - 1) clamped to [2, 24]. `clamped` records a
// binding cap. Throws invalid_input when the b formula is non-positive
// (r too large for the requested accuracy).
CircuitParams gradient_params(long t, int n, double rho, double G, double beta,
                              double schedule_r,
                              int grid_budget = kDefaultGridBudget);

// Directly specified register sizes (used by the Hessian circuit and tests).
CircuitParams make_params(int b, int c, int n, double r, double scale,
                          int grid_budget = kDefaultGridBudget);

// Amplitudes over the n-register grid, indexed row-major by
// (u_1, ..., u_n) in {0, ..., 2^b - 1}^n with u_1 most significant.
struct PhaseState {
  int n = 0;
  int b = 0;
  std::vector<std::complex<double>> amp;
  std::size_t size() const { return amp.size(); }
};

// F(u) = (2^b / (2 G r)) * [f(x + (r/2^b)(u - 2^{b-1} 1)) - f(x)]
double scaled_oracle_value(const LossFunction& f, const Vector& x,
                           const CircuitParams& p, const std::vector<int>& u);

// State after oracle query, phase kickback and uncompute:
// amp[u] = 2^{-nb/2} exp(2 pi i round(F(u) 2^c) / 2^c). The c-bit rounding
// models the finite value register. Throws resource when n*b exceeds the
// grid budget.
PhaseState build_phase_state(const LossFunction& f, const Vector& x,
                             const CircuitParams& p,
                             ExecPolicy pol = ExecPolicy::parallel);

// Centered-label inverse Fourier transform on each coordinate register.
void apply_centered_iqft(PhaseState& s, ExecPolicy pol = ExecPolicy::parallel);

// Joint draw of (m_1, ..., m_n) from the squared magnitudes of a transformed
// state. Outcomes are offset-binary: zero frequency reads m = 2^{b-1}.
std::vector<int> sample_outcome(const PhaseState& transformed,
                                RandomSource& rng);

// Convenience: transform a copy of `state`, then sample.
std::vector<int> iqft_measure(const PhaseState& state, const CircuitParams& p,
                              RandomSource& rng,
                              ExecPolicy pol = ExecPolicy::parallel);

// (2 scale / 2^b) * (m - 2^{b-1} 1) componentwise.
Vector decode_gradient(const std::vector<int>& m, const CircuitParams& p);

// 8 pi n^3 (n/rho + 1) beta r / rho
double qgb_error_bound(int n, double rho, double beta, double r);

// Exact single-register phase-estimation outcome distribution for a linear
// phase theta: Pr(m = w + 2^{b-1}) with w centered, the Fejer kernel at
// theta - w/2^b. Indexed by m.
std::vector<double> fejer_distribution(double theta, int b);

enum class SimMode { full, idealized };
SimMode sim_mode_from_string(const std::string& s);
std::string to_string(SimMode m);

struct QuantumGradEstimate {
  Vector gradient;
  std::vector<int> outcomes;
  CircuitParams params;
  double error_bound_l1 = 0.0;
  int queries_used = 4;  // two oracle calls for Q_F, two for the uncompute
};

// Full mode runs the amplitude-level simulation (build, transform, sample).
// Idealized mode samples every coordinate from the Fejer distribution at
// theta_i = grad f(x)_i / (2G); valid for smooth f, used for long horizons.
QuantumGradEstimate estimate_gradient(const LossFunction& f, const Vector& x,
                                      long t, double rho, double G,
                                      double beta, double schedule_r,
                                      SimMode mode, RandomSource& rng,
                                      int grid_budget = kDefaultGridBudget,
                                      ExecPolicy pol = ExecPolicy::parallel);

// Row-by-row Hessian estimate through the first-order oracle: row i uses
// per-grid-point phase grad F(u)_i with
// grad F(u) = (2^b/(2 L r)) [grad f(x + (r/2^b)(u - 2^{b-1} 1)) - grad f(x)],
// decoded as H(i,j) = (2L/2^b)(m_j - 2^{b-1}). n circuit executions.
Matrix estimate_hessian(const LossFunction& f, const Vector& x,
                        const CircuitParams& p, RandomSource& rng,
                        ExecPolicy pol = ExecPolicy::parallel);

// Squared magnitudes of a (transformed) state; small-grid test helper.
std::vector<double> outcome_distribution(const PhaseState& s);

double state_norm_sq(const PhaseState& s,
                     ExecPolicy pol = ExecPolicy::parallel);

}  // namespace oxo::qsim
