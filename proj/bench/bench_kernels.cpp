// Timing comparison of the serial reference kernels against the OpenMP
// versions, plus a bitwise agreement check. Build and run:
//   cmake --build build --target oxo_bench && ./build/bench/oxo_bench
#include <chrono>
#include <cstdio>
#include <cstring>

#include "oxo/qsim.hpp"

using namespace oxo;
using namespace oxo::qsim;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool bitwise_equal(const PhaseState& a, const PhaseState& b) {
  return a.amp.size() == b.amp.size() &&
         std::memcmp(a.amp.data(), b.amp.data(),
                     a.amp.size() * sizeof(a.amp[0])) == 0;
}

void bench_grid(int n, int b, int reps) {
  const CircuitParams p = make_params(b, 9, n, 1e-3, 4.0, 30);
  const losses::LossFunction f{losses::SquareLoss{{0.6, 0.8}, 0.3}};
  const linalg::Vector x = {0.2, -0.1};

  PhaseState serial_state, parallel_state;
  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    serial_state = build_phase_state(f, x, p, ExecPolicy::serial);
  const double fill_serial = seconds_since(t0) / reps;
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    parallel_state = build_phase_state(f, x, p, ExecPolicy::parallel);
  const double fill_parallel = seconds_since(t0) / reps;
  const bool fill_same = bitwise_equal(serial_state, parallel_state);

  PhaseState ts = serial_state, tp = parallel_state;
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) {
    ts = serial_state;
    apply_centered_iqft(ts, ExecPolicy::serial);
  }
  const double iqft_serial = seconds_since(t0) / reps;
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) {
    tp = parallel_state;
    apply_centered_iqft(tp, ExecPolicy::parallel);
  }
  const double iqft_parallel = seconds_since(t0) / reps;
  const bool iqft_same = bitwise_equal(ts, tp);

  std::printf(
      "n=%d b=%2d grid=%8zu | fill %8.3f ms vs %8.3f ms (x%4.2f) | iqft "
      "%8.3f ms vs %8.3f ms (x%4.2f) | identical=%s\n",
      n, b, serial_state.size(), 1e3 * fill_serial, 1e3 * fill_parallel,
      fill_serial / fill_parallel, 1e3 * iqft_serial, 1e3 * iqft_parallel,
      iqft_serial / iqft_parallel, (fill_same && iqft_same) ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp not enabled at build time\n");
#endif
  std::printf("serial reference vs parallel kernels (lower is better)\n");
  bench_grid(2, 6, 20);
  bench_grid(2, 8, 10);
  bench_grid(2, 10, 3);
  bench_grid(2, 12, 1);

  // End-to-end estimation at a late-round grid size.
  const losses::LossFunction f{losses::SquareLoss{{0.6, 0.8}, 0.3}};
  const linalg::Vector x = {0.2, -0.1};
  for (ExecPolicy pol : {ExecPolicy::serial, ExecPolicy::parallel}) {
    RandomSource rng(7);
    const auto t0 = Clock::now();
    const auto est = estimate_gradient(f, x, 200, 0.1, 4.0, 2.0,
                                       0.1 * 4.0 / (M_PI * 8.0 * 21.0 * 2.0 * 200.0),
                                       SimMode::full, rng, 24, pol);
    std::printf("estimate_gradient full b=%d %s: %.3f s\n", est.params.b,
                pol == ExecPolicy::serial ? "serial  " : "parallel",
                seconds_since(t0));
  }
  return 0;
}
