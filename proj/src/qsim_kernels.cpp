#include "oxo/qsim_kernels.hpp"

#include <cmath>

namespace oxo::qsim::kernels {

namespace {

// Twiddle table w[k] = exp(-2 pi i k / N) for k < N/2.
std::vector<std::complex<double>> make_twiddles(std::size_t n_points) {
  std::vector<std::complex<double>> w(n_points / 2);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double ang = -two_pi * static_cast<double>(k) / static_cast<double>(n_points);
    w[k] = std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return w;
}

// Standard in-place radix-2 forward transform (kernel e^{-2 pi i uk/N}),
// unnormalized, fixed butterfly order.
void fft_forward(std::complex<double>* x, int b,
                 const std::vector<std::complex<double>>& tw) {
  const std::size_t n_points = std::size_t{1} << b;
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n_points; ++i) {
    std::size_t bit = n_points >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n_points; len <<= 1) {
    const std::size_t stride = n_points / len;
    for (std::size_t i = 0; i < n_points; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = tw[k * stride];
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
      }
    }
  }
}

// Centered-label transform of one contiguous line:
//   y[m] = 2^{-b/2} (-1)^m sum_u x[u] (-1)^u e^{-2 pi i um/2^b}.
// The (-1)^{index} factors implement the shift by 2^(b-1) on both labels.
void centered_line(std::complex<double>* x, int b,
                   const std::vector<std::complex<double>>& tw) {
  const std::size_t n_points = std::size_t{1} << b;
  for (std::size_t u = 1; u < n_points; u += 2) x[u] = -x[u];
  fft_forward(x, b, tw);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n_points));
  for (std::size_t m = 0; m < n_points; ++m)
    x[m] *= (m & 1) ? -norm : norm;
}

struct AxisPlan {
  std::size_t stride;
  std::size_t block;
  std::size_t lines;
};

AxisPlan axis_plan(int n, int b, int axis, std::size_t total) {
  // Row-major with axis 0 as the most significant register.
  std::size_t stride = 1;
  for (int k = n - 1; k > axis; --k) stride <<= b;
  return {stride, stride << b, total / (std::size_t{1} << b)};
}

void transform_axis(std::complex<double>* amp, int b, const AxisPlan& plan,
                    const std::vector<std::complex<double>>& tw,
                    ExecPolicy pol) {
  const std::size_t n_points = std::size_t{1} << b;
  const bool contiguous = plan.stride == 1;

  auto do_line = [&](std::size_t line, std::vector<std::complex<double>>& scratch) {
    const std::size_t base =
        (line / plan.stride) * plan.block + (line % plan.stride);
    if (contiguous) {
      centered_line(amp + base, b, tw);
      return;
    }
    for (std::size_t j = 0; j < n_points; ++j)
      scratch[j] = amp[base + j * plan.stride];
    centered_line(scratch.data(), b, tw);
    for (std::size_t j = 0; j < n_points; ++j)
      amp[base + j * plan.stride] = scratch[j];
  };

  if (pol == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::vector<std::complex<double>> scratch(contiguous ? 0 : n_points);
#pragma omp for schedule(static)
      for (long long line = 0; line < static_cast<long long>(plan.lines);
           ++line)
        do_line(static_cast<std::size_t>(line), scratch);
    }
    return;
#endif
  }
  std::vector<std::complex<double>> scratch(contiguous ? 0 : n_points);
  for (std::size_t line = 0; line < plan.lines; ++line)
    do_line(line, scratch);
}

}  // namespace

void centered_iqft(std::complex<double>* amp, int n, int b, ExecPolicy pol) {
  const std::size_t total = std::size_t{1} << (n * b);
  const auto tw = make_twiddles(std::size_t{1} << b);
  for (int axis = 0; axis < n; ++axis)
    transform_axis(amp, b, axis_plan(n, b, axis, total), tw, pol);
}

double sum_sq(const std::complex<double>* amp, std::size_t total,
              ExecPolicy pol) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (total + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);

  auto do_block = [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(lo + kBlock, total);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::norm(amp[i]);
    partial[blk] = s;
  };

  if (pol == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long blk = 0; blk < static_cast<long long>(blocks); ++blk)
      do_block(static_cast<std::size_t>(blk));
#else
    for (std::size_t blk = 0; blk < blocks; ++blk) do_block(blk);
#endif
  } else {
    for (std::size_t blk = 0; blk < blocks; ++blk) do_block(blk);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace oxo::qsim::kernels
