#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oxo::qsim::kernels {

// Every kernel has a serial reference path and an OpenMP path. Work is split
// only across independent grid points or transform lines, and partial sums
// use a fixed block partition, so both policies produce bit-identical
// results for any thread count.
enum class ExecPolicy { serial, parallel };

// amp[idx] = norm * exp(2*pi*i * phase_turns(idx)) for idx in [0, total).
template <class PhaseFn>
void fill_phase_grid(std::complex<double>* amp, std::size_t total, double norm,
                     PhaseFn&& phase_turns, ExecPolicy pol) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  if (pol == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(total); ++i) {
      const double ang = two_pi * phase_turns(static_cast<std::size_t>(i));
      amp[i] = std::complex<double>(norm * std::cos(ang), norm * std::sin(ang));
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < total; ++i) {
    const double ang = two_pi * phase_turns(i);
    amp[i] = std::complex<double>(norm * std::cos(ang), norm * std::sin(ang));
  }
}

// In-place inverse Fourier transform with centered labels, applied
// independently along each of the n axes of the row-major 2^b x ... x 2^b
// grid. Centered labels mean the transform pairs v = u - 2^(b-1) with
// w = m - 2^(b-1), which reduces to the standard radix-2 transform
// conjugated by (-1)^index twiddles. Unitary (norm preserving).
void centered_iqft(std::complex<double>* amp, int n, int b, ExecPolicy pol);

// Sum of |amp[i]|^2 with a fixed 4096-element block partition.
double sum_sq(const std::complex<double>* amp, std::size_t total,
              ExecPolicy pol);

}  // namespace oxo::qsim::kernels
