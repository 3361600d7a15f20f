#include "oxo/stats.hpp"

#include <algorithm>
#include <cmath>

#include "oxo/error.hpp"

namespace oxo::stats {

namespace {

double log_binom_pmf(long k, long n, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0);
  return lc + k * std::log(p) + (n - k) * std::log1p(-p);
}

double binom_cdf(long k, long n, double p) {
  double s = 0.0;
  for (long i = 0; i <= k; ++i) s += std::exp(log_binom_pmf(i, n, p));
  return std::min(s, 1.0);
}

}  // namespace

double binomial_upper_bound(long successes, long trials, double confidence) {
  if (trials <= 0 || successes < 0 || successes > trials)
    fail(ErrorCategory::invalid_input, "binomial_upper_bound: bad counts");
  if (successes == trials) return 1.0;
  const double target = 1.0 - confidence;
  double lo = static_cast<double>(successes) / trials, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binom_cdf(successes, trials, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

namespace {

// Series and continued-fraction evaluation of the incomplete gamma function.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0)
    fail(ErrorCategory::invalid_input, "regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_sf(double statistic, double df) {
  if (statistic <= 0.0) return 1.0;
  return 1.0 - regularized_gamma_p(0.5 * df, 0.5 * statistic);
}

double chi_square_gof_pvalue(const std::vector<long>& counts,
                             const std::vector<double>& probs,
                             double min_expected) {
  if (counts.size() != probs.size() || counts.empty())
    fail(ErrorCategory::invalid_input, "chi_square_gof: size mismatch");
  long total = 0;
  for (long c : counts) total += c;
  if (total <= 0) fail(ErrorCategory::invalid_input, "chi_square_gof: no data");

  // Pool low-expectation cells into one bucket to keep the chi-square
  // approximation honest.
  double stat = 0.0;
  long cells = 0;
  double pooled_exp = 0.0;
  long pooled_obs = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expect = probs[i] * total;
    if (expect < min_expected) {
      pooled_exp += expect;
      pooled_obs += counts[i];
      continue;
    }
    const double d = counts[i] - expect;
    stat += d * d / expect;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    const double d = pooled_obs - pooled_exp;
    stat += d * d / std::max(pooled_exp, 1e-12);
    ++cells;
  }
  const double df = std::max(1.0, static_cast<double>(cells - 1));
  return chi_square_sf(stat, df);
}

double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q) {
  if (p.size() != q.size())
    fail(ErrorCategory::invalid_input, "total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double fit_scale(const std::vector<double>& y, const std::vector<double>& basis) {
  if (y.size() != basis.size() || y.empty())
    fail(ErrorCategory::invalid_input, "fit_scale: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += y[i] * basis[i];
    den += basis[i] * basis[i];
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

}  // namespace oxo::stats
