#pragma once

#include <cstdint>
#include <vector>

namespace oxo::stats {

// Exact (Clopper-Pearson) one-sided upper confidence bound for a binomial
// proportion: smallest p with Pr[X <= successes; n, p] <= 1 - confidence.
double binomial_upper_bound(long successes, long trials, double confidence);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double statistic, double df);

// Goodness-of-fit p-value of counts against expected probabilities; cells
// with expected count below min_expected are pooled.
double chi_square_gof_pvalue(const std::vector<long>& counts,
                             const std::vector<double>& probs,
                             double min_expected = 5.0);

// 0.5 * sum |p_i - q_i|
double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q);

// Least-squares coefficient c for y ~ c * basis(t).
double fit_scale(const std::vector<double>& y, const std::vector<double>& basis);

}  // namespace oxo::stats
