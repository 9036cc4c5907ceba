#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polymer/env.hpp"

namespace polymer {

struct TestReport {
  std::string kind;
  double statistic = 0.0;
  double p_value = 1.0;
  int64_t n = 0;  // (effective) sample size
};

// complement of the Kolmogorov limit CDF, Q(x) = 2 sum (-1)^{j-1} e^{-2 j^2 x^2}
double kolmogorov_q(double x);

// one-sample KS against N(mean, variance), asymptotic p-value
TestReport ks_gaussian(std::span<const double> sample, double mean, double variance);

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b);

// chi^2 of a histogram of k >= 1 (index i holds the count of k = i+1) against
// P(N = k) = pi^{k-1} (1 - pi); right tail pooled so every expected count >= 5
TestReport chi2_geometric(std::span<const int64_t> histogram, double pi);

double pearson_corr(std::span<const double> x, std::span<const double> y);

// finite proxy for asymptotic independence of the statistic from the
// conditioning variable: correlation plus a KS two-sample comparison of the
// statistic across quantile cells of the conditioner
struct MixingReport {
  double corr = 0.0;
  TestReport split_ks;  // worst (smallest-p) cell-vs-rest comparison
  int n_splits = 2;
};

MixingReport mixing_proxy(std::span<const double> conditioner,
                          std::span<const double> statistic, int n_splits = 2);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  int n_points = 0;
};

// weighted least squares of log(value) vs log(k); stderrs may be empty for an
// unweighted fit (slope_err then uses the residual variance)
SlopeFit loglog_slope(std::span<const double> k, std::span<const double> value,
                      std::span<const double> stderrs = {});

}  // namespace polymer
