#include "polymer/stats.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polymer/normal.hpp"

namespace polymer {

double kolmogorov_q(double x) {
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * x * x);
    s += (j & 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

// Stephens' small-sample correction for the one-sample statistic
double ks_p_one(double d, int64_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

TestReport ks_gaussian(std::span<const double> sample, double mean, double variance) {
  if (sample.size() < 50) throw DomainError("ks_gaussian: sample size >= 50 required");
  if (!(variance > 0.0)) throw DomainError("ks_gaussian: variance must be positive");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DomainError("ks_gaussian: degenerate (constant) sample");
  double sd = std::sqrt(variance);
  double d = 0.0;
  auto n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double f = normal_cdf((x[i] - mean) / sd);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return {"ks_gaussian", d, ks_p_one(d, static_cast<int64_t>(x.size())),
          static_cast<int64_t>(x.size())};
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("ks_two_sample: samples too small");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = na * nb / (na + nb);
  double sn = std::sqrt(ne);
  auto rep = TestReport{"ks_two_sample", d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
                        static_cast<int64_t>(ne)};
  return rep;
}

TestReport chi2_geometric(std::span<const int64_t> histogram, double pi) {
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("chi2_geometric: pi must be in (0,1)");
  int64_t total = std::accumulate(histogram.begin(), histogram.end(), int64_t{0});
  if (total < 50) throw DomainError("chi2_geometric: insufficient counts");
  double n = static_cast<double>(total);

  // expected counts n (1-pi) pi^{k-1}; pool from the right so expected >= 5
  std::vector<double> expected;
  std::vector<double> observed;
  double tail_prob = 1.0;
  for (size_t i = 0; i < histogram.size(); ++i) {
    double p = (1.0 - pi) * std::pow(pi, static_cast<double>(i));
    expected.push_back(n * p);
    observed.push_back(static_cast<double>(histogram[i]));
    tail_prob -= p;
  }
  // closing bin: all k beyond the histogram range
  expected.push_back(n * std::max(tail_prob, 0.0));
  observed.push_back(0.0);
  while (expected.size() > 1 && expected.back() < 5.0) {
    expected[expected.size() - 2] += expected.back();
    observed[observed.size() - 2] += observed.back();
    expected.pop_back();
    observed.pop_back();
  }
  if (expected.size() < 2) throw DomainError("chi2_geometric: fewer than 2 usable bins");

  double chi2 = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    double diff = observed[i] - expected[i];
    chi2 += diff * diff / expected[i];
  }
  auto dof = static_cast<double>(expected.size() - 1);
  return {"chi2_geometric", chi2, gsl_cdf_chisq_Q(chi2, dof),
          static_cast<int64_t>(expected.size())};
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson_corr: bad sample");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DomainError("pearson_corr: degenerate sample");
  return sxy / std::sqrt(sxx * syy);
}

MixingReport mixing_proxy(std::span<const double> conditioner,
                          std::span<const double> statistic, int n_splits) {
  if (conditioner.size() != statistic.size())
    throw DomainError("mixing_proxy: sample sizes differ");
  if (conditioner.size() < 1000) throw DomainError("mixing_proxy: need >= 1000 pairs");
  if (n_splits < 2) throw DomainError("mixing_proxy: n_splits >= 2");

  MixingReport rep;
  rep.n_splits = n_splits;
  rep.corr = pearson_corr(conditioner, statistic);

  std::vector<double> sorted(conditioner.begin(), conditioner.end());
  std::sort(sorted.begin(), sorted.end());
  rep.split_ks = {"ks_two_sample", 0.0, 1.0, 0};
  for (int cell = 0; cell < n_splits; ++cell) {
    double lo = cell == 0 ? -std::numeric_limits<double>::infinity()
                          : sorted[sorted.size() * static_cast<size_t>(cell) / static_cast<size_t>(n_splits)];
    double hi = cell == n_splits - 1
                    ? std::numeric_limits<double>::infinity()
                    : sorted[sorted.size() * static_cast<size_t>(cell + 1) / static_cast<size_t>(n_splits)];
    std::vector<double> in, out;
    for (size_t i = 0; i < conditioner.size(); ++i) {
      (conditioner[i] >= lo && conditioner[i] < hi ? in : out).push_back(statistic[i]);
    }
    if (in.size() < 2 || out.size() < 2) throw DomainError("mixing_proxy: degenerate split");
    TestReport t = ks_two_sample(in, out);
    if (t.p_value < rep.split_ks.p_value || rep.split_ks.n == 0) rep.split_ks = t;
  }
  return rep;
}

SlopeFit loglog_slope(std::span<const double> k, std::span<const double> value,
                      std::span<const double> stderrs) {
  if (k.size() != value.size() || (!stderrs.empty() && stderrs.size() != k.size()))
    throw DomainError("loglog_slope: size mismatch");
  if (k.size() < 3) throw NumericalError("loglog_slope: fewer than 3 points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  std::vector<double> xs, ys, ws;
  for (size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0 && value[i] > 0.0))
      throw DomainError("loglog_slope: non-positive point");
    double x = std::log(k[i]), y = std::log(value[i]);
    double w = 1.0;
    if (!stderrs.empty()) {
      double rel = stderrs[i] / value[i];  // sd of log(value)
      if (rel > 0.0) w = 1.0 / (rel * rel);
    }
    xs.push_back(x);
    ys.push_back(y);
    ws.push_back(w);
    sw += w; swx += w * x; swy += w * y; swxx += w * x * x; swxy += w * x * y;
  }
  double den = sw * swxx - swx * swx;
  if (den <= 0.0) throw NumericalError("loglog_slope: degenerate abscissae");
  SlopeFit fit;
  fit.n_points = static_cast<int>(k.size());
  fit.slope = (sw * swxy - swx * swy) / den;
  fit.intercept = (swy - fit.slope * swx) / sw;
  if (stderrs.empty()) {
    // residual-variance based error
    double ss = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - fit.intercept - fit.slope * xs[i];
      ss += r * r;
    }
    double s2 = ss / static_cast<double>(xs.size() - 2);
    fit.slope_err = std::sqrt(s2 * sw / den);
  } else {
    fit.slope_err = std::sqrt(sw / den);
  }
  return fit;
}

}  // namespace polymer
