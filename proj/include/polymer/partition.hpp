#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polymer/env.hpp"

namespace polymer {

struct EvolveOptions {
  int64_t horizon = 0;  // K
  // per-coordinate truncation radius, in multiples of the walk sigma
  // sqrt(k/d); 6 keeps the dropped mass around 1e-8 relative
  double box_sigma = 6.0;
  double memory_budget_bytes = 3.5e9;
  std::vector<int64_t> profile_checkpoints;  // sorted, distinct
};

// Endpoint distribution W_n(x) on its parity/diamond support, stored as a
// dense cube of side 2*radius+1 (truncated to the diffusive box).
struct EndpointProfile {
  int d = 3;
  int64_t horizon = 0;
  int radius = 0;
  std::vector<double> vals;
  double mass = 0.0;     // W_n
  double overlap = 0.0;  // I_n = sum_x W_n(x)^2

  double at(std::span<const int> x) const;
};

// Scalars of one environment sweep: W_k and the overlap I_k for every k up to
// the horizon. The martingale increment and the per-slice conditional
// variance kappa2 * I_k derive from these.
struct MartingaleTrace {
  int d = 3;
  int64_t horizon = 0;
  EnvFieldSpec env;
  std::vector<double> W;  // k = 0..K
  std::vector<double> I;  // k = 0..K
  std::vector<EndpointProfile> profiles;

  double increment(int64_t k) const { return W[static_cast<size_t>(k)] - W[static_cast<size_t>(k - 1)]; }
};

// One full sweep of the recursion
//   W_{k+1}(y) = sum_{x ~ y} W_k(x) e^{beta eta(k,x) - lambda} / (2d)
// from W_0 = delta_0, with the site factor collected at the departure site.
// The standard convention (weight at the arrival site, t = 1..n) is obtained
// from the same sweep via W'_k = W_{k+1} / w(0,0) and is selected through the
// field spec.
MartingaleTrace evolve_profile(const SiteWeights& weights, int d, const EvolveOptions& opt);

struct CondVarSum {
  double value = 0.0;       // kappa2 * n^{(d-2)/2} * sum_{k=n}^{K-1} I_k
  double tail_slope = 0.0;  // empirical log-log slope of I_k near K
  double tail_estimate = 0.0;  // extrapolated truncation remainder (same scale)
};

CondVarSum conditional_variance_sum(const MartingaleTrace& trace, int64_t n, int64_t K,
                                    double kappa2);

struct WindowStat {
  double w_n = 0.0;
  double w_rn = 0.0;
  double value = 0.0;  // n^{(d-2)/4} (W_{Rn} - W_n) / W_n
};

WindowStat window_statistic(const MartingaleTrace& trace, int64_t n, int64_t R);

// truncation radius of the diffusive box at step k
int box_radius(int64_t k, int d, double box_sigma);

}  // namespace polymer
