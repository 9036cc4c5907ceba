#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/estimate.hpp"
#include "polymer/green.hpp"
#include "polymer/stats.hpp"

namespace polymer {

// Closed-form limit constants of the weak-disorder regime, all assembled from
// the cumulants and the walk's return probability.
struct TheoryConstants {
  double var_W = 0.0;
  double E_W2 = 1.0;
  double sigma1_2 = 0.0;  // variance scale of the normalized fluctuation
  double sigma2 = 0.0;    // = sigma1_2 * E_W2, the L2-rate constant
};

// Throws DomainError outside the L2 region (second moments diverge there).
TheoryConstants theory_constants(const CumulantSet& cum, const GreenTable& green);

// E W_n^2 as a two-replica functional of the intersection count: exact
// enumeration for n <= 6, pair MC beyond (or when forced).
MomentEstimate second_moment(int n, const CumulantSet& cum, const GreenTable& green,
                             int64_t budget, uint64_t seed, int threads = 1,
                             bool force_mc = false);

// squared L2 distance of W_n to its limit, via the Green-ratio conditioning
// of the meeting event after time n
MomentEstimate l2_distance(int n, const CumulantSet& cum, const GreenTable& green,
                           int64_t budget, uint64_t seed, int threads = 1,
                           bool force_mc = false);

// Cov(W, W shifted by x) = Var(W) G(x)/G(0), closed form
MomentEstimate covariance_shift(std::span<const int> x, const CumulantSet& cum,
                                const GreenTable& green);

// E W_n^4 as a four-replica functional of the coincidence classes: exact
// enumeration for n <= 2, quad MC beyond.
MomentEstimate fourth_moment(int n, int d, const CumulantSet& cum, int64_t budget,
                             uint64_t seed, int threads = 1, bool force_mc = false);

// E D_{k+1}^4 at a grid of times, with the fitted log-log decay slope
struct D4Report {
  std::vector<int64_t> k;
  std::vector<MomentEstimate> values;
  SlopeFit fit;
};

MomentEstimate d4_increment_at(int64_t k, int d, const CumulantSet& cum, int64_t budget,
                               uint64_t seed, int threads = 1);
D4Report d4_increment(std::span<const int64_t> k_grid, int d, const CumulantSet& cum,
                      int64_t budget, uint64_t seed, int threads = 1);

// E s_n^2 by the per-slice route: the meeting probabilities of the two
// replicas are accumulated slice by slice up to a warm-up horizon and the
// remainder is closed with the Green-ratio weight. Deliberately a different
// sampler from l2_distance so the two can cross-check each other.
MomentEstimate expected_condvar(int n, const CumulantSet& cum, const GreenTable& green,
                                int64_t budget, uint64_t seed, int threads = 1,
                                int64_t warmup_horizon = 0 /* default 4n */);

// Diagnostics for the diffusive-limit structure of the pair walk.
struct LemmaChecks {
  // independence of the intersection count from the rescaled endpoint
  double corr_N_endpoint = 0.0;
  TestReport geometric_fit;  // N_n histogram vs Geometric(1 - pi_d)
  // inverse endpoint moments E |z_n / sqrt(n)|^{-a} 1_{z != 0}, per (a, n)
  std::vector<double> a_grid;
  std::vector<int64_t> n_grid;
  std::vector<std::vector<MomentEstimate>> inverse_moments;  // [a][n]
  // (1+delta) moment of the rate integrand, per n
  double delta = 0.0;
  std::vector<MomentEstimate> integrand_moments;  // [n]
};

LemmaChecks lemma_checks(std::span<const int64_t> n_grid, std::span<const double> a_grid,
                         double delta, const CumulantSet& cum, const GreenTable& green,
                         int64_t budget, uint64_t seed, int threads = 1);

}  // namespace polymer
