#pragma once

#include <cstdint>
#include <vector>

#include "polymer/env.hpp"

namespace polymer {

// Branching-process baseline: the same martingale-fluctuation question where
// the answer is an exponential rate instead of a polynomial one.
struct GwConfig {
  enum class Offspring { poisson, table, deterministic };
  Offspring kind = Offspring::poisson;
  double mean = 2.0;          // m; for table laws derived from the table
  std::vector<double> table;  // P(Z1 = k) at index k, table laws only
  int64_t n = 10;
  int64_t N = 30;
  int64_t replicates = 10000;

  void validate() const;
  double offspring_mean() const;
  double offspring_var() const;
  double a2() const;  // Var(Z1) / (m^2 - m)
};

struct GwReplicate {
  double w_n = 0.0;
  double w_N = 0.0;
  int64_t z_n = 0;
  bool extinct = false;   // Z_N = 0
  bool overflow = false;  // population left the 64-bit guard; values invalid
  double stat1 = 0.0;     // m^{n/2} (W_N - W_n)
  double stat2 = 0.0;     // stat1 / sqrt(W_n), survivors only (NaN otherwise)
};

struct GwResult {
  double a2 = 0.0;
  std::vector<GwReplicate> rows;
  double mean_w_N = 0.0;
  double var_stat1 = 0.0;      // over non-overflow replicates
  double extinct_fraction = 0.0;
  int64_t overflow_count = 0;
};

GwResult simulate_gw(const GwConfig& cfg, uint64_t seed, int threads = 1);

}  // namespace polymer
