#include "polymer/gw.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "polymer/estimate.hpp"
#include "polymer/exec.hpp"
#include "polymer/rng.hpp"

namespace polymer {

namespace {

struct BitGen {
  Stream* s;
  using result_type = uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return s->next(); }
};

constexpr int64_t kPopGuard = int64_t{1} << 60;

}  // namespace

void GwConfig::validate() const {
  switch (kind) {
    case Offspring::poisson:
      if (!(mean > 1.0)) throw ConfigError("gw: poisson mean must be > 1");
      break;
    case Offspring::deterministic: {
      double r = std::round(mean);
      if (!(mean > 1.0) || mean != r)
        throw ConfigError("gw: deterministic offspring needs an integer mean > 1");
      break;
    }
    case Offspring::table: {
      if (table.size() < 2) throw ConfigError("gw: offspring table too short");
      double s = 0.0;
      for (double p : table) {
        if (p < 0.0) throw ConfigError("gw: negative table probability");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12) throw ConfigError("gw: table must sum to 1");
      if (!(offspring_mean() > 1.0)) throw ConfigError("gw: table mean must be > 1");
      break;
    }
  }
  if (!(1 <= n && n < N)) throw ConfigError("gw: need 1 <= n < N");
  if (replicates < 2) throw ConfigError("gw: need at least 2 replicates");
}

double GwConfig::offspring_mean() const {
  if (kind != Offspring::table) return mean;
  double m = 0.0;
  for (size_t k = 0; k < table.size(); ++k) m += static_cast<double>(k) * table[k];
  return m;
}

double GwConfig::offspring_var() const {
  switch (kind) {
    case Offspring::poisson: return mean;
    case Offspring::deterministic: return 0.0;
    case Offspring::table: {
      double m = offspring_mean(), s = 0.0;
      for (size_t k = 0; k < table.size(); ++k) {
        double d = static_cast<double>(k) - m;
        s += d * d * table[k];
      }
      return s;
    }
  }
  return 0.0;
}

double GwConfig::a2() const {
  double m = offspring_mean();
  return offspring_var() / (m * m - m);
}

GwResult simulate_gw(const GwConfig& cfg, uint64_t seed, int threads) {
  cfg.validate();
  const double m = cfg.offspring_mean();

  int n_tasks = static_cast<int>(std::min<int64_t>(256, cfg.replicates));
  int64_t per_task = (cfg.replicates + n_tasks - 1) / n_tasks;

  auto parts = run_tasks<std::vector<GwReplicate>>(n_tasks, threads, [&](int task) {
    std::vector<GwReplicate> rows;
    int64_t lo = task * per_task;
    int64_t hi = std::min<int64_t>(cfg.replicates, lo + per_task);
    for (int64_t rep = lo; rep < hi; ++rep) {
      // one stream per replicate, keyed by the replicate index, so the
      // ensemble is independent of the task decomposition
      Stream s = task_stream(seed, static_cast<uint64_t>(rep));
      BitGen gen{&s};
      GwReplicate r;
      int64_t z = 1;
      double inv_mn = 1.0;  // m^{-k}
      for (int64_t k = 0; k < cfg.N && !r.overflow; ++k) {
        if (k == cfg.n) {
          r.z_n = z;
          r.w_n = static_cast<double>(z) * inv_mn;
        }
        if (z == 0) {
          inv_mn /= m;
          continue;
        }
        if (static_cast<double>(z) * m > static_cast<double>(kPopGuard)) {
          r.overflow = true;
          break;
        }
        switch (cfg.kind) {
          case GwConfig::Offspring::poisson: {
            std::poisson_distribution<int64_t> pois(m * static_cast<double>(z));
            z = pois(gen);
            break;
          }
          case GwConfig::Offspring::deterministic:
            z *= static_cast<int64_t>(m);
            break;
          case GwConfig::Offspring::table: {
            // total offspring of z individuals via conditional binomial splits
            int64_t remaining = z;
            double rest = 1.0;
            int64_t total = 0;
            for (size_t k2 = 0; k2 + 1 < cfg.table.size() && remaining > 0; ++k2) {
              double p = cfg.table[k2] / rest;
              std::binomial_distribution<int64_t> bin(remaining, std::min(p, 1.0));
              int64_t c = bin(gen);
              total += static_cast<int64_t>(k2) * c;
              remaining -= c;
              rest -= cfg.table[k2];
            }
            total += static_cast<int64_t>(cfg.table.size() - 1) * remaining;
            z = total;
            break;
          }
        }
        inv_mn /= m;
      }
      if (!r.overflow) {
        r.w_N = static_cast<double>(z) * std::pow(m, -static_cast<double>(cfg.N));
        r.extinct = z == 0;
        double scale = std::pow(m, static_cast<double>(cfg.n) / 2.0);
        r.stat1 = scale * (r.w_N - r.w_n);
        r.stat2 = r.w_n > 0.0 ? r.stat1 / std::sqrt(r.w_n)
                              : std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(r);
    }
    return rows;
  });

  GwResult out;
  out.a2 = cfg.a2();
  for (auto& p : parts)
    out.rows.insert(out.rows.end(), p.begin(), p.end());

  MeanAccumulator wN, s1;
  int64_t extinct = 0;
  for (const auto& r : out.rows) {
    if (r.overflow) {
      ++out.overflow_count;
      continue;
    }
    wN.add(r.w_N);
    s1.add(r.stat1);
    extinct += r.extinct ? 1 : 0;
  }
  if (wN.n >= 2) {
    out.mean_w_N = wN.mean();
    out.var_stat1 = s1.variance();
    out.extinct_fraction = static_cast<double>(extinct) / static_cast<double>(wN.n);
  }
  return out;
}

}  // namespace polymer
