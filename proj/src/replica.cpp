#include "polymer/replica.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "polymer/exec.hpp"
#include "polymer/lattice.hpp"

namespace polymer {

namespace {

MomentEstimate scaled(MomentEstimate e, double c) {
  e.value *= c;
  e.stderr_ *= std::abs(c);
  return e;
}

// log-weight a coincidence pattern contributes per time slice
double class_weight(CoincidenceClass c, const CumulantSet& cum) {
  switch (c) {
    case CoincidenceClass::all_four: return cum.lambda4;
    case CoincidenceClass::three: return cum.lambda3;
    case CoincidenceClass::two_two: return 2.0 * cum.lambda2;
    case CoincidenceClass::two_zero: return cum.lambda2;
    case CoincidenceClass::none: return 0.0;
  }
  return 0.0;
}

int task_count(int64_t budget) {
  return std::max<int>(1, static_cast<int>(std::min<int64_t>(256, budget / 1024 + 1)));
}

}  // namespace

TheoryConstants theory_constants(const CumulantSet& cum, const GreenTable& green) {
  double pi = green.pi_d();
  auto region = l2_region_check(cum, pi);
  if (!region.inside)
    throw DomainError("theory_constants: outside the L2 region (margin " +
                      std::to_string(region.margin) + "), second moments diverge");
  TheoryConstants t;
  t.var_W = std::expm1(cum.lambda2) / (1.0 - pi * std::exp(cum.lambda2));
  t.E_W2 = 1.0 + t.var_W;
  const GreenConstants& gc = green.constants();
  t.sigma1_2 = gc.K_d * gc.Z_d * (1.0 - pi) * t.var_W;
  t.sigma2 = t.sigma1_2 * t.E_W2;
  return t;
}

MomentEstimate second_moment(int n, const CumulantSet& cum, const GreenTable& green,
                             int64_t budget, uint64_t seed, int threads, bool force_mc) {
  int d = green.dim();
  if (n < 1) throw DomainError("second_moment: n >= 1");
  if (n <= 6 && !force_mc) {
    auto table = enumerate_pair_exact(n, d);
    double v = table.exp_weighted(cum.lambda2, [](std::span<const int>) { return 1.0; });
    return MomentEstimate::exact(v, Method::exact_enum);
  }
  return pair_functional_mc(d, n, cum.lambda2,
                            [](std::span<const int>) { return 1.0; }, budget, seed, threads);
}

MomentEstimate l2_distance(int n, const CumulantSet& cum, const GreenTable& green,
                           int64_t budget, uint64_t seed, int threads, bool force_mc) {
  int d = green.dim();
  if (n < 1) throw DomainError("l2_distance: n >= 1");
  TheoryConstants tc = theory_constants(cum, green);
  double scale = tc.var_W / green.g0();
  auto meet = [&green](std::span<const int> z) { return green.at(z); };
  if (n <= 6 && !force_mc) {
    auto table = enumerate_pair_exact(n, d);
    double v = scale * table.exp_weighted(cum.lambda2, meet);
    return MomentEstimate::exact(v, Method::exact_enum);
  }
  return scaled(pair_functional_mc(d, n, cum.lambda2, meet, budget, seed, threads), scale);
}

MomentEstimate covariance_shift(std::span<const int> x, const CumulantSet& cum,
                                const GreenTable& green) {
  TheoryConstants tc = theory_constants(cum, green);
  return MomentEstimate::exact(tc.var_W * green.at(x) / green.g0(), Method::closed_form);
}

MomentEstimate fourth_moment(int n, int d, const CumulantSet& cum, int64_t budget,
                             uint64_t seed, int threads, bool force_mc) {
  check_dimension(d);
  if (n < 1) throw DomainError("fourth_moment: n >= 1");
  if (n <= 2 && !force_mc) {
    // slices 0..n-1 depend on the first n-1 steps only; slice 0 is always a
    // full coincidence
    if (n == 1) return MomentEstimate::exact(std::exp(cum.lambda4), Method::exact_enum);
    int m = 2 * d;
    double sum = 0.0;
    std::array<Coords, 4> pos{};
    for (int s0 = 0; s0 < m; ++s0)
      for (int s1 = 0; s1 < m; ++s1)
        for (int s2 = 0; s2 < m; ++s2)
          for (int s3 = 0; s3 < m; ++s3) {
            int st[4] = {s0, s1, s2, s3};
            for (int i = 0; i < 4; ++i) {
              pos[static_cast<size_t>(i)].fill(0);
              pos[static_cast<size_t>(i)][st[i] >> 1] = (st[i] & 1) ? 1 : -1;
            }
            sum += std::exp(class_weight(classify_quad(pos, d), cum));
          }
    double v = std::exp(cum.lambda4) * sum / std::pow(static_cast<double>(m), 4.0);
    return MomentEstimate::exact(v, Method::exact_enum);
  }
  int n_tasks = task_count(budget);
  int64_t per_task = (budget + n_tasks - 1) / n_tasks;
  auto parts = run_tasks<MeanAccumulator>(n_tasks, threads, [&](int task) {
    Stream s = task_stream(seed, static_cast<uint64_t>(task));
    MeanAccumulator acc;
    for (int64_t i = 0; i < per_task; ++i) {
      ReplicaSample r = sample_quad(d, n, s);
      double lw = cum.lambda4 * static_cast<double>(r.n4) +
                  cum.lambda3 * static_cast<double>(r.n3) +
                  2.0 * cum.lambda2 * static_cast<double>(r.n22) +
                  cum.lambda2 * static_cast<double>(r.n20);
      acc.add(std::exp(lw));
    }
    return acc;
  });
  MeanAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return total.estimate(seed);
}

MomentEstimate d4_increment_at(int64_t k, int d, const CumulantSet& cum, int64_t budget,
                               uint64_t seed, int threads) {
  check_dimension(d);
  if (k < 0) throw DomainError("d4_increment_at: k >= 0");
  int n_tasks = task_count(budget);
  int64_t per_task = (budget + n_tasks - 1) / n_tasks;
  auto parts = run_tasks<MeanAccumulator>(n_tasks, threads, [&](int task) {
    Stream s = task_stream(seed, static_cast<uint64_t>(task));
    std::array<Walk, 4> w{Walk(d), Walk(d), Walk(d), Walk(d)};
    std::array<Coords, 4> pos{};
    MeanAccumulator acc;
    for (int64_t i = 0; i < per_task; ++i) {
      for (auto& x : w) x.reset();
      double lw = 0.0;
      for (int64_t t = 0; t < k; ++t) {
        for (int j = 0; j < 4; ++j)
          std::copy(w[static_cast<size_t>(j)].pos().begin(), w[static_cast<size_t>(j)].pos().end(),
                    pos[static_cast<size_t>(j)].begin());
        lw += class_weight(classify_quad(pos, d), cum);
        for (auto& x : w) x.step(s);
      }
      for (int j = 0; j < 4; ++j)
        std::copy(w[static_cast<size_t>(j)].pos().begin(), w[static_cast<size_t>(j)].pos().end(),
                  pos[static_cast<size_t>(j)].begin());
      // the increment's fourth moment keeps only the fully- and doubly-paired
      // configurations at the terminal slice
      switch (classify_quad(pos, d)) {
        case CoincidenceClass::all_four: acc.add(std::exp(lw) * cum.gamma4); break;
        case CoincidenceClass::two_two: acc.add(std::exp(lw) * cum.gamma2); break;
        default: acc.add(0.0); break;
      }
    }
    return acc;
  });
  MeanAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return total.estimate(seed);
}

D4Report d4_increment(std::span<const int64_t> k_grid, int d, const CumulantSet& cum,
                      int64_t budget, uint64_t seed, int threads) {
  D4Report rep;
  std::vector<double> ks, vs, es;
  for (size_t i = 0; i < k_grid.size(); ++i) {
    int64_t k = k_grid[i];
    MomentEstimate e = d4_increment_at(k, d, cum, budget, seed + i, threads);
    rep.k.push_back(k);
    rep.values.push_back(e);
    if (e.value > 0.0) {
      ks.push_back(static_cast<double>(k));
      vs.push_back(e.value);
      es.push_back(e.stderr_);
    }
  }
  rep.fit = loglog_slope(ks, vs, es);
  return rep;
}

MomentEstimate expected_condvar(int n, const CumulantSet& cum, const GreenTable& green,
                                int64_t budget, uint64_t seed, int threads,
                                int64_t warmup_horizon) {
  int d = green.dim();
  if (n < 1) throw DomainError("expected_condvar: n >= 1");
  int64_t T = warmup_horizon > 0 ? warmup_horizon : 4 * static_cast<int64_t>(n);
  if (T < n) throw DomainError("expected_condvar: warm-up horizon must be >= n");
  double pi = green.pi_d();
  double geo = 1.0 / (1.0 - pi * std::exp(cum.lambda2));  // future meeting series
  double g0 = green.g0();
  double scale = cum.kappa2 * std::pow(static_cast<double>(n), (d - 2) / 2.0);

  int n_tasks = task_count(budget);
  int64_t per_task = (budget + n_tasks - 1) / n_tasks;
  auto parts = run_tasks<MeanAccumulator>(n_tasks, threads, [&](int task) {
    Stream s = task_stream(seed, static_cast<uint64_t>(task));
    DiffWalk w(d);
    MeanAccumulator acc;
    for (int64_t i = 0; i < per_task; ++i) {
      w.reset();
      int64_t meets = 0;  // slices before the current one
      double sum = 0.0;
      for (int64_t t = 0; t < T; ++t) {
        if (w.at_origin()) {
          if (t >= n) sum += std::exp(cum.lambda2 * static_cast<double>(meets));
          ++meets;
        }
        w.step(s);
      }
      sum += std::exp(cum.lambda2 * static_cast<double>(meets)) * (green.at(w.pos()) / g0) * geo;
      acc.add(sum);
    }
    return acc;
  });
  MeanAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return scaled(total.estimate(seed), scale);
}

namespace {

struct LemmaAcc {
  std::vector<MeanAccumulator> inv;  // one per a
  MeanAccumulator integrand;
  std::vector<int64_t> hist;  // N_n = k at index k-1
  double sn = 0, sq = 0, snn = 0, sqq = 0, snq = 0;
  int64_t cnt = 0;

  void merge(const LemmaAcc& o) {
    for (size_t i = 0; i < inv.size(); ++i) inv[i].merge(o.inv[i]);
    integrand.merge(o.integrand);
    for (size_t i = 0; i < hist.size(); ++i) hist[i] += o.hist[i];
    sn += o.sn; sq += o.sq; snn += o.snn; sqq += o.sqq; snq += o.snq;
    cnt += o.cnt;
  }
};

}  // namespace

LemmaChecks lemma_checks(std::span<const int64_t> n_grid, std::span<const double> a_grid,
                         double delta, const CumulantSet& cum, const GreenTable& green,
                         int64_t budget, uint64_t seed, int threads) {
  int d = green.dim();
  if (n_grid.empty() || a_grid.empty()) throw DomainError("lemma_checks: empty grids");
  if (!(delta > 0.0 && delta < 2.0 / (d - 2)))
    throw DomainError("lemma_checks: delta must be in (0, 2/(d-2))");

  LemmaChecks out;
  out.a_grid.assign(a_grid.begin(), a_grid.end());
  out.n_grid.assign(n_grid.begin(), n_grid.end());
  out.delta = delta;
  out.inverse_moments.assign(a_grid.size(), {});

  // the factorization diagnostics run at the grid point nearest 2000
  int64_t n_factor = n_grid[0];
  for (int64_t n : n_grid)
    if (std::llabs(n - 2000) < std::llabs(n_factor - 2000)) n_factor = n;

  constexpr size_t kHistMax = 256;

  for (size_t gi = 0; gi < n_grid.size(); ++gi) {
    int64_t n = n_grid[gi];
    double rate_scale = std::pow(static_cast<double>(n), (d - 2) / 2.0);
    int n_tasks = task_count(budget);
    int64_t per_task = (budget + n_tasks - 1) / n_tasks;
    auto parts = run_tasks<LemmaAcc>(n_tasks, threads, [&](int task) {
      Stream s = task_stream(seed + gi, static_cast<uint64_t>(task));
      DiffWalk w(d);
      LemmaAcc acc;
      acc.inv.resize(a_grid.size());
      acc.hist.assign(kHistMax, 0);
      for (int64_t i = 0; i < per_task; ++i) {
        w.reset();
        int64_t meets = 0;
        for (int64_t t = 0; t < n; ++t) {
          if (w.at_origin()) ++meets;
          w.step(s);
        }
        double q2 = 0.0;
        for (int c : w.pos()) q2 += static_cast<double>(c) * c;
        double rn = q2 / static_cast<double>(n);  // |z_n|^2 / n
        for (size_t a = 0; a < a_grid.size(); ++a)
          acc.inv[a].add(q2 == 0.0 ? 0.0
                                   : std::pow(rn, -0.5 * a_grid[a]));
        double integrand =
            std::exp(cum.lambda2 * static_cast<double>(meets)) * rate_scale * green.at(w.pos());
        acc.integrand.add(std::pow(integrand, 1.0 + delta));
        if (n == n_factor) {
          // The all-time meeting count, not the horizon-truncated one: close
          // the tail exactly via the strong Markov property. From the time-n
          // state the chance of ever meeting again is G(z)/G(0) (1 at z = 0),
          // and each meeting recurs with probability pi. The hitting identity
          // itself is cross-checked by an independent MC elsewhere.
          int64_t total = meets;
          double pi = green.pi_d();
          if (w.at_origin() || s.uniform() < green.at(w.pos()) / green.g0()) {
            ++total;
            while (s.uniform() < pi) ++total;
          }
          size_t bin = std::min<size_t>(static_cast<size_t>(total) - 1, kHistMax - 1);
          ++acc.hist[bin];
          double nn = static_cast<double>(total);
          acc.sn += nn; acc.sq += rn; acc.snn += nn * nn; acc.sqq += rn * rn;
          acc.snq += nn * rn;
          ++acc.cnt;
        }
      }
      return acc;
    });
    LemmaAcc total = parts[0];
    for (size_t p = 1; p < parts.size(); ++p) total.merge(parts[p]);

    for (size_t a = 0; a < a_grid.size(); ++a)
      out.inverse_moments[a].push_back(total.inv[a].estimate(seed));
    out.integrand_moments.push_back(total.integrand.estimate(seed));

    if (n == n_factor && total.cnt >= 2) {
      double c = static_cast<double>(total.cnt);
      double cov = total.snq / c - (total.sn / c) * (total.sq / c);
      double vn = total.snn / c - (total.sn / c) * (total.sn / c);
      double vq = total.sqq / c - (total.sq / c) * (total.sq / c);
      out.corr_N_endpoint = cov / std::sqrt(vn * vq);
      // drop empty tail bins before the chi^2 pooling
      auto hist = total.hist;
      while (hist.size() > 1 && hist.back() == 0) hist.pop_back();
      out.geometric_fit = chi2_geometric(hist, green.pi_d());
    }
  }
  return out;
}

}  // namespace polymer
