#include "polymer/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "polymer/exec.hpp"

namespace polymer {

void check_dimension(int d) {
  if (d < 3 || d > kMaxDim) throw ConfigError("dimension must be in {3,4,5}");
}

Walk::Walk(int d) : d_(d) { check_dimension(d); }

void Walk::reset() { pos_.fill(0); }

bool Walk::at(std::span<const int> x) const {
  for (int i = 0; i < d_; ++i)
    if (pos_[i] != x[i]) return false;
  return true;
}

bool Walk::at_origin() const {
  for (int i = 0; i < d_; ++i)
    if (pos_[i] != 0) return false;
  return true;
}

DiffWalk::DiffWalk(int d) : d_(d) {
  check_dimension(d);
  int m = 2 * d;
  deltas_.reserve(static_cast<size_t>(m * m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::array<int8_t, kMaxDim> dz{};
      dz[a >> 1] = static_cast<int8_t>((a & 1) ? 1 : -1);
      dz[b >> 1] = static_cast<int8_t>(dz[b >> 1] - ((b & 1) ? 1 : -1));
      deltas_.push_back(dz);
    }
  n_deltas_ = static_cast<uint32_t>(deltas_.size());
}

void DiffWalk::reset() { pos_.fill(0); }

void DiffWalk::reset(std::span<const int> start) {
  pos_.fill(0);
  std::copy(start.begin(), start.end(), pos_.begin());
}

ReplicaSample sample_pair(int d, int n, Stream& s) {
  check_dimension(d);
  Walk w0(d), w1(d);
  w0.reset();
  w1.reset();
  ReplicaSample r;
  r.replica_count = 2;
  r.d = d;
  r.horizon = n;
  for (int t = 0; t < n; ++t) {
    if (std::equal(w0.pos().begin(), w0.pos().end(), w1.pos().begin()))
      ++r.pair_intersections[0];
    w0.step(s);
    w1.step(s);
  }
  std::copy(w0.pos().begin(), w0.pos().end(), r.endpoints[0].begin());
  std::copy(w1.pos().begin(), w1.pos().end(), r.endpoints[1].begin());
  return r;
}

CoincidenceClass classify_quad(const std::array<Coords, 4>& p, int d) {
  auto eq = [&](int i, int j) {
    return std::memcmp(p[static_cast<size_t>(i)].data(), p[static_cast<size_t>(j)].data(),
                       sizeof(int) * static_cast<size_t>(d)) == 0;
  };
  int e = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) e += eq(i, j) ? 1 : 0;
  switch (e) {
    case 6: return CoincidenceClass::all_four;
    case 3: return CoincidenceClass::three;
    case 2: return CoincidenceClass::two_two;
    case 1: return CoincidenceClass::two_zero;
    default: return CoincidenceClass::none;
  }
}

ReplicaSample sample_quad(int d, int n, Stream& s) {
  check_dimension(d);
  std::array<Walk, 4> w{Walk(d), Walk(d), Walk(d), Walk(d)};
  for (auto& x : w) x.reset();
  ReplicaSample r;
  r.replica_count = 4;
  r.d = d;
  r.horizon = n;
  std::array<Coords, 4> pos{};
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < 4; ++i)
      std::copy(w[static_cast<size_t>(i)].pos().begin(), w[static_cast<size_t>(i)].pos().end(),
                pos[static_cast<size_t>(i)].begin());
    int pair = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j, ++pair)
        if (std::memcmp(pos[static_cast<size_t>(i)].data(), pos[static_cast<size_t>(j)].data(),
                        sizeof(int) * static_cast<size_t>(d)) == 0)
          ++r.pair_intersections[static_cast<size_t>(pair)];
    switch (classify_quad(pos, d)) {
      case CoincidenceClass::all_four: ++r.n4; break;
      case CoincidenceClass::three: ++r.n3; break;
      case CoincidenceClass::two_two: ++r.n22; break;
      case CoincidenceClass::two_zero: ++r.n20; break;
      case CoincidenceClass::none: break;
    }
    for (auto& x : w) x.step(s);
  }
  for (int i = 0; i < 4; ++i)
    std::copy(w[static_cast<size_t>(i)].pos().begin(), w[static_cast<size_t>(i)].pos().end(),
              r.endpoints[static_cast<size_t>(i)].begin());
  return r;
}

double PairLawTable::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.prob;
  return s;
}

double PairLawTable::expectation(const std::function<double(int64_t)>& w,
                                 const std::function<double(std::span<const int>)>& f) const {
  double s = 0.0;
  for (const auto& e : entries)
    s += e.prob * w(e.n_intersections) * f({e.z.data(), static_cast<size_t>(d)});
  return s;
}

double PairLawTable::exp_weighted(double lambda2,
                                  const std::function<double(std::span<const int>)>& f) const {
  return expectation(
      [lambda2](int64_t k) { return std::exp(lambda2 * static_cast<double>(k)); }, f);
}

std::vector<double> PairLawTable::intersection_marginal() const {
  std::vector<double> m(static_cast<size_t>(horizon), 0.0);
  for (const auto& e : entries) m[static_cast<size_t>(e.n_intersections - 1)] += e.prob;
  return m;
}

PairLawTable enumerate_pair_exact(int n, int d) {
  check_dimension(d);
  if (n < 1 || n > 6) throw DomainError("enumerate_pair_exact: horizon capped at 6");
  const int L = 2 * n;                 // |z_i| <= 2n
  const int side = 2 * L + 1;
  size_t spatial = 1;
  for (int i = 0; i < d; ++i) spatial *= static_cast<size_t>(side);
  const size_t nk = static_cast<size_t>(n);  // N_n in 1..n
  if (spatial * nk > (size_t{1} << 28)) throw DomainError("enumerate_pair_exact: state space too large");

  // difference-walk step distribution
  DiffWalk proto(d);
  struct Delta {
    std::array<int, kMaxDim> dz;
    double p;
  };
  std::vector<Delta> steps;
  {
    int m = 2 * d;
    double w = 1.0 / static_cast<double>(m * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        std::array<int, kMaxDim> dz{};
        dz[a >> 1] += (a & 1) ? 1 : -1;
        dz[b >> 1] -= (b & 1) ? 1 : -1;
        auto it = std::find_if(steps.begin(), steps.end(),
                               [&](const Delta& e) { return e.dz == dz; });
        if (it == steps.end())
          steps.push_back({dz, w});
        else
          it->p += w;
      }
  }

  std::vector<size_t> stride(static_cast<size_t>(d));
  stride[0] = nk;
  for (int i = 1; i < d; ++i) stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i - 1)] * static_cast<size_t>(side);
  auto index = [&](std::span<const int> z, int64_t k) {
    size_t idx = static_cast<size_t>(k - 1);
    for (int i = 0; i < d; ++i) idx += static_cast<size_t>(z[static_cast<size_t>(i)] + L) * stride[static_cast<size_t>(i)];
    return idx;
  };

  std::vector<double> cur(spatial * nk, 0.0), nxt(spatial * nk, 0.0);
  Coords z0{};
  // time 0: z = 0 and the t = 0 slice already counted (N >= 1)
  cur[index({z0.data(), static_cast<size_t>(d)}, 1)] = 1.0;

  Coords z{};
  for (int t = 1; t <= n; ++t) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    const int Lprev = 2 * (t - 1);
    // iterate the populated box
    std::vector<int> c(static_cast<size_t>(d), -Lprev);
    for (;;) {
      for (int i = 0; i < d; ++i) z[static_cast<size_t>(i)] = c[static_cast<size_t>(i)];
      for (size_t k = 1; k <= nk; ++k) {
        double p = cur[index({z.data(), static_cast<size_t>(d)}, static_cast<int64_t>(k))];
        if (p == 0.0) continue;
        // N counts slices 0..n-1; the slice reached at time t counts when t < n
        int64_t k2 = static_cast<int64_t>(k);
        for (const auto& st : steps) {
          Coords zn = z;
          for (int i = 0; i < d; ++i) zn[static_cast<size_t>(i)] += st.dz[static_cast<size_t>(i)];
          bool zero_next = true;
          for (int i = 0; i < d; ++i) zero_next = zero_next && zn[static_cast<size_t>(i)] == 0;
          int64_t kn = k2 + ((t < n && zero_next) ? 1 : 0);
          nxt[index({zn.data(), static_cast<size_t>(d)}, kn)] += p * st.p;
        }
      }
      int i = 0;
      for (; i < d; ++i) {
        if (++c[static_cast<size_t>(i)] <= Lprev) break;
        c[static_cast<size_t>(i)] = -Lprev;
      }
      if (i == d) break;
    }
    cur.swap(nxt);
  }

  PairLawTable table;
  table.d = d;
  table.horizon = n;
  std::vector<int> c(static_cast<size_t>(d), -L);
  for (;;) {
    for (int i = 0; i < d; ++i) z[static_cast<size_t>(i)] = c[static_cast<size_t>(i)];
    for (size_t k = 1; k <= nk; ++k) {
      double p = cur[index({z.data(), static_cast<size_t>(d)}, static_cast<int64_t>(k))];
      if (p > 0.0) table.entries.push_back({static_cast<int64_t>(k), z, p});
    }
    int i = 0;
    for (; i < d; ++i) {
      if (++c[static_cast<size_t>(i)] <= L) break;
      c[static_cast<size_t>(i)] = -L;
    }
    if (i == d) break;
  }
  return table;
}

MomentEstimate pair_functional_mc(int d, int n, double lambda2,
                                  const std::function<double(std::span<const int>)>& endpoint_fn,
                                  int64_t budget, uint64_t seed, int threads) {
  check_dimension(d);
  if (n < 1 || budget < 1) throw DomainError("pair_functional_mc: need n >= 1, budget >= 1");
  int n_tasks = std::max<int>(1, std::min<int64_t>(256, budget / 1024 + 1));
  int64_t per_task = (budget + n_tasks - 1) / n_tasks;
  auto parts = run_tasks<MeanAccumulator>(n_tasks, threads, [&](int task) {
    Stream s = task_stream(seed, static_cast<uint64_t>(task));
    DiffWalk w(d);
    MeanAccumulator acc;
    for (int64_t i = 0; i < per_task; ++i) {
      w.reset();
      int64_t nn = 0;
      for (int t = 0; t < n; ++t) {
        if (w.at_origin()) ++nn;
        w.step(s);
      }
      acc.add(std::exp(lambda2 * static_cast<double>(nn)) * endpoint_fn(w.pos()));
    }
    return acc;
  });
  MeanAccumulator total;
  for (const auto& p : parts) total.merge(p);
  if (total.n >= 2 && total.variance() == 0.0) {
    // degenerate (e.g. lambda2 = 0 with constant f): exact value, zero stderr
    return {total.mean(), 0.0, total.n, Method::mc, seed};
  }
  return total.estimate(seed);
}

double exact_return_prob_2n(int d, int n) {
  check_dimension(d);
  if (n == 0) return 1.0;
  // p_{2n}(0) = (2n)! / (2d)^{2n} * sum_{a_1+..+a_d=n} prod 1/(a_i!)^2
  std::vector<double> lg(static_cast<size_t>(n + 1));
  for (int i = 0; i <= n; ++i) lg[static_cast<size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
  double base = std::lgamma(2.0 * n + 1.0) - 2.0 * n * std::log(2.0 * d);
  std::vector<int> a(static_cast<size_t>(d - 1), 0);
  double max_log = -1e300;
  std::vector<double> logs;
  // enumerate compositions of n into d parts via the first d-1 parts
  std::function<void(int, int)> rec = [&](int i, int remaining) {
    if (i == d - 1) {
      double s = base;
      for (int j = 0; j < d - 1; ++j) s -= 2.0 * lg[static_cast<size_t>(a[static_cast<size_t>(j)])];
      s -= 2.0 * lg[static_cast<size_t>(remaining)];
      logs.push_back(s);
      max_log = std::max(max_log, s);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      a[static_cast<size_t>(i)] = v;
      rec(i + 1, remaining - v);
    }
  };
  rec(0, n);
  double sum = 0.0;
  for (double s : logs) sum += std::exp(s - max_log);
  return std::exp(max_log) * sum;
}

}  // namespace polymer
