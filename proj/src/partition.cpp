#include "polymer/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polymer/lattice.hpp"

namespace polymer {

namespace {

inline int parity_offset(int64_t v) { return static_cast<int>(((v % 2) + 2) % 2); }

// least-squares slope of log f vs log k over [lo, hi)
double loglog_slope_fit(const std::vector<double>& f, int64_t lo, int64_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int64_t n = 0;
  for (int64_t k = lo; k < hi; ++k) {
    double v = f[static_cast<size_t>(k)];
    if (!(v > 0.0)) continue;
    double x = std::log(static_cast<double>(k));
    double y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  double den = n * sxx - sx * sx;
  if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

}  // namespace

int box_radius(int64_t k, int d, double box_sigma) {
  double r = box_sigma * std::sqrt(static_cast<double>(k + 1) / d);
  auto ri = static_cast<int64_t>(std::ceil(r));
  return static_cast<int>(std::min<int64_t>(k, ri));
}

double EndpointProfile::at(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != d) throw DomainError("EndpointProfile::at: wrong dimension");
  int64_t l1 = 0;
  for (int c : x) l1 += c < 0 ? -c : c;
  if (l1 > horizon || ((l1 ^ horizon) & 1)) return 0.0;
  size_t side = static_cast<size_t>(2 * radius + 1);
  size_t idx = 0;
  for (int i = 0; i < d; ++i) {
    int c = x[static_cast<size_t>(i)];
    if (c < -radius || c > radius) return 0.0;  // truncated away
    idx = idx * side + static_cast<size_t>(c + radius);
  }
  return vals[idx];
}

MartingaleTrace evolve_profile(const SiteWeights& weights, int d, const EvolveOptions& opt) {
  check_dimension(d);
  const EnvFieldSpec& spec = weights.spec();
  bool standard = spec.convention == Convention::standard;
  int64_t K_user = opt.horizon;
  if (K_user < 1) throw DomainError("evolve_profile: horizon >= 1 required");
  int64_t K = K_user + (standard ? 1 : 0);
  if (K >= kMaxTime) throw DomainError("evolve_profile: horizon exceeds time packing bound");

  const int Lmax = box_radius(K, d, opt.box_sigma);
  if (Lmax + 1 >= kMaxCoord)
    throw DomainError("evolve_profile: box exceeds coordinate packing bound");
  const int pad = Lmax + 1;  // one-cell zero ring so the stencil never reads out of bounds
  const size_t side = static_cast<size_t>(2 * pad + 1);
  size_t total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  double bytes = static_cast<double>(total) * sizeof(double);
  if (bytes > opt.memory_budget_bytes)
    throw ConfigError("evolve_profile: profile buffer needs " +
                      std::to_string(bytes / 1e9) + " GB, over the " +
                      std::to_string(opt.memory_budget_bytes / 1e9) + " GB budget");

  std::array<size_t, kMaxDim> stride{};
  stride[static_cast<size_t>(d - 1)] = 1;
  for (int i = d - 2; i >= 0; --i) stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i + 1)] * side;

  std::vector<double> vals(total, 0.0);
  size_t center = 0;
  for (int i = 0; i < d; ++i) center += static_cast<size_t>(pad) * stride[static_cast<size_t>(i)];
  vals[center] = 1.0;

  std::vector<int64_t> checks = opt.profile_checkpoints;
  if (standard)
    for (auto& c : checks) ++c;
  std::sort(checks.begin(), checks.end());

  MartingaleTrace trace;
  trace.d = d;
  trace.horizon = K_user;
  trace.env = spec;
  std::vector<double> W(static_cast<size_t>(K) + 1, 0.0), I(static_cast<size_t>(K) + 1, 0.0);

  const double inv2d = 1.0 / (2 * d);
  std::array<int, kMaxDim> x{};

  for (int64_t k = 0; k <= K; ++k) {
    const int Lk = box_radius(k, d, opt.box_sigma);
    const bool premult = k < K;
    const bool snapshot = std::binary_search(checks.begin(), checks.end(), k);
    EndpointProfile prof;
    if (snapshot) {
      prof.d = d;
      prof.horizon = k;
      prof.radius = Lk;
      size_t s = static_cast<size_t>(2 * Lk + 1), t = 1;
      for (int i = 0; i < d; ++i) t *= s;
      prof.vals.assign(t, 0.0);
    }

    // measure W_k, I_k on the raw slice; then fold in the site weight and the
    // step normalization so the stencil below is a plain neighbor sum
    double Wk = 0.0, Ik = 0.0;
    for (int i = 0; i < d - 1; ++i) x[static_cast<size_t>(i)] = -Lk;
    for (;;) {
      int64_t s = 0;
      size_t base = 0;
      for (int i = 0; i < d - 1; ++i) {
        s += x[static_cast<size_t>(i)];
        base += static_cast<size_t>(x[static_cast<size_t>(i)] + pad) * stride[static_cast<size_t>(i)];
      }
      int start = -Lk + parity_offset(k + s + Lk);
      for (int xd = start; xd <= Lk; xd += 2) {
        size_t idx = base + static_cast<size_t>(xd + pad);
        double v = vals[idx];
        if (v != 0.0) {
          Wk += v;
          Ik += v * v;
          x[static_cast<size_t>(d - 1)] = xd;
          if (snapshot) {
            size_t pidx = 0;
            for (int i = 0; i < d; ++i)
              pidx = pidx * static_cast<size_t>(2 * Lk + 1) +
                     static_cast<size_t>(x[static_cast<size_t>(i)] + Lk);
            prof.vals[pidx] = v;
          }
          if (premult)
            vals[idx] = v * weights.factor(k, {x.data(), static_cast<size_t>(d)}) * inv2d;
        }
      }
      int i = d - 2;
      for (; i >= 0; --i) {
        if (++x[static_cast<size_t>(i)] <= Lk) break;
        x[static_cast<size_t>(i)] = -Lk;
      }
      if (i < 0) break;
    }
    W[static_cast<size_t>(k)] = Wk;
    I[static_cast<size_t>(k)] = Ik;
    if (Wk <= 0.0) throw NumericalError("evolve_profile: profile mass underflowed to 0");
    if (snapshot) {
      prof.mass = Wk;
      prof.overlap = Ik;
      trace.profiles.push_back(std::move(prof));
    }
    if (!premult) break;

    // advance: write the k+1 slice as the neighbor sum of the premultiplied
    // k slice. Sites of slice parity outside their box were never written and
    // read as exact zeros, so stale cells cannot leak in.
    const int Ln = box_radius(k + 1, d, opt.box_sigma);
    for (int i = 0; i < d - 1; ++i) x[static_cast<size_t>(i)] = -Ln;
    for (;;) {
      int64_t s = 0;
      size_t base = 0;
      for (int i = 0; i < d - 1; ++i) {
        s += x[static_cast<size_t>(i)];
        base += static_cast<size_t>(x[static_cast<size_t>(i)] + pad) * stride[static_cast<size_t>(i)];
      }
      int start = -Ln + parity_offset(k + 1 + s + Ln);
      for (int yd = start; yd <= Ln; yd += 2) {
        size_t idx = base + static_cast<size_t>(yd + pad);
        double acc = vals[idx - 1] + vals[idx + 1];
        for (int i = 0; i < d - 1; ++i)
          acc += vals[idx - stride[static_cast<size_t>(i)]] + vals[idx + stride[static_cast<size_t>(i)]];
        vals[idx] = acc;
      }
      int i = d - 2;
      for (; i >= 0; --i) {
        if (++x[static_cast<size_t>(i)] <= Ln) break;
        x[static_cast<size_t>(i)] = -Ln;
      }
      if (i < 0) break;
    }
  }

  if (!standard) {
    trace.W = std::move(W);
    trace.I = std::move(I);
    return trace;
  }

  // standard convention: weight at the arrival site, W'_k = W_{k+1} / w(0,0)
  std::array<int, kMaxDim> origin{};
  double w0 = weights.factor(0, {origin.data(), static_cast<size_t>(d)});
  trace.W.resize(static_cast<size_t>(K_user) + 1);
  trace.I.resize(static_cast<size_t>(K_user) + 1);
  for (int64_t k = 0; k <= K_user; ++k) {
    trace.W[static_cast<size_t>(k)] = W[static_cast<size_t>(k + 1)] / w0;
    trace.I[static_cast<size_t>(k)] = I[static_cast<size_t>(k + 1)] / (w0 * w0);
  }
  for (auto& p : trace.profiles) {
    p.horizon -= 1;
    p.mass /= w0;
    p.overlap /= (w0 * w0);
    for (auto& v : p.vals) v /= w0;
  }
  return trace;
}

CondVarSum conditional_variance_sum(const MartingaleTrace& trace, int64_t n, int64_t K,
                                    double kappa2) {
  if (!(0 <= n && n < K && K <= trace.horizon))
    throw DomainError("conditional_variance_sum: need 0 <= n < K <= horizon");
  double scale = kappa2 * std::pow(static_cast<double>(n), (trace.d - 2) / 2.0);
  double sum = 0.0;
  for (int64_t k = n; k < K; ++k) sum += trace.I[static_cast<size_t>(k)];

  CondVarSum out;
  out.value = scale * sum;
  out.tail_slope = loglog_slope_fit(trace.I, std::max<int64_t>(n, K / 2), K);
  if (out.tail_slope < -1.0) {
    // power-law extrapolation of the dropped terms sum_{k >= K} I_k
    double tail = trace.I[static_cast<size_t>(K - 1)] * static_cast<double>(K - 1) /
                  (-out.tail_slope - 1.0);
    out.tail_estimate = scale * tail;
  } else {
    out.tail_estimate = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

WindowStat window_statistic(const MartingaleTrace& trace, int64_t n, int64_t R) {
  if (R < 2) throw DomainError("window_statistic: R >= 2 required");
  if (n < 1 || R * n > trace.horizon)
    throw DomainError("window_statistic: need 1 <= n and R*n <= horizon");
  WindowStat s;
  s.w_n = trace.W[static_cast<size_t>(n)];
  s.w_rn = trace.W[static_cast<size_t>(R * n)];
  s.value = std::pow(static_cast<double>(n), (trace.d - 2) / 4.0) * (s.w_rn - s.w_n) / s.w_n;
  return s;
}

}  // namespace polymer
