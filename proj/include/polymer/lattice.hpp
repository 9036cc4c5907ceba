#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/estimate.hpp"
#include "polymer/rng.hpp"

namespace polymer {

inline constexpr int kMaxDim = 5;
using Coords = std::array<int, kMaxDim>;  // first d entries active

void check_dimension(int d);  // d in {3,4,5}

inline int parity(std::span<const int> x) {
  int s = 0;
  for (int c : x) s += c < 0 ? -c : c;
  return s & 1;
}

// Simple random walk: one unit step per call.
class Walk {
 public:
  explicit Walk(int d);
  void reset();
  void step(Stream& s) {
    uint32_t r = s.below(static_cast<uint32_t>(2 * d_));
    pos_[r >> 1] += (r & 1) ? 1 : -1;
  }
  std::span<const int> pos() const { return {pos_.data(), static_cast<size_t>(d_)}; }
  bool at(std::span<const int> x) const;
  bool at_origin() const;
  int dim() const { return d_; }

 private:
  int d_;
  Coords pos_{};
};

// Difference S - S~ of two independent simple walks, advanced one time slice
// per call. Uniform over the 4d^2 ordered step pairs, so its law is exactly
// the two-walk difference (a lazy 2-step walk).
class DiffWalk {
 public:
  explicit DiffWalk(int d);
  void reset();
  void reset(std::span<const int> start);
  void step(Stream& s) {
    const auto& dz = deltas_[s.below(n_deltas_)];
    for (int i = 0; i < d_; ++i) pos_[i] += dz[i];
  }
  bool at_origin() const {
    for (int i = 0; i < d_; ++i)
      if (pos_[i] != 0) return false;
    return true;
  }
  std::span<const int> pos() const { return {pos_.data(), static_cast<size_t>(d_)}; }
  int dim() const { return d_; }

 private:
  int d_;
  uint32_t n_deltas_;
  Coords pos_{};
  std::vector<std::array<int8_t, kMaxDim>> deltas_;
};

// 2- or 4-replica walk summary over horizon n.
struct ReplicaSample {
  int replica_count = 2;
  int d = 3;
  int horizon = 0;
  std::array<Coords, 4> endpoints{};
  // pairwise intersection counts N_n(i,j), pairs in lexicographic order
  // (0,1),(0,2),(0,3),(1,2),(1,3),(2,3); only (0,1) is set for pairs
  std::array<int64_t, 6> pair_intersections{};
  // coincidence-class counts, 4-replica only
  int64_t n4 = 0;     // all four equal
  int64_t n3 = 0;     // exactly three equal
  int64_t n22 = 0;    // two distinct pairs
  int64_t n20 = 0;    // one pair, two singletons
};

ReplicaSample sample_pair(int d, int n, Stream& s);
ReplicaSample sample_quad(int d, int n, Stream& s);

// coincidence pattern of a 4-tuple of positions
enum class CoincidenceClass { all_four, three, two_two, two_zero, none };
CoincidenceClass classify_quad(const std::array<Coords, 4>& p, int d);

// Exact joint law of (N_n, S_n - S~_n), built by dynamic programming on the
// difference walk.
struct PairLawTable {
  struct Entry {
    int64_t n_intersections;
    Coords z;
    double prob;
  };
  int d = 3;
  int horizon = 0;
  std::vector<Entry> entries;

  double total() const;
  // E[ w(N_n) f(z_n) ]
  double expectation(const std::function<double(int64_t)>& w,
                     const std::function<double(std::span<const int>)>& f) const;
  // E[ e^{lambda2 N_n} f(z_n) ]
  double exp_weighted(double lambda2,
                      const std::function<double(std::span<const int>)>& f) const;
  std::vector<double> intersection_marginal() const;  // index k-1 -> P(N_n = k)
};

PairLawTable enumerate_pair_exact(int n, int d);

// Monte Carlo estimate of P^{x2}[ e^{lambda2 N_n} f(S_n - S~_n) ] on the
// difference walk. Tasks fan out over independent seed streams.
MomentEstimate pair_functional_mc(int d, int n, double lambda2,
                                  const std::function<double(std::span<const int>)>& endpoint_fn,
                                  int64_t budget, uint64_t seed, int threads = 1);

// Exact 2n-step return probability P(S_{2n} = 0) of the simple walk
// (equivalently P(S_n = S~_n) for the difference walk), via the multinomial
// representation in log space.
double exact_return_prob_2n(int d, int n);

}  // namespace polymer
