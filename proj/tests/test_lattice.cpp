#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "polymer/lattice.hpp"
#include "polymer/rng.hpp"

using namespace polymer;

namespace {

// brute-force 2n-step return probability by enumerating step sequences
double brute_return_prob(int d, int n) {
  int steps = 2 * n;
  int64_t total = 1;
  for (int i = 0; i < steps; ++i) total *= 2 * d;
  int64_t hits = 0;
  std::vector<int> idx(static_cast<size_t>(steps), 0);
  for (int64_t code = 0; code < total; ++code) {
    int64_t c = code;
    std::array<int, kMaxDim> pos{};
    for (int i = 0; i < steps; ++i) {
      int r = static_cast<int>(c % (2 * d));
      c /= 2 * d;
      pos[static_cast<size_t>(r >> 1)] += (r & 1) ? 1 : -1;
    }
    bool zero = true;
    for (int i = 0; i < d; ++i) zero = zero && pos[static_cast<size_t>(i)] == 0;
    if (zero) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("parity is the l1 norm mod 2") {
  std::vector<int> a{1, -2, 3};
  CHECK(parity(a) == 0);
  std::vector<int> b{1, -2, 4};
  CHECK(parity(b) == 1);
}

TEST_CASE("dimension gate") {
  CHECK_NOTHROW(check_dimension(3));
  CHECK_NOTHROW(check_dimension(5));
  CHECK_THROWS_AS(check_dimension(2), ConfigError);
  CHECK_THROWS_AS(check_dimension(6), ConfigError);
}

TEST_CASE("walk steps are unit moves with near-uniform direction counts") {
  Stream s(1);
  Walk w(3);
  std::map<std::array<int, kMaxDim>, int64_t> counts;
  const int64_t n = 60000;
  std::array<int, kMaxDim> prev{};
  for (int64_t i = 0; i < n; ++i) {
    w.step(s);
    std::array<int, kMaxDim> cur{};
    int l1 = 0;
    for (int j = 0; j < 3; ++j) {
      cur[static_cast<size_t>(j)] = w.pos()[static_cast<size_t>(j)];
      l1 += std::abs(cur[static_cast<size_t>(j)] - prev[static_cast<size_t>(j)]);
    }
    REQUIRE(l1 == 1);
    std::array<int, kMaxDim> delta{};
    for (int j = 0; j < 3; ++j) delta[static_cast<size_t>(j)] = cur[static_cast<size_t>(j)] - prev[static_cast<size_t>(j)];
    ++counts[delta];
    prev = cur;
  }
  REQUIRE(counts.size() == 6);
  for (auto& [_, c] : counts) {
    double expect = n / 6.0;
    CHECK(std::abs(c - expect) < 5.0 * std::sqrt(expect));
  }
}

TEST_CASE("difference walk has the two-independent-steps law") {
  // per slice: P(0) = 1/(2d), P(+-2e_i) = 1/(4d^2), P(e_i-e_j mix) = 2/(4d^2)
  Stream s(2);
  DiffWalk w(3);
  int64_t zero = 0, two_axis = 0;
  const int64_t n = 200000;
  for (int64_t i = 0; i < n; ++i) {
    w.reset();
    w.step(s);
    int l1 = 0, linf = 0;
    for (int j = 0; j < 3; ++j) {
      l1 += std::abs(w.pos()[static_cast<size_t>(j)]);
      linf = std::max(linf, std::abs(w.pos()[static_cast<size_t>(j)]));
    }
    REQUIRE(l1 <= 2);
    REQUIRE(l1 % 2 == 0);
    if (l1 == 0) ++zero;
    if (linf == 2) ++two_axis;
  }
  double p0 = 1.0 / 6.0, p2 = 6.0 / 36.0;  // 6 axis-double outcomes of 36
  CHECK(std::abs(zero - n * p0) < 5.0 * std::sqrt(n * p0));
  CHECK(std::abs(two_axis - n * p2) < 5.0 * std::sqrt(n * p2));
}

TEST_CASE("exact return probability vs brute-force path enumeration") {
  CHECK(exact_return_prob_2n(3, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(exact_return_prob_2n(3, 2) == doctest::Approx(brute_return_prob(3, 2)).epsilon(1e-12));
  CHECK(exact_return_prob_2n(4, 2) == doctest::Approx(brute_return_prob(4, 2)).epsilon(1e-12));
}

TEST_CASE("pair law table is a probability law and matches the small-n closed form") {
  auto table = enumerate_pair_exact(2, 3);
  CHECK(table.total() == doctest::Approx(1.0).epsilon(1e-12));
  auto marg = table.intersection_marginal();
  double sum = 0.0;
  for (double p : marg) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // slices t = 0,1: N = 1 + 1{walks meet after one slice}, meet prob 1/(2d)
  double l2 = 0.04;
  double expect = std::exp(l2) * (5.0 / 6.0 + std::exp(l2) / 6.0);
  CHECK(table.exp_weighted(l2, [](std::span<const int>) { return 1.0; }) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("pair MC agrees with exact enumeration on a joint functional") {
  auto table = enumerate_pair_exact(4, 3);
  auto f = [](std::span<const int> z) {
    double q = 0.0;
    for (int c : z) q += static_cast<double>(c) * c;
    return 1.0 / (1.0 + q);
  };
  double exact = table.exp_weighted(0.04, f);
  auto mc = pair_functional_mc(3, 4, 0.04, f, 400000, 99, 2);
  CHECK(std::abs(mc.value - exact) < 3.0 * mc.stderr_);
}

TEST_CASE("sampled pair intersections match the exact mean") {
  auto table = enumerate_pair_exact(3, 3);
  double exact_mean =
      table.expectation([](int64_t n) { return static_cast<double>(n); },
                        [](std::span<const int>) { return 1.0; });
  Stream s(5);
  double sum = 0.0;
  const int64_t m = 100000;
  double sumsq = 0.0;
  for (int64_t i = 0; i < m; ++i) {
    auto rep = sample_pair(3, 3, s);
    double v = static_cast<double>(rep.pair_intersections[0]);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / m;
  double se = std::sqrt((sumsq / m - mean * mean) / m);
  CHECK(std::abs(mean - exact_mean) < 3.0 * se);
}

TEST_CASE("coincidence classification of 4-tuples") {
  auto mk = [](std::array<std::array<int, 3>, 4> pts) {
    std::array<Coords, 4> out{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) out[static_cast<size_t>(i)][static_cast<size_t>(j)] = pts[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return out;
  };
  CHECK(classify_quad(mk({{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}), 3) ==
        CoincidenceClass::all_four);
  CHECK(classify_quad(mk({{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 0, 0}}}), 3) ==
        CoincidenceClass::three);
  CHECK(classify_quad(mk({{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {1, 0, 0}}}), 3) ==
        CoincidenceClass::two_two);
  CHECK(classify_quad(mk({{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {2, 0, 0}}}), 3) ==
        CoincidenceClass::two_zero);
  CHECK(classify_quad(mk({{{0, 0, 0}, {3, 0, 0}, {1, 0, 0}, {2, 0, 0}}}), 3) ==
        CoincidenceClass::none);
}

TEST_CASE("quad sampler slice classes are consistent") {
  Stream s(11);
  for (int i = 0; i < 200; ++i) {
    auto rep = sample_quad(3, 6, s);
    // every slice lands in exactly one class or none; 6 slices total
    CHECK(rep.n4 + rep.n3 + rep.n22 + rep.n20 <= 6);
    CHECK(rep.n4 >= 1);  // slice t = 0 has all four replicas at the origin
  }
}

}  // TEST_SUITE
