#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/estimate.hpp"
#include "polymer/lattice.hpp"
#include "polymer/partition.hpp"
#include "polymer/rng.hpp"

using namespace polymer;

TEST_SUITE("partition") {

TEST_CASE("zero coupling reduces the profile to the walk distribution") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.0, 3});
  EvolveOptions opt;
  opt.horizon = 64;
  opt.box_sigma = 8.5;
  opt.profile_checkpoints = {8, 64};
  auto trace = evolve_profile(w, 3, opt);
  for (int64_t k = 0; k <= 64; ++k)
    CHECK(trace.W[static_cast<size_t>(k)] == doctest::Approx(1.0).epsilon(1e-11));
  // overlap = collision probability of two independent walks at time k
  for (int64_t k : {1, 2, 8, 32, 64})
    CHECK(trace.I[static_cast<size_t>(k)] ==
          doctest::Approx(exact_return_prob_2n(3, static_cast<int>(k))).epsilon(1e-9));
  // checkpointed profile: W_8(x) = P(S_8 = x), spot-check the origin
  REQUIRE(trace.profiles.size() == 2);
  const auto& p8 = trace.profiles[0];
  CHECK(p8.horizon == 8);
  std::vector<int> zero{0, 0, 0};
  double p0 = p8.at(zero);
  // P(S_8 = 0) = p_{2*4}(0)
  CHECK(p0 == doctest::Approx(exact_return_prob_2n(3, 4)).epsilon(1e-9));
  CHECK(p8.mass == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("profile mass and overlap line up with the trace") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 11});
  EvolveOptions opt;
  opt.horizon = 24;
  opt.profile_checkpoints = {24};
  auto trace = evolve_profile(w, 3, opt);
  const auto& prof = trace.profiles[0];
  CHECK(prof.mass == doctest::Approx(trace.W[24]).epsilon(1e-12));
  CHECK(prof.overlap == doctest::Approx(trace.I[24]).epsilon(1e-12));
  double sum = 0.0, sumsq = 0.0;
  for (double v : prof.vals) {
    sum += v;
    sumsq += v * v;
  }
  CHECK(sum == doctest::Approx(prof.mass).epsilon(1e-12));
  CHECK(sumsq == doctest::Approx(prof.overlap).epsilon(1e-12));
}

TEST_CASE("partition function is a mean-one martingale over environments") {
  MeanAccumulator acc;
  SiteWeights proto(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 0});
  EvolveOptions opt;
  opt.horizon = 16;
  for (uint64_t i = 0; i < 400; ++i) {
    auto trace = evolve_profile(proto.with_seed(mix64(321, i)), 3, opt);
    acc.add(trace.W[16]);
  }
  CHECK(std::abs(acc.mean() - 1.0) < 3.0 * acc.stderr_of_mean());
}

TEST_CASE("martingale increments over disjoint windows are uncorrelated") {
  SiteWeights proto(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 0});
  EvolveOptions opt;
  opt.horizon = 8;
  MeanAccumulator cross, va, vb;
  for (uint64_t i = 0; i < 600; ++i) {
    auto trace = evolve_profile(proto.with_seed(mix64(77, i)), 3, opt);
    double d1 = trace.W[4] - trace.W[2];
    double d2 = trace.W[8] - trace.W[6];
    cross.add(d1 * d2);
    va.add(d1 * d1);
    vb.add(d2 * d2);
  }
  CHECK(std::abs(cross.mean()) < 3.0 * cross.stderr_of_mean());
  CHECK(va.mean() > 0.0);
}

TEST_CASE("standard convention rescales by the origin weight") {
  EnvFieldSpec spec{EnvLaw::gaussian(), 0.2, 5};
  SiteWeights w(spec);
  EvolveOptions opt;
  opt.horizon = 9;
  auto paper = evolve_profile(w, 3, opt);
  EnvFieldSpec std_spec = spec;
  std_spec.convention = Convention::standard;
  opt.horizon = 8;
  auto standard = evolve_profile(SiteWeights(std_spec), 3, opt);
  std::vector<int> origin{0, 0, 0};
  double w0 = w.factor(0, origin);
  for (int64_t k = 0; k <= 8; ++k)
    CHECK(standard.W[static_cast<size_t>(k)] ==
          doctest::Approx(paper.W[static_cast<size_t>(k + 1)] / w0).epsilon(1e-12));
}

TEST_CASE("conditional variance sum recomputes from the raw trace") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 13});
  EvolveOptions opt;
  opt.horizon = 32;
  auto trace = evolve_profile(w, 3, opt);
  double kappa2 = std::exp(0.04) - 1.0;
  auto cv = conditional_variance_sum(trace, 4, 32, kappa2);
  double direct = 0.0;
  for (int64_t k = 4; k < 32; ++k) direct += trace.I[static_cast<size_t>(k)];
  direct *= kappa2 * std::sqrt(4.0);
  CHECK(cv.value == doctest::Approx(direct).epsilon(1e-12));
  CHECK(cv.tail_estimate > 0.0);
  CHECK(cv.tail_slope < -1.0);
  CHECK_THROWS_AS(conditional_variance_sum(trace, 8, 64, kappa2), DomainError);
  CHECK_THROWS_AS(conditional_variance_sum(trace, -1, 32, kappa2), DomainError);
}

TEST_CASE("window statistic definition") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 19});
  EvolveOptions opt;
  opt.horizon = 12;
  auto trace = evolve_profile(w, 3, opt);
  auto ws = window_statistic(trace, 4, 3);
  CHECK(ws.w_n == trace.W[4]);
  CHECK(ws.w_rn == trace.W[12]);
  CHECK(ws.value ==
        doctest::Approx(std::pow(4.0, 0.25) * (ws.w_rn - ws.w_n) / ws.w_n).epsilon(1e-12));
  CHECK_THROWS_AS(window_statistic(trace, 4, 4), DomainError);  // Rn past horizon
  CHECK_THROWS_AS(window_statistic(trace, 4, 1), DomainError);  // R >= 2
}

TEST_CASE("diffusive truncation box grows like sqrt(k)") {
  CHECK(box_radius(0, 3, 6.0) >= 0);
  CHECK(box_radius(4, 3, 6.0) <= 4);  // never wider than the light cone
  int r100 = box_radius(100, 3, 6.0);
  int r400 = box_radius(400, 3, 6.0);
  CHECK(r400 <= 2 * r100 + 2);
  CHECK(r400 >= 2 * r100 - 2);
}

TEST_CASE("memory gate refuses oversized sweeps with an estimate") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 1});
  EvolveOptions opt;
  opt.horizon = 200000;
  opt.memory_budget_bytes = 1e6;
  CHECK_THROWS_AS(evolve_profile(w, 3, opt), ConfigError);
}

}  // TEST_SUITE
