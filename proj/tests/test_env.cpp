#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/normal.hpp"
#include "polymer/stats.hpp"

using namespace polymer;

TEST_SUITE("env") {

TEST_CASE("gaussian cumulants are the closed quadratic forms") {
  auto c = cumulants(EnvLaw::gaussian(), 0.2);
  CHECK(c.lambda == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(c.lambda2 == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(c.lambda3 == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(c.lambda4 == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(c.kappa2 == doctest::Approx(std::exp(0.04) - 1.0).epsilon(1e-12));
  CHECK(c.gamma2 == doctest::Approx(c.kappa2 * c.kappa2).epsilon(1e-12));
  // centered fourth moment of the unit-mean weight, expanded independently
  double g4 = std::exp(0.24) - 4.0 * std::exp(0.12) + 6.0 * std::exp(0.04) - 3.0;
  CHECK(c.gamma4 == doctest::Approx(g4).epsilon(1e-12));
}

TEST_CASE("log-MGF closed forms per law") {
  CHECK(log_mgf(EnvLaw::gaussian(), 0.7) == doctest::Approx(0.245).epsilon(1e-12));
  CHECK(log_mgf(EnvLaw::rademacher(), 0.3) ==
        doctest::Approx(std::log(std::cosh(0.3))).epsilon(1e-12));
  double p = 0.3, b = 0.5;
  CHECK(log_mgf(EnvLaw::bernoulli(p), b) ==
        doctest::Approx(std::log(1.0 - p + p * std::exp(b))).epsilon(1e-12));
}

TEST_CASE("cumulants match a direct MGF-ratio oracle for a discrete law") {
  // lambda_m = lambda(m b) - m lambda(b), evaluated through raw expectations
  EnvLaw law = EnvLaw::bernoulli(0.4);
  double b = 0.3;
  auto c = cumulants(law, b);
  auto mgf = [&](double t) { return 0.6 + 0.4 * std::exp(t); };
  for (int m = 2; m <= 4; ++m)
    CHECK(c.lambda_m(m) ==
          doctest::Approx(std::log(mgf(m * b)) - m * std::log(mgf(b))).epsilon(1e-12));
}

TEST_CASE("law validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(EnvLaw::bernoulli(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(EnvLaw::bernoulli(1.5).validate(), ConfigError);
  CHECK_THROWS_AS(parse_law("cauchy"), ConfigError);
  CHECK(parse_law("gaussian").kind == LawKind::gaussian);
}

TEST_CASE("quantile is the inverse of the CDF") {
  EnvLaw g = EnvLaw::gaussian();
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.999})
    CHECK(g.cdf(g.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
  // discrete laws: quantile lands on atoms with the right mass split
  EnvLaw r = EnvLaw::rademacher();
  CHECK(r.quantile(0.25) == -1.0);
  CHECK(r.quantile(0.75) == 1.0);
}

TEST_CASE("field values are a pure function of (seed, t, x)") {
  EnvFieldSpec spec{EnvLaw::gaussian(), 0.2, 42};
  std::vector<int> x{3, -1, 7};
  double v = env_value(spec, 11, x);
  CHECK(env_value(spec, 11, x) == v);
  EnvFieldSpec other = spec;
  other.seed = 43;
  CHECK(env_value(other, 11, x) != v);
  CHECK(env_value(spec, 12, x) != v);
  std::vector<int> y{3, -1, 8};
  CHECK(env_value(spec, 11, y) != v);
}

TEST_CASE("field rejects coordinates outside the packing bounds") {
  EnvFieldSpec spec{EnvLaw::gaussian(), 0.2, 1};
  std::vector<int> far{1 << 15, 0, 0};
  CHECK_THROWS_AS(env_value(spec, 0, far), DomainError);
  std::vector<int> ok{(1 << 15) - 1, 0, 0};
  CHECK_NOTHROW(env_value(spec, 0, ok));
  CHECK_THROWS_AS(env_value(spec, -1, ok), DomainError);
  CHECK_THROWS_AS(env_value(spec, kMaxTime, ok), DomainError);
}

TEST_CASE("field marginal passes a KS test against the law") {
  EnvFieldSpec spec{EnvLaw::gaussian(), 0.2, 7};
  std::vector<double> sample;
  std::vector<int> x{0, 0, 0};
  for (int t = 0; t < 40; ++t)
    for (int i = -12; i <= 12; ++i) {
      x[0] = i;
      for (int j = -2; j <= 2; ++j) {
        x[1] = j;
        sample.push_back(env_value(spec, t, x));
      }
    }
  auto rep = ks_gaussian(sample, 0.0, 1.0);
  CHECK(rep.p_value > 1e-4);
}

TEST_CASE("quantized site weights have exact unit mean over the table") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 5}, 12);
  // empirical mean over many sites concentrates on 1
  double sum = 0.0;
  int64_t cnt = 0;
  std::vector<int> x{0, 0, 0};
  for (int t = 0; t < 100; ++t)
    for (int i = -50; i <= 50; ++i) {
      x[0] = i;
      double f = w.factor(t, x);
      CHECK(f > 0.0);
      sum += f;
      ++cnt;
    }
  double mean = sum / static_cast<double>(cnt);
  CHECK(mean == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("quantized weights track the exact factor closely") {
  EnvFieldSpec spec{EnvLaw::gaussian(), 0.2, 9};
  SiteWeights quant(spec, 12), exact(spec, 0);
  std::vector<int> x{0, 0, 0};
  double worst = 0.0;
  for (int i = -40; i <= 40; ++i) {
    x[0] = i;
    double q = quant.factor(3, x), e = exact.factor(3, x);
    worst = std::max(worst, std::abs(q - e) / e);
  }
  // one quantile cell is 2^-12 of the unit interval
  CHECK(worst < 5e-3);
}

TEST_CASE("with_seed changes the field but not the law or table") {
  SiteWeights w(EnvFieldSpec{EnvLaw::gaussian(), 0.2, 5});
  SiteWeights w2 = w.with_seed(6);
  CHECK(w2.spec().seed == 6);
  CHECK(w2.lambda() == w.lambda());
  std::vector<int> x{1, 2, 3};
  CHECK(w.factor(0, x) != w2.factor(0, x));
}

TEST_CASE("second-moment region check at the working point") {
  auto c = cumulants(EnvLaw::gaussian(), 0.2);
  double pi3 = 0.34053732955;
  auto region = l2_region_check(c, pi3);
  CHECK(region.inside);
  CHECK(region.margin == doctest::Approx(std::log(1.0 / pi3) - 0.04).epsilon(1e-9));
  // a beta large enough to leave the region
  auto hot = cumulants(EnvLaw::gaussian(), 1.2);
  CHECK_FALSE(l2_region_check(hot, pi3).inside);
}

TEST_CASE("inverse normal CDF round-trips") {
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5})
    CHECK(inv_normal_cdf(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-7));
}

}  // TEST_SUITE
