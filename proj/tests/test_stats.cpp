#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/normal.hpp"
#include "polymer/rng.hpp"
#include "polymer/stats.hpp"

using namespace polymer;

TEST_SUITE("stats") {

TEST_CASE("Kolmogorov tail function") {
  CHECK(kolmogorov_q(0.05) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kolmogorov_q(10.0) == doctest::Approx(0.0).epsilon(1e-12));
  // classical 5% critical point
  CHECK(kolmogorov_q(1.358) == doctest::Approx(0.05).epsilon(2e-2));
  CHECK(kolmogorov_q(0.8) > kolmogorov_q(1.2));
}

TEST_CASE("KS accepts a true Gaussian sample and rejects a shifted one") {
  Stream s(1);
  std::vector<double> x;
  for (int i = 0; i < 4000; ++i) x.push_back(2.0 + 0.5 * s.normal());
  CHECK(ks_gaussian(x, 2.0, 0.25).p_value > 1e-4);
  CHECK(ks_gaussian(x, 2.3, 0.25).p_value < 1e-8);
  CHECK(ks_gaussian(x, 2.0, 1.0).p_value < 1e-8);
}

TEST_CASE("KS input validation") {
  std::vector<double> tiny(10, 0.5);
  CHECK_THROWS_AS(ks_gaussian(tiny, 0.0, 1.0), DomainError);
  std::vector<double> flat(100, 1.0);
  CHECK_THROWS_AS(ks_gaussian(flat, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(ks_gaussian(flat, 0.0, -1.0), DomainError);
}

TEST_CASE("two-sample KS distinguishes distributions") {
  Stream s(2);
  std::vector<double> a, b, c;
  for (int i = 0; i < 3000; ++i) {
    a.push_back(s.normal());
    b.push_back(s.normal());
    c.push_back(s.normal() + 0.25);
  }
  CHECK(ks_two_sample(a, b).p_value > 1e-4);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("geometric chi-square accepts the true law and rejects a wrong pi") {
  Stream s(3);
  double pi = 0.34;
  std::vector<int64_t> hist(64, 0);
  for (int i = 0; i < 100000; ++i) {
    int64_t k = 1;
    while (s.uniform() < pi) ++k;
    ++hist[static_cast<size_t>(std::min<int64_t>(k - 1, 63))];
  }
  CHECK(chi2_geometric(hist, pi).p_value > 1e-4);
  CHECK(chi2_geometric(hist, 0.30).p_value < 1e-8);
}

TEST_CASE("Pearson correlation on exact data") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{2, 4, 6, 8, 10};
  CHECK(pearson_corr(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> z{5, 4, 3, 2, 1};
  CHECK(pearson_corr(x, z) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("mixing proxy sees independence and dependence") {
  Stream s(4);
  std::vector<double> cond, stat, dep;
  for (int i = 0; i < 4000; ++i) {
    double c = s.normal();
    cond.push_back(c);
    stat.push_back(s.normal());
    dep.push_back(c + 0.3 * s.normal());
  }
  auto ind = mixing_proxy(cond, stat, 2);
  CHECK(std::abs(ind.corr) < 0.05);
  CHECK(ind.split_ks.p_value > 1e-4);
  auto d = mixing_proxy(cond, dep, 2);
  CHECK(d.corr > 0.8);
  CHECK(d.split_ks.p_value < 1e-8);
}

TEST_CASE("log-log slope recovers an exact power law") {
  std::vector<double> k{2, 4, 8, 16, 32}, v;
  for (double x : k) v.push_back(3.5 * std::pow(x, -1.5));
  auto fit = loglog_slope(k, v);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(fit.slope_err < 1e-8);
}

TEST_CASE("weighted slope fit stays within its own error bars") {
  Stream s(5);
  std::vector<double> k, v, e;
  for (double x : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    double val = 2.0 * std::pow(x, -0.5);
    double err = 0.01 * val;
    k.push_back(x);
    v.push_back(val * (1.0 + 0.01 * s.normal()));
    e.push_back(err);
  }
  auto fit = loglog_slope(k, v, e);
  CHECK(std::abs(fit.slope + 0.5) < 4.0 * fit.slope_err);
}

TEST_CASE("slope fit input validation") {
  std::vector<double> k{1, 2}, v{1, 2};
  CHECK_THROWS_AS(loglog_slope(k, v), NumericalError);
  std::vector<double> k3{1, 2, 3}, bad{1.0, -2.0, 3.0};
  CHECK_THROWS_AS(loglog_slope(k3, bad), DomainError);
}

}  // TEST_SUITE
