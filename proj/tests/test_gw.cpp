#include <doctest.h>

#include <cmath>

#include "polymer/gw.hpp"

using namespace polymer;

TEST_SUITE("gw") {

TEST_CASE("config validation") {
  GwConfig c;
  c.mean = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.mean = 2.0;
  c.n = 5;
  c.N = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.N = 10;
  CHECK_NOTHROW(c.validate());

  GwConfig t;
  t.kind = GwConfig::Offspring::table;
  t.table = {0.5, 0.4};  // does not sum to 1
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t.table = {0.25, 0.25, 0.5};
  CHECK_NOTHROW(t.validate());
  CHECK(t.offspring_mean() == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(t.offspring_var() == doctest::Approx(2.25 - 1.25 * 1.25).epsilon(1e-12));
  CHECK(t.a2() == doctest::Approx(t.offspring_var() / (1.25 * 1.25 - 1.25)).epsilon(1e-12));

  GwConfig d;
  d.kind = GwConfig::Offspring::deterministic;
  d.mean = 2.5;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("deterministic offspring is a frozen martingale") {
  GwConfig c;
  c.kind = GwConfig::Offspring::deterministic;
  c.mean = 2.0;
  c.n = 4;
  c.N = 12;
  c.replicates = 100;
  auto r = simulate_gw(c, 1);
  CHECK(c.a2() == 0.0);
  CHECK(r.var_stat1 == 0.0);
  CHECK(r.extinct_fraction == 0.0);
  for (const auto& row : r.rows) {
    CHECK(row.w_n == 1.0);
    CHECK(row.w_N == 1.0);
    CHECK(row.stat1 == 0.0);
  }
}

TEST_CASE("fluctuation variance follows the branching rate formula") {
  GwConfig c;
  c.kind = GwConfig::Offspring::poisson;
  c.mean = 2.0;
  c.n = 8;
  c.N = 24;
  c.replicates = 40000;
  auto r = simulate_gw(c, 7, 2);
  CHECK(c.a2() == doctest::Approx(1.0).epsilon(1e-12));  // Var/(m^2-m) = m/(m^2-m)
  double target = c.a2() * (1.0 - std::pow(c.mean, -static_cast<double>(c.N - c.n)));
  double tol = 3.0 * r.var_stat1 * std::sqrt(2.0 / static_cast<double>(c.replicates));
  CHECK(std::abs(r.var_stat1 - target) < tol + 0.02 * target);
  CHECK(r.mean_w_N == doctest::Approx(1.0).epsilon(0.05));
  // Poisson(2) extinction probability solves q = e^{2(q-1)}: q ~ 0.2032
  CHECK(r.extinct_fraction == doctest::Approx(0.2032).epsilon(0.05));
  CHECK(r.overflow_count == 0);
}

TEST_CASE("table offspring reproduces its closed-form mean") {
  GwConfig c;
  c.kind = GwConfig::Offspring::table;
  c.table = {0.2, 0.3, 0.5};
  c.n = 4;
  c.N = 16;
  c.replicates = 20000;
  auto r = simulate_gw(c, 3, 2);
  CHECK(r.mean_w_N == doctest::Approx(1.0).epsilon(0.05));
  double target = c.a2() * (1.0 - std::pow(c.offspring_mean(),
                                           -static_cast<double>(c.N - c.n)));
  double tol = 3.0 * r.var_stat1 * std::sqrt(2.0 / static_cast<double>(c.replicates));
  CHECK(std::abs(r.var_stat1 - target) < tol + 0.03 * target);
}

TEST_CASE("replicates are scheduling-independent") {
  GwConfig c;
  c.kind = GwConfig::Offspring::poisson;
  c.mean = 1.5;
  c.n = 3;
  c.N = 10;
  c.replicates = 500;
  auto a = simulate_gw(c, 42, 1);
  auto b = simulate_gw(c, 42, 4);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].w_N == b.rows[i].w_N);
    CHECK(a.rows[i].stat1 == b.rows[i].stat1);
  }
  CHECK(a.var_stat1 == b.var_stat1);
}

}  // TEST_SUITE
