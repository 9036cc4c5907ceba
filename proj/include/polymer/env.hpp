#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymer/rng.hpp"

namespace polymer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LawKind { gaussian, rademacher, bernoulli };

// Site disorder law. Restricted to laws with closed-form log-MGF so all
// cumulant-level constants stay exact.
struct EnvLaw {
  LawKind kind = LawKind::gaussian;
  double p = 0.5;  // bernoulli success probability

  static EnvLaw gaussian() { return {LawKind::gaussian, 0.0}; }
  static EnvLaw rademacher() { return {LawKind::rademacher, 0.0}; }
  static EnvLaw bernoulli(double p) { return {LawKind::bernoulli, p}; }

  void validate() const;
  std::string name() const;

  // CDF of the law, for goodness-of-fit tests. Right-continuous for the
  // discrete laws.
  double cdf(double x) const;
  // quantile transform used by the counter hash
  double quantile(double u) const;
};

EnvLaw parse_law(const std::string& name);

double log_mgf(const EnvLaw& law, double beta);

struct CumulantSet {
  double beta = 0.0;
  double lambda = 0.0;   // lambda(beta)
  double lambda2 = 0.0;  // lambda(2b) - 2 lambda(b)
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  double kappa2 = 0.0;  // exp(lambda2) - 1
  double gamma2 = 0.0;  // kappa2^2
  double gamma4 = 0.0;  // centered 4th moment of the unit-mean weight
  double lambda_m(int m) const;
};

CumulantSet cumulants(const EnvLaw& law, double beta);

struct L2Region {
  bool inside = false;
  double margin = 0.0;  // ln(1/pi_d) - lambda2
};

L2Region l2_region_check(const CumulantSet& c, double pi_d);

enum class Convention { paper, standard };

// Deterministic i.i.d. field eta(t, x): a pure function of (seed, t, x).
struct EnvFieldSpec {
  EnvLaw law;
  double beta = 0.0;
  uint64_t seed = 0;
  Convention convention = Convention::paper;
};

// Coordinate packing: 16 bits per signed coordinate (hard bound |x_i| < 2^15)
// for up to 5 dimensions, time in the remaining bits (t < 2^48); the 128-bit
// key is folded to 64 through the splitmix finalizer.
inline constexpr int64_t kMaxCoord = 1 << 15;
inline constexpr int64_t kMaxTime = int64_t{1} << 48;

uint64_t env_key(const EnvFieldSpec& spec, int64_t t, std::span<const int> x);

double env_value(const EnvFieldSpec& spec, int64_t t, std::span<const int> x);

// Single-site Boltzmann factor exp(beta*eta - lambda(beta)) evaluated through
// the counter hash. With quant_bits > 0 the quantile axis is discretized to
// 2^quant_bits midpoint cells and the table is renormalized to unit mean, so
// the profile recursion conserves E W_n = 1 exactly and avoids a transcendental
// per lattice site. quant_bits = 0 evaluates the factor in full precision.
class SiteWeights {
 public:
  SiteWeights(const EnvFieldSpec& spec, int quant_bits = 12);

  double factor_from_hash(uint64_t h) const {
    if (!table_.empty()) return table_[h >> shift_];
    return exact_factor(h);
  }
  double factor(int64_t t, std::span<const int> x) const {
    return factor_from_hash(env_key(spec_, t, x));
  }
  const EnvFieldSpec& spec() const { return spec_; }
  double lambda() const { return lambda_; }

  // same law/beta/table, different field seed; avoids rebuilding the quantile
  // table per environment in ensemble sweeps
  SiteWeights with_seed(uint64_t seed) const {
    SiteWeights w = *this;
    w.spec_.seed = seed;
    return w;
  }

 private:
  double exact_factor(uint64_t h) const;

  EnvFieldSpec spec_;
  double lambda_ = 0.0;
  int shift_ = 64;
  std::vector<double> table_;
};

}  // namespace polymer
