#include "polymer/env.hpp"

#include <cmath>

#include "polymer/normal.hpp"

namespace polymer {

void EnvLaw::validate() const {
  switch (kind) {
    case LawKind::gaussian:
    case LawKind::rademacher:
      return;
    case LawKind::bernoulli:
      if (!(p > 0.0 && p < 1.0)) throw ConfigError("bernoulli p must be in (0,1)");
      return;
  }
  throw ConfigError("unsupported environment law");
}

std::string EnvLaw::name() const {
  switch (kind) {
    case LawKind::gaussian: return "gaussian";
    case LawKind::rademacher: return "rademacher";
    case LawKind::bernoulli: return "bernoulli(" + std::to_string(p) + ")";
  }
  return "?";
}

EnvLaw parse_law(const std::string& name) {
  if (name == "gaussian" || name == "gaussian-standard") return EnvLaw::gaussian();
  if (name == "rademacher") return EnvLaw::rademacher();
  if (name.rfind("bernoulli", 0) == 0) {
    double p = 0.5;
    auto open = name.find('(');
    if (open != std::string::npos) p = std::stod(name.substr(open + 1));
    return EnvLaw::bernoulli(p);
  }
  throw ConfigError("unknown environment law: " + name);
}

double EnvLaw::cdf(double x) const {
  switch (kind) {
    case LawKind::gaussian: return normal_cdf(x);
    case LawKind::rademacher:
      if (x < -1.0) return 0.0;
      if (x < 1.0) return 0.5;
      return 1.0;
    case LawKind::bernoulli:
      if (x < 0.0) return 0.0;
      if (x < 1.0) return 1.0 - p;
      return 1.0;
  }
  return 0.0;
}

double EnvLaw::quantile(double u) const {
  switch (kind) {
    case LawKind::gaussian: return inv_normal_cdf(u);
    case LawKind::rademacher: return u < 0.5 ? -1.0 : 1.0;
    case LawKind::bernoulli: return u < 1.0 - p ? 0.0 : 1.0;
  }
  return 0.0;
}

double log_mgf(const EnvLaw& law, double beta) {
  law.validate();
  switch (law.kind) {
    case LawKind::gaussian: return 0.5 * beta * beta;
    case LawKind::rademacher: return std::log(std::cosh(beta));
    case LawKind::bernoulli: return std::log1p(law.p * std::expm1(beta));
  }
  throw ConfigError("unsupported environment law");
}

double CumulantSet::lambda_m(int m) const {
  switch (m) {
    case 2: return lambda2;
    case 3: return lambda3;
    case 4: return lambda4;
    default: throw DomainError("lambda_m defined for m in {2,3,4}");
  }
}

CumulantSet cumulants(const EnvLaw& law, double beta) {
  CumulantSet c;
  c.beta = beta;
  c.lambda = log_mgf(law, beta);
  c.lambda2 = log_mgf(law, 2 * beta) - 2 * c.lambda;
  c.lambda3 = log_mgf(law, 3 * beta) - 3 * c.lambda;
  c.lambda4 = log_mgf(law, 4 * beta) - 4 * c.lambda;
  c.kappa2 = std::expm1(c.lambda2);
  c.gamma2 = c.kappa2 * c.kappa2;
  // binomial expansion of E (e^{beta eta - lambda} - 1)^4
  c.gamma4 = std::exp(c.lambda4) - 4.0 * std::exp(c.lambda3) + 6.0 * std::exp(c.lambda2) - 3.0;
  return c;
}

L2Region l2_region_check(const CumulantSet& c, double pi_d) {
  if (!(pi_d > 0.0 && pi_d < 1.0)) throw DomainError("pi_d must be in (0,1)");
  double margin = -std::log(pi_d) - c.lambda2;
  return {margin > 0.0, margin};
}

uint64_t env_key(const EnvFieldSpec& spec, int64_t t, std::span<const int> x) {
  if (t < 0 || t >= kMaxTime) throw DomainError("env_value: time outside packing bounds");
  uint64_t lo = 0;
  uint64_t hi = static_cast<uint64_t>(t);
  for (size_t i = 0; i < x.size(); ++i) {
    int64_t c = x[i];
    if (c <= -kMaxCoord || c >= kMaxCoord)
      throw DomainError("env_value: coordinate outside packing bounds (|x_i| < 2^15)");
    uint64_t packed = static_cast<uint64_t>(c + kMaxCoord) & 0xffffu;
    if (i < 4)
      lo |= packed << (16 * i);
    else
      hi |= packed << 48;
  }
  return mix64(spec.seed, hi, lo);
}

double env_value(const EnvFieldSpec& spec, int64_t t, std::span<const int> x) {
  return spec.law.quantile(uniform01(env_key(spec, t, x)));
}

SiteWeights::SiteWeights(const EnvFieldSpec& spec, int quant_bits) : spec_(spec) {
  spec_.law.validate();
  lambda_ = log_mgf(spec_.law, spec_.beta);
  if (quant_bits <= 0) return;
  if (quant_bits > 24) throw ConfigError("SiteWeights: quant_bits must be <= 24");
  size_t n = size_t{1} << quant_bits;
  shift_ = 64 - quant_bits;
  table_.resize(n);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    table_[i] = std::exp(spec_.beta * spec_.law.quantile(u) - lambda_);
    sum += table_[i];
  }
  // renormalize to unit mean: the quantized single-site factor is then an
  // exact martingale weight
  double inv_mean = static_cast<double>(n) / sum;
  for (auto& v : table_) v *= inv_mean;
}

double SiteWeights::exact_factor(uint64_t h) const {
  return std::exp(spec_.beta * spec_.law.quantile(uniform01(h)) - lambda_);
}

}  // namespace polymer
