#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polymer/env.hpp"
#include "polymer/estimate.hpp"

namespace polymer {

// Closed-form constants of the d-dimensional walk.
struct GreenConstants {
  double K_d;  // coefficient of the |x|^{2-d} Green asymptotic
  double Z_d;  // inverse moment E |Z|^{-(d-2)} of the diffusive limit
  double C_d;  // local limit coefficient of n^{d/2} P(S_n - S~_n = 0)
};

GreenConstants green_constants(int d);

// Green function of the symmetrized walk at a single site, evaluated by
// quadrature of the exponential-time representation
//   G(x) = int_0^inf prod_i e^{-t/d} I_{|x_i|}(t/d) dt,
// the Laplace-transformed form of the Fourier integral
// int cos(k.x) / (1 - phi(k)) dk / (2 pi)^d. Exactly 0 on odd-parity sites.
double green_value(std::span<const int> x, int d, double rel_tol = 1e-9);

double return_probability(int d, double rel_tol = 1e-9);

// Dense cached table with O(1) lookup; beyond the radius the asymptotic
// K_d / |x|^{d-2} is used.
class GreenTable {
 public:
  static GreenTable build(int d, int rmax, double rel_tol = 1e-9,
                          const std::string* cache_dir = nullptr);

  double at(std::span<const int> x) const;
  double g0() const { return g0_; }
  double pi_d() const { return pi_; }
  int dim() const { return d_; }
  int rmax() const { return rmax_; }
  const GreenConstants& constants() const { return constants_; }

 private:
  int d_ = 3;
  int rmax_ = 0;
  double g0_ = 0.0;
  double pi_ = 0.0;
  GreenConstants constants_{};
  std::vector<double> vals_;  // dense cube side 2*rmax+1
};

struct AsymptoticResidual {
  std::vector<int> x;
  double norm;       // |x|
  double green;      // G(x)
  double residual;   // |x|^{d-2} G(x) - K_d
  double scaled;     // |x|^2 * residual
};

std::vector<AsymptoticResidual> green_asymptotic_residual(
    std::span<const std::vector<int>> grid, int d, double rel_tol = 1e-9);

// Monte Carlo oracles.

// expected coincidence count of two walks started at 0 and x, truncated at
// max_steps time slices; the reported value carries no tail correction
MomentEstimate mc_expected_visits(std::span<const int> x, int d, int max_steps,
                                  int64_t samples, uint64_t seed, int threads = 1);

// return probability of the simple walk with an analytic tail correction for
// returns after the truncation horizon (correction uses the local limit
// coefficient; its size is reported separately)
struct ReturnProbEstimate {
  MomentEstimate truncated;  // P(return <= horizon)
  double tail_correction;
  double value;  // truncated.value + tail_correction
};
ReturnProbEstimate mc_return_probability(int d, int horizon, int64_t samples,
                                         uint64_t seed, int threads = 1);

// first-meeting probability of two walks started at 0 and x, truncated
MomentEstimate mc_hitting_probability(std::span<const int> x, int d, int max_steps,
                                      int64_t samples, uint64_t seed, int threads = 1);

}  // namespace polymer
