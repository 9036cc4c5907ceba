#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polymer {

enum class Method { exact_enum, closed_form, mc };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::exact_enum: return "exact-enum";
    case Method::closed_form: return "closed-form";
    case Method::mc: return "mc";
  }
  return "?";
}

// Commutatively mergeable moment estimate. MC estimates carry the raw sums so
// that merging is count-weighted and order-independent.
struct MomentEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int64_t count = 0;
  Method method = Method::closed_form;
  uint64_t seed = 0;

  static MomentEstimate exact(double v, Method m = Method::exact_enum) {
    return {v, 0.0, 1, m, 0};
  }

  // combined stderr for the difference of two independent estimates
  double combined_err(const MomentEstimate& o) const {
    return std::sqrt(stderr_ * stderr_ + o.stderr_ * o.stderr_);
  }
};

// Accumulator for i.i.d. sample means.
struct MeanAccumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  int64_t n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double variance() const {
    double m = mean();
    double v = sumsq / static_cast<double>(n) - m * m;
    return v > 0.0 ? v * static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
  }
  double stderr_of_mean() const { return std::sqrt(variance() / static_cast<double>(n)); }
  double sd() const { return std::sqrt(variance()); }

  MomentEstimate estimate(uint64_t seed = 0) const {
    if (n < 2) throw std::runtime_error("MeanAccumulator: need at least 2 samples");
    return {mean(), stderr_of_mean(), n, Method::mc, seed};
  }
};

}  // namespace polymer
