#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace polymer {

enum class Tier { fast, full };

struct AcceptanceOptions {
  Tier tier = Tier::fast;
  uint64_t seed = 20240901;
  int threads = 1;
  std::string cache_dir;  // Green-table cache; empty = no cache
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> lines;             // per-check detail
  std::map<std::string, double> metrics;      // key numbers for the JSON summary
};

// Runs the nine acceptance criteria in order, streaming one summary line per
// criterion to `log`. The fast tier shrinks sample budgets (never tolerances);
// checks against stochastic targets always include the realized stderr so the
// tiers test the same claims.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

}  // namespace polymer
