#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace maboost::bench {

struct CriterionResult {
  std::string expected;
  std::string observed;
  bool pass = false;
};

struct Criterion {
  std::string id;    ///< "1" .. "11"
  std::string name;  ///< short slug, e.g. "entropy-bound"
  std::function<CriterionResult()> run;
};

/// Every acceptance criterion, in order.
std::vector<Criterion> acceptance_criteria();

struct Outcome {
  std::string id;
  std::string name;
  CriterionResult result;
  double seconds = 0.0;
};

/// Runs the criteria whose id or name equals `filter` (all when unset).
std::vector<Outcome> run_criteria(const std::optional<std::string>& filter);

/// Prints a fixed-width table, one row per criterion. Timings are left out
/// so that repeated runs print identical tables.
void print_table(std::ostream& out, const std::vector<Outcome>& outcomes);

}  // namespace maboost::bench
