#pragma once

// Problem files: a group, modulus and character, named objects and a list
// of queries, evaluated in input order into a report bundle.

#include <cstdint>
#include <map>
#include <string>

#include "atmot/atcat.hpp"
#include "atmot/ext_engine.hpp"
#include "json.hpp"

namespace atmot {

struct ProblemFile {
  TwistCharacter chi;
  Mode mode = Mode::F;
  ExtOptions options;
  std::uint64_t seed = 20240607;
  std::map<std::string, FilteredObject> objects;
  nlohmann::json queries = nlohmann::json::array();

  /// Throws SchemaError with the JSON path of the first violation.
  static ProblemFile from_json(const nlohmann::json& j);
};

/// Budget from the ATMOT_BUDGET_MB environment variable, if set.
std::optional<std::size_t> budget_override();

/// "trivial", "C<n>", "S<n>" or "D<n>"; SchemaError otherwise.
FiniteGroup group_from_name(const std::string& name);

struct Bundle {
  nlohmann::json reports = nlohmann::json::array();
  bool any_error = false;
  bool any_budget = false;
  /// 0 ok, 1 a query failed, 3 a query ran out of budget.
  int exit_code() const { return any_budget ? 3 : any_error ? 1 : 0; }
};

/// One report per query, in input order.  Query failures are recorded in
/// the report instead of being thrown.
Bundle run_problem(const ProblemFile& p);

}  // namespace atmot
