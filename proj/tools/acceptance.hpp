#pragma once

// The acceptance suite: ten property criteria run over the battery of small
// groups, moduli and characters.  Shared by the CLI and the ctest binary.

#include <string>
#include <vector>

#include "json.hpp"

namespace atmot {

struct CriterionResult {
  int number = 0;
  std::string tag;  // theta, ext, oracle, adjunction, p, koszul
  std::string title;
  bool passed = true;
  std::size_t checked = 0;
  std::string detail;
  /// Reported data that is not asserted (uncertified degrees, probe findings).
  nlohmann::json findings = nlohmann::json::object();
};

struct AcceptanceOptions {
  /// Empty runs everything; otherwise a tag or a criterion number.
  std::string filter;
  /// Mutation hook: perturb the brute-force oracle answer so criterion 5 fails.
  bool corrupt_oracle = false;
  /// Stop the oracle comparison at its first disagreement.
  bool fail_fast = false;
  /// Directory holding the complexes for the P criterion.
  std::string corpus_dir;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Throws DomainError for a filter that selects nothing.
AcceptanceReport run_acceptance(const AcceptanceOptions& opt);

/// "PASS criterion 3: ..." lines, one per criterion run.
std::string acceptance_lines(const AcceptanceReport& r);

}  // namespace atmot
