// Runs the acceptance suite and prints one PASS/FAIL line per criterion.

#include <iostream>

#include "acceptance.hpp"

int main() {
  atmot::AcceptanceOptions opt;
  opt.corpus_dir = std::string(ATMOT_SOURCE_DIR) + "/problems/complexes";
  atmot::AcceptanceReport r = atmot::run_acceptance(opt);
  std::cout << atmot::acceptance_lines(r);
  return r.passed() ? 0 : 1;
}
