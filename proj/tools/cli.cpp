#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "atmot/errors.hpp"
#include "atmot/resolution_p.hpp"
#include "problem.hpp"

#ifndef ATMOT_SOURCE_DIR
#define ATMOT_SOURCE_DIR "."
#endif

namespace atmot {

namespace {

using json = nlohmann::json;

struct Common {
  std::string mode = "F";
  int degree_cap = 4;
  std::size_t budget_mb = 512;
  bool as_json = false;
  std::string group = "C2";
  int modulus = 2;
  std::vector<Residue> chi;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

// The query part of a problem file built from the command line options.
json base_problem(const Common& c) {
  json p = {{"modulus", c.modulus},
            {"group", c.group},
            {"mode", c.mode},
            {"budgets", {{"degree_cap", c.degree_cap}, {"memory_mb", c.budget_mb}}}};
  if (!c.chi.empty()) p["character"] = c.chi;
  return p;
}

std::string value_string(const json& v) {
  if (v.value("certified", false)) {
    const json& f = v["factors"];
    if (f.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < f.size(); ++k) s += (k ? "+Z/" : "Z/") + std::to_string(f[k].get<Residue>());
    return s;
  }
  return "[" + v.value("lower", std::string("?")) + ", " +
         (v["upper"].is_null() ? std::string("inf") : v["upper"].get<std::string>()) + "]";
}

void print_table(const json& reports, std::ostream& out) {
  out << std::left << std::setw(4) << "#" << std::setw(12) << "op" << std::setw(8) << "degree" << std::setw(7)
      << "twist" << std::setw(20) << "method" << std::setw(11) << "certified" << std::setw(16) << "value"
      << "verdict\n";
  for (const auto& r : reports) {
    out << std::setw(4) << r["index"].get<std::size_t>() << std::setw(12) << r["op"].get<std::string>();
    if (r.contains("error")) {
      out << "error: " << r["error"]["message"].get<std::string>() << "\n";
      continue;
    }
    const json& q = r["report"];
    auto field = [&](const char* k) { return q.contains(k) ? q[k].dump() : std::string("-"); };
    out << std::setw(8) << field("degree") << std::setw(7) << field("twist");
    if (q.contains("value")) {
      out << std::setw(20) << q.value("method", std::string("-")) << std::setw(11)
          << (q["value"]["certified"].get<bool>() ? "yes" : "no") << std::setw(16) << value_string(q["value"])
          << q.value("verdict", std::string("-")) << "\n";
    } else if (q.contains("label")) {
      out << std::setw(20) << q.value("method", std::string("-")) << std::setw(11) << "no" << std::setw(16)
          << (q["diagonal"].get<bool>() ? "diagonal" : "off-diagonal") << q["label"].get<std::string>() << "\n";
    } else if (q.contains("levels")) {
      std::string v = q["stabilized_at"].is_number() ? "stable at " + q["stabilized_at"].dump() : "not stable";
      out << std::setw(20) << "tower" << std::setw(11) << "levels" << std::setw(16) << v << "-\n";
    } else {
      out << std::setw(20) << "-" << std::setw(11) << "-" << std::setw(16) << "see --json"
          << "-\n";
    }
  }
}

int emit_bundle(const json& problem, const Common& c, std::ostream& out) {
  Bundle b = run_problem(ProblemFile::from_json(problem));
  if (c.as_json)
    out << json{{"reports", b.reports}}.dump(2) << "\n";
  else
    print_table(b.reports, out);
  return b.exit_code();
}

void add_common(CLI::App* app, Common& c, bool group_options) {
  app->add_option("--mode", c.mode, "F, Fprime or Fsecond")->check(CLI::IsMember({"F", "Fprime", "Fsecond"}));
  app->add_option("--degree-cap", c.degree_cap, "largest cohomological degree computed");
  app->add_option("--budget-mb", c.budget_mb, "memory budget for bar complexes");
  app->add_flag("--json", c.as_json, "JSON output");
  app->add_flag("--table,!--no-table", [&c](std::int64_t n) { c.as_json = n < 0; }, "table output (default)");
  if (group_options) {
    app->add_option("--group", c.group, "trivial, C<n>, S<n> or D<n>");
    app->add_option("-m,--modulus", c.modulus, "coefficient modulus");
    app->add_option("--chi", c.chi, "character values on the generators")->delimiter(',');
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ext groups of filtered Artin-Tate objects over a finite Galois group", "atmot"};
  app.require_subcommand(1);
  Common c;

  std::string problem_path;
  auto* run = app.add_subcommand("run", "evaluate every query of a problem file");
  run->add_option("problem", problem_path, "problem file")->required();
  add_common(run, c, false);

  int degree = 1, twist = 0, source_twist = 0, target_twist = 1, max_i = 2, max_j = 2;
  auto* coh = app.add_subcommand("cohomology", "H^i(G, mu^j)");
  add_common(coh, c, true);
  coh->add_option("--degree", degree);
  coh->add_option("--twist", twist);

  auto* ext = app.add_subcommand("ext", "Ext^k(1(a), 1(b)) between Tate objects");
  add_common(ext, c, true);
  ext->add_option("--degree", degree);
  ext->add_option("--source-twist", source_twist);
  ext->add_option("--target-twist", target_twist);

  auto* theta = app.add_subcommand("theta-report", "Ext^i(1, 1(j)) against H^i(G, mu^j) on a grid");
  add_common(theta, c, true);
  theta->add_option("--max-i", max_i);
  theta->add_option("--max-j", max_j);

  auto* koszul = app.add_subcommand("koszul-probe", "cobar cohomology of the big graded ring");
  add_common(koszul, c, true);
  koszul->add_option("--degree", degree);

  std::string complex_path;
  PCheckOptions popt;
  auto* pcheck = app.add_subcommand("p-check", "properties of the resolution functor on one complex");
  pcheck->add_option("complex", complex_path, "complex file")->required();
  pcheck->add_option("--depth", popt.depth);
  pcheck->add_option("--seed", popt.seed);
  add_common(pcheck, c, false);

  AcceptanceOptions aopt;
  aopt.corpus_dir = std::string(ATMOT_SOURCE_DIR) + "/problems/complexes";
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--filter", aopt.filter, "theta, ext, oracle, adjunction, p, koszul or a criterion number");
  accept->add_flag("--corrupt-oracle", aopt.corrupt_oracle, "perturb the oracle (negative control)");
  accept->add_flag("--fail-fast", aopt.fail_fast, "stop the oracle comparison at the first disagreement");
  accept->add_option("--corpus", aopt.corpus_dir, "directory of complexes");
  add_common(accept, c, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*run) {
      json p = read_json_file(problem_path);
      // command line flags override the file
      if (p.is_object()) {
        if (run->count("--budget-mb")) p["budgets"]["memory_mb"] = c.budget_mb;
        if (run->count("--degree-cap")) p["budgets"]["degree_cap"] = c.degree_cap;
        if (run->count("--mode")) p["mode"] = c.mode;
      }
      return emit_bundle(p, c, out);
    }
    json p = base_problem(c);
    json q = json::array();
    if (*coh) q.push_back({{"op", "cohomology"}, {"degree", degree}, {"twist", twist}});
    if (*ext) {
      p["objects"] = {{"source", {{"tate", source_twist}}}, {"target", {{"tate", target_twist}}}};
      q.push_back({{"op", "ext"}, {"source", "source"}, {"target", "target"}, {"degree", degree}});
    }
    if (*theta)
      for (int j = 0; j <= max_j; ++j)
        for (int i = 0; i <= max_i; ++i) q.push_back({{"op", "theta"}, {"degree", i}, {"twist", j}});
    if (*koszul) q.push_back({{"op", "koszul"}, {"degree", degree}});
    if (*pcheck) {
      ModuleComplex a = ModuleComplex::from_json(read_json_file(complex_path));
      PCheckReport r = p_check(a, popt);
      if (c.as_json) {
        out << r.to_json().dump(2) << "\n";
      } else {
        for (const auto& ch : r.checks)
          out << (ch.passed ? "ok   " : ch.informational ? "info " : "FAIL ") << std::left << std::setw(26) << ch.name
              << std::setw(8) << ch.checked << ch.detail << "\n";
      }
      return r.passed() ? 0 : 1;
    }
    if (*accept) {
      AcceptanceReport r = run_acceptance(aopt);
      if (c.as_json)
        out << r.to_json().dump(2) << "\n";
      else
        out << acceptance_lines(r);
      return r.passed() ? 0 : 1;
    }
    p["queries"] = q;
    return emit_bundle(p, c, out);
  } catch (const SchemaError& e) {
    err << "schema error at " << (e.path().empty() ? "/" : e.path()) << ": "
        << std::string(e.what()).substr(e.path().size() + 2) << "\n";
    return 2;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace atmot
