#include "problem.hpp"

#include <cstdlib>
#include <regex>

#include "atmot/errors.hpp"
#include "atmot/resolution_p.hpp"

namespace atmot {

namespace {

using json = nlohmann::json;

int get_int(const json& j, const std::string& key, const std::string& path, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw SchemaError(path + "/" + key, "missing");
  }
  if (!j[key].is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  return j[key].get<int>();
}

// Re-raise errors from nested parsers with the enclosing path.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError& e) {
    throw SchemaError(path + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  } catch (const DomainError& e) {
    throw SchemaError(path, e.what());
  } catch (const MismatchError& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<int> element_indices(const FiniteGroup& g, const json& perms, const std::string& path) {
  if (!perms.is_array()) throw SchemaError(path, "expected an array of permutations");
  std::vector<int> out;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    std::string p = path + "/" + std::to_string(k);
    if (!perms[k].is_array()) throw SchemaError(p, "expected an array of images");
    Perm perm;
    for (const auto& v : perms[k]) {
      if (!v.is_number_integer()) throw SchemaError(p, "images must be integers");
      perm.push_back(v.get<int>() - 1);
    }
    auto idx = g.index_of(perm);
    if (!idx) throw SchemaError(p, "not an element of the group");
    out.push_back(*idx);
  }
  return out;
}

FilteredObject parse_object(const ProblemFile& p, const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  if (j.contains("tate")) {
    if (!j["tate"].is_number_integer()) throw SchemaError(path + "/tate", "expected an integer");
    return FilteredObject::tate(j["tate"].get<int>(), p.chi, p.mode);
  }
  if (j.contains("permutational")) {
    const json& q = j["permutational"];
    std::string qp = path + "/permutational";
    if (!q.is_object()) throw SchemaError(qp, "expected an object");
    std::vector<int> gens = q.contains("subgroup") ? element_indices(p.chi.group(), q["subgroup"], qp + "/subgroup")
                                                   : std::vector<int>{};
    SubgroupHandle h = SubgroupHandle::generated_by(p.chi.group(), gens);
    int w = get_int(q, "twist", qp, 0);
    return at_path(qp, [&] {
      return FilteredObject::from_permutational(make_permutational(GSet::cosets(h), w, p.chi), p.mode);
    });
  }
  if (j.contains("filtered")) return at_path(path + "/filtered", [&] { return FilteredObject::from_json(p.chi, j["filtered"]); });
  throw SchemaError(path, "expected one of tate, permutational, filtered");
}

const FilteredObject& lookup(const ProblemFile& p, const json& q, const std::string& key, const std::string& path) {
  if (!q.contains(key) || !q[key].is_string()) throw SchemaError(path + "/" + key, "expected an object name");
  auto it = p.objects.find(q[key].get<std::string>());
  if (it == p.objects.end()) throw SchemaError(path + "/" + key, "unknown object '" + q[key].get<std::string>() + "'");
  return it->second;
}

void validate_query(const ProblemFile& p, const json& q, const std::string& path) {
  if (!q.is_object()) throw SchemaError(path, "expected an object");
  if (!q.contains("op") || !q["op"].is_string()) throw SchemaError(path + "/op", "expected a string");
  std::string op = q["op"].get<std::string>();
  if (op == "ext") {
    lookup(p, q, "source", path);
    lookup(p, q, "target", path);
    get_int(q, "degree", path);
  } else if (op == "theta" || op == "cohomology") {
    get_int(q, "degree", path);
    get_int(q, "twist", path);
  } else if (op == "koszul") {
    get_int(q, "degree", path);
  } else if (op == "tower") {
    get_int(q, "degree", path);
    get_int(q, "twist", path);
    if (!q.contains("groups") || !q["groups"].is_array()) throw SchemaError(path + "/groups", "expected an array");
    if (!q.contains("maps") || !q["maps"].is_array() || q["maps"].size() != q["groups"].size())
      throw SchemaError(path + "/maps", "expected one map per group");
  } else if (op == "p_check") {
    if (!q.contains("complex")) throw SchemaError(path + "/complex", "missing");
    at_path(path + "/complex", [&] { return ModuleComplex::from_json(q["complex"]); });
  } else {
    throw SchemaError(path + "/op", "unknown op '" + op + "'");
  }
}

json hom_report(const FilteredObject& m, const FilteredObject& n, Mode mode) {
  ExtReport r;
  r.query = "hom";
  r.degree = 0;
  r.mode = mode;
  r.method = Method::hom_direct;
  r.value = ExtValue::exact(hom_F(m, n).invariant_factors());
  return r.to_json();
}

json tower_report(const ProblemFile& p, const json& q) {
  std::vector<FiniteGroup> groups{p.chi.group()};
  std::vector<GroupHom> maps;
  for (std::size_t k = 0; k < q["groups"].size(); ++k) {
    std::string gp = "/groups/" + std::to_string(k);
    FiniteGroup g = at_path(gp, [&] { return FiniteGroup::from_json(q["groups"][k]); });
    std::vector<int> images = element_indices(groups.back(), q["maps"][k], "/maps/" + std::to_string(k));
    maps.push_back(GroupHom::from_generator_images(g, groups.back(), images));
    groups.push_back(std::move(g));
  }
  TowerQuery tq{q["degree"].get<int>(), q["twist"].get<int>()};
  return tower_colimit(p.chi.group(), maps, p.chi, tq, p.options).to_json();
}

json run_query(const ProblemFile& p, const json& q) {
  std::string op = q["op"].get<std::string>();
  if (op == "ext") {
    const FilteredObject& m = lookup(p, q, "source", "");
    const FilteredObject& n = lookup(p, q, "target", "");
    int k = q["degree"].get<int>();
    if (k < 0) throw DomainError("negative degree");
    if (k == 0) return hom_report(m, n, p.mode);
    if (k == 1) return ext1(m, n, p.options).to_json();
    return ext_bounds(m, n, k, p.options).to_json();
  }
  if (op == "theta") return theta_report(q["degree"].get<int>(), q["twist"].get<int>(), p.chi, p.mode, p.options).to_json();
  if (op == "cohomology") {
    int i = q["degree"].get<int>(), j = q["twist"].get<int>();
    CohomologyGroup h = cohomology(mu_tensor(j, p.chi), i, p.options.cohomology);
    return {{"query", "cohomology"}, {"degree", i}, {"twist", j}, {"method", "bar_complex"},
            {"value", ExtValue::exact(h.invariant_factors()).to_json()}};
  }
  if (op == "koszul") {
    int n = q["degree"].get<int>();
    return koszulity_probe(BigGradedRing::build(p.chi, n, p.options), n).to_json();
  }
  if (op == "tower") return tower_report(p, q);
  PCheckOptions opt;
  opt.seed = p.seed;
  return p_check(ModuleComplex::from_json(q["complex"]), opt).to_json();
}

}  // namespace

std::optional<std::size_t> budget_override() {
  const char* v = std::getenv("ATMOT_BUDGET_MB");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  unsigned long long n = std::strtoull(v, &end, 10);
  if (*end) throw SchemaError("$ATMOT_BUDGET_MB", "expected a nonnegative integer");
  return static_cast<std::size_t>(n);
}

FiniteGroup group_from_name(const std::string& name) {
  if (name == "trivial" || name == "1") return FiniteGroup::trivial();
  std::smatch mt;
  if (std::regex_match(name, mt, std::regex("([CSD])([0-9]+)"))) {
    int n = std::stoi(mt[2]);
    if (n >= 1 && n <= 12) {
      if (mt[1] == "C") return FiniteGroup::cyclic(n);
      if (mt[1] == "S" && n <= 5) return FiniteGroup::symmetric(n);
      if (mt[1] == "D" && n >= 2) return FiniteGroup::dihedral(n);
    }
  }
  throw SchemaError("/group", "unknown group '" + name + "'");
}

ProblemFile ProblemFile::from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "problem file must be an object");
  ProblemFile p;
  int m = get_int(j, "modulus", "");
  if (m < 2) throw SchemaError("/modulus", "must be at least 2");
  if (!j.contains("group")) throw SchemaError("/group", "missing");
  FiniteGroup g = j["group"].is_string() ? group_from_name(j["group"].get<std::string>())
                                         : at_path("/group", [&] { return FiniteGroup::from_json(j["group"]); });
  if (j.contains("character")) {
    const json& c = j["character"];
    if (!c.is_array()) throw SchemaError("/character", "expected one value per generator");
    std::vector<Residue> vals;
    for (const auto& v : c) {
      if (!v.is_number_integer()) throw SchemaError("/character", "values must be integers");
      vals.push_back(v.get<Residue>());
    }
    p.chi = at_path("/character", [&] { return TwistCharacter::from_generator_values(g, m, vals); });
  } else {
    p.chi = TwistCharacter::trivial(g, m);
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw SchemaError("/mode", "expected a string");
    p.mode = at_path("/mode", [&] { return mode_from_string(j["mode"].get<std::string>()); });
  }
  if (j.contains("budgets")) {
    const json& b = j["budgets"];
    if (!b.is_object()) throw SchemaError("/budgets", "expected an object");
    p.options.cohomology.degree_cap = get_int(b, "degree_cap", "/budgets", p.options.cohomology.degree_cap);
    int mb = get_int(b, "memory_mb", "/budgets", static_cast<int>(p.options.cohomology.budget_mb));
    if (mb < 0) throw SchemaError("/budgets/memory_mb", "must be nonnegative");
    p.options.cohomology.budget_mb = static_cast<std::size_t>(mb);
  }
  if (auto o = budget_override()) p.options.cohomology.budget_mb = *o;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("/seed", "expected a nonnegative integer");
    p.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("objects")) {
    if (!j["objects"].is_object()) throw SchemaError("/objects", "expected an object");
    for (const auto& [name, o] : j["objects"].items()) p.objects[name] = parse_object(p, o, "/objects/" + name);
  }
  if (j.contains("queries")) {
    if (!j["queries"].is_array()) throw SchemaError("/queries", "expected an array");
    for (std::size_t k = 0; k < j["queries"].size(); ++k)
      validate_query(p, j["queries"][k], "/queries/" + std::to_string(k));
    p.queries = j["queries"];
  }
  return p;
}

Bundle run_problem(const ProblemFile& p) {
  Bundle b;
  for (std::size_t k = 0; k < p.queries.size(); ++k) {
    const json& q = p.queries[k];
    json r = {{"index", k}, {"op", q["op"]}};
    try {
      r["report"] = run_query(p, q);
    } catch (const BudgetError& e) {
      b.any_budget = true;
      r["error"] = {{"kind", "budget"}, {"message", e.what()}};
    } catch (const Error& e) {
      b.any_error = true;
      r["error"] = {{"kind", "query"}, {"message", e.what()}};
    }
    b.reports.push_back(std::move(r));
  }
  return b;
}

}  // namespace atmot
