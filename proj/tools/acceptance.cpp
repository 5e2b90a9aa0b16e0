#include "acceptance.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "atmot/errors.hpp"
#include "atmot/ext_engine.hpp"
#include "atmot/resolution_p.hpp"

namespace atmot {

namespace {

using Factors = std::vector<Residue>;

std::vector<FiniteGroup> battery_groups() {
  return {FiniteGroup::trivial(), FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4),
          FiniteGroup::symmetric(3)};
}

std::vector<TwistCharacter> battery() {
  std::vector<TwistCharacter> out;
  for (const auto& g : battery_groups())
    for (Residue m : {2, 3, 4})
      for (auto& chi : TwistCharacter::all(g, m)) out.push_back(std::move(chi));
  return out;
}

std::string factors_string(const Factors& f) {
  if (f.empty()) return "0";
  std::string s;
  for (std::size_t k = 0; k < f.size(); ++k) s += (k ? "+Z/" : "Z/") + std::to_string(f[k]);
  return s;
}

std::string label(const TwistCharacter& chi) {
  std::ostringstream s;
  s << "|G|=" << chi.group().order() << " m=" << chi.modulus() << " chi=[";
  for (std::size_t k = 0; k < chi.values().size(); ++k) s << (k ? "," : "") << chi.values()[k];
  s << "]";
  return s.str();
}

// Records the first failure only, so details stay short.
struct Tally {
  CriterionResult& r;
  void check(bool ok, const std::string& what) {
    ++r.checked;
    if (!ok && r.passed) {
      r.passed = false;
      r.detail = what;
    }
  }
};

ZmMatrix rows_matrix(Residue mod, std::size_t width, const std::vector<ZmVector>& rows) {
  ZmMatrix a(mod, 0, width);
  for (const auto& v : rows) a.append_row(v);
  return a;
}

ZmMatrix unflatten(std::span<const Residue> v, Residue mod, std::size_t rows, std::size_t cols) {
  ZmMatrix a(mod, rows, cols);
  for (std::size_t k = 0; k < v.size(); ++k) a.set(k / cols, k % cols, v[k]);
  return a;
}

ZmVector flatten(const ZmMatrix& a) { return a.data(); }

// Maps every generator of src through f and checks the images span exactly tgt.
bool hom_iso_witness(const ZmModulePresentation& src, const ZmModulePresentation& tgt, std::size_t src_rows,
                     std::size_t src_cols, std::size_t tgt_width, const std::function<ZmMatrix(const ZmMatrix&)>& f) {
  Residue mod = src.modulus();
  std::vector<ZmVector> images;
  const ZmMatrix& gens = src.ambient_generators();
  for (std::size_t r = 0; r < gens.rows(); ++r)
    images.push_back(flatten(f(unflatten(gens.row_vector(r), mod, src_rows, src_cols))));
  ZmMatrix im = rows_matrix(mod, tgt_width, images);
  ZmMatrix none(mod, 0, tgt_width);
  if (!same_factors(src.invariant_factors(), tgt.invariant_factors())) return false;
  if (im.rows() && !row_span_contains(tgt.ambient_generators(), im)) return false;
  return same_factors(subquotient(im, none).invariant_factors(), tgt.invariant_factors());
}

// ---------------------------------------------------------------- criteria

CriterionResult theta_low_degree() {
  CriterionResult r{1, "theta", "theta is ISO for i <= 1 and MONO or ISO for i = 2, j <= 3", true, 0, ""};
  Tally t{r};
  for (const auto& chi : battery())
    for (int j = 0; j <= 3; ++j)
      for (int i = 0; i <= 2; ++i) {
        Verdict v = *theta_report(i, j, chi, Mode::F).verdict;
        bool ok = i < 2 ? v == Verdict::ISO : (v == Verdict::ISO || v == Verdict::MONO);
        t.check(ok, label(chi) + " i=" + std::to_string(i) + " j=" + std::to_string(j) + " verdict " + to_string(v));
      }
  return r;
}

CriterionResult unit_self_ext() {
  CriterionResult r{2, "ext", "Hom(1,1) = Z/m id, Ext^1(1,1) = 0, Ext^2(1,1) never nonzero certified", true, 0, ""};
  Tally t{r};
  std::size_t collapsed = 0;
  for (const auto& chi : battery()) {
    FilteredObject one = FilteredObject::unit(chi);
    Residue m = chi.modulus();
    ZmModulePresentation h = hom_F(one, one);
    ZmMatrix id = ZmMatrix::identity(m, 1);
    t.check(h.invariant_factors() == Factors{m} && same_row_span(h.ambient_generators(), id),
            label(chi) + " Hom(1,1) = " + factors_string(h.invariant_factors()));
    t.check(ext1(one, one).value.is_zero(), label(chi) + " Ext^1(1,1) nonzero");
    ExtValue e2 = ext_bounds(one, one, 2).value;
    collapsed += e2.collapsed();
    t.check(!e2.collapsed() || e2.is_zero(), label(chi) + " Ext^2(1,1) collapsed to a nonzero value");
    t.check(!e2.is_exact() || e2.is_zero(), label(chi) + " Ext^2(1,1) certified nonzero");
  }
  r.findings["ext2_collapsed"] = collapsed;
  return r;
}

CriterionResult j_le_two() {
  CriterionResult r{3, "theta", "certified Ext^i(1,1(j)) = H^i for i <= j and 0 above, j in {1,2}, i <= 3", true, 0, ""};
  Tally t{r};
  std::size_t uncertified = 0;
  for (const auto& chi : battery())
    for (int j = 1; j <= 2; ++j)
      for (int i = 0; i <= 3; ++i) {
        ExtReport rep = theta_report(i, j, chi, Mode::F);
        if (!rep.certified()) {
          ++uncertified;
          continue;
        }
        Factors expect = i <= j ? *rep.cohomology : Factors{};
        t.check(same_factors(*rep.value.factors, expect), label(chi) + " i=" + std::to_string(i) + " j=" +
                                                              std::to_string(j) + " Ext " +
                                                              factors_string(*rep.value.factors) + " vs " +
                                                              factors_string(expect));
      }
  r.findings["uncertified"] = uncertified;
  return r;
}

CriterionResult weight_vanishing() {
  CriterionResult r{4, "ext", "Ext^1(1,1(j)) = 0 and Hom(1,1(j)) = 0 for j < 0", true, 0, ""};
  Tally t{r};
  for (const auto& chi : battery())
    for (int j = -3; j <= -1; ++j) {
      FilteredObject one = FilteredObject::unit(chi), tj = FilteredObject::tate(j, chi);
      t.check(ext1(one, tj).value.is_zero(), label(chi) + " Ext^1(1,1(" + std::to_string(j) + ")) nonzero");
      t.check(hom_F(one, tj).is_zero(), label(chi) + " Hom(1,1(" + std::to_string(j) + ")) nonzero");
    }
  return r;
}

// Objects of rank <= 3 for the oracle domain.
std::vector<FilteredObject> oracle_objects(const TwistCharacter& chi) {
  std::vector<FilteredObject> out;
  for (int w : {-1, 0, 1, 2}) out.push_back(FilteredObject::tate(w, chi));
  for (const auto& h : subgroups_up_to_conjugacy(chi.group()))
    if (h.index() > 1 && h.index() <= 3)
      for (int w : {0, 1}) out.push_back(FilteredObject::from_permutational(make_permutational(GSet::cosets(h), w, chi)));
  ExtReport e = ext1(FilteredObject::unit(chi), FilteredObject::tate(1, chi));
  if (!e.representatives.empty()) out.push_back(e.representatives[0]);
  out.push_back(direct_sum(FilteredObject::tate(1, chi), FilteredObject::tate(2, chi)));
  out.push_back(direct_sum(FilteredObject::unit(chi), FilteredObject::tate(1, chi)));
  return out;
}

CriterionResult oracle_equivalence(bool corrupt, bool fail_fast) {
  CriterionResult r{5, "oracle", "Ext^1 agrees with the brute-force oracle (|G| <= 4, m <= 4, rank sum <= 4)", true, 0,
                    ""};
  Tally t{r};
  std::vector<FiniteGroup> groups = {FiniteGroup::trivial(), FiniteGroup::cyclic(2), FiniteGroup::cyclic(3),
                                     FiniteGroup::cyclic(4), FiniteGroup(4, {{1, 0, 3, 2}, {2, 3, 0, 1}})};
  for (const auto& g : groups)
    for (Residue m : {2, 3, 4})
      for (const auto& chi : TwistCharacter::all(g, m)) {
        auto objs = oracle_objects(chi);
        for (std::size_t a = 0; a < objs.size(); ++a)
          for (std::size_t b = 0; b < objs.size(); ++b) {
            if (fail_fast && !r.passed) return r;
            if (objs[a].rank() + objs[b].rank() > 4) continue;
            Factors o = ext1_bruteforce_oracle(objs[a], objs[b]).invariant_factors();
            if (corrupt) o.push_back(m);
            Factors e = *ext1(objs[a], objs[b]).value.factors;
            t.check(same_factors(o, e), label(chi) + " pair (" + std::to_string(a) + "," + std::to_string(b) +
                                            ") engine " + factors_string(e) + " oracle " + factors_string(o));
          }
      }
  return r;
}

CriterionResult adjunctions() {
  CriterionResult r{6, "adjunction", "Frobenius adjunctions, projection formula and Mackey decomposition", true, 0, ""};
  Tally t{r};
  for (const auto& chi : battery()) {
    const FiniteGroup& g = chi.group();
    if (g.order() > 6) continue;
    auto subs = all_subgroups(g);
    for (const auto& h : subs) {
      TwistCharacter chi_h = chi.restrict_to(h);
      std::string at = label(chi) + " |H|=" + std::to_string(h.order());
      for (const auto& k : subs) {
        std::string pair = at + " |K|=" + std::to_string(k.order());
        FilteredObject pk = FilteredObject::from_permutational(mcc_of_subgroup(k, chi));
        for (int w : {0, 1}) {
          FilteredObject mh = FilteredObject::tate(w, chi_h);
          FilteredObject ind = induce_filtered(mh, h, chi);
          FilteredObject res = restrict_filtered(pk, h);
          // Hom(induce M, N) -> Hom(M, restrict N)
          t.check(hom_iso_witness(hom_F(ind, pk), hom_F(mh, res), pk.rank(), ind.rank(), res.rank() * mh.rank(),
                                  [&](const ZmMatrix& phi) { return frobenius_restrict(mh, h, chi, phi); }),
                  pair + " w=" + std::to_string(w) + " Hom(ind M, N) witness");
          // Hom(restrict N, M) -> Hom(N, induce M)
          t.check(hom_iso_witness(hom_F(res, mh), hom_F(pk, ind), mh.rank(), res.rank(), ind.rank() * pk.rank(),
                                  [&](const ZmMatrix& psi) { return frobenius_induce(pk, mh, h, chi, psi); }),
                  pair + " w=" + std::to_string(w) + " Hom(N, ind M) witness");
          t.check(same_factors(ext1_group(ind, pk).invariant_factors(), ext1_group(mh, res).invariant_factors()),
                  pair + " w=" + std::to_string(w) + " Ext^1(ind M, N) vs Ext^1(M, res N)");
          t.check(same_factors(ext1_group(res, mh).invariant_factors(), ext1_group(pk, ind).invariant_factors()),
                  pair + " w=" + std::to_string(w) + " Ext^1(res N, M) vs Ext^1(N, ind M)");
        }
        // projection formula for A = mcc(K)(1), B = 1(-1) on H
        FilteredObject a = FilteredObject::from_permutational(make_permutational(GSet::cosets(k), 1, chi));
        FilteredObject b = FilteredObject::tate(-1, chi_h);
        FilteredMap pf = projection_formula_iso(a, b, h);
        t.check(pf.is_isomorphism() &&
                    same_factors(hom_F(FilteredObject::unit(chi), pf.source()).invariant_factors(),
                                 hom_F(FilteredObject::unit(chi), pf.target()).invariant_factors()),
                pair + " projection formula");
        FilteredMap mk = mackey_tensor_iso(h, k, chi);
        t.check(mk.is_isomorphism() && mk.source().rank() == h.index() * k.index() &&
                    same_factors(hom_F(FilteredObject::unit(chi), mk.source()).invariant_factors(),
                                 hom_F(FilteredObject::unit(chi), mk.target()).invariant_factors()),
                pair + " Mackey decomposition");
      }
    }
  }
  return r;
}

CriterionResult fprime_descent() {
  CriterionResult r{7, "theta", "in mode Fprime theta is ISO at every certified degree", true, 0, ""};
  Tally t{r};
  std::size_t uncertified = 0;
  for (const auto& chi : battery())
    for (int j = 0; j <= 3; ++j)
      for (int i = 0; i <= 3; ++i) {
        ExtReport rep = theta_report(i, j, chi, Mode::Fprime);
        if (!rep.certified()) {
          ++uncertified;
          t.check(*rep.verdict != Verdict::MISMATCH, label(chi) + " uncertified MISMATCH");
          continue;
        }
        t.check(*rep.verdict == Verdict::ISO, label(chi) + " i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                                  " verdict " + to_string(*rep.verdict));
      }
  r.findings["uncertified"] = uncertified;
  return r;
}

CriterionResult fsecond_reporting() {
  CriterionResult r{8, "theta", "mode Fsecond reports the untruncated H^i(G, mu^j)", true, 0, ""};
  Tally t{r};
  for (const auto& chi : battery())
    for (int j = 0; j <= 3; ++j)
      for (int i = 0; i <= 3; ++i) {
        ExtReport rep = theta_report(i, j, chi, Mode::Fsecond);
        Factors h = cohomology(mu_tensor(j, chi), i).invariant_factors();
        t.check(rep.certified() && same_factors(*rep.value.factors, h),
                label(chi) + " i=" + std::to_string(i) + " j=" + std::to_string(j) + " reported " +
                    (rep.certified() ? factors_string(*rep.value.factors) : "uncertified") + " vs " +
                    factors_string(h));
      }
  return r;
}

CriterionResult p_properties(const std::string& dir) {
  CriterionResult r{9, "p", "P properties on the complex corpus plus a non-additivity witness", true, 0, ""};
  Tally t{r};
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir))
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  t.check(!files.empty(), "no complexes found in " + dir);
  bool witness = false;
  for (const auto& f : files) {
    std::ifstream in(f);
    ModuleComplex a = ModuleComplex::from_json(nlohmann::json::parse(in));
    bool small = true;
    for (int j = a.lowest(); j <= a.highest(); ++j) small = small && a.size(j) <= 8;
    t.check(small, f.filename().string() + " has a module larger than 8");
    PCheckReport rep = p_check(a);
    std::string failed;
    for (const auto& c : rep.checks)
      if (!c.informational && !c.passed) failed += " " + c.name;
    t.check(rep.passed(), f.filename().string() + " failed:" + failed);
    if (rep.witness && !witness) {
      witness = true;
      r.findings["witness"] = *rep.witness;
      r.findings["witness_complex"] = f.filename().string();
    }
  }
  t.check(witness, "no non-additivity witness found");
  r.findings["complexes"] = files.size();
  return r;
}

CriterionResult koszul_sanity() {
  CriterionResult r{10, "koszul", "cobar probe: trivial G diagonal, Z/2 m=2 diagonal matches certified Ext", true, 0,
                    ""};
  Tally t{r};
  for (Residue m : {2, 3, 4}) {
    KoszulityReport rep = koszulity_probe(BigGradedRing::build(TwistCharacter::trivial(FiniteGroup::trivial(), m), 3), 3);
    t.check(rep.diagonal, "trivial group m=" + std::to_string(m) + " has an off-diagonal class");
  }
  TwistCharacter chi = TwistCharacter::trivial(FiniteGroup::cyclic(2), 2);
  KoszulityReport rep = koszulity_probe(BigGradedRing::build(chi, 3), 3);
  for (int j = 0; j <= 2; ++j) {
    ExtReport e = theta_report(j, j, chi, Mode::F);
    const Factors& cobar = rep.unit_diagonal.at(static_cast<std::size_t>(j));
    t.check(e.certified() && same_factors(cobar, *e.value.factors),
            "Z/2 m=2 j=" + std::to_string(j) + " cobar " + factors_string(cobar) + " vs Ext " +
                (e.certified() ? factors_string(*e.value.factors) : "uncertified"));
  }
  nlohmann::json off = nlohmann::json::array();
  for (const auto& e : rep.entries)
    if (e.k != e.j) off.push_back({{"k", e.k}, {"j", e.j}, {"factors", e.factors}});
  r.findings["z2_m2_off_diagonal"] = off;
  r.findings["label"] = "CONJECTURE-FACING";
  return r;
}

}  // namespace

bool AcceptanceReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

nlohmann::json AcceptanceReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : criteria)
    rows.push_back({{"criterion", c.number},
                    {"tag", c.tag},
                    {"title", c.title},
                    {"passed", c.passed},
                    {"checked", c.checked},
                    {"detail", c.detail},
                    {"findings", c.findings}});
  return {{"passed", passed()}, {"criteria", rows}};
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opt) {
  struct Entry {
    int number;
    std::string tag;
    std::function<CriterionResult()> run;
  };
  std::vector<Entry> all = {
      {1, "theta", theta_low_degree},
      {2, "ext", unit_self_ext},
      {3, "theta", j_le_two},
      {4, "ext", weight_vanishing},
      {5, "oracle", [&] { return oracle_equivalence(opt.corrupt_oracle, opt.fail_fast); }},
      {6, "adjunction", adjunctions},
      {7, "theta", fprime_descent},
      {8, "theta", fsecond_reporting},
      {9, "p", [&] { return p_properties(opt.corpus_dir); }},
      {10, "koszul", koszul_sanity},
  };
  AcceptanceReport out;
  for (const auto& e : all)
    if (opt.filter.empty() || opt.filter == e.tag || opt.filter == std::to_string(e.number))
      out.criteria.push_back(e.run());
  if (out.criteria.empty()) throw DomainError("filter '" + opt.filter + "' selects no criterion");
  return out;
}

std::string acceptance_lines(const AcceptanceReport& r) {
  std::string s;
  for (const auto& c : r.criteria) {
    s += (c.passed ? "PASS" : "FAIL");
    s += " criterion " + std::to_string(c.number) + ": " + c.title + " (" + std::to_string(c.checked) + " checks)";
    if (!c.passed) s += " -- " + c.detail;
    s += "\n";
  }
  return s;
}

}  // namespace atmot
