#include <functional>
#include <random>

#include "atmot/atcat.hpp"
#include "atmot/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace atmot;

namespace {

TwistCharacter sign_character(Residue m) {
  return TwistCharacter::from_generator_values(FiniteGroup::cyclic(2), m, {m - 1});
}

// Brute force: does some matrix s with p s = 1 commute with the actions?
bool has_equivariant_section_bruteforce(const ZmMatrix& p, const std::vector<ZmMatrix>& rho_e,
                                        const std::vector<ZmMatrix>& rho_m) {
  Residue m = p.modulus();
  std::size_t re = p.cols(), rm = p.rows(), n = re * rm;
  for (const auto& v : oracle::all_vectors(n, m)) {
    ZmMatrix s(m, re, rm);
    for (std::size_t k = 0; k < n; ++k) s.set(k / rm, k % rm, v[k]);
    if (!(p * s).is_identity()) continue;
    bool ok = true;
    for (std::size_t g = 0; g < rho_e.size() && ok; ++g) ok = rho_e[g] * s == s * rho_m[g];
    if (ok) return true;
  }
  return false;
}

// Number of orbits of G on a product of two G-sets, by union-find.
std::size_t product_orbit_count(const GSet& a, const GSet& b) {
  std::size_t n = a.size() * b.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t k = 0; k < n; ++k) parent[k] = k;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  const FiniteGroup& g = a.group();
  for (int e = 0; e < static_cast<int>(g.order()); ++e)
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = 0; y < b.size(); ++y) {
        std::size_t to = a.act(e, static_cast<int>(x)) * b.size() + b.act(e, static_cast<int>(y));
        parent[find(x * b.size() + y)] = find(to);
      }
  std::size_t c = 0;
  for (std::size_t k = 0; k < n; ++k) c += find(k) == k;
  return c;
}

// Brute-force count of vectors fixed by all of G.
std::size_t fixed_vector_count(const FilteredObject& x) {
  std::size_t c = 0;
  for (const auto& v : oracle::all_vectors(x.rank(), x.modulus())) {
    bool ok = true;
    for (int g : x.group().generator_indices()) {
      ZmVector w = vec_mul(v, x.rho(g).transpose());
      ok = ok && w == v;
    }
    c += ok;
  }
  return c;
}

// The nonsplit extension of Z/m(0) by Z/m(1) over Z/2 acting by the sign,
// with u = [[0,1],[0,0]].
FilteredObject augmentation_extension(Residue m, Mode mode) {
  TwistCharacter chi = sign_character(m);
  nlohmann::json j = {{"mode", to_string(mode)},
                      {"weights", {{"1", {{"gset", {{"size", 1}}}}}, {"0", {{"gset", {{"size", 1}}}}}}},
                      {"u", {{"0", {{0, 1}, {0, 0}}}}}};
  return FilteredObject::from_json(chi, j);
}

}  // namespace

TEST_CASE("permutational objects") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::trivial(s3, 3);
  auto subs = subgroups_up_to_conjugacy(s3);
  for (const auto& h : subs) {
    PermutationalObject p = mcc_of_subgroup(h, chi);
    CHECK(p.rank() == h.index());
    FilteredObject x = FilteredObject::from_permutational(p);
    CHECK(x.is_split());
    REQUIRE(x.pieces().size() == 1);
    REQUIRE(x.pieces()[0].gset.has_value());
    CHECK(x.pieces()[0].gset->orbits().size() == 1);
    CHECK(x.pieces()[0].gset->stabilizer(0) == h);
  }
  TwistCharacter sgn = sign_character(3);
  FilteredObject t = FilteredObject::tate(1, sgn);
  CHECK(t.rho(1)(0, 0) == 2);
  CHECK(t.weights() == std::vector<int>{1});
}

TEST_CASE("filtered objects: validation") {
  TwistCharacter chi = TwistCharacter::trivial(FiniteGroup::cyclic(2), 2);
  // weight-lowering action rejected
  ZmMatrix low = ZmMatrix::from_rows(2, {{1, 0}, {1, 1}});
  CHECK_THROWS_AS(FilteredObject::from_generators(Mode::F, chi, {1, 0}, {low}), DomainError);
  CHECK_THROWS_AS(FilteredObject::from_generators(Mode::F, chi, {0, 1}, {ZmMatrix::identity(2, 2)}), DomainError);
  // swap within a piece is fine in mode F, a non-monomial block is not
  ZmMatrix swap = ZmMatrix::from_rows(2, {{0, 1}, {1, 0}});
  CHECK_NOTHROW(FilteredObject::from_generators(Mode::F, chi, {0, 0}, {swap}));
  TwistCharacter chi3 = TwistCharacter::trivial(FiniteGroup::cyclic(3), 2);
  ZmMatrix rot = ZmMatrix::from_rows(2, {{0, 1}, {1, 1}});  // order 3, irreducible over F_2
  CHECK_THROWS_AS(FilteredObject::from_generators(Mode::F, chi3, {0, 0}, {rot}), DomainError);
  CHECK_NOTHROW(FilteredObject::from_generators(Mode::Fprime, chi3, {0, 0}, {rot}));

  FilteredObject e = augmentation_extension(2, Mode::F);
  CHECK_FALSE(e.is_split());
  CHECK(e.u(1) == ZmMatrix::from_rows(2, {{0, 1}, {0, 0}}));
}

TEST_CASE("tensor: Tate twists and unit") {
  for (Residue m : {2, 3, 4, 5}) {
    TwistCharacter chi = sign_character(m);
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        CHECK(tensor(FilteredObject::tate(a, chi), FilteredObject::tate(b, chi)) == FilteredObject::tate(a + b, chi));
    for (int a = -2; a <= 2; ++a) CHECK(dual(FilteredObject::tate(a, chi)) == FilteredObject::tate(-a, chi));
  }
  FilteredObject e = augmentation_extension(4, Mode::F);
  CHECK(right_unitor(e).is_isomorphism());
  CHECK(left_unitor(e).is_isomorphism());
}

TEST_CASE("tensor of regular objects via Mackey") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::trivial(s3, 2);
  auto one = SubgroupHandle::trivial(s3);
  FilteredObject reg = FilteredObject::from_permutational(mcc_of_subgroup(one, chi));
  FilteredObject rr = tensor(reg, reg);
  CHECK(rr.rank() == 36);
  FilteredMap iso = mackey_tensor_iso(one, one, chi);
  CHECK(iso.source().rank() == 36);
  CHECK(iso.is_isomorphism());
  CHECK(fixed_vector_count(reg) == 2);
}

TEST_CASE("Mackey isomorphism for all subgroup pairs") {
  std::vector<FiniteGroup> groups = {FiniteGroup::cyclic(4), FiniteGroup::symmetric(3), FiniteGroup::dihedral(4),
                                     FiniteGroup::cyclic(6), FiniteGroup::dihedral(6), FiniteGroup::symmetric(4)};
  for (const auto& g : groups) {
    TwistCharacter chi = TwistCharacter::trivial(g, 2);
    auto subs = subgroups_up_to_conjugacy(g);
    for (const auto& h : subs)
      for (const auto& hp : subs) {
        if (h.index() * hp.index() > 144) continue;
        FilteredMap iso = mackey_tensor_iso(h, hp, chi);
        CHECK(iso.is_isomorphism());
        // fixed points of the sum: one line per double coset; of the product:
        // one line per orbit on G/H x G/H'
        std::size_t orbits = product_orbit_count(GSet::cosets(h), GSet::cosets(hp));
        CHECK(double_cosets(h, hp).size() == orbits);
        CHECK(iso.source().pieces()[0].gset->orbits().size() == orbits);
      }
  }
}

TEST_CASE("duality: triangle identities and self-duality") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::all(s3, 3).back();
  std::vector<FilteredObject> objs;
  for (const auto& h : subgroups_up_to_conjugacy(s3))
    objs.push_back(FilteredObject::from_permutational(mcc_of_subgroup(h, chi)));
  objs.push_back(FilteredObject::tate(1, chi));
  objs.push_back(direct_sum(FilteredObject::tate(2, chi), objs[1]));
  FilteredObject e2 = augmentation_extension(3, Mode::F);
  for (const auto& x : objs) {
    FilteredObject d = dual(x);
    FilteredMap ev = evaluation(x), co = coevaluation(x);
    // (X -> 1 X -> (X X*) X -> X (X* X) -> X 1 -> X) is the identity
    FilteredMap lhs = right_unitor(x)
                          .compose(tensor_maps(FilteredMap::identity(x), ev))
                          .compose(associator(x, d, x))
                          .compose(tensor_maps(co, FilteredMap::identity(x)));
    ZmMatrix expect = left_unitor(x).matrix();
    CHECK(lhs.matrix() * expect == ZmMatrix::identity(x.modulus(), x.rank()));
    CHECK(double_dual_iso(x).is_isomorphism());
  }
  // permutation objects are self-dual
  for (std::size_t k = 0; k + 2 < objs.size(); ++k) CHECK(dual(objs[k]) == objs[k]);
  CHECK(dual(e2).rank() == 2);
}

TEST_CASE("admissibility: nonsplit extension and splittings") {
  for (Residue m : {2, 3, 4}) {
    for (Mode mode : {Mode::F, Mode::Fprime, Mode::Fsecond}) {
      FilteredObject e = augmentation_extension(m, mode);
      TwistCharacter chi = e.character();
      FilteredObject n = FilteredObject::tate(1, chi, mode), q = FilteredObject::tate(0, chi, mode);
      FilteredMap i(n, e, ZmMatrix::from_rows(m, {{1}, {0}}));
      FilteredMap p(e, q, ZmMatrix::from_rows(m, {{0, 1}}));
      auto v = check_admissible(i, p);
      CHECK(v.admissible);
      // graded pieces are split, so the verdict agrees with the brute-force search
      for (const auto& [w, s] : v.splittings) CHECK((p.graded_part(w) * s).is_identity());
    }
  }
  // not admissible: the surjection Z/2[Z/2] -> Z/2 has no equivariant section
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  TwistCharacter chi = TwistCharacter::trivial(z2, 2);
  FilteredObject reg = FilteredObject::from_permutational(mcc_of_subgroup(SubgroupHandle::trivial(z2), chi));
  FilteredObject one = FilteredObject::unit(chi);
  FilteredMap aug(reg, one, ZmMatrix::from_rows(2, {{1, 1}}));
  FilteredMap norm(one, reg, ZmMatrix::from_rows(2, {{1}, {1}}));
  CHECK(norm.matrix().rows() == 2);
  bool brute = has_equivariant_section_bruteforce(aug.matrix(), {reg.rho(0), reg.rho(1)}, {one.rho(0), one.rho(1)});
  CHECK_FALSE(brute);
  auto v = check_admissible(norm, aug);
  CHECK_FALSE(v.admissible);
  CHECK(v.reason.find("splitting") != std::string::npos);
  // the same shape is admissible in mode Fsecond
  FilteredObject reg2 = FilteredObject::from_module(reg.total_module(), 0, chi, Mode::Fsecond);
  FilteredObject one2 = FilteredObject::unit(chi, Mode::Fsecond);
  CHECK(check_admissible(FilteredMap(one2, reg2, norm.matrix()), FilteredMap(reg2, one2, aug.matrix())).admissible);
  // non-exact triples fail
  CHECK_FALSE(check_admissible(FilteredMap::zero(one, reg), aug).admissible);
  CHECK_THROWS_AS(check_admissible(norm, FilteredMap::identity(one)), MismatchError);
}

TEST_CASE("admissibility agrees with brute force on small examples") {
  std::mt19937_64 rng(7);
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  for (Residue m : {2, 3}) {
    TwistCharacter chi = sign_character(m);
    FilteredObject reg = FilteredObject::from_permutational(mcc_of_subgroup(SubgroupHandle::trivial(z2), chi), Mode::Fprime);
    FilteredObject one = FilteredObject::unit(chi, Mode::Fprime);
    FilteredObject sgn = FilteredObject::from_module(mu_tensor(1, chi), 0, chi, Mode::Fprime);
    FilteredMap aug(reg, one, ZmMatrix::from_rows(m, {{1, 1}}));
    FilteredMap anti(sgn, reg, ZmMatrix::from_rows(m, {{1}, {m - 1}}));
    bool brute = has_equivariant_section_bruteforce(aug.matrix(), reg.actions(), one.actions());
    CHECK(check_admissible(anti, aug).admissible == brute);
    CHECK(brute == (m == 3));
  }
  // split triples always admissible
  TwistCharacter chi = TwistCharacter::trivial(FiniteGroup::symmetric(3), 4);
  FilteredObject a = FilteredObject::from_permutational(mcc_of_subgroup(subgroups_up_to_conjugacy(chi.group())[1], chi));
  FilteredObject b = FilteredObject::tate(1, chi);
  auto [i, p] = split_triple(a, b);
  CHECK(check_admissible(i, p).admissible);
  auto [i2, p2] = split_triple(b, a);
  CHECK(check_admissible(i2, p2).admissible);
}

TEST_CASE("coefficient change") {
  TwistCharacter chi = sign_character(4);
  FilteredObject e = augmentation_extension(4, Mode::F);
  FilteredObject r = coefficient_change(e, 2);
  CHECK(r.modulus() == 2);
  CHECK(r == augmentation_extension(2, Mode::F));
  CHECK(coefficient_change(FilteredObject::tate(1, chi), 2) == FilteredObject::tate(1, chi.reduce_to(2)));
  CHECK_THROWS_AS(coefficient_change(e, 3), DomainError);
  FilteredMap id = coefficient_change(FilteredMap::identity(e), 2);
  CHECK(id.matrix().is_identity());
}

TEST_CASE("restriction and induction") {
  std::vector<FiniteGroup> groups = {FiniteGroup::cyclic(4), FiniteGroup::symmetric(3), FiniteGroup::dihedral(4)};
  for (const auto& g : groups) {
    for (const auto& chi : TwistCharacter::all(g, 3)) {
      for (const auto& h : subgroups_up_to_conjugacy(g)) {
        TwistCharacter chi_h = chi.restrict_to(h);
        // induce of the unit is the mcc object
        FilteredObject ind = induce_filtered(FilteredObject::unit(chi_h), h, chi);
        CHECK(ind == FilteredObject::from_permutational(mcc_of_subgroup(h, chi)));
        // induce of a Tate twist is mcc(1): still permutational in mode F
        FilteredObject ind1 = induce_filtered(FilteredObject::tate(1, chi_h), h, chi);
        CHECK(ind1.pieces()[0].gset.has_value());
        CHECK(ind1.rank() == h.index());
        // projection formula
        FilteredObject a = direct_sum(FilteredObject::tate(1, chi), FilteredObject::unit(chi));
        FilteredObject b = FilteredObject::tate(-1, chi_h);
        FilteredMap pf = projection_formula_iso(a, b, h);
        CHECK(pf.is_isomorphism());
      }
    }
  }
}

TEST_CASE("Frobenius reciprocity matches dimensions") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::all(s3, 3).back();
  for (const auto& h : subgroups_up_to_conjugacy(s3)) {
    TwistCharacter chi_h = chi.restrict_to(h);
    FilteredObject m = FilteredObject::tate(1, chi_h);
    FilteredObject im = induce_filtered(m, h, chi);
    FilteredObject n = direct_sum(FilteredObject::tate(1, chi), FilteredObject::from_permutational(mcc_of_subgroup(h, chi)));
    // Hom(induce m, n) and Hom(m, restrict n) have the same cardinality
    auto lhs = equivariant_maps(im.total_module(), n.total_module());
    auto rhs = equivariant_maps(m.total_module(), restrict_filtered(n, h).total_module());
    auto span = [&](const std::vector<ZmMatrix>& maps, std::size_t r, std::size_t c) {
      ZmMatrix rows(3, 0, r * c);
      for (const auto& f : maps) {
        ZmMatrix row(3, 1, r * c);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) row.set(0, i * c + j, f(i, j));
        rows = vstack(rows, row);
      }
      return maps.empty() ? Order() : span_order(rows);
    };
    CHECK(span(lhs, n.rank(), im.rank()) == span(rhs, n.rank(), m.rank()));
    for (const auto& phi : lhs) {
      ZmMatrix psi = frobenius_restrict(m, h, chi, phi);
      CHECK(FilteredMap::is_equivariant(m, restrict_filtered(n, h), psi));
    }
    // the other adjunction: Hom(restrict n, m) = Hom(n, induce m)
    auto lhs2 = equivariant_maps(restrict_filtered(n, h).total_module(), m.total_module());
    auto rhs2 = equivariant_maps(n.total_module(), im.total_module());
    CHECK(span(lhs2, m.rank(), n.rank()) == span(rhs2, im.rank(), n.rank()));
    for (const auto& psi : lhs2) {
      ZmMatrix phi = frobenius_induce(n, m, h, chi, psi);
      CHECK(FilteredMap::is_equivariant(n, im, phi));
    }
  }
}

TEST_CASE("transfer pair") {
  FiniteGroup d4 = FiniteGroup::dihedral(4);
  TwistCharacter chi = TwistCharacter::trivial(d4, 4);
  auto subs = all_subgroups(d4);
  for (const auto& h : subs)
    for (const auto& k : subs) {
      bool le = std::all_of(h.elements().begin(), h.elements().end(), [&](int x) { return k.contains(x); });
      if (!le) {
        CHECK_THROWS_AS(mcc_transfer_pair(h, k, chi), DomainError);
        continue;
      }
      auto tp = mcc_transfer_pair(h, k, chi);
      ZmMatrix comp = tp.projection.matrix() * tp.transfer.matrix();
      CHECK(comp == ZmMatrix::identity(4, k.index()).scaled(static_cast<Residue>(k.order() / h.order())));
    }
}

TEST_CASE("generation epimorphism") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::all(s3, 3).back();
  GSet pts = GSet::from_generator_action(s3, 3, {s3.generators()[0], s3.generators()[1]});
  GSet s = GSet::disjoint_union(GSet::disjoint_union(pts, GSet::point(s3)), GSet::regular(s3));
  for (int twist : {0, 1}) {
    PermutationalObject p = make_permutational(s, twist, chi);
    FilteredMap e = generation_epimorphism(p);
    CHECK(e.is_isomorphism());
    CHECK(e.target().rank() == 10);
    FilteredObject src = e.source();
    // every summand is built from a canonical subgroup
    CHECK(src.pieces().size() == 1);
    CHECK(src.pieces()[0].gset->orbits().size() == 3);
  }
}

TEST_CASE("tensor preserves admissible triples") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  for (Residue m : {2, 4}) {
    FilteredObject e = augmentation_extension(m, Mode::F);
    TwistCharacter chi = e.character();
    FilteredObject n = FilteredObject::tate(1, chi), q = FilteredObject::unit(chi);
    FilteredMap i(n, e, ZmMatrix::from_rows(m, {{1}, {0}}));
    FilteredMap p(e, q, ZmMatrix::from_rows(m, {{0, 1}}));
    FilteredObject x = direct_sum(FilteredObject::from_permutational(mcc_of_subgroup(SubgroupHandle::trivial(z2), chi)),
                                  FilteredObject::tate(2, chi));
    FilteredMap ix = tensor_maps(i, FilteredMap::identity(x)), px = tensor_maps(p, FilteredMap::identity(x));
    CHECK(check_admissible(ix, px).admissible);
  }
}

TEST_CASE("JSON round trip") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  TwistCharacter chi = TwistCharacter::all(s3, 3).back();
  FilteredObject x = direct_sum(FilteredObject::tate(1, chi),
                                FilteredObject::from_permutational(mcc_of_subgroup(subgroups_up_to_conjugacy(s3)[1], chi)));
  CHECK(FilteredObject::from_json(chi, x.to_json()) == x);
  FilteredObject e = augmentation_extension(4, Mode::F);
  CHECK(FilteredObject::from_json(e.character(), e.to_json()) == e);
  nlohmann::json bad = e.to_json();
  bad["u"]["0"] = {{0, 0}, {1, 0}};
  try {
    FilteredObject::from_json(e.character(), bad);
    FAIL("expected a schema error");
  } catch (const SchemaError& err) {
    CHECK(err.path() == "/u/0/1");
  }
  bad = e.to_json();
  bad["mode"] = "G";
  CHECK_THROWS_AS(FilteredObject::from_json(e.character(), bad), SchemaError);
}
