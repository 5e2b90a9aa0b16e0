#include "atmot/errors.hpp"
#include "atmot/gmod_cohomology.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace atmot;

namespace {

using Factors = std::vector<Residue>;

TwistCharacter sign_character(Residue m) {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  return TwistCharacter::from_generator_values(z2, m, {m - 1});
}

}  // namespace

TEST_CASE("mu_tensor: examples") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  int s = z2.generator_indices()[0];
  TwistCharacter chi = sign_character(4);
  CHECK(mu_tensor(0, chi) == GModule::trivial(z2, 4));
  CHECK(mu_tensor(1, chi).action(s)(0, 0) == 3);
  CHECK(mu_tensor(2, chi).action(s)(0, 0) == 1);
  CHECK(mu_tensor(-1, chi).action(s)(0, 0) == 3);
  CHECK_THROWS_AS(TwistCharacter::from_generator_values(z2, 4, {2}), DomainError);
}

TEST_CASE("restrict and induce: examples") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  auto whole = SubgroupHandle::whole(z2), one = SubgroupHandle::trivial(z2);
  GModule triv = GModule::trivial(z2, 2);
  CHECK(restrict_module(triv, whole) == triv);
  CHECK(induce_module(triv, whole) == triv);

  GModule ind = induce_module(GModule::trivial(one.as_group(), 2), one);
  CHECK(ind.rank() == 2);
  CHECK(ind.action(1) == ZmMatrix::from_rows(2, {{0, 1}, {1, 0}}));
  CHECK(restrict_module(ind, one) == GModule::trivial(one.as_group(), 2, 2));
}

TEST_CASE("induce of the trivial module is the permutation module on cosets") {
  for (const auto& g : {FiniteGroup::symmetric(3), FiniteGroup::cyclic(4), FiniteGroup::dihedral(4)})
    for (const auto& h : all_subgroups(g)) {
      GModule ind = induce_module(GModule::trivial(h.as_group(), 3), h);
      CHECK(ind == GModule::permutation(GSet::cosets(h), 3));
      // restriction of induction contains M: the H-fixed vector e_0 spans a copy
      CHECK(ind.rank() == h.index());
    }
}

TEST_CASE("hom_module: examples") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  GModule triv = GModule::trivial(z2, 2);
  CHECK(hom_module(triv, triv) == triv);
  GModule reg = GModule::permutation(GSet::regular(z2), 2);
  auto maps = equivariant_maps(reg, triv);
  ZmMatrix span(2, 0, 2);
  for (const auto& m : maps) span.append_row(m.row(0));
  CHECK(span_order(span).value() == 2u);  // the sum map and zero
  CHECK(GModule::is_equivariant(reg, triv, ZmMatrix::from_rows(2, {{1, 1}})));
  CHECK_FALSE(GModule::is_equivariant(reg, triv, ZmMatrix::from_rows(2, {{1, 0}})));

  GModule s3reg = GModule::permutation(GSet::regular(FiniteGroup::symmetric(3)), 4);
  GModule h = hom_module(s3reg, s3reg);
  ZmVector id(36, 0);
  for (int i = 0; i < 6; ++i) id[i * 6 + i] = 1;
  for (int g = 0; g < 6; ++g) CHECK(h.act(g, id) == id);
}

TEST_CASE("equivariant_maps agrees with exhaustive search") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  GModule reg = GModule::permutation(GSet::regular(z2), 2);
  GModule sgn = mu_tensor(1, sign_character(3));
  GModule reg3 = GModule::permutation(GSet::regular(z2), 3);
  for (auto [m, n] : {std::pair{reg, reg}, std::pair{reg3, sgn}, std::pair{sgn, reg3}}) {
    std::size_t count = 0;
    for (const auto& v : oracle::all_vectors(m.rank() * n.rank(), m.modulus())) {
      ZmMatrix phi(m.modulus(), n.rank(), m.rank());
      for (std::size_t i = 0; i < v.size(); ++i) phi.set(i / m.rank(), i % m.rank(), v[i]);
      if (GModule::is_equivariant(m, n, phi)) ++count;
    }
    ZmMatrix span(m.modulus(), 0, m.rank() * n.rank());
    for (const auto& phi : equivariant_maps(m, n)) span.append_row(phi.data());
    CHECK(span_order(span).value() == count);
  }
}

TEST_CASE("cohomology: examples") {
  for (const auto& g : {FiniteGroup::trivial(), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)})
    for (Residue m : {2, 3, 4}) CHECK(cohomology(GModule::trivial(g, m), 0).invariant_factors() == Factors{m});
  GModule z2 = GModule::trivial(FiniteGroup::cyclic(2), 2);
  for (int i = 0; i <= 4; ++i) CHECK(cohomology(z2, i).invariant_factors() == Factors{2});
  CHECK(cohomology(GModule::trivial(FiniteGroup::cyclic(3), 2), 1).invariant_factors().empty());
  CohomologyOptions tight;
  tight.budget_mb = 1;
  CHECK_THROWS_AS(cohomology(GModule::trivial(FiniteGroup::symmetric(3), 2, 8), 4, tight), BudgetError);
  tight.budget_mb = 512;
  tight.degree_cap = 2;
  CHECK_THROWS_AS(cohomology(z2, 3, tight), BudgetError);
}

TEST_CASE("cohomology of cyclic groups matches the periodic formula") {
  for (int n : {2, 3, 4, 6})
    for (Residue m : {2, 3, 4}) {
      FiniteGroup g = FiniteGroup::cyclic(n);
      int s = g.generator_indices()[0];
      for (const auto& chi : TwistCharacter::all(g, m))
        for (int j : {0, 1, 2}) {
          GModule mu = mu_tensor(j, chi);
          for (int i = 0; i <= (n == 6 ? 3 : 4); ++i) {
            auto h = cohomology(mu, i);
            CHECK(h.invariant_factors() == oracle::cyclic_cohomology(n, mu.action(s)(0, 0), m, i));
            for (std::size_t r = 0; r < h.representatives().rows(); ++r)
              CHECK(h.is_cocycle(h.representatives().row(r)));
          }
        }
    }
}

TEST_CASE("cohomology orders match enumeration of unnormalized cochains") {
  struct Case {
    FiniteGroup g;
    Residue m;
    int max_degree;
  };
  for (const auto& c : {Case{FiniteGroup::cyclic(2), 4, 2}, Case{FiniteGroup::cyclic(3), 3, 2},
                        Case{FiniteGroup::cyclic(4), 2, 2}, Case{FiniteGroup::symmetric(3), 2, 1},
                        Case{FiniteGroup::symmetric(3), 3, 1}, Case{FiniteGroup::symmetric(3), 4, 1}})
    for (const auto& chi : TwistCharacter::all(c.g, c.m))
      for (int i = 1; i <= c.max_degree; ++i) {
        auto h = cohomology(mu_tensor(1, chi), i);
        CHECK(h.cardinality().value() == oracle::cohomology_order_bruteforce(c.g, chi.values(), c.m, i));
      }
}

TEST_CASE("Shapiro: H(G, Ind M) = H(H, M)") {
  for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(4), FiniteGroup::symmetric(3)})
    for (Residue m : {2, 3, 4})
      for (const auto& h : all_subgroups(g))
        for (const auto& chi : TwistCharacter::all(g, m)) {
          GModule mu = mu_tensor(1, chi.restrict_to(h));
          GModule ind = induce_module(mu, h);
          for (int i = 0; i <= 3; ++i) {
            if (cochain_dimension(ind, i + 1) > 1500) break;
            CHECK(same_factors(cohomology(ind, i).invariant_factors(), cohomology(mu, i).invariant_factors()));
          }
        }
}

TEST_CASE("|G| annihilates positive-degree cohomology") {
  for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4), FiniteGroup::symmetric(3)})
    for (Residue m : {2, 3, 4, 6})
      for (const auto& chi : TwistCharacter::all(g, m))
        for (int i = 1; i <= 2; ++i) {
          auto h = cohomology(mu_tensor(1, chi), i);
          for (Residue d : h.invariant_factors()) CHECK(static_cast<Residue>(g.order()) % d == 0);
        }
}

TEST_CASE("long exact sequence of 0 -> Z/m -> Z/m[G/H] -> Q -> 0 is exact") {
  for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(4), FiniteGroup::symmetric(3)})
    for (Residue m : {2, 3, 4})
      for (const auto& h : all_subgroups(g)) {
        if (h.index() == 1) continue;
        GModule b = GModule::permutation(GSet::cosets(h), m);
        std::size_t n = b.rank();
        GModule a = GModule::trivial(g, m);
        ZmMatrix iota(m, n, 1);  // norm element, last coordinate 1
        for (std::size_t k = 0; k < n; ++k) iota.set(k, 0, 1);
        ZmMatrix pi(m, n - 1, n), sect(m, n, n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
          pi.set(k, k, 1);
          pi.set(k, n - 1, m - 1);
          sect.set(k, k, 1);
        }
        std::vector<ZmMatrix> cact;
        for (const auto& x : b.actions()) cact.push_back(pi * x * sect);
        GModule c(g, m, cact);
        REQUIRE(GModule::is_equivariant(a, b, iota));
        REQUIRE(GModule::is_equivariant(b, c, pi));
        for (int i = 0; i <= 1; ++i) {
          auto ha = cohomology(a, i), hb = cohomology(b, i), hc = cohomology(c, i), ha1 = cohomology(a, i + 1),
               hb1 = cohomology(b, i + 1);
          ZmMatrix f = induced_map(ha, hb, iota), p = induced_map(hb, hc, pi), f1 = induced_map(ha1, hb1, iota);
          // connecting map: lift along the section, apply d, read off the last coordinate
          ZmMatrix delta(m, 0, ha1.invariant_factors().size());
          for (std::size_t r = 0; r < hc.representatives().rows(); ++r) {
            ZmVector lift = apply_to_cochain(sect, hc.representatives().row(r));
            ZmVector dl = vec_mul(lift, bar_differential(b, i));
            ZmMatrix last(m, 1, n);
            last.set(0, n - 1, 1);
            ZmVector val = apply_to_cochain(last, dl);
            CHECK(dl == apply_to_cochain(iota, val));
            delta.append_row(ha1.class_of(val));
          }
          Order im_f = image_order(hb, f), im_p = image_order(hc, p), im_d = image_order(ha1, delta),
                im_f1 = image_order(hb1, f1);
          CHECK(im_f == hb.cardinality() / im_p);
          CHECK(im_p == hc.cardinality() / im_d);
          CHECK(im_d == ha1.cardinality() / im_f1);
        }
      }
}

TEST_CASE("cup products") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  GModule t = GModule::trivial(z2, 2);
  auto h1 = cohomology(t, 1), h2 = cohomology(t, 2), h0 = cohomology(t, 0);
  ZmVector x{1};
  CHECK(cup(h1, x, h1, x, h2) == ZmVector{1});
  CHECK(cup(h1, ZmVector{0}, h1, x, h2) == ZmVector{0});
  CHECK(cup(h0, ZmVector{1}, h1, x, h1) == x);

  // graded commutativity and associativity on Z/4 with several moduli
  FiniteGroup z4 = FiniteGroup::cyclic(4);
  for (Residue m : {2, 4}) {
    GModule tm = GModule::trivial(z4, m);
    auto a1 = cohomology(tm, 1), a2 = cohomology(tm, 2), a3 = cohomology(tm, 3);
    for (Residue u = 0; u < m; ++u)
      for (Residue v = 0; v < m; ++v) {
        ZmVector xy = cup(a1, ZmVector{u}, a1, ZmVector{v}, a2);
        ZmVector yx = cup(a1, ZmVector{v}, a1, ZmVector{u}, a2);
        for (std::size_t k = 0; k < xy.size(); ++k) CHECK((xy[k] + yx[k]) % a2.invariant_factors()[k] == 0);
        for (Residue w = 0; w < m; ++w) {
          ZmVector left = cup(a2, xy, a1, ZmVector{w}, a3);
          ZmVector right = cup(a1, ZmVector{u}, a2, cup(a1, ZmVector{v}, a1, ZmVector{w}, a2), a3);
          CHECK(left == right);
        }
      }
  }

  // twisted coefficients: mu_4 over Z/2 with the sign action
  TwistCharacter chi = sign_character(4);
  GModule mu = mu_tensor(1, chi);
  auto b1 = cohomology(mu, 1);
  auto b2 = cohomology(tensor(mu, mu), 2);
  for (std::size_t k = 0; k < b1.representatives().rows(); ++k)
    CHECK(b2.is_cocycle(cup_cochains(mu, 1, b1.representatives().row(k), mu, 1, b1.representatives().row(k))));
}

TEST_CASE("inflation") {
  FiniteGroup z4 = FiniteGroup::cyclic(4), z2 = FiniteGroup::cyclic(2);
  GroupHom q = GroupHom::from_generator_images(z4, z2, {z2.generator_indices()[0]});
  GModule t2 = GModule::trivial(z2, 2);
  GModule t4 = inflate_module(t2, q);
  auto q1 = cohomology(t2, 1), g1 = cohomology(t4, 1);
  ZmVector infl = g1.class_of(inflate_cochain(t2, q, 1, q1.representative(ZmVector{1})));
  CHECK(std::any_of(infl.begin(), infl.end(), [](Residue v) { return v != 0; }));

  auto q0 = cohomology(t2, 0), g0 = cohomology(t4, 0);
  CHECK(g0.class_of(inflate_cochain(t2, q, 0, q0.representative(ZmVector{1}))) == ZmVector{1});

  GroupHom id = GroupHom::identity(z2);
  CHECK(q1.class_of(inflate_cochain(t2, id, 1, q1.representative(ZmVector{1}))) == ZmVector{1});

  // inflation commutes with cup products
  auto q2 = cohomology(t2, 2), g2 = cohomology(t4, 2);
  ZmVector xq = q1.representative(ZmVector{1});
  ZmVector cup_then_inf = inflate_cochain(t2, q, 2, cup_cochains(t2, 1, xq, t2, 1, xq));
  ZmVector xg = inflate_cochain(t2, q, 1, xq);
  ZmVector inf_then_cup = cup_cochains(t4, 1, xg, t4, 1, xg);
  CHECK(g2.class_of(cup_then_inf) == g2.class_of(inf_then_cup));
  CHECK_THROWS_AS(inflate_module(GModule::trivial(z4, 2), q), MismatchError);
}

TEST_CASE("functoriality: identity and composition") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  GModule p = GModule::permutation(GSet::regular(s3), 2);
  auto h1 = cohomology(p, 1);
  auto h0 = cohomology(p, 0);
  ZmMatrix id = ZmMatrix::identity(2, 6);
  CHECK(induced_map(h0, h0, id).is_identity());
  GModule t = GModule::trivial(s3, 2);
  ZmMatrix aug(2, 1, 6);
  for (int k = 0; k < 6; ++k) aug.set(0, k, 1);
  auto t0 = cohomology(t, 0);
  ZmMatrix a = induced_map(h0, t0, aug);
  CHECK(a.is_zero());  // norm element maps to 6 = 0 mod 2
  CHECK(h1.invariant_factors().empty());
}

TEST_CASE("json module descriptor") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  auto j = nlohmann::json::parse(R"({"rank": 2, "action": {"0": [[0,1],[1,0]]}})");
  GModule m = GModule::from_json(z2, 3, j);
  CHECK(m == GModule::permutation(GSet::regular(z2), 3));
  CHECK(GModule::from_json(z2, 3, m.to_json()) == m);
  CHECK_THROWS_AS(GModule::from_json(z2, 4, nlohmann::json::parse(R"({"rank": 1, "action": {"0": [[2]]}})")),
                  SchemaError);
}
