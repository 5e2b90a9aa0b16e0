#include <numeric>

#include "atmot/errors.hpp"
#include "atmot/group_core.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace atmot;

namespace {

std::vector<FiniteGroup> small_groups() {
  return {FiniteGroup::trivial(),     FiniteGroup::cyclic(2),   FiniteGroup::cyclic(3),
          FiniteGroup::cyclic(4),     FiniteGroup::symmetric(3), FiniteGroup::cyclic(6),
          FiniteGroup::dihedral(4),   FiniteGroup(4, {{1, 0, 3, 2}, {2, 3, 0, 1}}),
          FiniteGroup::cyclic(8)};
}

}  // namespace

TEST_CASE("enumerate: orders") {
  CHECK(FiniteGroup(2, {{1, 0}}).order() == 2);
  CHECK(FiniteGroup(3, {{1, 0, 2}, {1, 2, 0}}).order() == 6);
  CHECK(FiniteGroup(3, {}).order() == 1);
  CHECK(FiniteGroup::symmetric(4).order() == 24);
  CHECK(FiniteGroup::dihedral(4).order() == 8);
  CHECK_THROWS_AS(FiniteGroup(3, {{1, 0}}), MismatchError);
  CHECK_THROWS_AS(FiniteGroup(3, {{1, 1, 0}}), MismatchError);
}

TEST_CASE("enumerate: closure, identity, inverses") {
  for (const auto& g : small_groups()) {
    int n = static_cast<int>(g.order());
    CHECK(g.element(0) == [&] { Perm p(g.degree()); std::iota(p.begin(), p.end(), 0); return p; }());
    for (int a = 0; a < n; ++a) {
      CHECK(g.mul(a, g.inv(a)) == 0);
      CHECK(g.mul(0, a) == a);
      for (int b = 0; b < n; ++b) {
        // table agrees with composition of permutations
        Perm ab(g.degree());
        for (int x = 0; x < g.degree(); ++x) ab[x] = g.element(a)[g.element(b)[x]];
        CHECK(g.index_of(ab) == g.mul(a, b));
      }
    }
  }
}

TEST_CASE("json round trip with 1-based images") {
  auto j = nlohmann::json::parse(R"({"degree": 3, "generators": [[2,1,3],[2,3,1]]})");
  FiniteGroup g = FiniteGroup::from_json(j);
  CHECK(g.order() == 6);
  CHECK(g.to_json() == j);
  CHECK(FiniteGroup::from_json(g.to_json()) == g);
  CHECK_THROWS_AS(FiniteGroup::from_json(nlohmann::json::parse(R"({"degree": 2, "generators": [[1,1]]})")),
                  SchemaError);
}

TEST_CASE("subgroups_up_to_conjugacy: examples") {
  CHECK(subgroups_up_to_conjugacy(FiniteGroup::cyclic(2)).size() == 2);
  CHECK(subgroups_up_to_conjugacy(FiniteGroup::trivial()).size() == 1);
  auto s3 = subgroups_up_to_conjugacy(FiniteGroup::symmetric(3));
  REQUIRE(s3.size() == 4);
  std::vector<std::size_t> orders;
  for (const auto& h : s3) orders.push_back(h.order());
  CHECK(orders == std::vector<std::size_t>{1, 2, 3, 6});
  CHECK_THROWS_AS(subgroups_up_to_conjugacy(FiniteGroup::symmetric(5)), BudgetError);
  CHECK(subgroups_up_to_conjugacy(FiniteGroup::symmetric(4)).size() == 11);
}

TEST_CASE("subgroups_up_to_conjugacy: agrees with subset search") {
  for (const auto& g : small_groups()) {
    auto subs = oracle::subgroups_by_subset_search(g);
    CHECK(all_subgroups(g).size() == subs.size());
    auto reps = subgroups_up_to_conjugacy(g);
    CHECK(reps.size() == oracle::conjugacy_class_count(g, subs));
    // representatives are lexicographically least within their class
    for (const auto& h : reps) {
      CHECK(h.is_canonical());
      for (int x = 0; x < static_cast<int>(g.order()); ++x)
        CHECK_FALSE(h.conjugate(x).elements() < h.elements());
    }
  }
}

TEST_CASE("as_group preserves element order") {
  FiniteGroup s4 = FiniteGroup::symmetric(4);
  for (const auto& h : subgroups_up_to_conjugacy(s4)) {
    FiniteGroup k = h.as_group();
    REQUIRE(k.order() == h.order());
    for (std::size_t i = 0; i < k.order(); ++i) CHECK(k.element(static_cast<int>(i)) == s4.element(h.elements()[i]));
  }
}

TEST_CASE("double_cosets: examples") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  auto whole = SubgroupHandle::whole(z2);
  auto d0 = double_cosets(whole, whole);
  REQUIRE(d0.size() == 1);
  CHECK(d0[0].intersection.order() == 2);

  auto one = SubgroupHandle::trivial(z2);
  auto d1 = double_cosets(one, one);
  REQUIRE(d1.size() == 2);
  CHECK(d1[0].intersection.order() == 1);
  CHECK(d1[1].intersection.order() == 1);

  FiniteGroup s3 = FiniteGroup::symmetric(3);
  auto reps = subgroups_up_to_conjugacy(s3);
  auto d2 = double_cosets(reps[2], reps[1]);  // Z/3, Z/2
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].elements.size() == 6);
  CHECK(d2[0].intersection.order() == 1);

  CHECK_THROWS_AS(double_cosets(whole, SubgroupHandle::whole(s3)), MismatchError);
}

TEST_CASE("double_cosets: partition and product identity for all subgroup pairs") {
  std::vector<FiniteGroup> groups = small_groups();
  groups.push_back(FiniteGroup::symmetric(4));
  groups.push_back(FiniteGroup::dihedral(6));
  for (const auto& g : groups) {
    auto subs = all_subgroups(g);
    for (const auto& h : subs)
      for (const auto& hp : subs) {
        auto ds = double_cosets(h, hp);
        std::size_t covered = 0, sum = 0;
        for (const auto& d : ds) {
          covered += d.elements.size();
          sum += g.order() / d.intersection.order();
          // the double coset really is H g H'
          CHECK(d.elements.size() * d.intersection.order() == h.order() * hp.order());
        }
        CHECK(covered == g.order());
        CHECK(sum == h.index() * hp.index());
        // orbit count of G on G/H x G/H'
        GSet prod = GSet::product(GSet::cosets(h), GSet::cosets(hp));
        CHECK(prod.orbits().size() == ds.size());
      }
  }
}

TEST_CASE("GSet: cosets, unions and products are actions") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  for (const auto& h : all_subgroups(s3)) {
    GSet c = GSet::cosets(h);
    CHECK(c.size() == h.index());
    CHECK(c.is_valid_action());
    CHECK(c.stabilizer(0) == h);
    CHECK(GSet::disjoint_union(c, GSet::regular(s3)).is_valid_action());
    CHECK(GSet::product(c, GSet::regular(s3)).is_valid_action());
  }
  std::vector<std::vector<int>> bad(2, {0, 1});
  bad[1] = {0, 0};
  CHECK_THROWS_AS(GSet(FiniteGroup::cyclic(2), bad), DomainError);
}

TEST_CASE("unit characters") {
  CHECK(unit_characters(FiniteGroup::cyclic(2), 4).size() == 2);
  CHECK(unit_characters(FiniteGroup::cyclic(2), 2).size() == 1);
  CHECK(unit_characters(FiniteGroup::cyclic(3), 3).size() == 1);
  CHECK(unit_characters(FiniteGroup::cyclic(4), 3).size() == 2);
  CHECK(unit_characters(FiniteGroup::symmetric(3), 4).size() == 2);
  // brute force: every map G -> units that is multiplicative
  for (const auto& g : small_groups())
    for (std::int64_t m : {2, 3, 4, 5}) {
      auto chars = unit_characters(g, m);
      for (const auto& c : chars) {
        CHECK(c[0] == 1);
        for (std::size_t a = 0; a < g.order(); ++a)
          for (std::size_t b = 0; b < g.order(); ++b)
            CHECK(c[g.mul(static_cast<int>(a), static_cast<int>(b))] == c[a] * c[b] % m);
      }
    }
}

TEST_CASE("group homomorphisms") {
  FiniteGroup z4 = FiniteGroup::cyclic(4), z2 = FiniteGroup::cyclic(2);
  GroupHom q = GroupHom::from_generator_images(z4, z2, {z2.generator_indices()[0]});
  CHECK(q.is_surjective());
  CHECK(q(0) == 0);
  CHECK_THROWS_AS(GroupHom::from_generator_images(z2, z4, {z4.generator_indices()[0]}), DomainError);
  CHECK(GroupHom::identity(z4).compose(GroupHom::identity(z4)).images() == GroupHom::identity(z4).images());
}
