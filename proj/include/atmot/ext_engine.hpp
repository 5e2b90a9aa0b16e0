#pragma once

// Hom and Ext in the filtered exact categories, the comparison with
// truncated group cohomology, and the diagonal graded ring with its cobar
// complex.
//
// Conventions.  Ext^1 is computed from the strictly weight-raising gluing
// cocycles: an admissible extension of M by N has action
//   rho_E = [[rho_N, c(g) rho_M], [0, rho_M]]
// with c a 1-cocycle in Hom+(M, N) under the conjugation action, and two such
// are equivalent when they differ by the coboundary of a weight-nondecreasing
// map.  Higher Ext is obtained by long exact sequences down to base cases
// Ext^k(1, 1(d)) over subgroups; every number carries a method tag.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "atmot/atcat.hpp"
#include "atmot/gmod_cohomology.hpp"
#include "atmot/zm_linalg.hpp"
#include "json.hpp"

namespace atmot {

enum class Method { hom_direct, ext1_cocycle, les_reduction, cobar, paper_theorem_base, tower };
std::string to_string(Method m);

enum class Verdict { ISO, MONO, MISMATCH, UNDECIDED };
std::string to_string(Verdict v);

/// A value known exactly (invariant factors) or only up to a certified
/// interval on its cardinality.  Bounds are per-prime exponents, so
/// lower | |X| | upper.
struct ExtValue {
  std::optional<std::vector<Residue>> factors;
  Order lower;
  Order upper;
  bool upper_bounded = true;

  static ExtValue exact(std::vector<Residue> f);
  static ExtValue zero() { return exact({}); }
  bool is_exact() const { return factors.has_value(); }
  bool is_zero() const { return factors && factors->empty(); }
  bool collapsed() const { return upper_bounded && lower == upper; }
  nlohmann::json to_json() const;
};

/// Direct sum of values (cardinalities multiply).
ExtValue operator+(const ExtValue& a, const ExtValue& b);

struct ExtReport {
  std::string query;
  int degree = 0;
  std::optional<int> twist;
  Mode mode = Mode::F;
  Method method = Method::hom_direct;
  ExtValue value;
  /// Hom and Ext^1 only: the group with explicit generators.
  std::optional<ZmModulePresentation> presentation;
  /// Ext^1 only: one admissible extension per invariant factor.
  std::vector<FilteredObject> representatives;
  /// Comparison data (theta_report only).
  std::optional<std::vector<Residue>> target;      // truncated H^i
  std::optional<std::vector<Residue>> cohomology;  // H^i untruncated
  std::optional<Verdict> verdict;
  std::string note;

  bool certified() const { return value.is_exact(); }
  nlohmann::json to_json() const;
};

struct ExtOptions {
  CohomologyOptions cohomology;
};

// ---------------------------------------------------------------- Hom and Ext^1

/// The weight-nondecreasing part of Hom(M, N) (entries (a, b) with
/// w_N[a] >= w_M[b]) or its strictly raising part, as a submodule of
/// hom_module on those coordinates.  coords[k] is the hom_module index of
/// coordinate k.
struct HomPart {
  GModule module;
  std::vector<std::size_t> coords;
};
HomPart hom_filtered_part(const FilteredObject& m, const FilteredObject& n, bool strict);

/// Hom_F(M, N) inside the ambient space of rank(N) x rank(M) matrices
/// (index a * rank(M) + b).  Throws MismatchError for incompatible objects.
ZmModulePresentation hom_F(const FilteredObject& m, const FilteredObject& n);

/// The extension of M by N glued by a cocycle in C^1(G, Hom+(M, N)).
struct Extension {
  FilteredObject object;
  FilteredMap inclusion;   // N -> E
  FilteredMap projection;  // E -> M
};
Extension extension_from_cocycle(const FilteredObject& m, const FilteredObject& n, const ZmVector& cocycle);

/// Ext^1 as a subquotient of C^1(G, Hom+(M, N)): generators are cocycles.
ZmModulePresentation ext1_group(const FilteredObject& m, const FilteredObject& n, const ExtOptions& opt = {});
/// Throws DomainError in mode Fsecond.
ExtReport ext1(const FilteredObject& m, const FilteredObject& n, const ExtOptions& opt = {});

/// Enumerates every gluing of gr N (+) gr M on the generators, keeps the
/// admissible ones and divides out filtered isomorphisms fixing N and M.
/// Domain: |G| <= 4, m <= 4, rank(M) + rank(N) <= 4; DomainError outside.
ZmModulePresentation ext1_bruteforce_oracle(const FilteredObject& m, const FilteredObject& n);

// ---------------------------------------------------------------- higher Ext and theta

/// Ext^k(M, N) for k >= 2 via Ext^k(1, dual(M) (x) N), weight truncation and
/// Shapiro down to Ext^k over subgroups of unit by Tate twist.  Mode F only.
ExtReport ext_bounds(const FilteredObject& m, const FilteredObject& n, int k, const ExtOptions& opt = {});

/// Ext^i(1, 1(j)) against H^i(G, mu^j) (truncated to zero for i > j in modes
/// F and Fprime, untruncated in Fsecond).
ExtReport theta_report(int i, int j, const TwistCharacter& chi, Mode mode, const ExtOptions& opt = {});

// ---------------------------------------------------------------- towers

/// A query evaluated on each group of a quotient tower G_1 <- G_2 <- ...
/// The character lives on G_1 and is pulled back along the tower.
struct TowerQuery {
  int degree = 1;
  int twist = 0;
};
struct TowerLevel {
  std::size_t group_order = 0;
  std::vector<Residue> factors;  // H^degree(G_k, mu^twist)
  /// Cardinality of the image of inflation from the previous level.
  std::optional<Order> inflation_image;
};
struct TowerReport {
  std::vector<TowerLevel> levels;
  /// First level k >= 1 (1-based) whose value equals that of level k + 1
  /// with inflation an isomorphism, if any.
  std::optional<std::size_t> stabilized_at;
  nlohmann::json to_json() const;
};
/// maps[k] : G_{k+2} -> G_{k+1} (surjective).  Throws DomainError for an
/// empty tower or a non-surjective map.
TowerReport tower_colimit(const FiniteGroup& g1, const std::vector<GroupHom>& maps, const TwistCharacter& chi,
                          const TowerQuery& query, const ExtOptions& opt = {});

// ---------------------------------------------------------------- big graded ring

/// A finite Z/m-module with a presentation on explicit generators and
/// relations (row vectors).
struct FinModule {
  Residue modulus = 2;
  std::size_t gens = 0;
  ZmMatrix relations;  // rows; may be empty
  ZmModulePresentation presentation() const;
};

/// A_n(u, v) = H^n(G, Hom(P_u, P_v) (x) mu^n) for the generators
/// P_u = Z/m[G/H_u], H_u running over subgroups up to conjugacy.
struct RingComponent {
  int degree = 0;
  std::size_t source = 0, target = 0;  // vertex indices
  CohomologyGroup group;
  std::vector<Residue> factors() const { return group.invariant_factors(); }
  std::size_t gens() const { return group.invariant_factors().size(); }
};

class BigGradedRing {
 public:
  /// Throws BudgetError when a bar complex would exceed the budget.
  static BigGradedRing build(const TwistCharacter& chi, int n_max, const ExtOptions& opt = {});

  const TwistCharacter& character() const { return chi_; }
  int max_degree() const { return n_max_; }
  const std::vector<SubgroupHandle>& vertices() const { return vertices_; }
  /// Index of the vertex G/G.
  std::size_t unit_vertex() const { return vertices_.size() - 1; }
  const RingComponent& component(int n, std::size_t u, std::size_t v) const;
  /// Product b * a of a in A_p(u, v) and b in A_q(v, w), in invariant-factor
  /// coordinates of A_{p+q}(u, w).  Empty if p + q exceeds the computed range.
  ZmVector multiply(int q, std::size_t v, std::size_t w, std::span<const Residue> b, int p, std::size_t u,
                    std::span<const Residue> a) const;
  /// Associativity on all generator triples with total degree <= max_degree.
  bool check_associative() const;
  nlohmann::json to_json() const;

 private:
  TwistCharacter chi_;
  int n_max_ = 0;
  std::vector<SubgroupHandle> vertices_;
  std::map<std::tuple<int, std::size_t, std::size_t>, RingComponent> comps_;
  std::vector<GModule> vertex_modules_;
};

/// Cohomology of the cobar complex of the quadratic dual coalgebra of A in
/// cohomological degree k and internal degree j, restricted to the component
/// between vertices u and v.  H^{j,j} is the quadratic part of A_j.
ZmModulePresentation cobar_cohomology(const BigGradedRing& ring, int k, int j, std::size_t u, std::size_t v);

struct KoszulityEntry {
  int k = 0, j = 0;
  std::vector<Residue> factors;  // summed over all vertex pairs
};
struct KoszulityReport {
  int max_internal = 0;
  std::vector<KoszulityEntry> entries;      // every nonzero (k, j)
  bool diagonal = true;                     // no off-diagonal class
  bool quadratic = true;                    // H^{j,j} = A_j for all j
  std::vector<std::vector<Residue>> unit_diagonal;  // H^{j,j} at (G/G, G/G)
  nlohmann::json to_json() const;
};
/// Labelled conjecture-facing: off-diagonal classes are evidence, not Ext.
KoszulityReport koszulity_probe(const BigGradedRing& ring, int n);

}  // namespace atmot
