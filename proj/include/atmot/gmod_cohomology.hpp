#pragma once

// Z/m[G]-modules and group cohomology through the normalized bar complex.
//
// A module of rank r is (Z/m)^r with one r x r matrix per group element
// acting on column vectors: g.v = rho(g) v, and rho(gh) = rho(g) rho(h).
// Cochains, cocycles and cohomology classes are row vectors.

#include <cstddef>
#include <optional>
#include <vector>

#include "atmot/group_core.hpp"
#include "atmot/zm_linalg.hpp"
#include "json.hpp"

namespace atmot {

/// A character chi: G -> (Z/m)^x.
class TwistCharacter {
 public:
  TwistCharacter() = default;
  /// Throws DomainError unless multiplicative with unit values.
  TwistCharacter(FiniteGroup group, Residue modulus, std::vector<Residue> values);
  static TwistCharacter trivial(const FiniteGroup& g, Residue m);
  /// Every character of G with values in (Z/m)^x.
  static std::vector<TwistCharacter> all(const FiniteGroup& g, Residue m);
  /// Values given per generator; extended multiplicatively.
  static TwistCharacter from_generator_values(const FiniteGroup& g, Residue m,
                                              const std::vector<Residue>& gen_values);

  const FiniteGroup& group() const { return group_; }
  Residue modulus() const { return modulus_; }
  Residue operator()(int g) const { return values_[g]; }
  const std::vector<Residue>& values() const { return values_; }
  /// chi(g)^j, negative j allowed.
  Residue power(int g, int j) const;
  bool is_trivial() const;
  TwistCharacter restrict_to(const SubgroupHandle& h) const;
  TwistCharacter reduce_to(Residue n) const;
  /// Pull back along a homomorphism into this character's group.
  TwistCharacter pullback(const GroupHom& q) const;

 private:
  FiniteGroup group_;
  Residue modulus_ = 2;
  std::vector<Residue> values_;
};

class GModule {
 public:
  GModule() = default;
  /// One matrix per group element; throws DomainError if not a homomorphism.
  GModule(FiniteGroup group, Residue modulus, std::vector<ZmMatrix> action);
  /// Matrices for the generators only; completed by multiplication.
  static GModule from_generators(const FiniteGroup& group, Residue modulus,
                                 const std::vector<ZmMatrix>& gen_action);
  static GModule trivial(const FiniteGroup& group, Residue modulus, std::size_t rank = 1);
  /// Permutation module Z/m[S].
  static GModule permutation(const GSet& s, Residue modulus);
  /// {"rank": r, "action": {"<generator index>": [[row-major]]}}
  static GModule from_json(const FiniteGroup& group, Residue modulus, const nlohmann::json& j);
  nlohmann::json to_json() const;

  const FiniteGroup& group() const { return group_; }
  Residue modulus() const { return modulus_; }
  std::size_t rank() const { return rank_; }
  const ZmMatrix& action(int g) const { return action_[g]; }
  const std::vector<ZmMatrix>& actions() const { return action_; }
  ZmVector act(int g, std::span<const Residue> v) const;

  bool is_homomorphism() const;
  /// Is the rank(N) x rank(M) matrix phi a G-map M -> N?
  static bool is_equivariant(const GModule& m, const GModule& n, const ZmMatrix& phi);
  /// Rows span the fixed vectors.
  ZmMatrix fixed_points() const;

  friend bool operator==(const GModule& a, const GModule& b) {
    return a.modulus_ == b.modulus_ && a.rank_ == b.rank_ && a.group_ == b.group_ &&
           a.action_ == b.action_;
  }

 private:
  FiniteGroup group_;
  Residue modulus_ = 2;
  std::size_t rank_ = 0;
  std::vector<ZmMatrix> action_;
};

/// mu_m^{(x) j}: rank one, g acts by chi(g)^j.
GModule mu_tensor(int j, const TwistCharacter& chi);
GModule direct_sum(const GModule& a, const GModule& b);
/// Basis e_k (x) f_l numbered k * rank(b) + l.
GModule tensor(const GModule& a, const GModule& b);
/// Hom(M, N) on matrices phi (rank N x rank M), basis index a * rank(M) + b
/// for entry phi[a][b]; g.phi = rho_N(g) phi rho_M(g)^-1.
GModule hom_module(const GModule& m, const GModule& n);
GModule dual(const GModule& m);
GModule restrict_module(const GModule& m, const SubgroupHandle& h);
/// Induction from H (M is a module over h.as_group()).  Basis t_i (x) e_k
/// numbered i * rank(M) + k, with t_i the coset representatives of
/// left_cosets(h).
GModule induce_module(const GModule& m, const SubgroupHandle& h);
/// View a Q-module as a G-module through q: G -> Q.
GModule inflate_module(const GModule& m, const GroupHom& q);
GModule reduce_module(const GModule& m, Residue n);
/// G-maps M -> N as a list of rank(N) x rank(M) matrices spanning Hom_G(M, N).
std::vector<ZmMatrix> equivariant_maps(const GModule& m, const GModule& n);

// ---------------------------------------------------------------- cohomology

struct CohomologyOptions {
  int degree_cap = 4;
  std::size_t budget_mb = 512;
};

/// Normalized cochains C^n(G, M): functions on (G \ {e})^n.  Tuple
/// (g_1, ..., g_n) has index sum (g_k - 1) (|G| - 1)^(n - k); the cochain
/// coordinate is tuple * rank + component.
std::size_t cochain_dimension(const GModule& m, int n);
/// d^n : C^n -> C^{n+1} as a dim C^n x dim C^{n+1} matrix (x -> x D).
ZmMatrix bar_differential(const GModule& m, int n, const CohomologyOptions& opt = {});
/// Evaluate a cochain on an explicit tuple of element indices.
ZmVector evaluate_cochain(const GModule& m, int n, std::span<const Residue> cochain,
                          const std::vector<int>& tuple);

struct CohomologyGroup {
  int degree = 0;
  GModule coefficients;
  ZmModulePresentation presentation;  // ambient = C^degree
  ZmMatrix cocycles;                  // rows span Z^degree
  ZmMatrix coboundaries;              // rows span B^degree
  ZmMatrix differential;              // d^degree

  const std::vector<Residue>& invariant_factors() const { return presentation.invariant_factors(); }
  Order cardinality() const { return presentation.cardinality(); }
  /// Cocycle representatives, one per invariant factor.
  const ZmMatrix& representatives() const { return presentation.factor_generators(); }
  /// Invariant-factor coordinates of a cocycle.  Throws DomainError otherwise.
  ZmVector class_of(std::span<const Residue> cocycle) const { return presentation.coordinates(cocycle); }
  ZmVector representative(std::span<const Residue> coords) const { return presentation.element(coords); }
  bool is_cocycle(std::span<const Residue> cochain) const;
};

/// H^n(G, M) with stored representatives.  Throws BudgetError when the bar
/// complex would exceed the configured memory.
CohomologyGroup cohomology(const GModule& m, int n, const CohomologyOptions& opt = {});

/// Compose a cochain with a module map phi (rank N x rank M), valuewise.
ZmVector apply_to_cochain(const ZmMatrix& phi, std::span<const Residue> f);
/// Matrix of the induced map H(M) -> H(N) in invariant-factor coordinates
/// (one row per invariant factor of the source).
ZmMatrix induced_map(const CohomologyGroup& src, const CohomologyGroup& dst, const ZmMatrix& phi);

/// Cup product of cochains, with values in tensor(M, N).
ZmVector cup_cochains(const GModule& m, int p, std::span<const Residue> f, const GModule& n, int q,
                      std::span<const Residue> h);
/// Cup product of classes in invariant-factor coordinates.
ZmVector cup(const CohomologyGroup& a, std::span<const Residue> x, const CohomologyGroup& b,
             std::span<const Residue> y, const CohomologyGroup& target);

/// Pull a Q-cochain back along q: G -> Q.
ZmVector inflate_cochain(const GModule& m, const GroupHom& q, int n, std::span<const Residue> f);
/// Restrict a G-cochain to a subgroup (coefficients restricted as well).
ZmVector restrict_cochain(const GModule& m, const SubgroupHandle& h, int n,
                          std::span<const Residue> f);

/// Cardinality of the image of a map between cohomology groups given by
/// rows of target coordinates.
Order image_order(const CohomologyGroup& dst, const ZmMatrix& rows_in_dst);

}  // namespace atmot
