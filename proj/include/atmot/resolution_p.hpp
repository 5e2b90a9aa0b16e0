#pragma once

// The nonadditive resolution functor P on bounded complexes of finite
// Z/m-modules.
//
// P_0^j is free on symbols [a], a a nonzero element of A^j.  P_i^j for i > 0
// is free on symbols <p>, p a nonzero element of P_{i-1}^j killed by the
// resolution differential (by the projection when i = 1).  The resolution
// differential is del<p> = p, del[a] = 0; the complex differential is
// d[a] = [da], d<p> = <-dp>.  Elements are formal combinations of nested
// symbol trees, so [a + b] and [a] + [b] are different elements.
//
// Terms are materialized for i < depth; the top term P_depth is kept lazy:
// its image under del is the module of cycles, which is all the total
// complex needs in the safe window of degrees.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atmot/zm_linalg.hpp"
#include "json.hpp"

namespace atmot {

/// A^lo -> A^{lo+1} -> ... with A^j = Z/f_1 + ... + Z/f_r.  Elements are
/// coordinate row vectors reduced mod the factors; the differential acts as
/// a -> a D.
class ModuleComplex {
 public:
  ModuleComplex() = default;
  /// Throws DomainError unless every factor divides m, the differentials are
  /// well defined on the quotients and square to zero.
  ModuleComplex(Residue modulus, int lowest, std::vector<std::vector<Residue>> modules,
                std::vector<ZmMatrix> differentials);
  static ModuleComplex zero(Residue modulus);
  static ModuleComplex concentrated(Residue modulus, std::vector<Residue> factors, int degree = 0);
  /// {"modulus": m, "lowest_degree": lo, "modules": [[factors], ...],
  ///  "differentials": [[[row], ...], ...]}; SchemaError on malformed input.
  static ModuleComplex from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Residue modulus() const { return modulus_; }
  int lowest() const { return lowest_; }
  int highest() const { return lowest_ + static_cast<int>(modules_.size()) - 1; }
  bool is_zero() const;
  /// Empty outside [lowest, highest].
  const std::vector<Residue>& factors(int j) const;
  std::size_t rank(int j) const { return factors(j).size(); }
  std::size_t size(int j) const;
  ZmVector normalize(int j, std::span<const Residue> a) const;
  ZmVector d(int j, std::span<const Residue> a) const;
  /// Matrix of d : A^j -> A^{j+1} (rank(j) x rank(j + 1)).
  ZmMatrix differential(int j) const;
  /// Every element of A^j, zero first, in lexicographic order.
  std::vector<ZmVector> elements(int j) const;
  /// Rows f_i e_i spanning the relations of A^j.
  ZmMatrix relations(int j) const;
  std::vector<Residue> cohomology(int n) const;

 private:
  Residue modulus_ = 2;
  int lowest_ = 0;
  std::vector<std::vector<Residue>> modules_;
  std::vector<ZmMatrix> differentials_;  // differentials_[k] : A^{lo+k} -> A^{lo+k+1}
};

/// A (x) B with the Koszul sign d(a (x) b) = da (x) b + (-1)^|a| a (x) db.
/// Degree n is a direct sum of blocks A^j (x) B^{n-j}, j ascending, with
/// generator e_i (x) f_l at index i * rank B^{n-j} + l inside its block.
ModuleComplex tensor(const ModuleComplex& a, const ModuleComplex& b);
/// Index of e_i (x) f_l, with e_i in A^j and f_l in B^k.
std::size_t tensor_index(const ModuleComplex& a, const ModuleComplex& b, int j, std::size_t i, int k, std::size_t l);
ZmVector tensor_element(const ModuleComplex& a, int j, std::span<const Residue> x, const ModuleComplex& b, int k,
                        std::span<const Residue> y);

/// A degree-preserving map of complexes, one matrix per degree.
struct ChainMap {
  ModuleComplex source, target;
  std::map<int, ZmMatrix> matrices;
  ZmVector apply(int j, std::span<const Residue> a) const;
};
/// k (x) A -> A for the unit complex k = Z/m in degree 0.
ChainMap left_unitor(const ModuleComplex& a);
/// (A (x) B) (x) C -> A (x) (B (x) C).
ChainMap associator(const ModuleComplex& a, const ModuleComplex& b, const ModuleComplex& c);
/// A (x) B -> B (x) A, a (x) b -> (-1)^{|a||b|} b (x) a.
ChainMap symmetry(const ModuleComplex& a, const ModuleComplex& b);

// ---------------------------------------------------------------- elements

struct PElement;

struct Symbol {
  bool angle = false;
  ZmVector value;                         // [value]
  std::shared_ptr<const PElement> inner;  // <inner>
};

/// A homogeneous element of P_i^j.
struct PElement {
  Residue modulus = 2;
  int res_degree = 0;  // i
  int degree = 0;      // j
  std::vector<std::pair<Symbol, Residue>> terms;  // sorted, nonzero coefficients

  /// |x| = j - i.
  int total_degree() const { return degree - res_degree; }
  bool is_zero() const { return terms.empty(); }
  /// Largest nesting of angle symbols.
  int angle_depth() const;
  static PElement zero(Residue m, int i, int j) { return PElement{m, i, j, {}}; }
  std::string to_string() const;
};

std::strong_ordering operator<=>(const Symbol& a, const Symbol& b);
std::strong_ordering operator<=>(const PElement& a, const PElement& b);
inline bool operator==(const Symbol& a, const Symbol& b) { return (a <=> b) == 0; }
inline bool operator==(const PElement& a, const PElement& b) { return (a <=> b) == 0; }

PElement operator+(const PElement& a, const PElement& b);
PElement operator-(const PElement& a, const PElement& b);
PElement scale(const PElement& a, Residue c);

/// s(a) = [a]; s(0) = 0.
PElement section(const ModuleComplex& a, int j, std::span<const Residue> x);
/// pi[a] = a, pi<p> = 0.
ZmVector projection(const ModuleComplex& a, const PElement& x);
/// <p>; throws DomainError unless p is a cycle for del (for pi when i = 0).
PElement angle(const ModuleComplex& a, const PElement& p);
/// del, lowering the resolution degree.
PElement boundary(const PElement& x);
/// d, raising the complex degree.
PElement differential(const ModuleComplex& a, const PElement& x);
/// P(f).
PElement apply_P(const ChainMap& f, const PElement& x);

/// P(A) (x) P(B) -> P(A (x) B), defined by the recursion
///   <p> x <q> = < p x <q> - (-1)^|p| <p> x q >,
///   <p> x [b] = < p x [b] >,   [a] x <q> = < (-1)^|a| [a] x q >,
///   [a] x [b] = [a (x) b].
class ShuffleProduct {
 public:
  ShuffleProduct(ModuleComplex a, ModuleComplex b, int max_depth);
  const ModuleComplex& target() const { return ab_; }
  /// Throws DomainError when the product would exceed the resolution depth.
  PElement operator()(const PElement& x, const PElement& y) const;

 private:
  PElement symbols(const Symbol& s, int i, int j, const Symbol& t, int k, int l) const;
  ModuleComplex a_, b_, ab_;
  int max_depth_;
};

// ---------------------------------------------------------------- truncated resolution

struct ResolutionOptions {
  /// Largest number of candidate vectors scanned to list the symbols of one term.
  std::size_t max_candidates = std::size_t{1} << 20;
};

class TruncatedResolution {
 public:
  /// Materializes P_i^j for i < depth.  Throws BudgetError naming the first
  /// term that would be too large.
  static TruncatedResolution build(const ModuleComplex& a, int depth, const ResolutionOptions& opt = {});

  const ModuleComplex& complex() const { return a_; }
  int depth() const { return depth_; }
  /// Symbols of P_i^j for i < depth.
  const std::vector<Symbol>& generators(int i, int j) const;
  PElement generator(int i, int j, std::size_t k) const;
  /// Coordinates in the symbol basis of P_i^j (i < depth).
  ZmVector coordinates(const PElement& x) const;
  PElement element(int i, int j, std::span<const Residue> coords) const;
  /// del : P_i^j -> P_{i-1}^j (i >= 1) and d : P_i^j -> P_i^{j+1}.
  ZmMatrix boundary_matrix(int i, int j) const;
  ZmMatrix differential_matrix(int i, int j) const;
  /// Rows spanning the del-cycles of P_i^j (kernel of pi for i = 0).
  ZmMatrix cycles(int i, int j) const;
  /// Symbols <z> of the lazy top term for z running over a generating set of cycles.
  std::vector<PElement> top_samples(int j) const;

  /// Degrees n with b - depth < n, b the top degree of A, where the
  /// truncated total complex has the cohomology of the full one.
  int lowest_safe_degree() const;
  /// Cohomology of the total complex in degree n; DomainError outside the window.
  std::vector<Residue> total_cohomology(int n) const;

 private:
  ModuleComplex a_;
  int depth_ = 0;
  std::map<std::pair<int, int>, std::vector<Symbol>> gens_;
  std::map<std::pair<int, int>, std::map<Symbol, std::size_t>> index_;
};

struct QuasiIsoReport {
  struct Row {
    int degree = 0;
    std::vector<Residue> total, complex;
    bool agree = false;
  };
  std::vector<Row> rows;
  bool passed() const;
  nlohmann::json to_json() const;
};
/// Throws DomainError when some degree lies outside the safe window.
QuasiIsoReport verify_quasi_iso(const TruncatedResolution& res, int lo, int hi);

/// Every property check of P on one complex.
struct PCheck {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string detail;
  /// Informational checks do not count towards passed().
  bool informational = false;
};
struct PCheckReport {
  std::vector<PCheck> checks;
  std::optional<nlohmann::json> witness;  // non-additivity of s
  bool passed() const;
  nlohmann::json to_json() const;
};
struct PCheckOptions {
  int depth = 2;
  std::uint64_t seed = 20240607;
  std::size_t associativity_samples = 200;
  ResolutionOptions resolution;
};
PCheckReport p_check(const ModuleComplex& a, const PCheckOptions& opt = {});

}  // namespace atmot
