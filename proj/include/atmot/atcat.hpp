#pragma once

// Filtered Artin-Tate objects at a field point.
//
// An object is (Z/m)^r with a weight attached to each basis vector, the
// basis sorted by descending weight, and a G-action rho that maps weight w
// into weights >= w.  Since higher weights come first, every rho(g) is block
// upper triangular; the diagonal blocks are the graded pieces and
// rho(g) = rho_gr(g) (1 + u(g)) with u(g) strictly weight raising.  The
// decreasing filtration is F^k = span of basis vectors of weight >= k.
//
// In mode F every graded piece of weight w is Z/m[S_w] (x) mu^{(x) w} in its
// permutation basis.  Mode Fprime allows arbitrary pieces; mode Fsecond
// objects are carried for reporting only.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atmot/gmod_cohomology.hpp"
#include "atmot/group_core.hpp"
#include "atmot/zm_linalg.hpp"
#include "json.hpp"

namespace atmot {

enum class Mode { F, Fprime, Fsecond };
std::string to_string(Mode m);
/// "F", "Fprime" or "Fsecond"; throws DomainError otherwise.
Mode mode_from_string(const std::string& s);

/// Z/m[S] (x) mu^{(x) j}: g e_x = chi(g)^j e_{g x}.
class PermutationalObject {
 public:
  PermutationalObject() = default;
  PermutationalObject(GSet set, int twist, TwistCharacter chi);

  const GSet& gset() const { return set_; }
  int twist() const { return twist_; }
  const TwistCharacter& character() const { return chi_; }
  std::size_t rank() const { return set_.size(); }
  GModule module() const;

 private:
  GSet set_;
  int twist_ = 0;
  TwistCharacter chi_;
};

PermutationalObject make_permutational(const GSet& s, int twist, const TwistCharacter& chi);
/// Z/m[G/H] in weight 0.
PermutationalObject mcc_of_subgroup(const SubgroupHandle& h, const TwistCharacter& chi);

struct GradedPiece {
  int weight = 0;
  std::size_t offset = 0;  // first basis index of the piece
  GModule module;          // the diagonal block of rho
  std::optional<GSet> gset;  // mode F: the permuted basis
};

class FilteredObject {
 public:
  FilteredObject() = default;

  /// Validates: weights descending, rho a homomorphism preserving the
  /// filtration, and in mode F permutational diagonal blocks.  Throws
  /// DomainError otherwise.
  static FilteredObject from_action(Mode mode, const TwistCharacter& chi, std::vector<int> weights,
                                    std::vector<ZmMatrix> rho);
  /// rho given on the generators only.
  static FilteredObject from_generators(Mode mode, const TwistCharacter& chi, std::vector<int> weights,
                                        const std::vector<ZmMatrix>& gen_rho);
  static FilteredObject zero(Mode mode, const TwistCharacter& chi);
  /// Z/m(j): mu^{(x) j} in weight j.
  static FilteredObject tate(int j, const TwistCharacter& chi, Mode mode = Mode::F);
  static FilteredObject unit(const TwistCharacter& chi, Mode mode = Mode::F) { return tate(0, chi, mode); }
  /// The permutational object placed in weight = its twist.
  static FilteredObject from_permutational(const PermutationalObject& p, Mode mode = Mode::F);
  /// Split object with a single piece of the given weight (modes Fprime/Fsecond,
  /// or mode F when the module is permutational in its basis).
  static FilteredObject from_module(const GModule& m, int weight, const TwistCharacter& chi, Mode mode);

  Mode mode() const { return mode_; }
  const TwistCharacter& character() const { return chi_; }
  const FiniteGroup& group() const { return chi_.group(); }
  Residue modulus() const { return chi_.modulus(); }
  std::size_t rank() const { return weights_.size(); }
  bool is_zero() const { return weights_.empty(); }
  const std::vector<int>& weights() const { return weights_; }
  const std::vector<GradedPiece>& pieces() const { return pieces_; }
  /// Piece of the given weight, if present.
  const GradedPiece* piece(int weight) const;
  int min_weight() const;
  int max_weight() const;

  const ZmMatrix& rho(int g) const { return rho_[g]; }
  const std::vector<ZmMatrix>& actions() const { return rho_; }
  ZmMatrix rho_gr(int g) const;
  /// rho_gr(g)^-1 rho(g) - 1.
  ZmMatrix u(int g) const;
  bool is_split() const;
  GModule total_module() const;
  GModule graded_module() const;

  /// {"mode", "weights": {"w": {"gset": {"size", "action"}, "twist"} or {"module": ...}},
  ///  "u": {"<generator index>": [[...]]}}
  nlohmann::json to_json() const;
  static FilteredObject from_json(const TwistCharacter& chi, const nlohmann::json& j);

  friend bool operator==(const FilteredObject& a, const FilteredObject& b) {
    return a.mode_ == b.mode_ && a.weights_ == b.weights_ && a.rho_ == b.rho_ &&
           a.chi_.values() == b.chi_.values() && a.modulus() == b.modulus();
  }

 private:
  void build_pieces();

  Mode mode_ = Mode::F;
  TwistCharacter chi_;
  std::vector<int> weights_;
  std::vector<ZmMatrix> rho_;
  std::vector<GradedPiece> pieces_;
};

/// A filtration-preserving G-map; matrix is rank(target) x rank(source).
/// Object on an unsorted basis: raw_weights[k] is the weight of raw basis
/// vector k and raw_rho holds one matrix per element in raw coordinates.  The
/// basis is stably sorted by descending weight; pos receives raw -> sorted.
FilteredObject assemble_filtered(Mode mode, const TwistCharacter& chi, const std::vector<int>& raw_weights,
                                 const std::vector<ZmMatrix>& raw_rho, std::vector<std::size_t>* pos = nullptr);

class FilteredMap {
 public:
  FilteredMap() = default;
  /// Throws DomainError unless weight nondecreasing and equivariant.
  FilteredMap(FilteredObject source, FilteredObject target, ZmMatrix matrix);
  static FilteredMap identity(const FilteredObject& x);
  static FilteredMap zero(const FilteredObject& s, const FilteredObject& t);

  const FilteredObject& source() const { return source_; }
  const FilteredObject& target() const { return target_; }
  const ZmMatrix& matrix() const { return matrix_; }
  /// Block between the weight-w pieces.
  ZmMatrix graded_part(int w) const;
  /// this ∘ first
  FilteredMap compose(const FilteredMap& first) const;
  /// Inverse that is again filtered, if any.
  std::optional<FilteredMap> inverse() const;
  bool is_isomorphism() const { return inverse().has_value(); }

  static bool is_filtered(const FilteredObject& s, const FilteredObject& t, const ZmMatrix& a);
  static bool is_equivariant(const FilteredObject& s, const FilteredObject& t, const ZmMatrix& a);

 private:
  FilteredObject source_, target_;
  ZmMatrix matrix_;
};

FilteredObject direct_sum(const FilteredObject& a, const FilteredObject& b);
/// Canonical inclusions and projections of a (+) b.
FilteredMap sum_inclusion(const FilteredObject& a, const FilteredObject& b, int which);
FilteredMap sum_projection(const FilteredObject& a, const FilteredObject& b, int which);

/// Basis vectors e_x (x) f_y ordered by descending total weight, ties in
/// lexicographic order of (x, y).
FilteredObject tensor(const FilteredObject& a, const FilteredObject& b);
/// Position of e_x (x) f_y in tensor(a, b).
std::vector<std::size_t> tensor_positions(const FilteredObject& a, const FilteredObject& b);
FilteredMap tensor_maps(const FilteredMap& f, const FilteredMap& g);
/// Dual basis with weights negated; pieces come in reverse order, each
/// keeping its internal basis order.
FilteredObject dual(const FilteredObject& x);
/// Position of e_i^* in dual(x).
std::vector<std::size_t> dual_positions(const FilteredObject& x);
/// dual(X) (x) X -> 1.
FilteredMap evaluation(const FilteredObject& x);
/// 1 -> X (x) dual(X).
FilteredMap coevaluation(const FilteredObject& x);
/// X ≅ dual(dual(X)).
FilteredMap double_dual_iso(const FilteredObject& x);
/// X (x) 1 -> X and 1 (x) X -> X.
FilteredMap right_unitor(const FilteredObject& x);
FilteredMap left_unitor(const FilteredObject& x);
/// (A (x) B) (x) C -> A (x) (B (x) C).
FilteredMap associator(const FilteredObject& a, const FilteredObject& b, const FilteredObject& c);

struct AdmissibilityVerdict {
  bool admissible = false;
  std::string reason;
  /// Per weight, an equivariant section of gr^w E -> gr^w M (modes F, Fprime).
  std::map<int, ZmMatrix> splittings;
};
/// Is N -i-> E -p-> M an admissible triple?  Throws MismatchError for
/// non-composable shapes.
AdmissibilityVerdict check_admissible(const FilteredMap& i, const FilteredMap& p);

/// Reduction from Z/m to Z/n, n | m.
FilteredObject coefficient_change(const FilteredObject& x, Residue n);
FilteredMap coefficient_change(const FilteredMap& f, Residue n);

FilteredObject restrict_filtered(const FilteredObject& x, const SubgroupHandle& h);
FilteredMap restrict_filtered(const FilteredMap& f, const SubgroupHandle& h);
/// Induction from H to G; chi_g is the character of G (its restriction must
/// be the character of x).  In mode F the basis of each piece is rescaled so
/// that it is permuted by G.
FilteredObject induce_filtered(const FilteredObject& x, const SubgroupHandle& h, const TwistCharacter& chi_g);
FilteredMap induce_filtered(const FilteredMap& f, const SubgroupHandle& h, const TwistCharacter& chi_g);
/// Change-of-basis matrix from the plain induced basis t_i (x) e_k (index
/// i * rank + k) to the basis of induce_filtered(x, h, chi_g).
ZmMatrix induction_basis(const FilteredObject& x, const SubgroupHandle& h, const TwistCharacter& chi_g);

/// The explicit isomorphism induce(restrict(A) (x) B) -> A (x) induce(B).
FilteredMap projection_formula_iso(const FilteredObject& a, const FilteredObject& b, const SubgroupHandle& h);
/// Frobenius reciprocity Hom(induce M, N) -> Hom(M, restrict N): phi |-> phi ∘ (e -> t_0 (x) e).
ZmMatrix frobenius_restrict(const FilteredObject& m, const SubgroupHandle& h, const TwistCharacter& chi_g,
                            const ZmMatrix& phi);
/// Hom(restrict M, N) -> Hom(M, induce N): psi |-> (x -> sum_i t_i (x) psi(t_i^-1 x)).
ZmMatrix frobenius_induce(const FilteredObject& m, const FilteredObject& n, const SubgroupHandle& h,
                          const TwistCharacter& chi_g, const ZmMatrix& psi);

/// For H <= K: projection Z/m[G/H] -> Z/m[G/K] and transfer back; the
/// composite projection ∘ transfer is [K:H] times the identity.
struct TransferPair {
  FilteredMap projection;
  FilteredMap transfer;
};
TransferPair mcc_transfer_pair(const SubgroupHandle& h, const SubgroupHandle& k, const TwistCharacter& chi);

/// Explicit isomorphism (+)_{HgH'} Z/m[G/(g^-1 H g ∩ H')] -> Z/m[G/H] (x) Z/m[G/H'].
FilteredMap mackey_tensor_iso(const SubgroupHandle& h, const SubgroupHandle& hp, const TwistCharacter& chi);
/// An admissible epimorphism onto P from a sum of twisted mcc objects of
/// canonical subgroups (one per orbit).
FilteredMap generation_epimorphism(const PermutationalObject& p);

/// The canonical split triple N -> N (+) M -> M.
std::pair<FilteredMap, FilteredMap> split_triple(const FilteredObject& n, const FilteredObject& m);

}  // namespace atmot
