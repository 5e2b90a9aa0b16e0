#pragma once

// Finite permutation groups, G-sets, subgroups and double cosets.
//
// Elements are indexed 0..|G|-1 in lexicographic order of their image
// lists, so the identity is always element 0.  The product a*b is the
// composition "apply b, then a".

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace atmot {

using Perm = std::vector<int>;  // 0-based images

class FiniteGroup {
 public:
  FiniteGroup();  // trivial group of degree 1
  /// Throws MismatchError when a generator is not a permutation of `degree` points.
  FiniteGroup(int degree, std::vector<Perm> generators);

  static FiniteGroup trivial() { return FiniteGroup(); }
  static FiniteGroup cyclic(int n);
  static FiniteGroup symmetric(int n);
  static FiniteGroup dihedral(int n);  // order 2n, acting on n points
  /// {"degree": n, "generators": [[1-based images], ...]}
  static FiniteGroup from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t order() const { return d_->elements.size(); }
  int degree() const { return d_->degree; }
  const std::vector<Perm>& generators() const { return d_->generators; }
  /// Indices of the generators (duplicates and identities kept).
  const std::vector<int>& generator_indices() const { return d_->generator_index; }
  const Perm& element(int g) const { return d_->elements[g]; }
  std::optional<int> index_of(const Perm& p) const;

  int identity() const { return 0; }
  int mul(int a, int b) const { return d_->table[static_cast<std::size_t>(a) * order() + b]; }
  int inv(int a) const { return d_->inverse[a]; }
  int conj(int g, int x) const { return mul(inv(g), mul(x, g)); }  // g^-1 x g
  int element_order(int g) const;
  bool is_abelian() const;
  std::string element_to_string(int g) const;

  /// Same underlying set of permutations.
  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b);

 private:
  struct Data {
    int degree = 1;
    std::vector<Perm> generators;
    std::vector<Perm> elements;
    std::vector<int> table;
    std::vector<int> inverse;
    std::vector<int> generator_index;
  };
  std::shared_ptr<const Data> d_;
};

class SubgroupHandle {
 public:
  SubgroupHandle() = default;
  /// Throws DomainError when `elements` is not closed under products.
  SubgroupHandle(FiniteGroup group, std::vector<int> elements);
  static SubgroupHandle whole(const FiniteGroup& g);
  static SubgroupHandle trivial(const FiniteGroup& g);
  /// Subgroup generated by the given elements.
  static SubgroupHandle generated_by(const FiniteGroup& g, const std::vector<int>& gens);

  const FiniteGroup& group() const { return group_; }
  const std::vector<int>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  std::size_t index() const { return group_.order() / elements_.size(); }
  bool contains(int g) const;
  bool is_canonical() const { return canonical_; }
  void mark_canonical(bool c) { canonical_ = c; }

  /// The subgroup as a group in its own right.  Element i of the result is
  /// element elements()[i] of the ambient group.
  FiniteGroup as_group() const;
  /// g^-1 H g.
  SubgroupHandle conjugate(int g) const;
  SubgroupHandle intersect(const SubgroupHandle& o) const;
  bool is_normal() const;

  friend bool operator==(const SubgroupHandle& a, const SubgroupHandle& b) {
    return a.elements_ == b.elements_;
  }

 private:
  FiniteGroup group_;
  std::vector<int> elements_;
  bool canonical_ = false;
};

/// A finite set with a left action.
class GSet {
 public:
  GSet() = default;
  /// action[g][x] = g.x; throws DomainError if not an action.
  GSet(FiniteGroup group, std::vector<std::vector<int>> action);
  static GSet point(const FiniteGroup& g);
  /// Action given by one permutation per generator of the group.
  static GSet from_generator_action(const FiniteGroup& g, std::size_t size,
                                    const std::vector<std::vector<int>>& gen_action);
  /// The action restricted to a subgroup, over h.as_group().
  GSet restrict_to(const SubgroupHandle& h) const;
  /// Left cosets gH, ordered by their least element; coset 0 is H.
  static GSet cosets(const SubgroupHandle& h);
  static GSet regular(const FiniteGroup& g) { return cosets(SubgroupHandle::trivial(g)); }
  static GSet disjoint_union(const GSet& a, const GSet& b);
  /// Points (x, y) numbered x * |b| + y.
  static GSet product(const GSet& a, const GSet& b);

  const FiniteGroup& group() const { return group_; }
  std::size_t size() const { return size_; }
  int act(int g, int x) const { return action_[g][x]; }
  const std::vector<std::vector<int>>& action() const { return action_; }
  SubgroupHandle stabilizer(int x) const;
  /// Orbits as sorted point lists, ordered by least point.
  std::vector<std::vector<int>> orbits() const;
  bool is_valid_action() const;

 private:
  FiniteGroup group_;
  std::size_t size_ = 0;
  std::vector<std::vector<int>> action_;
};

/// Left coset decomposition of G by H: representatives (least element of
/// each coset, ascending) and the coset index of every element.
struct CosetTable {
  std::vector<int> representatives;
  std::vector<int> coset_of;
};
CosetTable left_cosets(const SubgroupHandle& h);

/// One representative per conjugacy class of subgroups, each the
/// lexicographically least member of its class, sorted by (order, elements).
std::vector<SubgroupHandle> subgroups_up_to_conjugacy(const FiniteGroup& g,
                                                      std::size_t max_order = 48);
/// Every subgroup (same bound).
std::vector<SubgroupHandle> all_subgroups(const FiniteGroup& g, std::size_t max_order = 48);

struct DoubleCoset {
  int representative;            // least element of H g H'
  std::vector<int> elements;     // sorted
  SubgroupHandle intersection;   // g^-1 H g  ∩  H'
};
/// H \ G / H', ordered by least element.
std::vector<DoubleCoset> double_cosets(const SubgroupHandle& h, const SubgroupHandle& hp);

/// All homomorphisms G -> (Z/m)^x, as value lists indexed by element,
/// sorted lexicographically (trivial character first).
std::vector<std::vector<std::int64_t>> unit_characters(const FiniteGroup& g, std::int64_t m);

/// Group homomorphism given by element images.
class GroupHom {
 public:
  GroupHom() = default;
  /// Throws DomainError unless `images` is multiplicative.
  GroupHom(FiniteGroup source, FiniteGroup target, std::vector<int> images);
  /// Extend generator images; throws DomainError if this is not well defined.
  static GroupHom from_generator_images(const FiniteGroup& source, const FiniteGroup& target,
                                        const std::vector<int>& gen_images);
  static GroupHom identity(const FiniteGroup& g);

  const FiniteGroup& source() const { return source_; }
  const FiniteGroup& target() const { return target_; }
  int operator()(int g) const { return images_[g]; }
  const std::vector<int>& images() const { return images_; }
  bool is_surjective() const;
  GroupHom compose(const GroupHom& first) const;  // this ∘ first

 private:
  FiniteGroup source_, target_;
  std::vector<int> images_;
};

}  // namespace atmot
