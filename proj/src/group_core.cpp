#include "atmot/group_core.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "atmot/errors.hpp"

namespace atmot {

namespace {

Perm compose(const Perm& a, const Perm& b) {  // apply b then a
  Perm out(b.size());
  for (std::size_t x = 0; x < b.size(); ++x) out[x] = a[b[x]];
  return out;
}

bool is_permutation(const Perm& p, int degree) {
  if (static_cast<int>(p.size()) != degree) return false;
  std::vector<char> seen(degree, 0);
  for (int v : p) {
    if (v < 0 || v >= degree || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

// Closure of a set of elements under multiplication.
std::vector<int> closure(const FiniteGroup& g, const std::vector<int>& gens) {
  std::vector<char> in(g.order(), 0);
  std::vector<int> out{g.identity()};
  in[g.identity()] = 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int s : gens) {
      int y = g.mul(s, out[i]);
      if (!in[y]) {
        in[y] = 1;
        out.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

FiniteGroup::FiniteGroup() : FiniteGroup(1, {}) {}

FiniteGroup::FiniteGroup(int degree, std::vector<Perm> generators) {
  if (degree < 1) throw MismatchError("permutation degree must be positive");
  auto d = std::make_shared<Data>();
  d->degree = degree;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (!is_permutation(generators[k], degree))
      throw MismatchError("generator " + std::to_string(k) + " is not a permutation of " +
                          std::to_string(degree) + " points");
  }
  d->generators = std::move(generators);

  Perm id(degree);
  std::iota(id.begin(), id.end(), 0);
  std::set<Perm> seen{id};
  std::deque<Perm> queue{id};
  while (!queue.empty()) {
    Perm p = std::move(queue.front());
    queue.pop_front();
    for (const auto& s : d->generators) {
      Perm q = compose(s, p);
      if (seen.insert(q).second) queue.push_back(std::move(q));
    }
  }
  d->elements.assign(seen.begin(), seen.end());
  std::map<Perm, int> index;
  for (std::size_t i = 0; i < d->elements.size(); ++i) index[d->elements[i]] = static_cast<int>(i);
  std::size_t n = d->elements.size();
  d->table.resize(n * n);
  d->inverse.resize(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      int c = index.at(compose(d->elements[a], d->elements[b]));
      d->table[a * n + b] = c;
      if (c == 0) d->inverse[a] = static_cast<int>(b);
    }
  for (const auto& s : d->generators) d->generator_index.push_back(index.at(s));
  d_ = std::move(d);
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n <= 1) return FiniteGroup();
  Perm r(n);
  for (int i = 0; i < n; ++i) r[i] = (i + 1) % n;
  return FiniteGroup(n, {r});
}

FiniteGroup FiniteGroup::symmetric(int n) {
  if (n <= 1) return FiniteGroup();
  Perm t(n), c(n);
  std::iota(t.begin(), t.end(), 0);
  std::swap(t[0], t[1]);
  for (int i = 0; i < n; ++i) c[i] = (i + 1) % n;
  return n == 2 ? FiniteGroup(2, {t}) : FiniteGroup(n, {t, c});
}

FiniteGroup FiniteGroup::dihedral(int n) {
  if (n < 3) throw DomainError("dihedral group needs n >= 3");
  Perm r(n), s(n);
  for (int i = 0; i < n; ++i) {
    r[i] = (i + 1) % n;
    s[i] = (n - i) % n;
  }
  return FiniteGroup(n, {r, s});
}

FiniteGroup FiniteGroup::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "group descriptor must be an object");
  if (!j.contains("degree") || !j["degree"].is_number_integer())
    throw SchemaError("/degree", "expected an integer");
  int degree = j["degree"].get<int>();
  std::vector<Perm> gens;
  if (j.contains("generators")) {
    const auto& g = j["generators"];
    if (!g.is_array()) throw SchemaError("/generators", "expected an array");
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::string path = "/generators/" + std::to_string(k);
      if (!g[k].is_array()) throw SchemaError(path, "expected an array of images");
      Perm p;
      for (const auto& v : g[k]) {
        if (!v.is_number_integer()) throw SchemaError(path, "images must be integers");
        p.push_back(v.get<int>() - 1);
      }
      if (!is_permutation(p, degree))
        throw SchemaError(path, "not a permutation of " + std::to_string(degree) + " points");
      gens.push_back(std::move(p));
    }
  }
  return FiniteGroup(degree, std::move(gens));
}

nlohmann::json FiniteGroup::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& p : generators()) {
    nlohmann::json row = nlohmann::json::array();
    for (int v : p) row.push_back(v + 1);
    gens.push_back(row);
  }
  return {{"degree", degree()}, {"generators", gens}};
}

std::optional<int> FiniteGroup::index_of(const Perm& p) const {
  auto it = std::lower_bound(d_->elements.begin(), d_->elements.end(), p);
  if (it == d_->elements.end() || *it != p) return std::nullopt;
  return static_cast<int>(it - d_->elements.begin());
}

int FiniteGroup::element_order(int g) const {
  int k = 1;
  for (int x = g; x != identity(); x = mul(g, x)) ++k;
  return k;
}

bool FiniteGroup::is_abelian() const {
  for (int a : generator_indices())
    for (int b : generator_indices())
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

std::string FiniteGroup::element_to_string(int g) const {
  const Perm& p = element(g);
  std::vector<char> seen(p.size(), 0);
  std::ostringstream os;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s] || p[s] == static_cast<int>(s)) continue;
    os << '(';
    for (std::size_t x = s; !seen[x]; x = p[x]) {
      if (x != s) os << ' ';
      os << x + 1;
      seen[x] = 1;
    }
    os << ')';
  }
  std::string out = os.str();
  return out.empty() ? "()" : out;
}

bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
  return a.d_ == b.d_ || (a.d_->degree == b.d_->degree && a.d_->elements == b.d_->elements);
}

// ---------------------------------------------------------------- subgroups

SubgroupHandle::SubgroupHandle(FiniteGroup group, std::vector<int> elements)
    : group_(std::move(group)), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  if (elements_.empty() || elements_.front() != group_.identity())
    throw DomainError("subgroup must contain the identity");
  for (int a : elements_) {
    if (a < 0 || a >= static_cast<int>(group_.order())) throw DomainError("element out of range");
    for (int b : elements_)
      if (!contains(group_.mul(a, b))) throw DomainError("subset is not closed under products");
  }
}

SubgroupHandle SubgroupHandle::whole(const FiniteGroup& g) {
  std::vector<int> all(g.order());
  std::iota(all.begin(), all.end(), 0);
  SubgroupHandle h;
  h.group_ = g;
  h.elements_ = std::move(all);
  return h;
}

SubgroupHandle SubgroupHandle::trivial(const FiniteGroup& g) {
  SubgroupHandle h;
  h.group_ = g;
  h.elements_ = {g.identity()};
  return h;
}

SubgroupHandle SubgroupHandle::generated_by(const FiniteGroup& g, const std::vector<int>& gens) {
  SubgroupHandle h;
  h.group_ = g;
  h.elements_ = closure(g, gens);
  return h;
}

bool SubgroupHandle::contains(int g) const {
  return std::binary_search(elements_.begin(), elements_.end(), g);
}

FiniteGroup SubgroupHandle::as_group() const {
  // greedy small generating set
  std::vector<int> chosen;
  std::vector<int> span{group_.identity()};
  for (int e : elements_) {
    if (std::binary_search(span.begin(), span.end(), e)) continue;
    chosen.push_back(e);
    span = closure(group_, chosen);
  }
  std::vector<Perm> gens;
  for (int e : chosen) gens.push_back(group_.element(e));
  return FiniteGroup(group_.degree(), std::move(gens));
}

SubgroupHandle SubgroupHandle::conjugate(int g) const {
  SubgroupHandle h;
  h.group_ = group_;
  for (int x : elements_) h.elements_.push_back(group_.conj(g, x));
  std::sort(h.elements_.begin(), h.elements_.end());
  return h;
}

SubgroupHandle SubgroupHandle::intersect(const SubgroupHandle& o) const {
  if (!(group_ == o.group_)) throw MismatchError("subgroups of different groups");
  SubgroupHandle h;
  h.group_ = group_;
  std::set_intersection(elements_.begin(), elements_.end(), o.elements_.begin(), o.elements_.end(),
                        std::back_inserter(h.elements_));
  return h;
}

bool SubgroupHandle::is_normal() const {
  for (int g : group_.generator_indices())
    if (!(conjugate(g) == *this)) return false;
  return true;
}

CosetTable left_cosets(const SubgroupHandle& h) {
  const FiniteGroup& g = h.group();
  CosetTable t;
  t.coset_of.assign(g.order(), -1);
  for (int x = 0; x < static_cast<int>(g.order()); ++x) {
    if (t.coset_of[x] >= 0) continue;
    int c = static_cast<int>(t.representatives.size());
    t.representatives.push_back(x);
    for (int y : h.elements()) t.coset_of[g.mul(x, y)] = c;
  }
  return t;
}

std::vector<SubgroupHandle> all_subgroups(const FiniteGroup& g, std::size_t max_order) {
  if (g.order() > max_order)
    throw BudgetError("subgroup enumeration is limited to |G| <= " + std::to_string(max_order) +
                      " (|G| = " + std::to_string(g.order()) + "); raise the bound explicitly");
  std::set<std::vector<int>> found;
  std::vector<std::vector<int>> cyclic;
  for (int x = 0; x < static_cast<int>(g.order()); ++x) {
    auto c = closure(g, {x});
    if (found.insert(c).second) cyclic.push_back(c);
  }
  std::vector<std::vector<int>> queue(found.begin(), found.end());
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (const auto& c : cyclic) {
      if (std::includes(queue[i].begin(), queue[i].end(), c.begin(), c.end())) continue;
      std::vector<int> gens = queue[i];
      gens.insert(gens.end(), c.begin(), c.end());
      auto j = closure(g, gens);
      if (found.insert(j).second) queue.push_back(j);
    }
  }
  std::vector<SubgroupHandle> out;
  for (const auto& s : found) {
    SubgroupHandle h = SubgroupHandle::generated_by(g, s);
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const SubgroupHandle& a, const SubgroupHandle& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.elements() < b.elements();
  });
  return out;
}

std::vector<SubgroupHandle> subgroups_up_to_conjugacy(const FiniteGroup& g, std::size_t max_order) {
  std::set<std::vector<int>> reps;
  for (const auto& h : all_subgroups(g, max_order)) {
    std::vector<int> best = h.elements();
    for (int x = 0; x < static_cast<int>(g.order()); ++x) {
      auto c = h.conjugate(x).elements();
      if (c < best) best = std::move(c);
    }
    reps.insert(best);
  }
  std::vector<SubgroupHandle> out;
  for (const auto& r : reps) {
    SubgroupHandle h = SubgroupHandle::generated_by(g, r);
    h.mark_canonical(true);
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const SubgroupHandle& a, const SubgroupHandle& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.elements() < b.elements();
  });
  return out;
}

std::vector<DoubleCoset> double_cosets(const SubgroupHandle& h, const SubgroupHandle& hp) {
  if (!(h.group() == hp.group())) throw MismatchError("double cosets of subgroups of different groups");
  const FiniteGroup& g = h.group();
  std::vector<char> used(g.order(), 0);
  std::vector<DoubleCoset> out;
  for (int x = 0; x < static_cast<int>(g.order()); ++x) {
    if (used[x]) continue;
    DoubleCoset d;
    d.representative = x;
    for (int a : h.elements())
      for (int b : hp.elements()) {
        int y = g.mul(a, g.mul(x, b));
        if (!used[y]) {
          used[y] = 1;
          d.elements.push_back(y);
        }
      }
    std::sort(d.elements.begin(), d.elements.end());
    d.intersection = h.conjugate(x).intersect(hp);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::vector<std::int64_t>> unit_characters(const FiniteGroup& g, std::int64_t m) {
  std::vector<std::int64_t> units;
  for (std::int64_t u = 1; u < m; ++u)
    if (std::gcd(u, m) == 1) units.push_back(u);
  if (m == 1) units = {0};
  const auto& gens = g.generator_indices();
  std::set<std::vector<std::int64_t>> out;
  std::vector<std::size_t> choice(gens.size(), 0);
  while (true) {
    std::vector<std::int64_t> val(g.order(), -1);
    val[g.identity()] = 1 % m;
    std::vector<int> order{g.identity()};
    bool ok = true;
    for (std::size_t i = 0; i < order.size() && ok; ++i) {
      for (std::size_t k = 0; k < gens.size(); ++k) {
        int y = g.mul(gens[k], order[i]);
        std::int64_t v = units[choice[k]] * val[order[i]] % m;
        if (val[y] < 0) {
          val[y] = v;
          order.push_back(y);
        } else if (val[y] != v) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      for (int a = 0; a < static_cast<int>(g.order()) && ok; ++a)
        for (int b = 0; b < static_cast<int>(g.order()); ++b)
          if (val[g.mul(a, b)] != val[a] * val[b] % m) {
            ok = false;
            break;
          }
      if (ok) out.insert(val);
    }
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == units.size()) choice[k++] = 0;
    if (k == choice.size()) break;
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- G-sets

GSet::GSet(FiniteGroup group, std::vector<std::vector<int>> action)
    : group_(std::move(group)), action_(std::move(action)) {
  if (action_.size() != group_.order()) throw DomainError("action needs one permutation per element");
  size_ = action_.empty() ? 0 : action_[0].size();
  for (const auto& a : action_)
    if (!is_permutation(a, static_cast<int>(size_)) && size_ > 0)
      throw DomainError("action of an element is not a permutation");
  if (!is_valid_action()) throw DomainError("action is not a homomorphism");
}

GSet GSet::point(const FiniteGroup& g) {
  GSet s;
  s.group_ = g;
  s.size_ = 1;
  s.action_.assign(g.order(), std::vector<int>{0});
  return s;
}

GSet GSet::from_generator_action(const FiniteGroup& g, std::size_t size,
                                 const std::vector<std::vector<int>>& gen_action) {
  const auto& gens = g.generator_indices();
  if (gen_action.size() != gens.size()) throw DomainError("need one permutation per generator");
  for (const auto& a : gen_action)
    if (!is_permutation(a, static_cast<int>(size)) && size > 0)
      throw DomainError("generator action is not a permutation");
  std::vector<std::vector<int>> act(g.order());
  act[g.identity()].resize(size);
  std::iota(act[g.identity()].begin(), act[g.identity()].end(), 0);
  std::vector<int> order{g.identity()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t k = 0; k < gens.size(); ++k) {
      int y = g.mul(gens[k], order[i]);
      std::vector<int> v(size);
      for (std::size_t x = 0; x < size; ++x) v[x] = gen_action[k][act[order[i]][x]];
      if (act[y].empty() && size > 0) {
        act[y] = std::move(v);
        order.push_back(y);
      } else if (act[y] != v) {
        throw DomainError("generator permutations do not define an action");
      }
    }
  if (size == 0) act.assign(g.order(), {});
  return GSet(g, std::move(act));
}

GSet GSet::restrict_to(const SubgroupHandle& h) const {
  if (!(h.group() == group_)) throw MismatchError("restrict: subgroup of a different group");
  std::vector<std::vector<int>> act;
  for (int e : h.elements()) act.push_back(action_[e]);
  GSet s;
  s.group_ = h.as_group();
  s.size_ = size_;
  s.action_ = std::move(act);
  return s;
}

GSet GSet::cosets(const SubgroupHandle& h) {
  const FiniteGroup& g = h.group();
  CosetTable t = left_cosets(h);
  GSet s;
  s.group_ = g;
  s.size_ = t.representatives.size();
  s.action_.assign(g.order(), std::vector<int>(s.size_));
  for (int x = 0; x < static_cast<int>(g.order()); ++x)
    for (std::size_t c = 0; c < s.size_; ++c)
      s.action_[x][c] = t.coset_of[g.mul(x, t.representatives[c])];
  return s;
}

GSet GSet::disjoint_union(const GSet& a, const GSet& b) {
  if (!(a.group_ == b.group_)) throw MismatchError("G-sets over different groups");
  GSet s;
  s.group_ = a.group_;
  s.size_ = a.size_ + b.size_;
  s.action_.resize(a.action_.size());
  for (std::size_t g = 0; g < a.action_.size(); ++g) {
    s.action_[g] = a.action_[g];
    for (int y : b.action_[g]) s.action_[g].push_back(y + static_cast<int>(a.size_));
  }
  return s;
}

GSet GSet::product(const GSet& a, const GSet& b) {
  if (!(a.group_ == b.group_)) throw MismatchError("G-sets over different groups");
  GSet s;
  s.group_ = a.group_;
  s.size_ = a.size_ * b.size_;
  s.action_.assign(a.action_.size(), std::vector<int>(s.size_));
  for (std::size_t g = 0; g < a.action_.size(); ++g)
    for (std::size_t x = 0; x < a.size_; ++x)
      for (std::size_t y = 0; y < b.size_; ++y)
        s.action_[g][x * b.size_ + y] =
            static_cast<int>(a.action_[g][x] * b.size_ + b.action_[g][y]);
  return s;
}

SubgroupHandle GSet::stabilizer(int x) const {
  std::vector<int> els;
  for (int g = 0; g < static_cast<int>(group_.order()); ++g)
    if (action_[g][x] == x) els.push_back(g);
  return SubgroupHandle(group_, els);
}

std::vector<std::vector<int>> GSet::orbits() const {
  std::vector<char> seen(size_, 0);
  std::vector<std::vector<int>> out;
  for (std::size_t x = 0; x < size_; ++x) {
    if (seen[x]) continue;
    std::vector<int> orb;
    for (const auto& a : action_)
      if (!seen[a[x]]) {
        seen[a[x]] = 1;
        orb.push_back(a[x]);
      }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

bool GSet::is_valid_action() const {
  for (std::size_t x = 0; x < size_; ++x)
    if (action_[group_.identity()][x] != static_cast<int>(x)) return false;
  std::size_t n = group_.order();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto& ab = action_[group_.mul(static_cast<int>(a), static_cast<int>(b))];
      for (std::size_t x = 0; x < size_; ++x)
        if (ab[x] != action_[a][action_[b][x]]) return false;
    }
  return true;
}

// ---------------------------------------------------------------- homomorphisms

GroupHom::GroupHom(FiniteGroup source, FiniteGroup target, std::vector<int> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != source_.order()) throw DomainError("homomorphism needs one image per element");
  for (int v : images_)
    if (v < 0 || v >= static_cast<int>(target_.order())) throw DomainError("image out of range");
  std::size_t n = source_.order();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (images_[source_.mul(static_cast<int>(a), static_cast<int>(b))] !=
          target_.mul(images_[a], images_[b]))
        throw DomainError("map is not a group homomorphism");
}

GroupHom GroupHom::from_generator_images(const FiniteGroup& source, const FiniteGroup& target,
                                         const std::vector<int>& gen_images) {
  const auto& gens = source.generator_indices();
  if (gen_images.size() != gens.size()) throw DomainError("need one image per generator");
  std::vector<int> img(source.order(), -1);
  img[source.identity()] = target.identity();
  std::vector<int> order{source.identity()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t k = 0; k < gens.size(); ++k) {
      int y = source.mul(gens[k], order[i]);
      int v = target.mul(gen_images[k], img[order[i]]);
      if (img[y] < 0) {
        img[y] = v;
        order.push_back(y);
      } else if (img[y] != v) {
        throw DomainError("generator images do not define a homomorphism");
      }
    }
  return GroupHom(source, target, std::move(img));
}

GroupHom GroupHom::identity(const FiniteGroup& g) {
  std::vector<int> img(g.order());
  std::iota(img.begin(), img.end(), 0);
  GroupHom h;
  h.source_ = g;
  h.target_ = g;
  h.images_ = std::move(img);
  return h;
}

bool GroupHom::is_surjective() const {
  std::vector<char> hit(target_.order(), 0);
  for (int v : images_) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

GroupHom GroupHom::compose(const GroupHom& first) const {
  if (!(first.target_ == source_)) throw MismatchError("composition of non-composable homomorphisms");
  std::vector<int> img(first.source_.order());
  for (std::size_t g = 0; g < img.size(); ++g) img[g] = images_[first.images_[g]];
  GroupHom h;
  h.source_ = first.source_;
  h.target_ = target_;
  h.images_ = std::move(img);
  return h;
}

}  // namespace atmot
