#include "atmot/gmod_cohomology.hpp"

#include <algorithm>
#include <numeric>

#include "atmot/errors.hpp"

namespace atmot {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Decode a normalized tuple index into element indices (each >= 1).
std::vector<int> decode_tuple(std::size_t idx, int n, std::size_t base) {
  std::vector<int> t(n);
  for (int k = n - 1; k >= 0; --k) {
    t[k] = static_cast<int>(idx % base) + 1;
    idx /= base;
  }
  return t;
}

std::size_t encode_tuple(const int* t, int n, std::size_t base) {
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k) idx = idx * base + static_cast<std::size_t>(t[k] - 1);
  return idx;
}

void require_same(const GModule& a, const GModule& b, const char* what) {
  if (a.modulus() != b.modulus()) throw MismatchError(std::string(what) + ": modulus mismatch");
  if (!(a.group() == b.group())) throw MismatchError(std::string(what) + ": group mismatch");
}

// Index of an ambient element inside a subgroup handle, i.e. its index in
// h.as_group().
int subgroup_index(const SubgroupHandle& h, int g) {
  auto it = std::lower_bound(h.elements().begin(), h.elements().end(), g);
  if (it == h.elements().end() || *it != g) throw DomainError("element not in subgroup");
  return static_cast<int>(it - h.elements().begin());
}

}  // namespace

// ---------------------------------------------------------------- characters

TwistCharacter::TwistCharacter(FiniteGroup group, Residue modulus, std::vector<Residue> values)
    : group_(std::move(group)), modulus_(modulus), values_(std::move(values)) {
  if (values_.size() != group_.order()) throw DomainError("character needs one value per element");
  for (auto& v : values_) {
    v = mod_reduce(v, modulus_);
    if (gcd_residue(v, modulus_) != 1) throw DomainError("character values must be units");
  }
  if (values_[group_.identity()] != 1 % modulus_) throw DomainError("character must send e to 1");
  for (int s : group_.generator_indices())
    for (int x = 0; x < static_cast<int>(group_.order()); ++x)
      if (values_[group_.mul(s, x)] != values_[s] * values_[x] % modulus_)
        throw DomainError("character is not multiplicative");
}

TwistCharacter TwistCharacter::trivial(const FiniteGroup& g, Residue m) {
  return TwistCharacter(g, m, std::vector<Residue>(g.order(), 1));
}

std::vector<TwistCharacter> TwistCharacter::all(const FiniteGroup& g, Residue m) {
  std::vector<TwistCharacter> out;
  for (auto& v : unit_characters(g, m)) out.emplace_back(g, m, std::move(v));
  return out;
}

TwistCharacter TwistCharacter::from_generator_values(const FiniteGroup& g, Residue m,
                                                     const std::vector<Residue>& gen_values) {
  const auto& gens = g.generator_indices();
  if (gen_values.size() != gens.size()) throw DomainError("need one character value per generator");
  std::vector<Residue> val(g.order(), -1);
  val[g.identity()] = 1 % m;
  std::vector<int> order{g.identity()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t k = 0; k < gens.size(); ++k) {
      int y = g.mul(gens[k], order[i]);
      Residue v = mod_reduce(gen_values[k] * val[order[i]], m);
      if (val[y] < 0) {
        val[y] = v;
        order.push_back(y);
      } else if (val[y] != v) {
        throw DomainError("generator values do not define a character");
      }
    }
  return TwistCharacter(g, m, std::move(val));
}

Residue TwistCharacter::power(int g, int j) const {
  if (j >= 0) return pow_mod(values_[g], j, modulus_);
  return pow_mod(inverse_mod(values_[g], modulus_), -static_cast<std::int64_t>(j), modulus_);
}

bool TwistCharacter::is_trivial() const {
  return std::all_of(values_.begin(), values_.end(), [&](Residue v) { return v == 1 % modulus_; });
}

TwistCharacter TwistCharacter::restrict_to(const SubgroupHandle& h) const {
  std::vector<Residue> v;
  for (int e : h.elements()) v.push_back(values_[e]);
  return TwistCharacter(h.as_group(), modulus_, std::move(v));
}

TwistCharacter TwistCharacter::reduce_to(Residue n) const {
  if (n < 2 || modulus_ % n != 0) throw DomainError("reduction modulus must divide m");
  std::vector<Residue> v;
  for (Residue x : values_) v.push_back(x % n);
  return TwistCharacter(group_, n, std::move(v));
}

TwistCharacter TwistCharacter::pullback(const GroupHom& q) const {
  if (!(q.target() == group_)) throw MismatchError("pullback: homomorphism target differs");
  std::vector<Residue> v;
  for (int g = 0; g < static_cast<int>(q.source().order()); ++g) v.push_back(values_[q(g)]);
  return TwistCharacter(q.source(), modulus_, std::move(v));
}

// ---------------------------------------------------------------- modules

GModule::GModule(FiniteGroup group, Residue modulus, std::vector<ZmMatrix> action)
    : group_(std::move(group)), modulus_(modulus), action_(std::move(action)) {
  if (action_.size() != group_.order()) throw DomainError("module needs one matrix per element");
  rank_ = action_[0].rows();
  for (const auto& a : action_)
    if (a.rows() != rank_ || a.cols() != rank_ || a.modulus() != modulus_)
      throw MismatchError("action matrices must be square of equal rank over Z/m");
  if (!is_homomorphism()) throw DomainError("action is not a homomorphism");
}

GModule GModule::from_generators(const FiniteGroup& group, Residue modulus,
                                 const std::vector<ZmMatrix>& gen_action) {
  const auto& gens = group.generator_indices();
  if (gen_action.size() != gens.size()) throw DomainError("need one matrix per generator");
  std::size_t r = gen_action.empty() ? 0 : gen_action[0].rows();
  if (gen_action.empty()) throw DomainError("from_generators needs at least one generator; use trivial()");
  std::vector<std::optional<ZmMatrix>> act(group.order());
  act[group.identity()] = ZmMatrix::identity(modulus, r);
  std::vector<int> order{group.identity()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t k = 0; k < gens.size(); ++k) {
      int y = group.mul(gens[k], order[i]);
      ZmMatrix v = gen_action[k] * *act[order[i]];
      if (!act[y]) {
        act[y] = std::move(v);
        order.push_back(y);
      } else if (!(*act[y] == v)) {
        throw DomainError("generator matrices do not define an action");
      }
    }
  std::vector<ZmMatrix> full;
  for (auto& a : act) full.push_back(std::move(*a));
  return GModule(group, modulus, std::move(full));
}

GModule GModule::trivial(const FiniteGroup& group, Residue modulus, std::size_t rank) {
  GModule m;
  m.group_ = group;
  m.modulus_ = modulus;
  m.rank_ = rank;
  m.action_.assign(group.order(), ZmMatrix::identity(modulus, rank));
  return m;
}

GModule GModule::permutation(const GSet& s, Residue modulus) {
  GModule m;
  m.group_ = s.group();
  m.modulus_ = modulus;
  m.rank_ = s.size();
  for (int g = 0; g < static_cast<int>(s.group().order()); ++g) {
    ZmMatrix a(modulus, s.size(), s.size());
    for (std::size_t x = 0; x < s.size(); ++x) a.set(s.act(g, static_cast<int>(x)), x, 1);
    m.action_.push_back(std::move(a));
  }
  return m;
}

GModule GModule::from_json(const FiniteGroup& group, Residue modulus, const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "module descriptor must be an object");
  if (!j.contains("rank") || !j["rank"].is_number_unsigned()) throw SchemaError("/rank", "expected a non-negative integer");
  std::size_t r = j["rank"].get<std::size_t>();
  std::size_t ngen = group.generator_indices().size();
  std::vector<ZmMatrix> gens(ngen, ZmMatrix::identity(modulus, r));
  if (j.contains("action")) {
    if (!j["action"].is_object()) throw SchemaError("/action", "expected an object keyed by generator index");
    for (auto it = j["action"].begin(); it != j["action"].end(); ++it) {
      std::string path = "/action/" + it.key();
      std::size_t k;
      try {
        k = std::stoul(it.key());
      } catch (...) {
        throw SchemaError(path, "key must be a generator index");
      }
      if (k >= ngen) throw SchemaError(path, "generator index out of range");
      const auto& rows = it.value();
      if (!rows.is_array() || rows.size() != r) throw SchemaError(path, "expected " + std::to_string(r) + " rows");
      ZmMatrix a(modulus, r, r);
      for (std::size_t i = 0; i < r; ++i) {
        if (!rows[i].is_array() || rows[i].size() != r)
          throw SchemaError(path + "/" + std::to_string(i), "expected " + std::to_string(r) + " entries");
        for (std::size_t c = 0; c < r; ++c) {
          if (!rows[i][c].is_number_integer()) throw SchemaError(path + "/" + std::to_string(i), "entries must be integers");
          a.set(i, c, rows[i][c].get<Residue>());
        }
      }
      gens[k] = std::move(a);
    }
  }
  if (ngen == 0) return trivial(group, modulus, r);
  try {
    return from_generators(group, modulus, gens);
  } catch (const DomainError& e) {
    throw SchemaError("/action", e.what());
  }
}

nlohmann::json GModule::to_json() const {
  nlohmann::json act = nlohmann::json::object();
  const auto& gens = group_.generator_indices();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    nlohmann::json rows = nlohmann::json::array();
    const ZmMatrix& a = action_[gens[k]];
    for (std::size_t i = 0; i < rank_; ++i) rows.push_back(a.row_vector(i));
    act[std::to_string(k)] = rows;
  }
  return {{"rank", rank_}, {"action", act}};
}

ZmVector GModule::act(int g, std::span<const Residue> v) const {
  const ZmMatrix& a = action_[g];
  ZmVector out(rank_, 0);
  for (std::size_t i = 0; i < rank_; ++i) {
    Residue s = 0;
    for (std::size_t k = 0; k < rank_; ++k) s = (s + a(i, k) * v[k]) % modulus_;
    out[i] = s;
  }
  return out;
}

bool GModule::is_homomorphism() const {
  // rho(s x) = rho(s) rho(x) for generators s and all x forces a homomorphism
  if (!action_[group_.identity()].is_identity()) return false;
  for (int s : group_.generator_indices())
    for (int x = 0; x < static_cast<int>(group_.order()); ++x)
      if (!(action_[group_.mul(s, x)] == action_[s] * action_[x])) return false;
  return true;
}

bool GModule::is_equivariant(const GModule& m, const GModule& n, const ZmMatrix& phi) {
  if (phi.rows() != n.rank() || phi.cols() != m.rank()) return false;
  for (int s : m.group().generator_indices())
    if (!(n.action(s) * phi == phi * m.action(s))) return false;
  return true;
}

ZmMatrix GModule::fixed_points() const {
  ZmMatrix stacked(modulus_, rank_, 0);
  ZmMatrix id = ZmMatrix::identity(modulus_, rank_);
  for (int s : group_.generator_indices()) stacked = hstack(stacked, action_[s].transpose() - id);
  if (stacked.cols() == 0) return id;
  return kernel(stacked);
}

GModule mu_tensor(int j, const TwistCharacter& chi) {
  std::vector<ZmMatrix> act;
  for (int g = 0; g < static_cast<int>(chi.group().order()); ++g)
    act.push_back(ZmMatrix::from_rows(chi.modulus(), {{chi.power(g, j)}}));
  return GModule(chi.group(), chi.modulus(), std::move(act));
}

GModule direct_sum(const GModule& a, const GModule& b) {
  require_same(a, b, "direct_sum");
  std::vector<ZmMatrix> act;
  std::size_t r = a.rank() + b.rank();
  for (int g = 0; g < static_cast<int>(a.group().order()); ++g) {
    ZmMatrix x(a.modulus(), r, r);
    for (std::size_t i = 0; i < a.rank(); ++i)
      for (std::size_t k = 0; k < a.rank(); ++k) x.set(i, k, a.action(g)(i, k));
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t k = 0; k < b.rank(); ++k) x.set(a.rank() + i, a.rank() + k, b.action(g)(i, k));
    act.push_back(std::move(x));
  }
  return GModule(a.group(), a.modulus(), std::move(act));
}

GModule tensor(const GModule& a, const GModule& b) {
  require_same(a, b, "tensor");
  std::vector<ZmMatrix> act;
  for (int g = 0; g < static_cast<int>(a.group().order()); ++g) act.push_back(kron(a.action(g), b.action(g)));
  return GModule(a.group(), a.modulus(), std::move(act));
}

GModule hom_module(const GModule& m, const GModule& n) {
  require_same(m, n, "hom_module");
  std::vector<ZmMatrix> act;
  const FiniteGroup& g = m.group();
  for (int x = 0; x < static_cast<int>(g.order()); ++x)
    act.push_back(kron(n.action(x), m.action(g.inv(x)).transpose()));
  return GModule(g, m.modulus(), std::move(act));
}

GModule dual(const GModule& m) {
  std::vector<ZmMatrix> act;
  const FiniteGroup& g = m.group();
  for (int x = 0; x < static_cast<int>(g.order()); ++x) act.push_back(m.action(g.inv(x)).transpose());
  return GModule(g, m.modulus(), std::move(act));
}

GModule restrict_module(const GModule& m, const SubgroupHandle& h) {
  if (!(h.group() == m.group())) throw MismatchError("restrict: subgroup of a different group");
  std::vector<ZmMatrix> act;
  for (int e : h.elements()) act.push_back(m.action(e));
  return GModule(h.as_group(), m.modulus(), std::move(act));
}

GModule induce_module(const GModule& m, const SubgroupHandle& h) {
  if (!(m.group() == h.as_group())) throw MismatchError("induce: module is not over the given subgroup");
  const FiniteGroup& g = h.group();
  CosetTable t = left_cosets(h);
  std::size_t n = t.representatives.size(), r = m.rank();
  std::vector<ZmMatrix> act;
  for (int x = 0; x < static_cast<int>(g.order()); ++x) {
    ZmMatrix a(m.modulus(), n * r, n * r);
    for (std::size_t i = 0; i < n; ++i) {
      int y = g.mul(x, t.representatives[i]);
      std::size_t j = static_cast<std::size_t>(t.coset_of[y]);
      int hj = g.mul(g.inv(t.representatives[j]), y);
      const ZmMatrix& b = m.action(subgroup_index(h, hj));
      for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q < r; ++q) a.set(j * r + p, i * r + q, b(p, q));
    }
    act.push_back(std::move(a));
  }
  return GModule(g, m.modulus(), std::move(act));
}

GModule inflate_module(const GModule& m, const GroupHom& q) {
  if (!(q.target() == m.group())) throw MismatchError("inflate: module is not over the quotient");
  std::vector<ZmMatrix> act;
  for (int g = 0; g < static_cast<int>(q.source().order()); ++g) act.push_back(m.action(q(g)));
  return GModule(q.source(), m.modulus(), std::move(act));
}

GModule reduce_module(const GModule& m, Residue n) {
  if (n < 2 || m.modulus() % n != 0) throw DomainError("reduction modulus must divide m");
  std::vector<ZmMatrix> act;
  for (const auto& a : m.actions()) act.push_back(a.reduce_to(n));
  return GModule(m.group(), n, std::move(act));
}

std::vector<ZmMatrix> equivariant_maps(const GModule& m, const GModule& n) {
  GModule h = hom_module(m, n);
  ZmMatrix fixed = h.fixed_points();
  std::vector<ZmMatrix> out;
  for (std::size_t i = 0; i < fixed.rows(); ++i) {
    ZmMatrix phi(m.modulus(), n.rank(), m.rank());
    for (std::size_t a = 0; a < n.rank(); ++a)
      for (std::size_t b = 0; b < m.rank(); ++b) phi.set(a, b, fixed(i, a * m.rank() + b));
    out.push_back(std::move(phi));
  }
  return out;
}

// ---------------------------------------------------------------- bar complex

std::size_t cochain_dimension(const GModule& m, int n) {
  return ipow(m.group().order() - 1, n) * m.rank();
}

ZmMatrix bar_differential(const GModule& m, int n, const CohomologyOptions& opt) {
  if (n < 0) throw DomainError("negative cochain degree");
  if (n > opt.degree_cap)
    throw BudgetError("cochain degree " + std::to_string(n) + " exceeds the degree cap " +
                      std::to_string(opt.degree_cap));
  const FiniteGroup& g = m.group();
  std::size_t base = g.order() - 1, r = m.rank();
  std::size_t rows = cochain_dimension(m, n), cols = cochain_dimension(m, n + 1);
  double mb = static_cast<double>(rows) * static_cast<double>(cols) * sizeof(Residue) / (1024.0 * 1024.0);
  if (mb > static_cast<double>(opt.budget_mb))
    throw BudgetError("bar differential C^" + std::to_string(n) + " -> C^" + std::to_string(n + 1) + " is " +
                      std::to_string(rows) + " x " + std::to_string(cols) + " (" + std::to_string(mb) +
                      " MB), over the " + std::to_string(opt.budget_mb) + " MB budget");
  Residue mod = m.modulus();
  ZmMatrix d(mod, rows, cols);
  std::size_t tuples = ipow(base, n + 1);
  std::vector<int> tau(n > 0 ? n : 1);
  for (std::size_t s = 0; s < tuples; ++s) {
    std::vector<int> sigma = decode_tuple(s, n + 1, base);
    // g_1 . f(g_2, ..., g_{n+1})
    std::size_t t0 = encode_tuple(sigma.data() + 1, n, base);
    const ZmMatrix& a = m.action(sigma[0]);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t l = 0; l < r; ++l)
        if (a(l, k)) d.add_to(t0 * r + k, s * r + l, a(l, k));
    // (-1)^i f(..., g_i g_{i+1}, ...)
    for (int i = 1; i <= n; ++i) {
      int prod = g.mul(sigma[i - 1], sigma[i]);
      if (prod == g.identity()) continue;
      for (int k = 0, p = 0; k <= n; ++k) {
        if (k == i - 1) {
          tau[p++] = prod;
          ++k;
        } else {
          tau[p++] = sigma[k];
        }
      }
      std::size_t ti = encode_tuple(tau.data(), n, base);
      Residue sign = (i % 2) ? mod - 1 : 1;
      for (std::size_t k = 0; k < r; ++k) d.add_to(ti * r + k, s * r + k, sign);
    }
    // (-1)^{n+1} f(g_1, ..., g_n)
    std::size_t tl = encode_tuple(sigma.data(), n, base);
    Residue sign = ((n + 1) % 2) ? mod - 1 : 1;
    for (std::size_t k = 0; k < r; ++k) d.add_to(tl * r + k, s * r + k, sign);
  }
  return d;
}

ZmVector evaluate_cochain(const GModule& m, int n, std::span<const Residue> cochain,
                          const std::vector<int>& tuple) {
  if (static_cast<int>(tuple.size()) != n) throw MismatchError("tuple length differs from degree");
  std::size_t r = m.rank();
  ZmVector out(r, 0);
  for (int x : tuple)
    if (x == m.group().identity()) return out;
  std::size_t t = encode_tuple(tuple.data(), n, m.group().order() - 1);
  for (std::size_t k = 0; k < r; ++k) out[k] = cochain[t * r + k];
  return out;
}

bool CohomologyGroup::is_cocycle(std::span<const Residue> cochain) const {
  ZmVector v = vec_mul(cochain, differential);
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

CohomologyGroup cohomology(const GModule& m, int n, const CohomologyOptions& opt) {
  CohomologyGroup c;
  c.degree = n;
  c.coefficients = m;
  Residue mod = m.modulus();
  std::size_t dim = cochain_dimension(m, n);
  c.differential = bar_differential(m, n, opt);
  c.cocycles = kernel(c.differential);
  if (c.cocycles.rows() == 0) c.cocycles = ZmMatrix(mod, 0, dim);
  c.coboundaries = n == 0 ? ZmMatrix(mod, 0, dim) : howell_form(bar_differential(m, n - 1, opt));
  if (c.coboundaries.rows() == 0) c.coboundaries = ZmMatrix(mod, 0, dim);
  c.presentation = subquotient(c.cocycles, c.coboundaries);
  return c;
}

ZmVector apply_to_cochain(const ZmMatrix& phi, std::span<const Residue> f) {
  std::size_t rm = phi.cols(), rn = phi.rows();
  if (rm == 0) return {};
  std::size_t tuples = f.size() / rm;
  Residue mod = phi.modulus();
  ZmVector out(tuples * rn, 0);
  for (std::size_t t = 0; t < tuples; ++t)
    for (std::size_t a = 0; a < rn; ++a) {
      Residue s = 0;
      for (std::size_t b = 0; b < rm; ++b) s = (s + phi(a, b) * f[t * rm + b]) % mod;
      out[t * rn + a] = s;
    }
  return out;
}

ZmMatrix induced_map(const CohomologyGroup& src, const CohomologyGroup& dst, const ZmMatrix& phi) {
  if (src.degree != dst.degree) throw MismatchError("induced_map: degree mismatch");
  std::size_t k = dst.invariant_factors().size();
  ZmMatrix out(src.coefficients.modulus(), 0, k);
  const ZmMatrix& reps = src.representatives();
  for (std::size_t i = 0; i < reps.rows(); ++i) out.append_row(dst.class_of(apply_to_cochain(phi, reps.row(i))));
  return out;
}

ZmVector cup_cochains(const GModule& m, int p, std::span<const Residue> f, const GModule& n, int q,
                      std::span<const Residue> h) {
  require_same(m, n, "cup");
  const FiniteGroup& g = m.group();
  std::size_t base = g.order() - 1, rm = m.rank(), rn = n.rank(), r = rm * rn;
  std::size_t tuples = ipow(base, p + q), back = ipow(base, q);
  Residue mod = m.modulus();
  ZmVector out(tuples * r, 0);
  for (std::size_t s = 0; s < tuples; ++s) {
    std::vector<int> sigma = decode_tuple(s, p + q, base);
    std::size_t tf = s / back, th = s % back;
    int prefix = g.identity();
    for (int i = 0; i < p; ++i) prefix = g.mul(prefix, sigma[i]);
    ZmVector hv = n.act(prefix, h.subspan(th * rn, rn));
    for (std::size_t k = 0; k < rm; ++k) {
      Residue fk = f[tf * rm + k];
      if (!fk) continue;
      for (std::size_t l = 0; l < rn; ++l) out[s * r + k * rn + l] = (out[s * r + k * rn + l] + fk * hv[l]) % mod;
    }
  }
  return out;
}

ZmVector cup(const CohomologyGroup& a, std::span<const Residue> x, const CohomologyGroup& b,
             std::span<const Residue> y, const CohomologyGroup& target) {
  if (target.degree != a.degree + b.degree) throw MismatchError("cup: target degree mismatch");
  ZmVector fa = a.representative(x), fb = b.representative(y);
  return target.class_of(cup_cochains(a.coefficients, a.degree, fa, b.coefficients, b.degree, fb));
}

ZmVector inflate_cochain(const GModule& m, const GroupHom& q, int n, std::span<const Residue> f) {
  if (!(q.target() == m.group())) throw MismatchError("inflate: cochain is not over the quotient");
  std::size_t gb = q.source().order() - 1, qb = q.target().order() - 1, r = m.rank();
  std::size_t tuples = ipow(gb, n);
  ZmVector out(tuples * r, 0);
  std::vector<int> img(n);
  for (std::size_t s = 0; s < tuples; ++s) {
    std::vector<int> sigma = decode_tuple(s, n, gb);
    bool zero = false;
    for (int i = 0; i < n; ++i) {
      img[i] = q(sigma[i]);
      if (img[i] == q.target().identity()) zero = true;
    }
    if (zero) continue;
    std::size_t t = encode_tuple(img.data(), n, qb);
    for (std::size_t k = 0; k < r; ++k) out[s * r + k] = f[t * r + k];
  }
  return out;
}

ZmVector restrict_cochain(const GModule& m, const SubgroupHandle& h, int n, std::span<const Residue> f) {
  if (!(h.group() == m.group())) throw MismatchError("restrict: subgroup of a different group");
  std::size_t hb = h.order() - 1, gb = m.group().order() - 1, r = m.rank();
  std::size_t tuples = ipow(hb, n);
  ZmVector out(tuples * r, 0);
  std::vector<int> amb(n);
  for (std::size_t s = 0; s < tuples; ++s) {
    std::vector<int> sigma = decode_tuple(s, n, hb);
    for (int i = 0; i < n; ++i) amb[i] = h.elements()[sigma[i]];
    std::size_t t = encode_tuple(amb.data(), n, gb);
    for (std::size_t k = 0; k < r; ++k) out[s * r + k] = f[t * r + k];
  }
  return out;
}

Order image_order(const CohomologyGroup& dst, const ZmMatrix& rows_in_dst) {
  ZmMatrix amb(dst.coefficients.modulus(), 0, dst.cocycles.cols());
  for (std::size_t i = 0; i < rows_in_dst.rows(); ++i) amb.append_row(dst.representative(rows_in_dst.row(i)));
  return span_order(vstack(amb, dst.coboundaries)) / span_order(dst.coboundaries);
}

}  // namespace atmot
