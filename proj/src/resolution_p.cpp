#include "atmot/resolution_p.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "atmot/errors.hpp"

namespace atmot {

namespace {

const std::vector<Residue> kNoFactors;

ZmMatrix rows_or_empty(Residue m, std::size_t cols) { return ZmMatrix(m, 0, cols); }

/// The x with x a in rowspan(b).
ZmMatrix preimage(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.rows() == 0) return a;
  if (a.cols() == 0) return ZmMatrix::identity(a.modulus(), a.rows());
  if (b.rows() == 0) return kernel(a);
  ZmMatrix k = kernel(vstack(a, b));
  return k.block(0, 0, k.rows(), a.rows());
}

/// (cycles + rel) / (boundaries + rel) inside (Z/m)^r.
std::vector<Residue> homology(Residue m, std::size_t r, const ZmMatrix& incoming, const ZmMatrix& outgoing,
                              const ZmMatrix& rel_here, const ZmMatrix& rel_next) {
  if (r == 0) return {};
  ZmMatrix cyc = preimage(outgoing, rel_next);
  ZmMatrix gens = vstack(cyc, rel_here), bounds = vstack(incoming, rel_here);
  if (gens.rows() == 0) return {};
  if (bounds.rows() == 0) bounds = rows_or_empty(m, r);
  return subquotient(gens, bounds).invariant_factors();
}

bool all_zero(std::span<const Residue> v) {
  return std::all_of(v.begin(), v.end(), [](Residue t) { return t == 0; });
}

PCheck named(std::string name) {
  PCheck c;
  c.name = std::move(name);
  return c;
}

Residue sign(int e, Residue m) { return e % 2 ? m - 1 : 1; }

using Acc = std::map<Symbol, Residue>;

PElement build(Residue m, int i, int j, const Acc& acc) {
  PElement x = PElement::zero(m, i, j);
  for (const auto& [s, c] : acc)
    if (c % m) x.terms.emplace_back(s, c % m);
  return x;
}

void accumulate(Acc& acc, const PElement& x, Residue c) {
  for (const auto& [s, k] : x.terms) {
    Residue& slot = acc[s];
    slot = (slot + c * k) % x.modulus;
  }
}

PElement single(Residue m, int i, int j, Symbol s) {
  PElement x = PElement::zero(m, i, j);
  x.terms.emplace_back(std::move(s), 1);
  return x;
}

std::string vec_string(const ZmVector& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
  return s + "]";
}

}  // namespace

// ---------------------------------------------------------------- complexes

ModuleComplex::ModuleComplex(Residue modulus, int lowest, std::vector<std::vector<Residue>> modules,
                             std::vector<ZmMatrix> differentials)
    : modulus_(modulus), lowest_(lowest), modules_(std::move(modules)), differentials_(std::move(differentials)) {
  if (modulus_ < 2) throw DomainError("complex: modulus must be at least 2");
  for (const auto& f : modules_)
    for (Residue x : f)
      if (x < 1 || modulus_ % x) throw DomainError("complex: factor " + std::to_string(x) + " does not divide m");
  std::size_t want = modules_.empty() ? 0 : modules_.size() - 1;
  if (differentials_.size() != want) throw MismatchError("complex: need one differential between consecutive terms");
  for (std::size_t k = 0; k < differentials_.size(); ++k) {
    const ZmMatrix& dk = differentials_[k];
    if (dk.modulus() != modulus_ || dk.rows() != modules_[k].size() || dk.cols() != modules_[k + 1].size())
      throw MismatchError("complex: differential " + std::to_string(k) + " has the wrong shape");
  }
  for (int j = lowest_; j <= highest(); ++j)
    for (std::size_t i = 0; i < rank(j); ++i) {
      ZmVector e(rank(j), 0);
      e[i] = factors(j)[i] % modulus_;
      // f_i e_i is zero in A^j, so its image must vanish too
      if (rank(j + 1) && !all_zero(normalize(j + 1, vec_mul(e, differential(j)))))
        throw DomainError("complex: differential out of degree " + std::to_string(j) + " is not well defined");
      e[i] = 1;
      if (!all_zero(d(j + 1, d(j, e))))
        throw DomainError("complex: d^2 != 0 at degree " + std::to_string(j));
    }
}

ModuleComplex ModuleComplex::zero(Residue modulus) { return ModuleComplex(modulus, 0, {}, {}); }

ModuleComplex ModuleComplex::concentrated(Residue modulus, std::vector<Residue> factors, int degree) {
  return ModuleComplex(modulus, degree, {std::move(factors)}, {});
}

ModuleComplex ModuleComplex::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "complex must be an object");
  if (!j.contains("modulus") || !j["modulus"].is_number_integer() || j["modulus"].get<long long>() < 2)
    throw SchemaError("/modulus", "integer >= 2 required");
  Residue m = j["modulus"].get<Residue>();
  int lo = 0;
  if (j.contains("lowest_degree")) {
    if (!j["lowest_degree"].is_number_integer()) throw SchemaError("/lowest_degree", "integer required");
    lo = j["lowest_degree"].get<int>();
  }
  if (!j.contains("modules") || !j["modules"].is_array()) throw SchemaError("/modules", "array required");
  std::vector<std::vector<Residue>> mods;
  for (std::size_t k = 0; k < j["modules"].size(); ++k) {
    const auto& f = j["modules"][k];
    std::string path = "/modules/" + std::to_string(k);
    if (!f.is_array()) throw SchemaError(path, "array of invariant factors required");
    std::vector<Residue> fs;
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (!f[t].is_number_integer()) throw SchemaError(path + "/" + std::to_string(t), "integer required");
      long long x = f[t].get<long long>();
      if (x < 1 || m % x) throw SchemaError(path + "/" + std::to_string(t), "factor must divide the modulus");
      fs.push_back(static_cast<Residue>(x));
    }
    mods.push_back(fs);
  }
  std::vector<ZmMatrix> ds;
  nlohmann::json dj = j.value("differentials", nlohmann::json::array());
  if (!dj.is_array()) throw SchemaError("/differentials", "array required");
  if (dj.size() != (mods.empty() ? 0 : mods.size() - 1))
    throw SchemaError("/differentials", "need exactly one matrix between consecutive modules");
  for (std::size_t k = 0; k < dj.size(); ++k) {
    std::string path = "/differentials/" + std::to_string(k);
    std::size_t r = mods[k].size(), c = mods[k + 1].size();
    if (!dj[k].is_array() || dj[k].size() != r) throw SchemaError(path, "expected " + std::to_string(r) + " rows");
    ZmMatrix mat(m, r, c);
    for (std::size_t a = 0; a < r; ++a) {
      const auto& row = dj[k][a];
      if (!row.is_array() || row.size() != c)
        throw SchemaError(path + "/" + std::to_string(a), "expected " + std::to_string(c) + " entries");
      for (std::size_t b = 0; b < c; ++b) {
        if (!row[b].is_number_integer()) throw SchemaError(path + "/" + std::to_string(a) + "/" + std::to_string(b), "integer required");
        mat.set(a, b, mod_reduce(row[b].get<Residue>(), m));
      }
    }
    ds.push_back(mat);
  }
  return ModuleComplex(m, lo, mods, ds);
}

nlohmann::json ModuleComplex::to_json() const {
  nlohmann::json j{{"modulus", modulus_}, {"lowest_degree", lowest_}, {"modules", modules_}};
  j["differentials"] = nlohmann::json::array();
  for (const auto& d : differentials_) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < d.rows(); ++r) rows.push_back(d.row_vector(r));
    j["differentials"].push_back(rows);
  }
  return j;
}

bool ModuleComplex::is_zero() const {
  for (int j = lowest_; j <= highest(); ++j)
    if (size(j) > 1) return false;
  return true;
}

const std::vector<Residue>& ModuleComplex::factors(int j) const {
  if (j < lowest_ || j > highest()) return kNoFactors;
  return modules_[static_cast<std::size_t>(j - lowest_)];
}

std::size_t ModuleComplex::size(int j) const {
  std::size_t n = 1;
  for (Residue f : factors(j)) n *= static_cast<std::size_t>(f);
  return n;
}

ZmVector ModuleComplex::normalize(int j, std::span<const Residue> a) const {
  const auto& f = factors(j);
  if (a.size() != f.size()) throw MismatchError("complex: element of the wrong length in degree " + std::to_string(j));
  ZmVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mod_reduce(a[i], f[i]);
  return out;
}

ZmMatrix ModuleComplex::differential(int j) const {
  if (j < lowest_ || j >= highest()) return ZmMatrix(modulus_, rank(j), rank(j + 1));
  return differentials_[static_cast<std::size_t>(j - lowest_)];
}

ZmVector ModuleComplex::d(int j, std::span<const Residue> a) const {
  if (rank(j + 1) == 0) return {};
  ZmVector x = normalize(j, a);
  if (x.empty()) return ZmVector(rank(j + 1), 0);
  return normalize(j + 1, vec_mul(x, differential(j)));
}

std::vector<ZmVector> ModuleComplex::elements(int j) const {
  const auto& f = factors(j);
  std::vector<ZmVector> out;
  ZmVector x(f.size(), 0);
  for (;;) {
    out.push_back(x);
    std::size_t k = f.size();
    while (k > 0) {
      --k;
      if (++x[k] < f[k]) break;
      x[k] = 0;
      if (k == 0) return out;
    }
    if (f.empty()) return out;
  }
}

ZmMatrix ModuleComplex::relations(int j) const {
  const auto& f = factors(j);
  ZmMatrix rel(modulus_, 0, f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != modulus_) {
      ZmVector r(f.size(), 0);
      r[i] = f[i];
      rel.append_row(r);
    }
  return rel;
}

std::vector<Residue> ModuleComplex::cohomology(int n) const {
  return homology(modulus_, rank(n), differential(n - 1), differential(n), relations(n), relations(n + 1));
}

ModuleComplex tensor(const ModuleComplex& a, const ModuleComplex& b) {
  if (a.modulus() != b.modulus()) throw MismatchError("tensor: moduli differ");
  Residue m = a.modulus();
  int lo = a.lowest() + b.lowest(), hi = a.highest() + b.highest();
  if (a.highest() < a.lowest() || b.highest() < b.lowest()) return ModuleComplex::zero(m);
  std::vector<std::vector<Residue>> mods;
  for (int n = lo; n <= hi; ++n) {
    std::vector<Residue> f;
    for (int j = a.lowest(); j <= a.highest(); ++j)
      for (Residue x : a.factors(j))
        for (Residue y : b.factors(n - j)) f.push_back(gcd_residue(x, y));
    mods.push_back(f);
  }
  std::vector<ZmMatrix> ds;
  for (int n = lo; n < hi; ++n) {
    ZmMatrix dn(m, mods[static_cast<std::size_t>(n - lo)].size(), mods[static_cast<std::size_t>(n + 1 - lo)].size());
    for (int j = a.lowest(); j <= a.highest(); ++j) {
      int k = n - j;
      ZmMatrix da = a.differential(j), db = b.differential(k);
      for (std::size_t i = 0; i < a.rank(j); ++i)
        for (std::size_t l = 0; l < b.rank(k); ++l) {
          std::size_t src = tensor_index(a, b, j, i, k, l);
          for (std::size_t i2 = 0; i2 < a.rank(j + 1); ++i2)
            if (da(i, i2)) dn.add_to(src, tensor_index(a, b, j + 1, i2, k, l), da(i, i2));
          for (std::size_t l2 = 0; l2 < b.rank(k + 1); ++l2)
            if (db(l, l2)) dn.add_to(src, tensor_index(a, b, j, i, k + 1, l2), sign(j, m) * db(l, l2));
        }
    }
    ds.push_back(dn);
  }
  return ModuleComplex(m, lo, mods, ds);
}

std::size_t tensor_index(const ModuleComplex& a, const ModuleComplex& b, int j, std::size_t i, int k, std::size_t l) {
  int n = j + k;
  std::size_t off = 0;
  for (int t = a.lowest(); t < j; ++t) off += a.rank(t) * b.rank(n - t);
  return off + i * b.rank(k) + l;
}

ZmVector tensor_element(const ModuleComplex& a, int j, std::span<const Residue> x, const ModuleComplex& b, int k,
                        std::span<const Residue> y) {
  ModuleComplex ab = tensor(a, b);
  ZmVector out(ab.rank(j + k), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t l = 0; l < y.size(); ++l) {
      std::size_t t = tensor_index(a, b, j, i, k, l);
      out[t] = (out[t] + x[i] * y[l]) % a.modulus();
    }
  return ab.normalize(j + k, out);
}

ZmVector ChainMap::apply(int j, std::span<const Residue> a) const {
  auto it = matrices.find(j);
  if (it == matrices.end()) return ZmVector(target.rank(j), 0);
  return target.normalize(j, vec_mul(source.normalize(j, a), it->second));
}

ChainMap left_unitor(const ModuleComplex& a) {
  ModuleComplex k = ModuleComplex::concentrated(a.modulus(), {a.modulus()}, 0);
  ChainMap f{tensor(k, a), a, {}};
  for (int j = a.lowest(); j <= a.highest(); ++j) {
    ZmMatrix mat(a.modulus(), a.rank(j), a.rank(j));
    for (std::size_t l = 0; l < a.rank(j); ++l) mat.set(tensor_index(k, a, 0, 0, j, l), l, 1);
    f.matrices[j] = mat;
  }
  return f;
}

ChainMap associator(const ModuleComplex& a, const ModuleComplex& b, const ModuleComplex& c) {
  ModuleComplex ab = tensor(a, b), bc = tensor(b, c);
  ChainMap f{tensor(ab, c), tensor(a, bc), {}};
  for (int n = f.source.lowest(); n <= f.source.highest(); ++n) {
    ZmMatrix mat(a.modulus(), f.source.rank(n), f.target.rank(n));
    for (int j = a.lowest(); j <= a.highest(); ++j)
      for (int k = b.lowest(); k <= b.highest(); ++k) {
        int l = n - j - k;
        for (std::size_t i = 0; i < a.rank(j); ++i)
          for (std::size_t t = 0; t < b.rank(k); ++t)
            for (std::size_t u = 0; u < c.rank(l); ++u)
              mat.set(tensor_index(ab, c, j + k, tensor_index(a, b, j, i, k, t), l, u),
                      tensor_index(a, bc, j, i, k + l, tensor_index(b, c, k, t, l, u)), 1);
      }
    f.matrices[n] = mat;
  }
  return f;
}

ChainMap symmetry(const ModuleComplex& a, const ModuleComplex& b) {
  ChainMap f{tensor(a, b), tensor(b, a), {}};
  Residue m = a.modulus();
  for (int n = f.source.lowest(); n <= f.source.highest(); ++n) {
    ZmMatrix mat(m, f.source.rank(n), f.target.rank(n));
    for (int j = a.lowest(); j <= a.highest(); ++j) {
      int k = n - j;
      for (std::size_t i = 0; i < a.rank(j); ++i)
        for (std::size_t l = 0; l < b.rank(k); ++l)
          mat.set(tensor_index(a, b, j, i, k, l), tensor_index(b, a, k, l, j, i), sign(j * k, m));
    }
    f.matrices[n] = mat;
  }
  return f;
}

// ---------------------------------------------------------------- elements

std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
  if (a.angle != b.angle) return a.angle <=> b.angle;
  if (!a.angle) return a.value <=> b.value;
  return *a.inner <=> *b.inner;
}

std::strong_ordering operator<=>(const PElement& a, const PElement& b) {
  if (auto c = a.modulus <=> b.modulus; c != 0) return c;
  // all zero elements are equal, whatever their bidegree
  if (a.is_zero() || b.is_zero()) return b.is_zero() <=> a.is_zero();
  if (auto c = a.res_degree <=> b.res_degree; c != 0) return c;
  if (auto c = a.degree <=> b.degree; c != 0) return c;
  std::size_t n = std::min(a.terms.size(), b.terms.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (auto c = a.terms[k].first <=> b.terms[k].first; c != 0) return c;
    if (auto c = a.terms[k].second <=> b.terms[k].second; c != 0) return c;
  }
  return a.terms.size() <=> b.terms.size();
}

int PElement::angle_depth() const {
  int d = 0;
  for (const auto& [s, c] : terms)
    if (s.angle) d = std::max(d, 1 + s.inner->angle_depth());
  return d;
}

std::string PElement::to_string() const {
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& [s, c] : terms) {
    if (!out.empty()) out += " + ";
    if (c != 1) out += std::to_string(c) + "*";
    out += s.angle ? "<" + s.inner->to_string() + ">" : vec_string(s.value);
  }
  return out;
}

PElement operator+(const PElement& a, const PElement& b) {
  if (a.modulus != b.modulus) throw MismatchError("P: moduli differ");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.res_degree != b.res_degree || a.degree != b.degree) throw MismatchError("P: adding elements of different bidegree");
  Acc acc;
  accumulate(acc, a, 1);
  accumulate(acc, b, 1);
  return build(a.modulus, a.res_degree, a.degree, acc);
}

PElement scale(const PElement& a, Residue c) {
  Acc acc;
  accumulate(acc, a, mod_reduce(c, a.modulus));
  return build(a.modulus, a.res_degree, a.degree, acc);
}

PElement operator-(const PElement& a, const PElement& b) { return a + scale(b, b.modulus - 1); }

PElement section(const ModuleComplex& a, int j, std::span<const Residue> x) {
  ZmVector v = a.normalize(j, x);
  if (std::all_of(v.begin(), v.end(), [](Residue t) { return t == 0; })) return PElement::zero(a.modulus(), 0, j);
  return single(a.modulus(), 0, j, Symbol{false, v, nullptr});
}

ZmVector projection(const ModuleComplex& a, const PElement& x) {
  ZmVector out(a.rank(x.degree), 0);
  if (x.res_degree != 0) return out;
  for (const auto& [s, c] : x.terms)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * s.value[k];
  return a.normalize(x.degree, out);
}

PElement angle(const ModuleComplex& a, const PElement& p) {
  if (p.is_zero()) return PElement::zero(a.modulus(), p.res_degree + 1, p.degree);
  if (p.res_degree == 0) {
    ZmVector v = projection(a, p);
    if (!std::all_of(v.begin(), v.end(), [](Residue t) { return t == 0; }))
      throw DomainError("P: <p> needs pi(p) = 0, got p = " + p.to_string());
  } else if (!boundary(p).is_zero()) {
    throw DomainError("P: <p> needs del(p) = 0, got p = " + p.to_string());
  }
  return single(a.modulus(), p.res_degree + 1, p.degree, Symbol{true, {}, std::make_shared<const PElement>(p)});
}

PElement boundary(const PElement& x) {
  Acc acc;
  for (const auto& [s, c] : x.terms)
    if (s.angle) accumulate(acc, *s.inner, c);
  return build(x.modulus, x.res_degree - 1, x.degree, acc);
}

PElement differential(const ModuleComplex& a, const PElement& x) {
  Acc acc;
  for (const auto& [s, c] : x.terms) {
    if (s.angle) {
      accumulate(acc, angle(a, scale(differential(a, *s.inner), a.modulus() - 1)), c);
    } else {
      accumulate(acc, section(a, x.degree + 1, a.d(x.degree, s.value)), c);
    }
  }
  return build(x.modulus, x.res_degree, x.degree + 1, acc);
}

PElement apply_P(const ChainMap& f, const PElement& x) {
  Acc acc;
  for (const auto& [s, c] : x.terms) {
    if (s.angle)
      accumulate(acc, angle(f.target, apply_P(f, *s.inner)), c);
    else
      accumulate(acc, section(f.target, x.degree, f.apply(x.degree, s.value)), c);
  }
  return build(x.modulus, x.res_degree, x.degree, acc);
}

// ---------------------------------------------------------------- shuffle product

ShuffleProduct::ShuffleProduct(ModuleComplex a, ModuleComplex b, int max_depth)
    : a_(std::move(a)), b_(std::move(b)), ab_(tensor(a_, b_)), max_depth_(max_depth) {}

PElement ShuffleProduct::operator()(const PElement& x, const PElement& y) const {
  int i = x.res_degree + y.res_degree, j = x.degree + y.degree;
  if (i > max_depth_)
    throw DomainError("shuffle: product lands in resolution degree " + std::to_string(i) + " beyond depth " +
                      std::to_string(max_depth_) + "; rebuild with a larger depth");
  Acc acc;
  for (const auto& [s, c] : x.terms)
    for (const auto& [t, e] : y.terms)
      accumulate(acc, symbols(s, x.res_degree, x.degree, t, y.res_degree, y.degree), c * e % ab_.modulus());
  return build(ab_.modulus(), i, j, acc);
}

PElement ShuffleProduct::symbols(const Symbol& s, int i, int j, const Symbol& t, int k, int l) const {
  Residue m = ab_.modulus();
  if (!s.angle && !t.angle) return section(ab_, j + l, tensor_element(a_, j, s.value, b_, l, t.value));
  PElement ps = single(m, i, j, s), qt = single(m, k, l, t);
  if (s.angle && !t.angle) return angle(ab_, (*this)(*s.inner, qt));
  if (!s.angle) return angle(ab_, scale((*this)(ps, *t.inner), sign(j, m)));
  const PElement& p = *s.inner;
  PElement r = (*this)(p, qt) - scale((*this)(ps, *t.inner), sign(p.total_degree(), m));
  return angle(ab_, r);
}

// ---------------------------------------------------------------- truncated resolution

TruncatedResolution TruncatedResolution::build(const ModuleComplex& a, int depth, const ResolutionOptions& opt) {
  if (depth < 1) throw DomainError("resolution: depth must be at least 1");
  TruncatedResolution r;
  r.a_ = a;
  r.depth_ = depth;
  Residue m = a.modulus();
  for (int j = a.lowest(); j <= a.highest(); ++j) {
    auto& g0 = r.gens_[{0, j}];
    for (const auto& x : a.elements(j))
      if (std::any_of(x.begin(), x.end(), [](Residue t) { return t != 0; })) g0.push_back(Symbol{false, x, nullptr});
    for (std::size_t k = 0; k < g0.size(); ++k) r.index_[{0, j}][g0[k]] = k;
    for (int i = 1; i < depth; ++i) {
      std::size_t rank = r.gens_[{i - 1, j}].size();
      double cand = std::pow(static_cast<double>(m), static_cast<double>(rank));
      if (cand > static_cast<double>(opt.max_candidates))
        throw BudgetError("resolution: listing P_" + std::to_string(i) + "^" + std::to_string(j) + " scans " +
                          std::to_string(m) + "^" + std::to_string(rank) + " vectors, over the budget of " +
                          std::to_string(opt.max_candidates));
      // test matrix: projection for i = 1, del otherwise
      ZmMatrix test(m, rank, a.rank(j));
      ZmMatrix rel = a.relations(j);
      if (i == 1) {
        for (std::size_t k = 0; k < rank; ++k)
          for (std::size_t c = 0; c < a.rank(j); ++c) test.set(k, c, r.gens_[{0, j}][k].value[c]);
      } else {
        test = r.boundary_matrix(i - 1, j);
        rel = rows_or_empty(m, test.cols());
      }
      std::vector<Symbol> gi;
      ZmVector v(rank, 0);
      for (;;) {
        // advance first so that zero is skipped
        std::size_t k = rank;
        bool done = true;
        while (k > 0) {
          --k;
          if (++v[k] < m) {
            done = false;
            break;
          }
          v[k] = 0;
        }
        if (done) break;
        ZmVector img = vec_mul(v, test);
        bool cycle = true;
        if (i == 1)
          img = a.normalize(j, img);
        for (Residue t : img) cycle = cycle && t == 0;
        if (cycle) gi.push_back(Symbol{true, {}, std::make_shared<const PElement>(r.element(i - 1, j, v))});
      }
      std::sort(gi.begin(), gi.end());
      for (std::size_t k = 0; k < gi.size(); ++k) r.index_[{i, j}][gi[k]] = k;
      r.gens_[{i, j}] = std::move(gi);
    }
  }
  return r;
}

const std::vector<Symbol>& TruncatedResolution::generators(int i, int j) const {
  static const std::vector<Symbol> none;
  if (i < 0 || i >= depth_) throw DomainError("resolution: P_" + std::to_string(i) + " is not materialized");
  auto it = gens_.find({i, j});
  return it == gens_.end() ? none : it->second;
}

PElement TruncatedResolution::generator(int i, int j, std::size_t k) const {
  return single(a_.modulus(), i, j, generators(i, j).at(k));
}

ZmVector TruncatedResolution::coordinates(const PElement& x) const {
  ZmVector out(generators(x.res_degree, x.degree).size(), 0);
  if (x.is_zero()) return out;
  const auto& idx = index_.at({x.res_degree, x.degree});
  for (const auto& [s, c] : x.terms) {
    auto it = idx.find(s);
    if (it == idx.end()) throw DomainError("resolution: symbol outside the materialized basis");
    out[it->second] = c;
  }
  return out;
}

PElement TruncatedResolution::element(int i, int j, std::span<const Residue> coords) const {
  const auto& g = generators(i, j);
  if (coords.size() != g.size()) throw MismatchError("resolution: coordinate vector of the wrong length");
  PElement x = PElement::zero(a_.modulus(), i, j);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (coords[k] % a_.modulus()) x.terms.emplace_back(g[k], coords[k] % a_.modulus());
  return x;
}

ZmMatrix TruncatedResolution::boundary_matrix(int i, int j) const {
  if (i < 1) throw DomainError("resolution: del starts in degree 1");
  const auto& src = generators(i, j);
  ZmMatrix out(a_.modulus(), src.size(), generators(i - 1, j).size());
  for (std::size_t k = 0; k < src.size(); ++k) {
    ZmVector c = coordinates(*src[k].inner);
    for (std::size_t t = 0; t < c.size(); ++t) out.set(k, t, c[t]);
  }
  return out;
}

ZmMatrix TruncatedResolution::differential_matrix(int i, int j) const {
  const auto& src = generators(i, j);
  ZmMatrix out(a_.modulus(), src.size(), generators(i, j + 1).size());
  if (out.cols() == 0) return out;
  for (std::size_t k = 0; k < src.size(); ++k) {
    ZmVector c = coordinates(differential(a_, generator(i, j, k)));
    for (std::size_t t = 0; t < c.size(); ++t) out.set(k, t, c[t]);
  }
  return out;
}

ZmMatrix TruncatedResolution::cycles(int i, int j) const {
  Residue m = a_.modulus();
  const auto& g = generators(i, j);
  if (i == 0) {
    ZmMatrix proj(m, g.size(), a_.rank(j));
    for (std::size_t k = 0; k < g.size(); ++k)
      for (std::size_t c = 0; c < a_.rank(j); ++c) proj.set(k, c, g[k].value[c]);
    return preimage(proj, a_.relations(j));
  }
  return preimage(boundary_matrix(i, j), rows_or_empty(m, generators(i - 1, j).size()));
}

std::vector<PElement> TruncatedResolution::top_samples(int j) const {
  std::vector<PElement> out;
  ZmMatrix z = cycles(depth_ - 1, j);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    PElement x = angle(a_, element(depth_ - 1, j, z.row(r)));
    if (!x.is_zero()) out.push_back(x);
  }
  return out;
}

int TruncatedResolution::lowest_safe_degree() const {
  if (a_.is_zero()) return std::numeric_limits<int>::min();
  return a_.highest() - depth_ + 1;
}

std::vector<Residue> TruncatedResolution::total_cohomology(int n) const {
  if (n < lowest_safe_degree())
    throw DomainError("resolution: degree " + std::to_string(n) + " is below the safe window starting at " +
                      std::to_string(lowest_safe_degree()) + " for depth " + std::to_string(depth_));
  Residue m = a_.modulus();
  // blocks of Tot^t: (i, t + i) for materialized i
  auto blocks = [&](int t) {
    std::vector<std::pair<int, std::size_t>> out;  // (i, offset)
    std::size_t off = 0;
    for (int i = 0; i < depth_; ++i) {
      out.emplace_back(i, off);
      off += generators(i, t + i).size();
    }
    out.emplace_back(-1, off);  // total rank
    return out;
  };
  auto rank_of = [&](int t) { return blocks(t).back().second; };
  auto diff = [&](int t) {
    auto src = blocks(t), dst = blocks(t + 1);
    ZmMatrix out(m, rank_of(t), rank_of(t + 1));
    for (int i = 0; i < depth_; ++i) {
      int j = t + i;
      std::size_t so = src[static_cast<std::size_t>(i)].second;
      if (generators(i, j).empty()) continue;
      if (i >= 1) {
        ZmMatrix b = boundary_matrix(i, j);
        std::size_t to = dst[static_cast<std::size_t>(i - 1)].second;
        for (std::size_t r = 0; r < b.rows(); ++r)
          for (std::size_t c = 0; c < b.cols(); ++c) out.add_to(so + r, to + c, b(r, c));
      }
      ZmMatrix d = differential_matrix(i, j);
      std::size_t to = dst[static_cast<std::size_t>(i)].second;
      for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c) out.add_to(so + r, to + c, d(r, c));
    }
    return out;
  };
  std::size_t rn = rank_of(n);
  if (rn == 0) return {};
  ZmMatrix incoming = diff(n - 1);
  // the lazy top term: del of P_depth^{n - 1 + depth} is every cycle of P_{depth-1}
  int jt = n - 1 + depth_;
  if (jt >= a_.lowest() && jt <= a_.highest()) {
    ZmMatrix z = cycles(depth_ - 1, jt);
    std::size_t to = blocks(n)[static_cast<std::size_t>(depth_ - 1)].second;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      ZmVector row(rn, 0);
      for (std::size_t c = 0; c < z.cols(); ++c) row[to + c] = z(r, c);
      incoming.append_row(row);
    }
  }
  return homology(m, rn, incoming, diff(n), rows_or_empty(m, rn), rows_or_empty(m, rank_of(n + 1)));
}

bool QuasiIsoReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.agree; });
}

nlohmann::json QuasiIsoReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back({{"degree", r.degree}, {"total", r.total}, {"complex", r.complex}, {"agree", r.agree}});
  return j;
}

QuasiIsoReport verify_quasi_iso(const TruncatedResolution& res, int lo, int hi) {
  QuasiIsoReport rep;
  for (int n = lo; n <= hi; ++n) {
    QuasiIsoReport::Row row;
    row.degree = n;
    row.total = res.total_cohomology(n);
    row.complex = res.complex().cohomology(n);
    row.agree = same_factors(row.total, row.complex);
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------- property checks

bool PCheckReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PCheck& c) { return c.informational || c.passed; });
}

nlohmann::json PCheckReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"checked", c.checked},
                           {"informational", c.informational},
                           {"detail", c.detail}});
  j["non_additivity_witness"] = witness ? *witness : nlohmann::json(nullptr);
  return j;
}

PCheckReport p_check(const ModuleComplex& a, const PCheckOptions& opt) {
  PCheckReport rep;
  TruncatedResolution res = TruncatedResolution::build(a, opt.depth, opt.resolution);
  Residue m = a.modulus();
  int lo = a.lowest(), hi = a.highest(), depth = opt.depth;

  // every materialized symbol plus sampled symbols of the lazy top term
  std::vector<PElement> sample;
  for (int j = lo; j <= hi; ++j) {
    for (int i = 0; i < depth; ++i)
      for (std::size_t k = 0; k < res.generators(i, j).size(); ++k) sample.push_back(res.generator(i, j, k));
    for (auto& x : res.top_samples(j)) sample.push_back(x);
  }
  auto fail = [](PCheck& c, const std::string& what) {
    if (c.passed) c.detail = what;
    c.passed = false;
  };

  PCheck del2 = named("del_squared"), d2 = named("d_squared"), anti = named("anticommute"), chain = named("projection_chain_map");
  for (const auto& x : sample) {
    PElement bx = boundary(x), dx = differential(a, x);
    ++del2.checked, ++d2.checked, ++anti.checked, ++chain.checked;
    if (!boundary(bx).is_zero()) fail(del2, x.to_string());
    if (!differential(a, dx).is_zero()) fail(d2, x.to_string());
    if (!(boundary(dx) + differential(a, bx)).is_zero()) fail(anti, x.to_string());
    if (x.res_degree == 0 && projection(a, dx) != a.d(x.degree, projection(a, x))) fail(chain, x.to_string());
    if (x.res_degree == 1 && !all_zero(projection(a, bx)))
      fail(chain, x.to_string());
  }
  rep.checks.insert(rep.checks.end(), {del2, d2, anti, chain});

  PCheck ps = named("section_projection");
  for (int j = lo; j <= hi; ++j)
    for (const auto& x : a.elements(j)) {
      ++ps.checked;
      PElement s = section(a, j, x);
      if (projection(a, s) != x) fail(ps, "degree " + std::to_string(j) + " element " + vec_string(x));
      if (std::all_of(x.begin(), x.end(), [](Residue t) { return t == 0; }) && !s.is_zero()) fail(ps, "s(0) != 0");
    }
  rep.checks.push_back(ps);

  PCheck rows = named("exact_rows");
  for (int j = lo; j <= hi; ++j) {
    // pi is onto and, below the lazy top, ker del_i = im del_{i+1}
    ZmMatrix proj(m, res.generators(0, j).size(), a.rank(j));
    for (std::size_t k = 0; k < proj.rows(); ++k)
      for (std::size_t c = 0; c < a.rank(j); ++c) proj.set(k, c, res.generators(0, j)[k].value[c]);
    ++rows.checked;
    if (a.rank(j) && !row_span_contains(vstack(proj, a.relations(j)), ZmMatrix::identity(m, a.rank(j))))
      fail(rows, "pi not onto in degree " + std::to_string(j));
    for (int i = 0; i + 1 < depth; ++i) {
      ++rows.checked;
      ZmMatrix z = res.cycles(i, j), b = res.boundary_matrix(i + 1, j);
      if (z.rows() + b.rows() && !same_row_span(z.rows() ? z : rows_or_empty(m, b.cols()), b.rows() ? b : rows_or_empty(m, z.cols())))
        fail(rows, "row " + std::to_string(j) + " not exact at P_" + std::to_string(i));
    }
  }
  rows.detail = rows.passed ? "exactness at P_" + std::to_string(depth - 1) + " holds by construction of the lazy top term"
                            : rows.detail;
  rep.checks.push_back(rows);

  PCheck qi = named("quasi_iso");
  int qlo = std::max(res.lowest_safe_degree(), lo - depth), qhi = std::max(hi, qlo);
  QuasiIsoReport q = verify_quasi_iso(res, qlo, qhi);
  qi.checked = q.rows.size();
  qi.passed = q.passed();
  qi.detail = "degrees " + std::to_string(qlo) + ".." + std::to_string(qhi);
  rep.checks.push_back(qi);

  ShuffleProduct prod(a, a, 2 * depth);
  const ModuleComplex& aa = prod.target();
  PCheck br = named("bracket_product");
  for (int j = lo; j <= hi; ++j)
    for (int l = lo; l <= hi; ++l)
      for (const auto& x : a.elements(j))
        for (const auto& y : a.elements(l)) {
          ++br.checked;
          PElement z = prod(section(a, j, x), section(a, l, y));
          ZmVector xy = tensor_element(a, j, x, a, l, y);
          if (z != section(aa, j + l, xy)) fail(br, vec_string(x) + " x " + vec_string(y));
        }
  rep.checks.push_back(br);

  PCheck rec = named("angle_recursion"), leib = named("d_leibniz");
  leib.informational = true;
  std::size_t leib_fail = 0;
  for (const auto& x : sample)
    for (const auto& y : sample) {
      ++rec.checked;
      try {
        PElement z = prod(x, y);
        if (!z.is_zero() && (z.res_degree != x.res_degree + y.res_degree || z.degree != x.degree + y.degree))
          fail(rec, "bidegree of " + x.to_string() + " x " + y.to_string());
        PElement lhs = boundary(z);
        PElement rhs = prod(boundary(x), y) + scale(prod(x, boundary(y)), sign(x.total_degree(), m));
        if (lhs != rhs) fail(rec, "del-Leibniz fails on " + x.to_string() + " x " + y.to_string());
        if (projection(aa, z) != tensor_element(a, x.degree, projection(a, x), a, y.degree, projection(a, y)))
          fail(rec, "pi not multiplicative on " + x.to_string() + " x " + y.to_string());
        if (x.res_degree + y.res_degree < 2 * depth) {
          ++leib.checked;
          PElement dl = differential(aa, z);
          PElement dr = prod(differential(a, x), y) + scale(prod(x, differential(a, y)), sign(x.total_degree(), m));
          if (dl != dr) ++leib_fail;
        }
      } catch (const DomainError& e) {
        fail(rec, e.what());
      }
    }
  leib.passed = leib_fail == 0;
  leib.detail = std::to_string(leib_fail) + " pairs where d(x*y) != dx*y +- x*dy";
  rep.checks.push_back(rec);

  // associativity and the unit on seeded samples of low angle depth
  PCheck assoc = named("associativity"), unit = named("pseudounit");
  std::vector<PElement> low;
  for (const auto& x : sample)
    if (x.res_degree <= 1) low.push_back(x);
  if (!low.empty()) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, low.size() - 1);
    ShuffleProduct left_first(aa, a, 3), right_first(a, aa, 3);
    ChainMap alpha = associator(a, a, a);
    for (std::size_t s = 0; s < opt.associativity_samples; ++s) {
      const PElement &x = low[pick(rng)], &y = low[pick(rng)], &z = low[pick(rng)];
      ++assoc.checked;
      PElement l = apply_P(alpha, left_first(prod(x, y), z));
      PElement r = right_first(x, prod(y, z));
      if (l != r) fail(assoc, x.to_string() + " ; " + y.to_string() + " ; " + z.to_string());
    }
  }
  ModuleComplex k = ModuleComplex::concentrated(m, {m}, 0);
  ShuffleProduct with_unit(k, a, 2 * depth);
  ChainMap lambda = left_unitor(a);
  PElement one = section(k, 0, std::vector<Residue>{1});
  for (const auto& x : sample) {
    ++unit.checked;
    if (apply_P(lambda, with_unit(one, x)) != x) fail(unit, x.to_string());
  }
  rep.checks.insert(rep.checks.end(), {assoc, unit});

  PCheck comm = named("graded_commutativity");
  comm.informational = true;
  ShuffleProduct swapped(a, a, 2 * depth);
  ChainMap tau = symmetry(a, a);
  std::size_t comm_fail = 0;
  for (const auto& x : low)
    for (const auto& y : low) {
      ++comm.checked;
      PElement l = apply_P(tau, swapped(y, x));
      if (l != scale(prod(x, y), sign(x.total_degree() * y.total_degree(), m))) ++comm_fail;
    }
  comm.passed = comm_fail == 0;
  comm.detail = std::to_string(comm_fail) + " pairs off by the symmetry";
  rep.checks.push_back(leib);
  rep.checks.push_back(comm);

  PCheck nonadd = named("non_additivity_witness");
  nonadd.informational = true;
  nonadd.passed = false;
  for (int j = lo; j <= hi && !rep.witness; ++j) {
    auto els = a.elements(j);
    for (std::size_t p = 1; p < els.size() && !rep.witness; ++p)
      for (std::size_t q = p; q < els.size() && !rep.witness; ++q) {
        ++nonadd.checked;
        ZmVector sum(els[p].size());
        for (std::size_t t = 0; t < sum.size(); ++t) sum[t] = els[p][t] + els[q][t];
        PElement lhs = section(a, j, sum), rhs = section(a, j, els[p]) + section(a, j, els[q]);
        if (lhs != rhs)
          rep.witness = nlohmann::json{{"degree", j},
                                       {"a", els[p]},
                                       {"b", els[q]},
                                       {"s(a+b)", lhs.to_string()},
                                       {"s(a)+s(b)", rhs.to_string()}};
      }
  }
  nonadd.passed = rep.witness.has_value();
  nonadd.detail = nonadd.passed ? "s(a+b) != s(a)+s(b)" : "s is additive on this complex";
  rep.checks.push_back(nonadd);
  return rep;
}

}  // namespace atmot
