#include <algorithm>
#include <bit>
#include <optional>

#include "atmot/errors.hpp"
#include "atmot/ext_engine.hpp"

namespace atmot {

ZmModulePresentation FinModule::presentation() const {
  return ZmModulePresentation(modulus, gens, relations.rows() ? relations : ZmMatrix(modulus, 0, gens));
}

// ---------------------------------------------------------------- the ring

BigGradedRing BigGradedRing::build(const TwistCharacter& chi, int n_max, const ExtOptions& opt) {
  if (n_max < 0) throw DomainError("big ring: negative degree");
  BigGradedRing r;
  r.chi_ = chi;
  r.n_max_ = n_max;
  r.vertices_ = subgroups_up_to_conjugacy(chi.group());
  for (const auto& h : r.vertices_) r.vertex_modules_.push_back(GModule::permutation(GSet::cosets(h), chi.modulus()));
  CohomologyOptions copt = opt.cohomology;
  copt.degree_cap = std::max(copt.degree_cap, n_max);
  for (int n = 0; n <= n_max; ++n)
    for (std::size_t u = 0; u < r.vertices_.size(); ++u)
      for (std::size_t v = 0; v < r.vertices_.size(); ++v) {
        GModule x = tensor(hom_module(r.vertex_modules_[u], r.vertex_modules_[v]), mu_tensor(n, chi));
        r.comps_[{n, u, v}] = RingComponent{n, u, v, cohomology(x, n, copt)};
      }
  return r;
}

const RingComponent& BigGradedRing::component(int n, std::size_t u, std::size_t v) const {
  auto it = comps_.find({n, u, v});
  if (it == comps_.end()) throw DomainError("big ring: component outside the computed range");
  return it->second;
}

ZmVector BigGradedRing::multiply(int q, std::size_t v, std::size_t w, std::span<const Residue> b, int p,
                                 std::size_t u, std::span<const Residue> a) const {
  if (p + q > n_max_) return {};
  const RingComponent& ca = component(p, u, v);
  const RingComponent& cb = component(q, v, w);
  const RingComponent& cc = component(p + q, u, w);
  if (ca.gens() == 0 || cb.gens() == 0 || cc.gens() == 0) return ZmVector(cc.gens(), 0);
  std::size_t ru = vertex_modules_[u].rank(), rv = vertex_modules_[v].rank(), rw = vertex_modules_[w].rank();
  ZmVector fb = cb.group.representative(b), fa = ca.group.representative(a);
  ZmVector cupped = cup_cochains(cb.group.coefficients, q, fb, ca.group.coefficients, p, fa);
  // composition Hom(P_v, P_w) (x) Hom(P_u, P_v) -> Hom(P_u, P_w)
  std::size_t ra = rv * ru;
  ZmMatrix comp(chi_.modulus(), rw * ru, rw * rv * ra);
  for (std::size_t c = 0; c < rw; ++c)
    for (std::size_t d = 0; d < rv; ++d)
      for (std::size_t e = 0; e < ru; ++e) comp.set(c * ru + e, (c * rv + d) * ra + d * ru + e, 1);
  return cc.group.class_of(apply_to_cochain(comp, cupped));
}

namespace {

ZmVector unit_vector(std::size_t n, std::size_t i) {
  ZmVector v(n, 0);
  v[i] = 1;
  return v;
}

}  // namespace

bool BigGradedRing::check_associative() const {
  std::size_t nv = vertices_.size();
  for (int p = 0; p <= n_max_; ++p)
    for (int q = 0; p + q <= n_max_; ++q)
      for (int r = 0; p + q + r <= n_max_; ++r)
        for (std::size_t u = 0; u < nv; ++u)
          for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t w = 0; w < nv; ++w)
              for (std::size_t x = 0; x < nv; ++x) {
                std::size_t na = component(p, u, v).gens(), nb = component(q, v, w).gens(),
                            nc = component(r, w, x).gens();
                for (std::size_t i = 0; i < na; ++i)
                  for (std::size_t k = 0; k < nb; ++k)
                    for (std::size_t l = 0; l < nc; ++l) {
                      ZmVector a = unit_vector(na, i), b = unit_vector(nb, k), c = unit_vector(nc, l);
                      ZmVector ba = multiply(q, v, w, b, p, u, a);
                      ZmVector cb = multiply(r, w, x, c, q, v, b);
                      if (multiply(r, w, x, c, p + q, u, ba) != multiply(q + r, v, x, cb, p, u, a)) return false;
                    }
              }
  return true;
}

nlohmann::json BigGradedRing::to_json() const {
  nlohmann::json j;
  j["modulus"] = chi_.modulus();
  j["max_degree"] = n_max_;
  j["vertices"] = nlohmann::json::array();
  for (const auto& h : vertices_) j["vertices"].push_back({{"order", h.order()}, {"elements", h.elements()}});
  j["components"] = nlohmann::json::array();
  for (const auto& [key, c] : comps_)
    if (!c.factors().empty())
      j["components"].push_back(
          {{"degree", c.degree}, {"source", c.source}, {"target", c.target}, {"factors", c.factors()}});
  return j;
}

// ---------------------------------------------------------------- tensor chains

namespace {

/// A_{d_1} (x)_{A_0} ... (x)_{A_0} A_{d_k} between two vertices, presented on
/// paths v_0 = u, ..., v_k = w with one invariant-factor generator per step.
/// Factor i of a path lives in A_{d_i}(v_{i-1}, v_i), so the composite is
/// x_k ... x_1.
class TensorChain {
 public:
  TensorChain(const BigGradedRing& ring, std::vector<int> degrees, std::size_t u, std::size_t w)
      : ring_(ring), d_(std::move(degrees)), u_(u), w_(w) {
    std::vector<std::size_t> verts{u};
    std::vector<std::size_t> gens;
    enumerate(verts, gens);
  }

  std::size_t size() const { return paths_.size(); }
  Residue modulus() const { return ring_.character().modulus(); }

  std::optional<std::size_t> index(const std::vector<std::size_t>& verts, const std::vector<std::size_t>& gens) const {
    auto it = index_.find({verts, gens});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Torsion and A_0-balancing relations.
  ZmMatrix relations() const {
    Residue m = modulus();
    ZmMatrix rel(m, 0, size());
    for (std::size_t t = 0; t < size(); ++t) {
      const auto& [verts, gens] = paths_[t];
      Residue g = m;
      for (std::size_t i = 0; i < d_.size(); ++i)
        g = gcd_residue(g, ring_.component(d_[i], verts[i], verts[i + 1]).factors()[gens[i]]);
      if (g != m) {
        ZmVector r(size(), 0);
        r[t] = g;
        rel.append_row(r);
      }
    }
    // (a x_c) (x) x_{c+1} = x_c (x) (x_{c+1} a) for a in A_0(v, v'), built
    // from a prefix chain ending at v and a suffix chain starting at v'
    std::size_t nv = ring_.vertices().size();
    for (std::size_t c = 1; c < d_.size(); ++c) {
      std::vector<int> dl(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(c));
      std::vector<int> dr(d_.begin() + static_cast<std::ptrdiff_t>(c), d_.end());
      for (std::size_t v = 0; v < nv; ++v) {
        TensorChain left(ring_, dl, u_, v);
        if (!left.size()) continue;
        for (std::size_t vp = 0; vp < nv; ++vp) {
          const RingComponent& a0 = ring_.component(0, v, vp);
          if (!a0.gens()) continue;
          TensorChain right(ring_, dr, vp, w_);
          for (const auto& [lv, lg] : left.paths_)
            for (const auto& [rv, rg] : right.paths_)
              for (std::size_t ai = 0; ai < a0.gens(); ++ai) {
                ZmVector a = unit_vector(a0.gens(), ai), r(size(), 0);
                std::size_t nl = ring_.component(d_[c - 1], lv[c - 1], v).gens();
                ZmVector ax = ring_.multiply(0, v, vp, a, d_[c - 1], lv[c - 1], unit_vector(nl, lg.back()));
                std::vector<std::size_t> verts(lv), gens(lg);
                verts.insert(verts.end(), rv.begin() + 1, rv.end());
                gens.insert(gens.end(), rg.begin(), rg.end());
                verts[c] = vp;
                for (std::size_t t = 0; t < ax.size(); ++t)
                  if (ax[t]) {
                    gens[c - 1] = t;
                    r[*index(verts, gens)] += ax[t];
                  }
                gens[c - 1] = lg.back();
                verts[c] = v;
                std::size_t nr = ring_.component(d_[c], vp, rv[1]).gens();
                ZmVector xa = ring_.multiply(d_[c], vp, rv[1], unit_vector(nr, rg.front()), 0, v, a);
                for (std::size_t t = 0; t < xa.size(); ++t)
                  if (xa[t]) {
                    gens[c] = t;
                    r[*index(verts, gens)] += m - xa[t];
                  }
                for (auto& x : r) x %= m;
                if (std::any_of(r.begin(), r.end(), [](Residue x) { return x != 0; })) rel.append_row(r);
              }
        }
      }
    }
    return rel;
  }

  /// Multiplication of factors c and c + 1 (1-based c) into `to`.
  ZmMatrix merge(std::size_t c, const TensorChain& to) const {
    ZmMatrix out(modulus(), size(), to.size());
    for (std::size_t t = 0; t < size(); ++t) {
      const auto& [verts, gens] = paths_[t];
      std::size_t v0 = verts[c - 1], v1 = verts[c], v2 = verts[c + 1];
      std::size_t na = ring_.component(d_[c - 1], v0, v1).gens(), nb = ring_.component(d_[c], v1, v2).gens();
      ZmVector prod = ring_.multiply(d_[c], v1, v2, unit_vector(nb, gens[c]), d_[c - 1], v0,
                                     unit_vector(na, gens[c - 1]));
      auto mv = verts;
      mv.erase(mv.begin() + static_cast<std::ptrdiff_t>(c));
      auto mg = gens;
      mg.erase(mg.begin() + static_cast<std::ptrdiff_t>(c));
      for (std::size_t s = 0; s < prod.size(); ++s)
        if (prod[s]) {
          mg[c - 1] = s;
          out.add_to(t, *to.index(mv, mg), prod[s]);
        }
    }
    return out;
  }

 private:
  void enumerate(std::vector<std::size_t>& verts, std::vector<std::size_t>& gens) {
    std::size_t i = gens.size();
    if (i == d_.size()) {
      if (verts.back() != w_) return;
      index_[{verts, gens}] = paths_.size();
      paths_.push_back({verts, gens});
      return;
    }
    std::size_t nv = ring_.vertices().size();
    for (std::size_t v = 0; v < nv; ++v) {
      if (i + 1 == d_.size() && v != w_) continue;
      std::size_t n = ring_.component(d_[i], verts.back(), v).gens();
      verts.push_back(v);
      for (std::size_t g = 0; g < n; ++g) {
        gens.push_back(g);
        enumerate(verts, gens);
        gens.pop_back();
      }
      verts.pop_back();
    }
  }

  using Path = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;
  const BigGradedRing& ring_;
  std::vector<int> d_;
  std::size_t u_, w_;
  std::vector<Path> paths_;
  std::map<Path, std::size_t> index_;
};

ZmModulePresentation zero_module(Residue m) { return ZmModulePresentation::from_factors(m, {}); }

ZmMatrix block_diagonal(const std::vector<ZmMatrix>& blocks, Residue m, std::size_t width) {
  ZmMatrix out(m, 0, blocks.size() * width);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t r = 0; r < blocks[b].rows(); ++r) {
      ZmVector row(blocks.size() * width, 0);
      std::copy(blocks[b].row(r).begin(), blocks[b].row(r).end(), row.begin() + static_cast<std::ptrdiff_t>(b * width));
      out.append_row(row);
    }
  return out;
}

/// Rows of x-parts of the kernel of vstack(a, b): the x with xa in rowspan(b).
ZmMatrix preimage(const ZmMatrix& a, const ZmMatrix& b) {
  if (b.rows() == 0) return kernel(a);
  ZmMatrix k = kernel(vstack(a, b));
  return k.block(0, 0, k.rows(), a.rows());
}

/// Cut subsets of {1, ..., j - 1} of a given size, each sorted.
std::vector<std::vector<std::size_t>> cut_sets(int j, int size) {
  std::vector<std::vector<std::size_t>> out;
  int n = std::max(j - 1, 0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != size) continue;
    std::vector<std::size_t> s;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(static_cast<std::size_t>(i + 1));
    out.push_back(s);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- cobar

ZmModulePresentation cobar_cohomology(const BigGradedRing& ring, int k, int j, std::size_t u, std::size_t v) {
  Residue m = ring.character().modulus();
  if (u >= ring.vertices().size() || v >= ring.vertices().size()) throw DomainError("cobar: vertex out of range");
  if (j < 0 || k < 0) throw DomainError("cobar: negative degree");
  if (j == 0) return k == 0 ? ZmModulePresentation::from_factors(m, ring.component(0, u, v).factors()) : zero_module(m);
  if (k < 1 || k > j) return zero_module(m);
  if (ring.max_degree() < std::min(j, 2)) throw DomainError("cobar: ring computed below degree 2");

  TensorChain tj(ring, std::vector<int>(static_cast<std::size_t>(j), 1), u, v);
  std::size_t n = tj.size();
  if (n == 0) return zero_module(m);
  ZmMatrix rel = tj.relations();

  // R_c: preimage of zero under the product at cut c
  std::vector<ZmMatrix> ker(static_cast<std::size_t>(j));
  for (int c = 1; c < j; ++c) {
    std::vector<int> d(static_cast<std::size_t>(j - 1), 1);
    d[static_cast<std::size_t>(c - 1)] = 2;
    TensorChain to(ring, d, u, v);
    ZmMatrix mu = tj.merge(static_cast<std::size_t>(c), to);
    ker[static_cast<std::size_t>(c)] = to.size() ? preimage(mu, to.relations()) : ZmMatrix::identity(m, n);
  }
  // K_S = R + intersection of ker mu_c over cuts c outside S
  auto k_of = [&](const std::vector<std::size_t>& s) {
    std::vector<ZmMatrix> eqs;
    for (int c = 1; c < j; ++c)
      if (!std::binary_search(s.begin(), s.end(), static_cast<std::size_t>(c))) eqs.push_back(ker[static_cast<std::size_t>(c)]);
    ZmMatrix out = ZmMatrix::identity(m, n);
    for (const auto& e : eqs) {
      // x in rowspan(out) and in rowspan(e)
      ZmMatrix both = kernel(vstack(out, e));
      out = both.block(0, 0, both.rows(), out.rows()) * out;
    }
    return rel.rows() ? vstack(out, rel) : out;
  };
  // ambient: one copy of F per cut set of size k - 1
  auto level = [&](int kk) { return kk >= 1 && kk <= j ? cut_sets(j, kk - 1) : std::vector<std::vector<std::size_t>>{}; };
  auto gens_at = [&](int kk) {
    auto sets = level(kk);
    std::vector<ZmMatrix> blocks;
    for (const auto& s : sets) blocks.push_back(k_of(s));
    return block_diagonal(blocks, m, n);
  };
  auto rel_at = [&](int kk) {
    auto sets = level(kk);
    return block_diagonal(std::vector<ZmMatrix>(sets.size(), rel), m, n);
  };
  // ambient differential from level kk to kk + 1
  auto diff = [&](int kk) {
    auto src = level(kk), dst = level(kk + 1);
    ZmMatrix dm(m, src.size() * n, dst.size() * n);
    for (std::size_t a = 0; a < src.size(); ++a)
      for (std::size_t b = 0; b < dst.size(); ++b) {
        const auto& s = src[a];
        const auto& t = dst[b];
        if (!std::includes(t.begin(), t.end(), s.begin(), s.end())) continue;
        std::size_t c = 0, pos = 0;
        for (std::size_t x : t)
          if (!std::binary_search(s.begin(), s.end(), x)) c = x;
        for (std::size_t x : s) pos += x < c;
        Residue sign = pos % 2 ? m - 1 : 1;
        for (std::size_t i = 0; i < n; ++i) dm.set(a * n + i, b * n + i, sign);
      }
    return dm;
  };

  ZmMatrix g = gens_at(k);
  ZmMatrix r = rel_at(k);
  ZmMatrix cocycles = g;
  if (k < j) {
    ZmMatrix gd = g * diff(k);
    ZmMatrix coeffs = preimage(gd, rel_at(k + 1));
    cocycles = coeffs.block(0, 0, coeffs.rows(), g.rows()) * g;
  }
  ZmMatrix bounds = r;
  if (k > 1) {
    ZmMatrix img = gens_at(k - 1) * diff(k - 1);
    bounds = vstack(bounds, img);
  }
  return subquotient(vstack(cocycles, r), bounds);
}

KoszulityReport koszulity_probe(const BigGradedRing& ring, int n) {
  if (n < 0) throw DomainError("koszul probe: negative degree");
  KoszulityReport rep;
  rep.max_internal = n;
  std::size_t nv = ring.vertices().size();
  std::size_t unit = ring.unit_vertex();
  for (int j = 0; j <= n; ++j)
    for (int k = (j == 0 ? 0 : 1); k <= j; ++k) {
      KoszulityEntry e{k, j, {}};
      for (std::size_t u = 0; u < nv; ++u)
        for (std::size_t v = 0; v < nv; ++v) {
          ZmModulePresentation h = cobar_cohomology(ring, k, j, u, v);
          const auto& f = h.invariant_factors();
          e.factors.insert(e.factors.end(), f.begin(), f.end());
          if (k == j) {
            if (j <= ring.max_degree() && !same_factors(f, ring.component(j, u, v).factors())) rep.quadratic = false;
            if (u == unit && v == unit) rep.unit_diagonal.push_back(f);
          }
        }
      std::sort(e.factors.begin(), e.factors.end());
      if (e.factors.empty()) continue;
      if (k != j) rep.diagonal = false;
      rep.entries.push_back(std::move(e));
    }
  return rep;
}

nlohmann::json KoszulityReport::to_json() const {
  nlohmann::json j;
  j["label"] = "CONJECTURE-FACING";
  j["max_internal"] = max_internal;
  j["diagonal"] = diagonal;
  j["quadratic"] = quadratic;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) j["entries"].push_back({{"k", e.k}, {"j", e.j}, {"factors", e.factors}});
  j["unit_diagonal"] = unit_diagonal;
  j["method"] = to_string(Method::cobar);
  return j;
}

}  // namespace atmot
