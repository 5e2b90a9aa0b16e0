#include "atmot/atcat.hpp"

#include <algorithm>
#include <numeric>

#include "atmot/errors.hpp"

namespace atmot {

namespace {

// pos[raw index] = index after a stable sort by descending weight.
std::vector<std::size_t> order_by_weight(const std::vector<int>& raw_weights) {
  std::vector<std::size_t> idx(raw_weights.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return raw_weights[a] > raw_weights[b]; });
  std::vector<std::size_t> pos(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = k;
  return pos;
}

ZmMatrix permute(const ZmMatrix& a, const std::vector<std::size_t>& row_pos,
                 const std::vector<std::size_t>& col_pos) {
  ZmMatrix out(a.modulus(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j)) out.set(row_pos[i], col_pos[j], a(i, j));
  return out;
}

void require_compatible(const FilteredObject& a, const FilteredObject& b, const char* what) {
  if (a.mode() != b.mode()) throw MismatchError(std::string(what) + ": mode mismatch");
  if (a.modulus() != b.modulus()) throw MismatchError(std::string(what) + ": modulus mismatch");
  if (!(a.group() == b.group())) throw MismatchError(std::string(what) + ": group mismatch");
  if (a.character().values() != b.character().values())
    throw MismatchError(std::string(what) + ": twist character mismatch");
}

// Solve for an equivariant section s of p: E -> M with p s = 1.
std::optional<ZmMatrix> equivariant_section(const FiniteGroup& g, const ZmMatrix& p,
                                            const std::vector<ZmMatrix>& rho_e,
                                            const std::vector<ZmMatrix>& rho_m) {
  Residue mod = p.modulus();
  std::size_t re = p.cols(), rm = p.rows();
  std::size_t unknowns = re * rm;
  const auto& gens = g.generator_indices();
  std::size_t eqs = rm * rm + gens.size() * re * rm;
  ZmMatrix a(mod, unknowns, eqs);
  ZmVector rhs(eqs, 0);
  // p s = 1: equation (c, b)
  for (std::size_t c = 0; c < rm; ++c)
    for (std::size_t b = 0; b < rm; ++b) {
      std::size_t col = c * rm + b;
      for (std::size_t i = 0; i < re; ++i)
        if (p(c, i)) a.add_to(i * rm + b, col, p(c, i));
      rhs[col] = c == b ? 1 : 0;
    }
  // rho_E(g) s - s rho_M(g) = 0: equation (k, a', b)
  std::size_t base = rm * rm;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const ZmMatrix& e = rho_e[gens[k]];
    const ZmMatrix& mm = rho_m[gens[k]];
    for (std::size_t ap = 0; ap < re; ++ap)
      for (std::size_t b = 0; b < rm; ++b) {
        std::size_t col = base + (k * re + ap) * rm + b;
        for (std::size_t i = 0; i < re; ++i)
          if (e(ap, i)) a.add_to(i * rm + b, col, e(ap, i));
        for (std::size_t bp = 0; bp < rm; ++bp)
          if (mm(bp, b)) a.add_to(ap * rm + bp, col, mod - mm(bp, b));
      }
  }
  if (unknowns == 0) {
    if (rm == 0) return ZmMatrix(mod, re, 0);
    return std::nullopt;
  }
  auto x = solve(a, rhs);
  if (!x) return std::nullopt;
  ZmMatrix s(mod, re, rm);
  for (std::size_t i = 0; i < re; ++i)
    for (std::size_t b = 0; b < rm; ++b) s.set(i, b, (*x)[i * rm + b]);
  return s;
}

std::vector<ZmMatrix> block_actions(const std::vector<ZmMatrix>& rho, std::size_t off, std::size_t n) {
  std::vector<ZmMatrix> out;
  for (const auto& r : rho) out.push_back(r.block(off, off, n, n));
  return out;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::F:
      return "F";
    case Mode::Fprime:
      return "Fprime";
    case Mode::Fsecond:
      return "Fsecond";
  }
  return "F";
}

Mode mode_from_string(const std::string& s) {
  if (s == "F") return Mode::F;
  if (s == "Fprime") return Mode::Fprime;
  if (s == "Fsecond") return Mode::Fsecond;
  throw DomainError("unknown mode '" + s + "' (expected F, Fprime or Fsecond)");
}

// ---------------------------------------------------------------- permutational objects

PermutationalObject::PermutationalObject(GSet set, int twist, TwistCharacter chi)
    : set_(std::move(set)), twist_(twist), chi_(std::move(chi)) {
  if (!(set_.group() == chi_.group())) throw MismatchError("G-set and character over different groups");
}

GModule PermutationalObject::module() const {
  std::vector<ZmMatrix> act;
  Residue m = chi_.modulus();
  for (int g = 0; g < static_cast<int>(chi_.group().order()); ++g) {
    ZmMatrix a(m, rank(), rank());
    Residue c = chi_.power(g, twist_);
    for (std::size_t x = 0; x < rank(); ++x) a.set(set_.act(g, static_cast<int>(x)), x, c);
    act.push_back(std::move(a));
  }
  if (act.empty() || rank() == 0) return GModule::trivial(chi_.group(), m, 0);
  return GModule(chi_.group(), m, std::move(act));
}

PermutationalObject make_permutational(const GSet& s, int twist, const TwistCharacter& chi) {
  return PermutationalObject(s, twist, chi);
}

PermutationalObject mcc_of_subgroup(const SubgroupHandle& h, const TwistCharacter& chi) {
  return PermutationalObject(GSet::cosets(h), 0, chi);
}

// ---------------------------------------------------------------- filtered objects

FilteredObject assemble_filtered(Mode mode, const TwistCharacter& chi, const std::vector<int>& raw_weights,
                                 const std::vector<ZmMatrix>& raw_rho, std::vector<std::size_t>* pos_out) {
  std::vector<std::size_t> pos = order_by_weight(raw_weights);
  std::vector<int> weights(raw_weights.size());
  for (std::size_t k = 0; k < pos.size(); ++k) weights[pos[k]] = raw_weights[k];
  std::vector<ZmMatrix> rho;
  for (const auto& r : raw_rho) rho.push_back(permute(r, pos, pos));
  if (pos_out) *pos_out = pos;
  if (raw_weights.empty()) return FilteredObject::zero(mode, chi);
  return FilteredObject::from_action(mode, chi, std::move(weights), std::move(rho));
}


FilteredObject FilteredObject::from_action(Mode mode, const TwistCharacter& chi, std::vector<int> weights,
                                           std::vector<ZmMatrix> rho) {
  FilteredObject x;
  x.mode_ = mode;
  x.chi_ = chi;
  x.weights_ = std::move(weights);
  x.rho_ = std::move(rho);
  std::size_t r = x.weights_.size();
  if (x.rho_.size() != chi.group().order()) throw DomainError("filtered object needs one matrix per element");
  for (std::size_t k = 1; k < r; ++k)
    if (x.weights_[k] > x.weights_[k - 1]) throw DomainError("basis weights must be descending");
  for (const auto& a : x.rho_) {
    if (a.rows() != r || a.cols() != r || a.modulus() != chi.modulus())
      throw MismatchError("action matrix has the wrong shape or modulus");
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (a(i, j) && x.weights_[i] < x.weights_[j])
          throw DomainError("action lowers weights: not filtration preserving");
  }
  if (r > 0 && !GModule(chi.group(), chi.modulus(), x.rho_).is_homomorphism())
    throw DomainError("action is not a homomorphism");
  x.build_pieces();
  return x;
}

FilteredObject FilteredObject::from_generators(Mode mode, const TwistCharacter& chi, std::vector<int> weights,
                                               const std::vector<ZmMatrix>& gen_rho) {
  const FiniteGroup& g = chi.group();
  std::size_t r = weights.size();
  if (g.generator_indices().empty()) return from_action(mode, chi, std::move(weights), {ZmMatrix::identity(chi.modulus(), r)});
  if (r == 0) return zero(mode, chi);
  GModule full = GModule::from_generators(g, chi.modulus(), gen_rho);
  return from_action(mode, chi, std::move(weights), full.actions());
}

FilteredObject FilteredObject::zero(Mode mode, const TwistCharacter& chi) {
  FilteredObject x;
  x.mode_ = mode;
  x.chi_ = chi;
  x.rho_.assign(chi.group().order(), ZmMatrix(chi.modulus(), 0, 0));
  return x;
}

FilteredObject FilteredObject::tate(int j, const TwistCharacter& chi, Mode mode) {
  return from_action(mode, chi, {j}, mu_tensor(j, chi).actions());
}

FilteredObject FilteredObject::from_permutational(const PermutationalObject& p, Mode mode) {
  if (p.rank() == 0) return zero(mode, p.character());
  return from_action(mode, p.character(), std::vector<int>(p.rank(), p.twist()), p.module().actions());
}

FilteredObject FilteredObject::from_module(const GModule& m, int weight, const TwistCharacter& chi, Mode mode) {
  if (m.rank() == 0) return zero(mode, chi);
  return from_action(mode, chi, std::vector<int>(m.rank(), weight), m.actions());
}

void FilteredObject::build_pieces() {
  pieces_.clear();
  const FiniteGroup& g = chi_.group();
  std::size_t start = 0;
  while (start < weights_.size()) {
    std::size_t end = start;
    while (end < weights_.size() && weights_[end] == weights_[start]) ++end;
    GradedPiece p;
    p.weight = weights_[start];
    p.offset = start;
    std::size_t n = end - start;
    p.module = GModule(g, chi_.modulus(), block_actions(rho_, start, n));
    if (mode_ == Mode::F) {
      std::vector<std::vector<int>> act(g.order(), std::vector<int>(n, -1));
      for (int e = 0; e < static_cast<int>(g.order()); ++e) {
        Residue c = chi_.power(e, p.weight);
        const ZmMatrix& b = p.module.action(e);
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < n; ++y) {
            if (!b(y, x)) continue;
            if (b(y, x) != c || act[e][x] >= 0)
              throw DomainError("mode F piece of weight " + std::to_string(p.weight) +
                                " is not permutational in its basis");
            act[e][x] = static_cast<int>(y);
          }
      }
      p.gset = GSet(g, std::move(act));
    }
    pieces_.push_back(std::move(p));
    start = end;
  }
}

const GradedPiece* FilteredObject::piece(int weight) const {
  for (const auto& p : pieces_)
    if (p.weight == weight) return &p;
  return nullptr;
}

int FilteredObject::min_weight() const {
  if (weights_.empty()) throw DomainError("zero object has no weights");
  return weights_.back();
}

int FilteredObject::max_weight() const {
  if (weights_.empty()) throw DomainError("zero object has no weights");
  return weights_.front();
}

ZmMatrix FilteredObject::rho_gr(int g) const {
  const ZmMatrix& a = rho_[g];
  ZmMatrix out(modulus(), rank(), rank());
  for (std::size_t i = 0; i < rank(); ++i)
    for (std::size_t j = 0; j < rank(); ++j)
      if (weights_[i] == weights_[j]) out.set(i, j, a(i, j));
  return out;
}

ZmMatrix FilteredObject::u(int g) const {
  return rho_gr(group().inv(g)) * rho_[g] - ZmMatrix::identity(modulus(), rank());
}

bool FilteredObject::is_split() const {
  for (int g = 0; g < static_cast<int>(group().order()); ++g)
    if (!u(g).is_zero()) return false;
  return true;
}

GModule FilteredObject::total_module() const {
  if (rank() == 0) return GModule::trivial(group(), modulus(), 0);
  return GModule(group(), modulus(), rho_);
}

GModule FilteredObject::graded_module() const {
  if (rank() == 0) return GModule::trivial(group(), modulus(), 0);
  std::vector<ZmMatrix> act;
  for (int g = 0; g < static_cast<int>(group().order()); ++g) act.push_back(rho_gr(g));
  return GModule(group(), modulus(), std::move(act));
}

nlohmann::json FilteredObject::to_json() const {
  nlohmann::json w = nlohmann::json::object();
  const auto& gens = group().generator_indices();
  for (const auto& p : pieces_) {
    nlohmann::json d;
    if (p.gset) {
      nlohmann::json act = nlohmann::json::array();
      for (int s : gens) {
        nlohmann::json row = nlohmann::json::array();
        for (int y : p.gset->action()[s]) row.push_back(y + 1);
        act.push_back(row);
      }
      d["gset"] = {{"size", p.gset->size()}, {"action", act}};
      d["twist"] = p.weight;
    } else {
      d["module"] = p.module.to_json();
    }
    w[std::to_string(p.weight)] = d;
  }
  nlohmann::json u_json = nlohmann::json::object();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    ZmMatrix uk = u(gens[k]);
    if (uk.is_zero()) continue;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < rank(); ++i) rows.push_back(uk.row_vector(i));
    u_json[std::to_string(k)] = rows;
  }
  return {{"mode", to_string(mode_)}, {"weights", w}, {"u", u_json}};
}

FilteredObject FilteredObject::from_json(const TwistCharacter& chi, const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "object descriptor must be a JSON object");
  Mode mode = Mode::F;
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw SchemaError("/mode", "expected a string");
    try {
      mode = mode_from_string(j["mode"].get<std::string>());
    } catch (const DomainError& e) {
      throw SchemaError("/mode", e.what());
    }
  }
  const FiniteGroup& g = chi.group();
  const auto& gens = g.generator_indices();
  Residue m = chi.modulus();
  if (!j.contains("weights") || !j["weights"].is_object()) throw SchemaError("/weights", "expected an object");
  // collect pieces by weight, descending
  std::vector<std::pair<int, GModule>> pieces;
  for (auto it = j["weights"].begin(); it != j["weights"].end(); ++it) {
    std::string path = "/weights/" + it.key();
    int w;
    try {
      std::size_t used = 0;
      w = std::stoi(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (...) {
      throw SchemaError(path, "weight keys must be integers");
    }
    const auto& d = it.value();
    if (!d.is_object()) throw SchemaError(path, "expected an object");
    GModule mod;
    if (d.contains("gset")) {
      const auto& s = d["gset"];
      if (!s.is_object() || !s.contains("size") || !s["size"].is_number_integer() || s["size"].get<long long>() < 0)
        throw SchemaError(path + "/gset/size", "expected a non-negative integer");
      std::size_t n = s["size"].get<std::size_t>();
      std::vector<std::vector<int>> act;
      if (s.contains("action")) {
        if (!s["action"].is_array() || s["action"].size() != gens.size())
          throw SchemaError(path + "/gset/action", "expected one permutation per group generator");
        for (std::size_t k = 0; k < gens.size(); ++k) {
          std::vector<int> perm;
          if (!s["action"][k].is_array()) throw SchemaError(path + "/gset/action/" + std::to_string(k), "expected an array");
          for (const auto& v : s["action"][k]) {
            if (!v.is_number_integer()) throw SchemaError(path + "/gset/action/" + std::to_string(k), "expected integers");
            perm.push_back(v.get<int>() - 1);
          }
          act.push_back(std::move(perm));
        }
      } else {
        std::vector<int> id(n);
        std::iota(id.begin(), id.end(), 0);
        act.assign(gens.size(), id);
      }
      int twist = w;
      if (d.contains("twist")) {
        if (!d["twist"].is_number_integer()) throw SchemaError(path + "/twist", "expected an integer");
        twist = d["twist"].get<int>();
        if (twist != w) throw SchemaError(path + "/twist", "the piece of weight w must carry twist w");
      }
      try {
        GSet set = GSet::from_generator_action(g, n, act);
        mod = PermutationalObject(set, twist, chi).module();
      } catch (const DomainError& e) {
        throw SchemaError(path + "/gset", e.what());
      }
    } else if (d.contains("module")) {
      if (mode == Mode::F) throw SchemaError(path + "/module", "mode F pieces must be given as gsets");
      mod = GModule::from_json(g, m, d["module"]);
    } else {
      throw SchemaError(path, "expected 'gset' or 'module'");
    }
    pieces.emplace_back(w, std::move(mod));
  }
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> weights;
  for (const auto& [w, mod] : pieces) weights.insert(weights.end(), mod.rank(), w);
  std::size_t r = weights.size();
  std::vector<ZmMatrix> gen_rho;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    ZmMatrix gr(m, r, r);
    std::size_t off = 0;
    for (const auto& [w, mod] : pieces) {
      for (std::size_t a = 0; a < mod.rank(); ++a)
        for (std::size_t b = 0; b < mod.rank(); ++b) gr.set(off + a, off + b, mod.action(gens[k])(a, b));
      off += mod.rank();
    }
    ZmMatrix one = ZmMatrix::identity(m, r);
    std::string key = std::to_string(k);
    if (j.contains("u") && j["u"].is_object() && j["u"].contains(key)) {
      std::string path = "/u/" + key;
      const auto& rows = j["u"][key];
      if (!rows.is_array() || rows.size() != r) throw SchemaError(path, "expected " + std::to_string(r) + " rows");
      for (std::size_t a = 0; a < r; ++a) {
        if (!rows[a].is_array() || rows[a].size() != r)
          throw SchemaError(path + "/" + std::to_string(a), "expected " + std::to_string(r) + " entries");
        for (std::size_t b = 0; b < r; ++b) {
          if (!rows[a][b].is_number_integer()) throw SchemaError(path + "/" + std::to_string(a), "entries must be integers");
          Residue v = mod_reduce(rows[a][b].get<Residue>(), m);
          if (v && weights[a] <= weights[b])
            throw SchemaError(path + "/" + std::to_string(a), "u must strictly raise weights");
          one.add_to(a, b, v);
        }
      }
    }
    gen_rho.push_back(gr * one);
  }
  if (j.contains("u") && !j["u"].is_object()) throw SchemaError("/u", "expected an object");
  try {
    return from_generators(mode, chi, std::move(weights), gen_rho);
  } catch (const DomainError& e) {
    throw SchemaError("/u", e.what());
  }
}

// ---------------------------------------------------------------- maps

bool FilteredMap::is_filtered(const FilteredObject& s, const FilteredObject& t, const ZmMatrix& a) {
  if (a.rows() != t.rank() || a.cols() != s.rank()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) && t.weights()[i] < s.weights()[j]) return false;
  return true;
}

bool FilteredMap::is_equivariant(const FilteredObject& s, const FilteredObject& t, const ZmMatrix& a) {
  for (int g : s.group().generator_indices())
    if (!(t.rho(g) * a == a * s.rho(g))) return false;
  return true;
}

FilteredMap::FilteredMap(FilteredObject source, FilteredObject target, ZmMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  require_compatible(source_, target_, "filtered map");
  if (matrix_.rows() != target_.rank() || matrix_.cols() != source_.rank())
    throw MismatchError("filtered map matrix has the wrong shape");
  if (!is_filtered(source_, target_, matrix_)) throw DomainError("map lowers weights");
  if (!is_equivariant(source_, target_, matrix_)) throw DomainError("map is not G-equivariant");
}

FilteredMap FilteredMap::identity(const FilteredObject& x) {
  return FilteredMap(x, x, ZmMatrix::identity(x.modulus(), x.rank()));
}

FilteredMap FilteredMap::zero(const FilteredObject& s, const FilteredObject& t) {
  return FilteredMap(s, t, ZmMatrix(s.modulus(), t.rank(), s.rank()));
}

ZmMatrix FilteredMap::graded_part(int w) const {
  const GradedPiece* ps = source_.piece(w);
  const GradedPiece* pt = target_.piece(w);
  std::size_t rs = ps ? ps->module.rank() : 0, rt = pt ? pt->module.rank() : 0;
  if (rs == 0 || rt == 0) return ZmMatrix(source_.modulus(), rt, rs);
  return matrix_.block(pt->offset, ps->offset, rt, rs);
}

FilteredMap FilteredMap::compose(const FilteredMap& first) const {
  if (!(first.target_ == source_)) throw MismatchError("composition of non-composable maps");
  FilteredMap f;
  f.source_ = first.source_;
  f.target_ = target_;
  f.matrix_ = matrix_ * first.matrix_;
  if (f.matrix_.rows() == 0 || f.matrix_.cols() == 0) f.matrix_ = ZmMatrix(source_.modulus(), target_.rank(), first.source_.rank());
  return f;
}

std::optional<FilteredMap> FilteredMap::inverse() const {
  if (source_.rank() != target_.rank()) return std::nullopt;
  if (source_.rank() == 0) return FilteredMap(target_, source_, matrix_);
  auto inv = atmot::inverse(matrix_);
  if (!inv || !is_filtered(target_, source_, *inv)) return std::nullopt;
  return FilteredMap(target_, source_, *inv);
}

// ---------------------------------------------------------------- sums, tensors, duals

FilteredObject direct_sum(const FilteredObject& a, const FilteredObject& b) {
  require_compatible(a, b, "direct sum");
  std::vector<int> w = a.weights();
  w.insert(w.end(), b.weights().begin(), b.weights().end());
  std::vector<ZmMatrix> rho;
  std::size_t ra = a.rank(), r = ra + b.rank();
  for (int g = 0; g < static_cast<int>(a.group().order()); ++g) {
    ZmMatrix x(a.modulus(), r, r);
    for (std::size_t i = 0; i < ra; ++i)
      for (std::size_t j = 0; j < ra; ++j) x.set(i, j, a.rho(g)(i, j));
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t j = 0; j < b.rank(); ++j) x.set(ra + i, ra + j, b.rho(g)(i, j));
    rho.push_back(std::move(x));
  }
  return assemble_filtered(a.mode(), a.character(), w, rho);
}

namespace {
std::vector<std::size_t> sum_positions(const FilteredObject& a, const FilteredObject& b) {
  std::vector<int> w = a.weights();
  w.insert(w.end(), b.weights().begin(), b.weights().end());
  return order_by_weight(w);
}
}  // namespace

FilteredMap sum_inclusion(const FilteredObject& a, const FilteredObject& b, int which) {
  FilteredObject s = direct_sum(a, b);
  auto pos = sum_positions(a, b);
  const FilteredObject& part = which == 0 ? a : b;
  std::size_t off = which == 0 ? 0 : a.rank();
  ZmMatrix m(a.modulus(), s.rank(), part.rank());
  for (std::size_t k = 0; k < part.rank(); ++k) m.set(pos[off + k], k, 1);
  return FilteredMap(part, s, m);
}

FilteredMap sum_projection(const FilteredObject& a, const FilteredObject& b, int which) {
  FilteredObject s = direct_sum(a, b);
  auto pos = sum_positions(a, b);
  const FilteredObject& part = which == 0 ? a : b;
  std::size_t off = which == 0 ? 0 : a.rank();
  ZmMatrix m(a.modulus(), part.rank(), s.rank());
  for (std::size_t k = 0; k < part.rank(); ++k) m.set(k, pos[off + k], 1);
  return FilteredMap(s, part, m);
}

std::pair<FilteredMap, FilteredMap> split_triple(const FilteredObject& n, const FilteredObject& m) {
  return {sum_inclusion(n, m, 0), sum_projection(n, m, 1)};
}

std::vector<std::size_t> tensor_positions(const FilteredObject& a, const FilteredObject& b) {
  std::vector<int> w;
  for (int x : a.weights())
    for (int y : b.weights()) w.push_back(x + y);
  return order_by_weight(w);
}

FilteredObject tensor(const FilteredObject& a, const FilteredObject& b) {
  require_compatible(a, b, "tensor");
  std::vector<int> w;
  for (int x : a.weights())
    for (int y : b.weights()) w.push_back(x + y);
  std::vector<ZmMatrix> rho;
  for (int g = 0; g < static_cast<int>(a.group().order()); ++g) rho.push_back(kron(a.rho(g), b.rho(g)));
  if (w.empty()) return FilteredObject::zero(a.mode(), a.character());
  return assemble_filtered(a.mode(), a.character(), w, rho);
}

FilteredMap tensor_maps(const FilteredMap& f, const FilteredMap& g) {
  FilteredObject s = tensor(f.source(), g.source()), t = tensor(f.target(), g.target());
  auto ps = tensor_positions(f.source(), g.source()), pt = tensor_positions(f.target(), g.target());
  ZmMatrix raw = kron(f.matrix(), g.matrix());
  return FilteredMap(s, t, permute(raw, pt, ps));
}

std::vector<std::size_t> dual_positions(const FilteredObject& x) {
  std::vector<int> w;
  for (int v : x.weights()) w.push_back(-v);
  return order_by_weight(w);
}

FilteredObject dual(const FilteredObject& x) {
  if (x.mode() == Mode::Fsecond) throw DomainError("dual is not supported in mode Fsecond");
  std::vector<int> w;
  for (int v : x.weights()) w.push_back(-v);
  std::vector<ZmMatrix> rho;
  for (int g = 0; g < static_cast<int>(x.group().order()); ++g) rho.push_back(x.rho(x.group().inv(g)).transpose());
  if (w.empty()) return x;
  return assemble_filtered(x.mode(), x.character(), w, rho);
}

FilteredMap evaluation(const FilteredObject& x) {
  FilteredObject d = dual(x);
  FilteredObject s = tensor(d, x);
  FilteredObject one = FilteredObject::unit(x.character(), x.mode());
  auto dp = dual_positions(x);
  auto tp = tensor_positions(d, x);
  ZmMatrix m(x.modulus(), 1, s.rank());
  for (std::size_t i = 0; i < x.rank(); ++i) m.set(0, tp[dp[i] * x.rank() + i], 1);
  return FilteredMap(s, one, m);
}

FilteredMap coevaluation(const FilteredObject& x) {
  FilteredObject d = dual(x);
  FilteredObject t = tensor(x, d);
  FilteredObject one = FilteredObject::unit(x.character(), x.mode());
  auto dp = dual_positions(x);
  auto tp = tensor_positions(x, d);
  ZmMatrix m(x.modulus(), t.rank(), 1);
  for (std::size_t i = 0; i < x.rank(); ++i) m.set(tp[i * x.rank() + dp[i]], 0, 1);
  return FilteredMap(one, t, m);
}

FilteredMap double_dual_iso(const FilteredObject& x) {
  FilteredObject dd = dual(dual(x));
  auto p1 = dual_positions(x);
  auto p2 = dual_positions(dual(x));
  ZmMatrix m(x.modulus(), x.rank(), x.rank());
  for (std::size_t i = 0; i < x.rank(); ++i) m.set(p2[p1[i]], i, 1);
  return FilteredMap(x, dd, m);
}

FilteredMap right_unitor(const FilteredObject& x) {
  FilteredObject one = FilteredObject::unit(x.character(), x.mode());
  return FilteredMap(tensor(x, one), x, ZmMatrix::identity(x.modulus(), x.rank()));
}

FilteredMap left_unitor(const FilteredObject& x) {
  FilteredObject one = FilteredObject::unit(x.character(), x.mode());
  return FilteredMap(tensor(one, x), x, ZmMatrix::identity(x.modulus(), x.rank()));
}

FilteredMap associator(const FilteredObject& a, const FilteredObject& b, const FilteredObject& c) {
  FilteredObject ab = tensor(a, b), bc = tensor(b, c);
  FilteredObject src = tensor(ab, c), dst = tensor(a, bc);
  auto pab = tensor_positions(a, b), pbc = tensor_positions(b, c);
  auto ps = tensor_positions(ab, c), pd = tensor_positions(a, bc);
  ZmMatrix m(a.modulus(), dst.rank(), src.rank());
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j)
      for (std::size_t k = 0; k < c.rank(); ++k) {
        std::size_t s = ps[pab[i * b.rank() + j] * c.rank() + k];
        std::size_t d = pd[i * bc.rank() + pbc[j * c.rank() + k]];
        m.set(d, s, 1);
      }
  return FilteredMap(src, dst, m);
}

// ---------------------------------------------------------------- admissibility

AdmissibilityVerdict check_admissible(const FilteredMap& i, const FilteredMap& p) {
  if (!(i.target() == p.source())) throw MismatchError("check_admissible: maps are not composable");
  AdmissibilityVerdict v;
  Residue m = i.source().modulus();
  const FilteredObject& n = i.source();
  const FilteredObject& e = i.target();
  const FilteredObject& mm = p.target();
  if (!(p.matrix() * i.matrix()).is_zero() && e.rank() > 0) {
    v.reason = "composite is not zero";
    return v;
  }
  std::vector<int> ws;
  for (const auto* x : {&n, &e, &mm})
    for (const auto& piece : x->pieces()) ws.push_back(piece.weight);
  std::sort(ws.begin(), ws.end(), std::greater<>());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  for (int w : ws) {
    ZmMatrix iw = i.graded_part(w), pw = p.graded_part(w);
    std::size_t rn = iw.cols(), re = iw.rows(), rm = pw.rows();
    std::string at = " in weight " + std::to_string(w);
    Order full_e = Order::of(m).pow(static_cast<int>(re));
    Order full_m = Order::of(m).pow(static_cast<int>(rm));
    Order im_i = rn ? span_order(iw.transpose()) : Order();
    Order im_p = re ? span_order(pw.transpose()) : Order();
    if (im_i != Order::of(m).pow(static_cast<int>(rn))) {
      v.reason = "graded map N -> E is not injective" + at;
      return v;
    }
    if (im_p != full_m) {
      v.reason = "graded map E -> M is not surjective" + at;
      return v;
    }
    if (!(im_i * im_p == full_e)) {
      v.reason = "graded sequence is not exact in the middle" + at;
      return v;
    }
    if (e.mode() == Mode::Fsecond) continue;
    const GradedPiece* pe = e.piece(w);
    const GradedPiece* pm = mm.piece(w);
    if (!pm) continue;
    auto s = equivariant_section(e.group(), pw, pe->module.actions(), pm->module.actions());
    if (!s) {
      v.reason = "no equivariant splitting of the graded sequence" + at;
      return v;
    }
    v.splittings[w] = *s;
  }
  v.admissible = true;
  return v;
}

// ---------------------------------------------------------------- coefficient change

FilteredObject coefficient_change(const FilteredObject& x, Residue n) {
  if (n < 2 || x.modulus() % n != 0) throw DomainError("coefficient change needs n | m");
  TwistCharacter chi = x.character().reduce_to(n);
  std::vector<ZmMatrix> rho;
  for (const auto& a : x.actions()) rho.push_back(a.reduce_to(n));
  return FilteredObject::from_action(x.mode(), chi, x.weights(), std::move(rho));
}

FilteredMap coefficient_change(const FilteredMap& f, Residue n) {
  return FilteredMap(coefficient_change(f.source(), n), coefficient_change(f.target(), n),
                     f.matrix().reduce_to(n));
}

// ---------------------------------------------------------------- restriction and induction

FilteredObject restrict_filtered(const FilteredObject& x, const SubgroupHandle& h) {
  if (!(h.group() == x.group())) throw MismatchError("restrict: subgroup of a different group");
  std::vector<ZmMatrix> rho;
  for (int e : h.elements()) rho.push_back(x.rho(e));
  return FilteredObject::from_action(x.mode(), x.character().restrict_to(h), x.weights(), std::move(rho));
}

FilteredMap restrict_filtered(const FilteredMap& f, const SubgroupHandle& h) {
  return FilteredMap(restrict_filtered(f.source(), h), restrict_filtered(f.target(), h), f.matrix());
}

ZmMatrix induction_basis(const FilteredObject& x, const SubgroupHandle& h, const TwistCharacter& chi_g) {
  CosetTable t = left_cosets(h);
  std::size_t n = t.representatives.size(), r = x.rank();
  std::vector<int> raw_w;
  for (std::size_t i = 0; i < n; ++i) raw_w.insert(raw_w.end(), x.weights().begin(), x.weights().end());
  auto pos = order_by_weight(raw_w);
  ZmMatrix tmat(x.modulus(), n * r, n * r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < r; ++k) {
      Residue c = x.mode() == Mode::F ? chi_g.power(t.representatives[i], x.weights()[k]) : 1;
      tmat.set(pos[i * r + k], i * r + k, c);
    }
  return tmat;
}

FilteredObject induce_filtered(const FilteredObject& x, const SubgroupHandle& h, const TwistCharacter& chi_g) {
  if (!(x.group() == h.as_group())) throw MismatchError("induce: object is not over the given subgroup");
  if (!(chi_g.group() == h.group())) throw MismatchError("induce: character is not over the ambient group");
  if (chi_g.restrict_to(h).values() != x.character().values())
    throw MismatchError("induce: character does not restrict to the object's character");
  if (x.rank() == 0) return FilteredObject::zero(x.mode(), chi_g);
  GModule raw = induce_module(x.total_module(), h);
  ZmMatrix tmat = induction_basis(x, h, chi_g);
  ZmMatrix tinv = *inverse(tmat);
  std::vector<int> raw_w;
  for (std::size_t i = 0; i < h.index(); ++i) raw_w.insert(raw_w.end(), x.weights().begin(), x.weights().end());
  auto pos = order_by_weight(raw_w);
  std::vector<int> w(raw_w.size());
  for (std::size_t k = 0; k < pos.size(); ++k) w[pos[k]] = raw_w[k];
  std::vector<ZmMatrix> rho;
  for (const auto& a : raw.actions()) rho.push_back(tmat * a * tinv);
  return FilteredObject::from_action(x.mode(), chi_g, std::move(w), std::move(rho));
}

FilteredMap induce_filtered(const FilteredMap& f, const SubgroupHandle& h, const TwistCharacter& chi_g) {
  FilteredObject s = induce_filtered(f.source(), h, chi_g), t = induce_filtered(f.target(), h, chi_g);
  std::size_t n = h.index();
  ZmMatrix raw = kron(ZmMatrix::identity(f.matrix().modulus(), n), f.matrix());
  if (s.rank() == 0 || t.rank() == 0) return FilteredMap::zero(s, t);
  ZmMatrix ts = induction_basis(f.source(), h, chi_g), tt = induction_basis(f.target(), h, chi_g);
  return FilteredMap(s, t, tt * raw * *inverse(ts));
}

FilteredMap projection_formula_iso(const FilteredObject& a, const FilteredObject& b, const SubgroupHandle& h) {
  const TwistCharacter& chi = a.character();
  FilteredObject ra = restrict_filtered(a, h);
  FilteredObject inner = tensor(ra, b);
  FilteredObject lhs = induce_filtered(inner, h, chi);
  FilteredObject ib = induce_filtered(b, h, chi);
  FilteredObject rhs = tensor(a, ib);
  CosetTable t = left_cosets(h);
  std::size_t n = t.representatives.size(), rA = a.rank(), rB = b.rank(), rI = ib.rank();
  auto pin = tensor_positions(ra, b);
  auto prhs = tensor_positions(a, ib);
  ZmMatrix tb = induction_basis(b, h, chi);
  Residue mod = a.modulus();
  ZmMatrix raw(mod, rhs.rank(), n * rA * rB);
  for (std::size_t i = 0; i < n; ++i) {
    const ZmMatrix& ti = a.rho(t.representatives[i]);
    for (std::size_t k = 0; k < rA; ++k)
      for (std::size_t l = 0; l < rB; ++l) {
        std::size_t col = i * rA * rB + pin[k * rB + l];
        for (std::size_t kp = 0; kp < rA; ++kp) {
          if (!ti(kp, k)) continue;
          for (std::size_t j = 0; j < rI; ++j) {
            Residue c = tb(j, i * rB + l);
            if (c) raw.add_to(prhs[kp * rI + j], col, ti(kp, k) * c);
          }
        }
      }
  }
  ZmMatrix tl = induction_basis(inner, h, chi);
  return FilteredMap(lhs, rhs, raw * *inverse(tl));
}

ZmMatrix frobenius_restrict(const FilteredObject& m, const SubgroupHandle& h, const TwistCharacter& chi_g,
                            const ZmMatrix& phi) {
  ZmMatrix tm = induction_basis(m, h, chi_g);
  ZmMatrix eta(m.modulus(), tm.rows(), m.rank());  // e_k -> t_0 (x) e_k, t_0 = e
  for (std::size_t k = 0; k < m.rank(); ++k)
    for (std::size_t r = 0; r < tm.rows(); ++r)
      if (tm(r, k)) eta.set(r, k, tm(r, k));
  return phi * eta;
}

ZmMatrix frobenius_induce(const FilteredObject& m, const FilteredObject& n, const SubgroupHandle& h,
                          const TwistCharacter& chi_g, const ZmMatrix& psi) {
  CosetTable t = left_cosets(h);
  std::size_t c = t.representatives.size(), rn = n.rank();
  Residue mod = m.modulus();
  ZmMatrix raw(mod, c * rn, m.rank());
  for (std::size_t i = 0; i < c; ++i) {
    ZmMatrix block = psi * m.rho(m.group().inv(t.representatives[i]));
    for (std::size_t a = 0; a < rn; ++a)
      for (std::size_t b = 0; b < m.rank(); ++b) raw.set(i * rn + a, b, block(a, b));
  }
  return induction_basis(n, h, chi_g) * raw;
}

TransferPair mcc_transfer_pair(const SubgroupHandle& h, const SubgroupHandle& k, const TwistCharacter& chi) {
  for (int x : h.elements())
    if (!k.contains(x)) throw DomainError("transfer pair needs H <= K");
  FilteredObject oh = FilteredObject::from_permutational(mcc_of_subgroup(h, chi));
  FilteredObject ok = FilteredObject::from_permutational(mcc_of_subgroup(k, chi));
  CosetTable th = left_cosets(h), tk = left_cosets(k);
  Residue mod = chi.modulus();
  ZmMatrix proj(mod, ok.rank(), oh.rank()), tr(mod, oh.rank(), ok.rank());
  for (std::size_t c = 0; c < th.representatives.size(); ++c) {
    int d = tk.coset_of[th.representatives[c]];
    proj.set(d, c, 1);
    tr.set(c, d, 1);
  }
  return {FilteredMap(oh, ok, proj), FilteredMap(ok, oh, tr)};
}

FilteredMap mackey_tensor_iso(const SubgroupHandle& h, const SubgroupHandle& hp, const TwistCharacter& chi) {
  const FiniteGroup& g = h.group();
  FilteredObject a = FilteredObject::from_permutational(mcc_of_subgroup(h, chi));
  FilteredObject b = FilteredObject::from_permutational(mcc_of_subgroup(hp, chi));
  FilteredObject target = tensor(a, b);
  auto tp = tensor_positions(a, b);
  CosetTable th = left_cosets(h), thp = left_cosets(hp);
  FilteredObject source = FilteredObject::zero(Mode::F, chi);
  std::vector<std::pair<int, int>> images;  // target point for each source basis vector
  for (const auto& d : double_cosets(h, hp)) {
    source = direct_sum(source, FilteredObject::from_permutational(mcc_of_subgroup(d.intersection, chi)));
    CosetTable tk = left_cosets(d.intersection);
    int ginv = g.inv(d.representative);
    for (int r : tk.representatives) images.emplace_back(th.coset_of[g.mul(r, ginv)], thp.coset_of[r]);
  }
  ZmMatrix m(chi.modulus(), target.rank(), source.rank());
  for (std::size_t k = 0; k < images.size(); ++k)
    m.set(tp[static_cast<std::size_t>(images[k].first) * b.rank() + images[k].second], k, 1);
  return FilteredMap(source, target, m);
}

FilteredMap generation_epimorphism(const PermutationalObject& p) {
  const FiniteGroup& g = p.character().group();
  FilteredObject target = FilteredObject::from_permutational(p);
  FilteredObject source = FilteredObject::zero(Mode::F, p.character());
  auto canon = subgroups_up_to_conjugacy(g);
  std::vector<std::size_t> images;
  for (const auto& orbit : p.gset().orbits()) {
    int x = orbit.front();
    SubgroupHandle stab = p.gset().stabilizer(x);
    int y = -1;
    const SubgroupHandle* hc = nullptr;
    for (const auto& c : canon) {
      if (c.order() != stab.order()) continue;
      for (int e = 0; e < static_cast<int>(g.order()) && y < 0; ++e)
        if (stab.conjugate(e) == c) {
          y = p.gset().act(g.inv(e), x);
          hc = &c;
        }
      if (hc) break;
    }
    PermutationalObject summand(GSet::cosets(*hc), p.twist(), p.character());
    source = direct_sum(source, FilteredObject::from_permutational(summand));
    CosetTable t = left_cosets(*hc);
    for (int r : t.representatives) images.push_back(static_cast<std::size_t>(p.gset().act(r, y)));
  }
  ZmMatrix m(p.character().modulus(), target.rank(), source.rank());
  for (std::size_t k = 0; k < images.size(); ++k) m.set(images[k], k, 1);
  return FilteredMap(source, target, m);
}

}  // namespace atmot
