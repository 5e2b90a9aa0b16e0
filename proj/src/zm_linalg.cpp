#include "atmot/zm_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "atmot/errors.hpp"

namespace atmot {

Residue mod_reduce(Residue v, Residue m) {
  Residue r = v % m;
  return r < 0 ? r + m : r;
}

Residue gcd_residue(Residue a, Residue b) { return std::gcd(a, b); }

namespace {

// (g, s, t) with s*a + t*b = g = gcd(a, b) over the integers.
struct ExtGcd {
  Residue g, s, t;
};

ExtGcd ext_gcd(Residue a, Residue b) {
  Residue old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Residue q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

// Unit w with a*w = gcd(a, m) (mod m).
Residue normalizing_unit(Residue a, Residue m) {
  Residue g = std::gcd(a, m);
  Residue mp = m / g;
  Residue ap = (a / g) % mp;
  Residue w0 = 1;
  if (mp > 1) {
    auto e = ext_gcd(ap, mp);
    w0 = mod_reduce(e.s, mp);
  }
  for (Residue w = w0; w < m + w0; w += mp) {
    if (std::gcd(w % m, m) == 1) return w % m;
  }
  return 1;
}

using Rows = std::vector<ZmVector>;

void row_axpy(ZmVector& dst, const ZmVector& src, Residue c, Residue m, std::size_t from) {
  if (c == 0) return;
  for (std::size_t k = from; k < dst.size(); ++k) {
    if (src[k] != 0) dst[k] = (dst[k] + c * src[k]) % m;
  }
}

bool row_is_zero(const ZmVector& v) {
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

// Howell elimination of the first `ncols` columns.  Returns the number of
// pivot rows; rows past that index are zero on the processed columns and,
// thanks to the annihilator rows, span every element of the row module that
// vanishes there.
std::size_t howell_eliminate(Rows& rows, std::size_t ncols, Residue m,
                             std::vector<std::size_t>* pivot_cols = nullptr) {
  std::size_t r = 0;
  for (std::size_t j = 0; j < ncols && r < rows.size(); ++j) {
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      Residue b = rows[i][j];
      if (b == 0) continue;
      Residue a = rows[r][j];
      if (a == 0) {
        std::swap(rows[r], rows[i]);
        continue;
      }
      auto e = ext_gcd(a, b);
      Residue s = mod_reduce(e.s, m), t = mod_reduce(e.t, m);
      Residue u = mod_reduce(-(b / e.g), m), v = mod_reduce(a / e.g, m);
      ZmVector& x = rows[r];
      ZmVector& y = rows[i];
      for (std::size_t k = j; k < x.size(); ++k) {
        Residue xk = x[k], yk = y[k];
        if (xk == 0 && yk == 0) continue;
        x[k] = (s * xk + t * yk) % m;
        y[k] = (u * xk + v * yk) % m;
      }
    }
    if (rows[r][j] == 0) continue;
    Residue w = normalizing_unit(rows[r][j], m);
    if (w != 1) {
      for (std::size_t k = j; k < rows[r].size(); ++k) rows[r][k] = (rows[r][k] * w) % m;
    }
    Residue p = rows[r][j];
    for (std::size_t i = 0; i < r; ++i) {
      Residue q = rows[i][j] / p;
      if (q != 0) row_axpy(rows[i], rows[r], mod_reduce(-q, m), m, j);
    }
    if (p != 1) {
      ZmVector ann(rows[r].size());
      Residue f = m / p;
      for (std::size_t k = j; k < ann.size(); ++k) ann[k] = (rows[r][k] * f) % m;
      if (!row_is_zero(ann)) rows.push_back(std::move(ann));
    }
    if (pivot_cols) pivot_cols->push_back(j);
    ++r;
  }
  return r;
}

Rows to_rows(const ZmMatrix& a) {
  Rows rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) rows[i] = a.row_vector(i);
  return rows;
}

ZmMatrix from_row_list(Residue m, const Rows& rows, std::size_t cols) {
  ZmMatrix out(m, 0, cols);
  for (const auto& r : rows) out.append_row(r);
  return out;
}

// Reduce v against a Howell form; on success v becomes zero and coeffs holds
// the combination.  Returns false if v is not in the row module.
bool reduce_howell(const ZmMatrix& h, ZmVector& v, ZmVector* coeffs) {
  Residue m = h.modulus();
  if (coeffs) coeffs->assign(h.rows(), 0);
  std::size_t col = 0;
  for (std::size_t r = 0; r < h.rows(); ++r) {
    auto row = h.row(r);
    std::size_t pc = 0;
    while (pc < row.size() && row[pc] == 0) ++pc;
    for (; col < pc; ++col) {
      if (v[col] != 0) return false;
    }
    Residue p = row[pc];
    if (v[pc] % p != 0) return false;
    Residue q = v[pc] / p;
    if (q != 0) {
      for (std::size_t k = pc; k < v.size(); ++k) v[k] = mod_reduce(v[k] - q * row[k], m);
      if (coeffs) (*coeffs)[r] = q;
    }
    col = pc + 1;
  }
  for (; col < v.size(); ++col) {
    if (v[col] != 0) return false;
  }
  return true;
}

}  // namespace

Residue inverse_mod(Residue a, Residue m) {
  a = mod_reduce(a, m);
  auto e = ext_gcd(a, m);
  if (e.g != 1) throw DomainError(std::to_string(a) + " is not a unit mod " + std::to_string(m));
  return mod_reduce(e.s, m);
}

Residue pow_mod(Residue a, std::int64_t e, Residue m) {
  if (e < 0) {
    a = inverse_mod(a, m);
    e = -e;
  }
  Residue result = 1 % m, base = mod_reduce(a, m);
  while (e > 0) {
    if (e & 1) result = result * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return result;
}

std::map<Residue, int> factorize(Residue n) {
  std::map<Residue, int> f;
  for (Residue p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

// ---------------------------------------------------------------- Order

Order Order::of(Residue n) {
  Order o;
  o.exponents_ = factorize(n);
  return o;
}

Order& Order::operator*=(const Order& o) {
  for (auto [p, e] : o.exponents_) exponents_[p] += e;
  return *this;
}

Order& Order::operator/=(const Order& o) {
  for (auto [p, e] : o.exponents_) {
    auto it = exponents_.find(p);
    if (it == exponents_.end() || it->second < e) throw DomainError("order division is not exact");
    it->second -= e;
    if (it->second == 0) exponents_.erase(it);
  }
  return *this;
}

Order Order::pow(int e) const {
  Order o;
  if (e == 0) return o;
  for (auto [p, x] : exponents_) o.exponents_[p] = x * e;
  return o;
}

bool Order::divides(const Order& o) const {
  for (auto [p, e] : exponents_) {
    auto it = o.exponents_.find(p);
    if (it == o.exponents_.end() || it->second < e) return false;
  }
  return true;
}

std::optional<std::uint64_t> Order::value() const {
  if (log2() > 62) return std::nullopt;
  std::uint64_t v = 1;
  for (auto [p, e] : exponents_) {
    for (int i = 0; i < e; ++i) v *= static_cast<std::uint64_t>(p);
  }
  return v;
}

double Order::log2() const {
  double s = 0;
  for (auto [p, e] : exponents_) s += e * std::log2(static_cast<double>(p));
  return s;
}

std::string Order::to_string() const {
  if (auto v = value()) return std::to_string(*v);
  std::string s;
  for (auto [p, e] : exponents_) {
    if (!s.empty()) s += "*";
    s += std::to_string(p) + "^" + std::to_string(e);
  }
  return s;
}

// ---------------------------------------------------------------- ZmMatrix

ZmMatrix::ZmMatrix(Residue modulus, std::size_t rows, std::size_t cols)
    : modulus_(modulus), rows_(rows), cols_(cols), data_(rows * cols, 0) {
  if (modulus < 2) throw DomainError("modulus must be at least 2");
}

ZmMatrix ZmMatrix::identity(Residue modulus, std::size_t n) {
  ZmMatrix out(modulus, n, n);
  for (std::size_t i = 0; i < n; ++i) out.data_[i * n + i] = 1;
  return out;
}

ZmMatrix ZmMatrix::from_rows(Residue modulus, const std::vector<std::vector<Residue>>& rows,
                             std::size_t cols) {
  if (!rows.empty()) cols = rows.front().size();
  ZmMatrix out(modulus, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw MismatchError("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) out.set(i, j, rows[i][j]);
  }
  return out;
}

ZmMatrix ZmMatrix::diagonal(Residue modulus, std::span<const Residue> d) {
  ZmMatrix out(modulus, d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.set(i, i, d[i]);
  return out;
}

ZmVector ZmMatrix::row_vector(std::size_t r) const {
  auto s = row(r);
  return {s.begin(), s.end()};
}

void ZmMatrix::append_row(std::span<const Residue> v) {
  if (v.size() != cols_) throw MismatchError("append_row: width mismatch");
  for (Residue x : v) data_.push_back(mod_reduce(x, modulus_));
  ++rows_;
}

ZmMatrix ZmMatrix::transpose() const {
  ZmMatrix out(modulus_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.data_[j * rows_ + i] = data_[i * cols_ + j];
  return out;
}

ZmMatrix ZmMatrix::scaled(Residue s) const {
  ZmMatrix out = *this;
  s = mod_reduce(s, modulus_);
  for (auto& x : out.data_) x = x * s % modulus_;
  return out;
}

ZmMatrix ZmMatrix::reduce_to(Residue n) const {
  if (modulus_ % n != 0) throw DomainError("reduce_to: " + std::to_string(n) + " does not divide " +
                                           std::to_string(modulus_));
  ZmMatrix out(n, rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] % n;
  return out;
}

ZmMatrix ZmMatrix::with_modulus(Residue n) const {
  ZmMatrix out(n, rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = mod_reduce(data_[k], n);
  return out;
}

ZmMatrix ZmMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  ZmMatrix out(modulus_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out.data_[i * nc + j] = (*this)(r0 + i, c0 + j);
  return out;
}

ZmMatrix ZmMatrix::select_rows(std::span<const std::size_t> idx) const {
  ZmMatrix out(modulus_, 0, cols_);
  for (auto i : idx) out.append_row(row(i));
  return out;
}

ZmMatrix ZmMatrix::select_cols(std::span<const std::size_t> idx) const {
  ZmMatrix out(modulus_, rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out.data_[i * idx.size() + j] = (*this)(i, idx[j]);
  return out;
}

bool ZmMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Residue x) { return x == 0; });
}

bool ZmMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1 % modulus_ : 0)) return false;
  return true;
}

ZmMatrix operator*(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.cols_ != b.rows_ || a.modulus_ != b.modulus_) throw MismatchError("matrix product shape/modulus mismatch");
  Residue m = a.modulus_;
  ZmMatrix out(m, a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Residue* orow = out.data_.data() + i * b.cols_;
    for (std::size_t k = 0; k < a.cols_; ++k) {
      Residue x = a.data_[i * a.cols_ + k];
      if (x == 0) continue;
      const Residue* brow = b.data_.data() + k * b.cols_;
      for (std::size_t j = 0; j < b.cols_; ++j) orow[j] = (orow[j] + x * brow[j]) % m;
    }
  }
  return out;
}

ZmMatrix operator+(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.modulus_ != b.modulus_)
    throw MismatchError("matrix sum shape/modulus mismatch");
  ZmMatrix out = a;
  for (std::size_t k = 0; k < out.data_.size(); ++k) out.data_[k] = (a.data_[k] + b.data_[k]) % a.modulus_;
  return out;
}

ZmMatrix operator-(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.modulus_ != b.modulus_)
    throw MismatchError("matrix difference shape/modulus mismatch");
  ZmMatrix out = a;
  for (std::size_t k = 0; k < out.data_.size(); ++k)
    out.data_[k] = mod_reduce(a.data_[k] - b.data_[k], a.modulus_);
  return out;
}

std::string ZmMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
    os << "]";
  }
  os << "] mod " << modulus_;
  return os.str();
}

ZmMatrix hstack(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.rows() != b.rows() || a.modulus() != b.modulus()) throw MismatchError("hstack mismatch");
  ZmMatrix out(a.modulus(), a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a(i, j));
    for (std::size_t j = 0; j < b.cols(); ++j) out.set(i, a.cols() + j, b(i, j));
  }
  return out;
}

ZmMatrix vstack(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.cols() != b.cols() || a.modulus() != b.modulus()) throw MismatchError("vstack mismatch");
  ZmMatrix out = a;
  for (std::size_t i = 0; i < b.rows(); ++i) out.append_row(b.row(i));
  return out;
}

ZmMatrix kron(const ZmMatrix& a, const ZmMatrix& b) {
  if (a.modulus() != b.modulus()) throw MismatchError("kron modulus mismatch");
  Residue m = a.modulus();
  ZmMatrix out(m, a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Residue x = a(i, j);
      if (x == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out.set(i * b.rows() + k, j * b.cols() + l, x * b(k, l));
    }
  return out;
}

ZmVector vec_mul(std::span<const Residue> x, const ZmMatrix& a) {
  if (x.size() != a.rows()) throw MismatchError("vec_mul: length mismatch");
  Residue m = a.modulus();
  ZmVector out(a.cols(), 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    Residue xk = mod_reduce(x[k], m);
    if (xk == 0) continue;
    auto r = a.row(k);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = (out[j] + xk * r[j]) % m;
  }
  return out;
}

std::optional<ZmMatrix> inverse(const ZmMatrix& a) {
  if (a.rows() != a.cols()) throw MismatchError("inverse of a non-square matrix");
  std::size_t n = a.rows();
  Residue m = a.modulus();
  ZmMatrix aug = hstack(a, ZmMatrix::identity(m, n));
  ZmMatrix h = howell_form(aug);
  // invertible iff the Howell form of [A | I] starts with [I | A^-1]
  if (h.rows() < n) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (h(i, j) != (i == j ? 1 : 0)) return std::nullopt;
  return h.block(0, n, n, n);
}

ZmMatrix howell_form(const ZmMatrix& a) {
  Residue m = a.modulus();
  Rows rows = to_rows(a);
  std::size_t r = howell_eliminate(rows, a.cols(), m);
  rows.resize(r);
  return from_row_list(m, rows, a.cols());
}

ZmMatrix kernel(const ZmMatrix& a) {
  Residue m = a.modulus();
  std::size_t n = a.rows(), c = a.cols();
  Rows rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].assign(c + n, 0);
    auto src = a.row(i);
    std::copy(src.begin(), src.end(), rows[i].begin());
    rows[i][c + i] = 1;
  }
  std::size_t r = howell_eliminate(rows, c, m);
  ZmMatrix out(m, 0, n);
  for (std::size_t i = r; i < rows.size(); ++i) {
    std::span<const Residue> tail(rows[i].data() + c, n);
    if (std::any_of(tail.begin(), tail.end(), [](Residue x) { return x != 0; })) out.append_row(tail);
  }
  // small kernels are returned canonically
  if (n <= 256) return howell_form(out);
  return out;
}

std::optional<ZmVector> solve(const ZmMatrix& a, std::span<const Residue> b) {
  if (b.size() != a.cols()) throw MismatchError("solve: right-hand side has length " + std::to_string(b.size()) +
                                                ", expected " + std::to_string(a.cols()));
  Residue m = a.modulus();
  std::size_t n = a.rows(), c = a.cols();
  ZmMatrix aug = hstack(a, ZmMatrix::identity(m, n));
  ZmMatrix h = howell_form(aug);
  ZmVector v(c + n, 0);
  for (std::size_t j = 0; j < c; ++j) v[j] = mod_reduce(b[j], m);
  // Reduce only against rows pivoting inside the first c columns.
  std::size_t pivot_rows = 0;
  for (; pivot_rows < h.rows(); ++pivot_rows) {
    auto row = h.row(pivot_rows);
    std::size_t pc = 0;
    while (pc < row.size() && row[pc] == 0) ++pc;
    if (pc >= c) break;
  }
  ZmMatrix hp = h.block(0, 0, pivot_rows, c + n);
  ZmVector coeffs;
  ZmVector first(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(c));
  ZmMatrix hc = hp.block(0, 0, pivot_rows, c);
  if (!reduce_howell(hc, first, &coeffs)) return std::nullopt;
  ZmVector x(n, 0);
  for (std::size_t r = 0; r < pivot_rows; ++r) {
    if (coeffs[r] == 0) continue;
    for (std::size_t k = 0; k < n; ++k) x[k] = (x[k] + coeffs[r] * hp(r, c + k)) % m;
  }
  return x;
}

Order span_order(const ZmMatrix& a) {
  ZmMatrix h = howell_form(a);
  Order o;
  for (std::size_t r = 0; r < h.rows(); ++r) {
    auto row = h.row(r);
    auto it = std::find_if(row.begin(), row.end(), [](Residue x) { return x != 0; });
    o *= Order::of(a.modulus() / *it);
  }
  return o;
}

bool row_span_contains(const ZmMatrix& a, const ZmMatrix& sub) {
  if (a.cols() != sub.cols()) throw MismatchError("row_span_contains: width mismatch");
  ZmMatrix h = howell_form(a);
  for (std::size_t i = 0; i < sub.rows(); ++i) {
    ZmVector v = sub.row_vector(i);
    if (!reduce_howell(h, v, nullptr)) return false;
  }
  return true;
}

bool same_row_span(const ZmMatrix& a, const ZmMatrix& b) { return howell_form(a) == howell_form(b); }

// ---------------------------------------------------------------- presentations

ZmModulePresentation::ZmModulePresentation(Residue modulus, std::size_t generator_count,
                                           const ZmMatrix& relations)
    : modulus_(modulus), generator_count_(generator_count), relations_(relations) {
  if (relations_.rows() == 0) relations_ = ZmMatrix(modulus, 0, generator_count);
  if (relations_.cols() != generator_count || relations_.modulus() != modulus)
    throw MismatchError("presentation: relation matrix shape mismatch");
  decompose();
  set_ambient(ZmMatrix::identity(modulus, generator_count));
}

ZmModulePresentation ZmModulePresentation::from_factors(Residue modulus, std::span<const Residue> factors) {
  ZmMatrix rel(modulus, 0, factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    ZmVector r(factors.size(), 0);
    r[i] = factors[i];
    rel.append_row(r);
  }
  return ZmModulePresentation(modulus, factors.size(), rel);
}

void ZmModulePresentation::decompose() {
  const Residue m = modulus_;
  const std::size_t k = generator_count_;
  local_.clear();
  for (auto [p, e] : factorize(m)) {
    Residue pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    ZmMatrix a = relations_.reduce_to(pe);
    std::size_t nr = a.rows();
    Rows A = to_rows(a);
    ZmMatrix vt = ZmMatrix::identity(pe, k);  // V, column ops
    Rows V = to_rows(vt);
    auto valuation = [&](Residue x) {
      int v = 0;
      while (x % p == 0 && v < e) {
        x /= p;
        ++v;
      }
      return v;
    };
    auto col_axpy = [&](Rows& M, std::size_t dst, std::size_t src, Residue c) {
      for (auto& row : M) row[dst] = mod_reduce(row[dst] + c * row[src], pe);
    };
    std::vector<int> diag;
    std::size_t t = 0;
    for (; t < std::min(nr, k); ++t) {
      int best = e;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = t; i < nr && best > 0; ++i)
        for (std::size_t j = t; j < k; ++j) {
          if (A[i][j] == 0) continue;
          int v = valuation(A[i][j]);
          if (v < best) {
            best = v;
            bi = i;
            bj = j;
            if (v == 0) break;
          }
        }
      if (best == e) break;
      std::swap(A[t], A[bi]);
      if (bj != t) {
        for (auto& row : A) std::swap(row[t], row[bj]);
        for (auto& row : V) std::swap(row[t], row[bj]);
      }
      Residue pv = 1;
      for (int i = 0; i < best; ++i) pv *= p;
      Residue unit = A[t][t] / pv;
      Residue uinv = inverse_mod(unit, pe);
      for (auto& x : A[t]) x = x * uinv % pe;
      for (std::size_t i = t + 1; i < nr; ++i) {
        if (A[i][t] == 0) continue;
        Residue c = A[i][t] / pv;
        for (std::size_t j = t; j < k; ++j) A[i][j] = mod_reduce(A[i][j] - c * A[t][j], pe);
      }
      for (std::size_t j = t + 1; j < k; ++j) {
        if (A[t][j] == 0) continue;
        Residue c = A[t][j] / pv;
        col_axpy(A, j, t, -c);
        col_axpy(V, j, t, -c);
      }
      diag.push_back(best);
    }
    LocalPart part;
    part.prime = p;
    part.prime_power = pe;
    part.transform = from_row_list(pe, V, k);
    std::vector<std::pair<int, std::size_t>> summands;
    for (std::size_t c = 0; c < k; ++c) {
      int a_exp = c < diag.size() ? diag[c] : e;
      if (a_exp > 0) summands.emplace_back(a_exp, c);
    }
    std::stable_sort(summands.begin(), summands.end());
    for (auto [a_exp, c] : summands) {
      Residue pw = 1;
      for (int i = 0; i < a_exp; ++i) pw *= p;
      part.columns.push_back(c);
      part.powers.push_back(pw);
    }
    local_.push_back(std::move(part));
  }

  std::size_t len = 0;
  for (const auto& part : local_) len = std::max(len, part.columns.size());
  factors_.assign(len, 1);
  factor_gen_coeffs_ = ZmMatrix(m, len, k);
  for (const auto& part : local_) {
    std::size_t offset = len - part.columns.size();
    Residue rest = m / part.prime_power;
    Residue idem = mod_reduce(rest * inverse_mod(rest % part.prime_power, part.prime_power), m);
    auto vinv = inverse(part.transform);
    for (std::size_t s = 0; s < part.columns.size(); ++s) {
      std::size_t l = offset + s;
      factors_[l] *= part.powers[s];
      for (std::size_t g = 0; g < k; ++g) {
        Residue f = (*vinv)(part.columns[s], g);
        factor_gen_coeffs_.add_to(l, g, idem * f % m);
      }
    }
  }
}

void ZmModulePresentation::set_ambient(const ZmMatrix& ambient) {
  ambient_ = ambient;
  factor_gens_ = factor_gen_coeffs_ * ambient_;
}

Order ZmModulePresentation::cardinality() const {
  Order o;
  for (Residue d : factors_) o *= Order::of(d);
  return o;
}

ZmVector ZmModulePresentation::coordinates_of_combination(std::span<const Residue> gen_coeffs) const {
  if (gen_coeffs.size() != generator_count_) throw MismatchError("coordinates: wrong generator count");
  std::size_t len = factors_.size();
  ZmVector out(len, 0);
  std::vector<Residue> moduli(len, 1);
  for (const auto& part : local_) {
    std::size_t offset = len - part.columns.size();
    ZmVector x(gen_coeffs.size());
    for (std::size_t g = 0; g < x.size(); ++g) x[g] = mod_reduce(gen_coeffs[g], part.prime_power);
    ZmVector y = vec_mul(x, part.transform);
    for (std::size_t s = 0; s < part.columns.size(); ++s) {
      std::size_t l = offset + s;
      Residue pw = part.powers[s];
      Residue c = y[part.columns[s]] % pw;
      // CRT merge of (out[l] mod moduli[l]) with (c mod pw)
      Residue M = moduli[l];
      Residue t = mod_reduce((c - out[l]) % pw * inverse_mod(M % pw, pw), pw);
      out[l] = out[l] + M * t;
      moduli[l] = M * pw;
    }
  }
  return out;
}

ZmVector ZmModulePresentation::coordinates(std::span<const Residue> ambient) const {
  ZmVector v(ambient.begin(), ambient.end());
  for (auto& x : v) x = mod_reduce(x, modulus_);
  ZmVector coeffs;
  if (!reduce_howell(ambient_, v, &coeffs))
    throw DomainError("coordinates: vector not in the span of the generators");
  return coordinates_of_combination(coeffs);
}

ZmVector ZmModulePresentation::element(std::span<const Residue> coords) const {
  if (coords.size() != factors_.size()) throw MismatchError("element: wrong coordinate count");
  return vec_mul(coords, factor_gens_);
}

std::string ZmModulePresentation::to_string() const { return factors_to_string(factors_); }

ZmModulePresentation subquotient(const ZmMatrix& gens, const ZmMatrix& rels) {
  if (gens.cols() != rels.cols() && rels.rows() > 0) throw MismatchError("subquotient: width mismatch");
  Residue m = gens.modulus();
  ZmMatrix h = howell_form(gens);
  ZmMatrix relations = kernel(h);
  if (relations.rows() == 0) relations = ZmMatrix(m, 0, h.rows());
  for (std::size_t i = 0; i < rels.rows(); ++i) {
    ZmVector v = rels.row_vector(i);
    ZmVector coeffs;
    if (!reduce_howell(h, v, &coeffs))
      throw DomainError("subquotient: relation row " + std::to_string(i) + " is not in the span of the generators");
    relations.append_row(coeffs);
  }
  ZmModulePresentation p(m, h.rows(), relations);
  p.set_ambient(h);
  return p;
}

bool same_factors(const std::vector<Residue>& a, const std::vector<Residue>& b) {
  auto x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

std::string factors_to_string(const std::vector<Residue>& f) {
  if (f.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? " + Z/" : "Z/") + std::to_string(f[i]);
  return s;
}

}  // namespace atmot
