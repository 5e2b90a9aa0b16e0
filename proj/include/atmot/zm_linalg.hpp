#pragma once

// Exact linear algebra over Z/m.
//
// Vectors are rows; a matrix A acts on the right, x -> xA.  Every entry is
// kept reduced in [0, m).

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace atmot {

using Residue = std::int64_t;
using ZmVector = std::vector<Residue>;

Residue mod_reduce(Residue v, Residue m);
Residue gcd_residue(Residue a, Residue b);
/// Inverse of a unit modulo m; throws DomainError for non-units.
Residue inverse_mod(Residue a, Residue m);
Residue pow_mod(Residue a, std::int64_t e, Residue m);
/// Prime-power factorization p -> exponent.
std::map<Residue, int> factorize(Residue n);

/// Cardinality of a finite abelian group, stored as a prime factorization so
/// that |(Z/4)^2047| stays exact.
class Order {
 public:
  Order() = default;
  static Order of(Residue n);

  Order& operator*=(const Order& o);
  Order& operator/=(const Order& o);  // throws if not a divisor
  friend Order operator*(Order a, const Order& b) { return a *= b; }
  friend Order operator/(Order a, const Order& b) { return a /= b; }
  Order pow(int e) const;

  bool is_one() const { return exponents_.empty(); }
  bool divides(const Order& o) const;
  /// exact value if it fits in 62 bits
  std::optional<std::uint64_t> value() const;
  double log2() const;
  std::string to_string() const;
  const std::map<Residue, int>& exponents() const { return exponents_; }

  friend bool operator==(const Order&, const Order&) = default;
  friend bool operator<(const Order& a, const Order& b) { return a.log2() < b.log2() - 1e-12; }

 private:
  std::map<Residue, int> exponents_;
};

class ZmMatrix {
 public:
  ZmMatrix() = default;
  ZmMatrix(Residue modulus, std::size_t rows, std::size_t cols);

  static ZmMatrix identity(Residue modulus, std::size_t n);
  static ZmMatrix from_rows(Residue modulus,
                            const std::vector<std::vector<Residue>>& rows,
                            std::size_t cols = 0);
  static ZmMatrix diagonal(Residue modulus, std::span<const Residue> d);

  Residue modulus() const { return modulus_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Residue operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Residue v) { data_[r * cols_ + c] = mod_reduce(v, modulus_); }
  void add_to(std::size_t r, std::size_t c, Residue v) {
    data_[r * cols_ + c] = mod_reduce(data_[r * cols_ + c] + v, modulus_);
  }
  std::span<const Residue> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  ZmVector row_vector(std::size_t r) const;
  void append_row(std::span<const Residue> v);
  const std::vector<Residue>& data() const { return data_; }

  ZmMatrix transpose() const;
  ZmMatrix scaled(Residue s) const;
  /// Entrywise reduction to Z/n, n | m.
  ZmMatrix reduce_to(Residue n) const;
  /// Lift entries into a larger modulus (entries kept as integers in [0,m)).
  ZmMatrix with_modulus(Residue n) const;
  ZmMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  ZmMatrix select_rows(std::span<const std::size_t> idx) const;
  ZmMatrix select_cols(std::span<const std::size_t> idx) const;
  bool is_zero() const;
  bool is_identity() const;

  friend ZmMatrix operator*(const ZmMatrix& a, const ZmMatrix& b);
  friend ZmMatrix operator+(const ZmMatrix& a, const ZmMatrix& b);
  friend ZmMatrix operator-(const ZmMatrix& a, const ZmMatrix& b);
  friend bool operator==(const ZmMatrix&, const ZmMatrix&) = default;

  std::string to_string() const;

 private:
  Residue modulus_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> data_;
};

ZmMatrix hstack(const ZmMatrix& a, const ZmMatrix& b);
ZmMatrix vstack(const ZmMatrix& a, const ZmMatrix& b);
/// Kronecker product a (x) b.
ZmMatrix kron(const ZmMatrix& a, const ZmMatrix& b);
ZmVector vec_mul(std::span<const Residue> x, const ZmMatrix& a);
/// Inverse of a square matrix over Z/m; nullopt if singular.
std::optional<ZmMatrix> inverse(const ZmMatrix& a);

/// Canonical Howell normal form of the row module of A (zero rows dropped).
ZmMatrix howell_form(const ZmMatrix& a);
/// Rows generate the left kernel {x : xA = 0}.
ZmMatrix kernel(const ZmMatrix& a);
/// Some x with xA = b, or nullopt.  Throws MismatchError on shape mismatch.
std::optional<ZmVector> solve(const ZmMatrix& a, std::span<const Residue> b);
/// |row module of A|.
Order span_order(const ZmMatrix& a);
/// Is every row of `sub` in the row module of `a`?
bool row_span_contains(const ZmMatrix& a, const ZmMatrix& sub);
bool same_row_span(const ZmMatrix& a, const ZmMatrix& b);

/// A finitely presented Z/m-module together with an invariant-factor basis.
///
/// The module is (Z/m)^k / rowspan(relations).  When built by `subquotient`,
/// the k generators are vectors of an ambient free module and
/// `coordinates` maps ambient vectors back to invariant-factor coordinates.
class ZmModulePresentation {
 public:
  ZmModulePresentation() = default;
  /// Abstract presentation on `generator_count` generators.
  ZmModulePresentation(Residue modulus, std::size_t generator_count, const ZmMatrix& relations);
  /// Presentation of Z/d_1 + ... + Z/d_r on its standard generators.
  static ZmModulePresentation from_factors(Residue modulus, std::span<const Residue> factors);

  Residue modulus() const { return modulus_; }
  std::size_t generator_count() const { return generator_count_; }
  const ZmMatrix& relations() const { return relations_; }
  /// Divisibility chain d_1 | d_2 | ..., each d_i > 1 and d_i | m.
  const std::vector<Residue>& invariant_factors() const { return factors_; }
  Order cardinality() const;
  bool is_zero() const { return factors_.empty(); }

  /// Ambient vectors of the k generators (identity for abstract presentations).
  const ZmMatrix& ambient_generators() const { return ambient_; }
  /// One ambient vector per invariant factor.
  const ZmMatrix& factor_generators() const { return factor_gens_; }

  /// Coordinates (c_i mod d_i) of an element given in generator coordinates.
  ZmVector coordinates_of_combination(std::span<const Residue> gen_coeffs) const;
  /// Coordinates of an ambient vector lying in the span of the generators.
  /// Throws DomainError if it does not.
  ZmVector coordinates(std::span<const Residue> ambient) const;
  /// Ambient vector representing the given invariant-factor coordinates.
  ZmVector element(std::span<const Residue> coords) const;

  std::string to_string() const;

 private:
  friend ZmModulePresentation subquotient(const ZmMatrix&, const ZmMatrix&);
  void decompose();
  void set_ambient(const ZmMatrix& ambient);

  struct LocalPart {
    Residue prime = 0;
    Residue prime_power = 1;
    ZmMatrix transform;                  // k x k over Z/p^e, coordinates = x V
    std::vector<std::size_t> columns;    // summand columns, ascending exponent
    std::vector<Residue> powers;         // p^a for each summand
  };

  Residue modulus_ = 2;
  std::size_t generator_count_ = 0;
  ZmMatrix relations_;
  std::vector<Residue> factors_;
  std::vector<LocalPart> local_;
  ZmMatrix factor_gen_coeffs_;  // factors x k
  ZmMatrix ambient_;
  ZmMatrix factor_gens_;
};

/// (row module of gens) / (row module of rels).  Throws DomainError when some
/// row of rels is not in the span of gens.
ZmModulePresentation subquotient(const ZmMatrix& gens, const ZmMatrix& rels);

/// Invariant-factor lists compare as multisets.
bool same_factors(const std::vector<Residue>& a, const std::vector<Residue>& b);
std::string factors_to_string(const std::vector<Residue>& f);

}  // namespace atmot
