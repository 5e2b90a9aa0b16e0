#pragma once

// Brute-force oracles used only by the test suites.  They enumerate finite
// modules element by element and never call the Howell/SNF machinery.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "atmot/group_core.hpp"
#include "atmot/zm_linalg.hpp"

namespace oracle {

using atmot::Residue;
using Vec = std::vector<Residue>;

/// Every element of the row module of the given rows over Z/m.
inline std::set<Vec> row_span(const std::vector<Vec>& rows, std::size_t width, Residue m) {
  std::set<Vec> span{Vec(width, 0)};
  for (const auto& r : rows) {
    std::set<Vec> next;
    for (const auto& v : span) {
      for (Residue c = 0; c < m; ++c) {
        Vec w = v;
        for (std::size_t k = 0; k < width; ++k) w[k] = (w[k] + c * r[k]) % m;
        next.insert(w);
      }
    }
    span = std::move(next);
  }
  return span;
}

inline std::vector<Vec> rows_of(const atmot::ZmMatrix& a) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(a.row_vector(i));
  return out;
}

/// All vectors of (Z/m)^n.
inline std::vector<Vec> all_vectors(std::size_t n, Residue m) {
  std::vector<Vec> out{Vec(n, 0)};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Vec> next;
    for (const auto& v : out)
      for (Residue c = 0; c < m; ++c) {
        Vec w = v;
        w[k] = c;
        next.push_back(w);
      }
    out = std::move(next);
  }
  return out;
}

/// Invariant factors of a finite abelian group given as a set of vectors
/// closed under addition, by counting d-torsion: the number of factors
/// divisible by each prime power is read off from |G[p^k]|.
inline std::vector<Residue> invariant_factors_by_counting(const std::set<Vec>& group, Residue m) {
  // group is a subgroup of (Z/m)^n; for each prime power q = p^k | m count
  // elements killed by q.  |G[p^k]| / |G[p^(k-1)]| = p^(number of cyclic
  // p-factors of order >= p^k).
  std::map<Residue, std::vector<int>> counts;  // p -> number of factors with order >= p^k, k=1..
  Residue mm = m;
  std::vector<Residue> primes;
  for (Residue p = 2; p <= mm; ++p) {
    if (mm % p == 0) {
      primes.push_back(p);
      while (mm % p == 0) mm /= p;
    }
  }
  auto killed_by = [&](Residue q) {
    std::size_t c = 0;
    for (const auto& v : group) {
      bool ok = true;
      for (Residue x : v)
        if ((x * q) % m != 0) {
          ok = false;
          break;
        }
      if (ok) ++c;
    }
    return c;
  };
  std::vector<Residue> factors_per_prime_power;
  std::map<Residue, std::vector<Residue>> local;  // p -> list of p-power orders
  for (Residue p : primes) {
    std::vector<int> ge;  // ge[k-1] = #factors with order >= p^k
    Residue q = 1;
    std::size_t prev = 1;
    while (m % (q * p) == 0) {
      q *= p;
      std::size_t c = killed_by(q);
      int e = 0;
      std::size_t ratio = c / prev;
      while (ratio > 1) {
        ratio /= static_cast<std::size_t>(p);
        ++e;
      }
      ge.push_back(e);
      prev = c;
    }
    std::vector<Residue> orders;
    for (std::size_t k = 0; k < ge.size(); ++k) {
      int exactly = ge[k] - (k + 1 < ge.size() ? ge[k + 1] : 0);
      Residue pk = 1;
      for (std::size_t i = 0; i <= k; ++i) pk *= p;
      for (int i = 0; i < exactly; ++i) orders.push_back(pk);
    }
    std::sort(orders.begin(), orders.end());
    local[p] = orders;
  }
  std::size_t len = 0;
  for (auto& [p, o] : local) len = std::max(len, o.size());
  std::vector<Residue> out(len, 1);
  for (auto& [p, o] : local) {
    std::size_t off = len - o.size();
    for (std::size_t i = 0; i < o.size(); ++i) out[off + i] *= o[i];
  }
  return out;
}

inline atmot::ZmMatrix random_matrix(std::mt19937_64& rng, Residue m, std::size_t r, std::size_t c) {
  atmot::ZmMatrix a(m, r, c);
  std::uniform_int_distribution<Residue> d(0, m - 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a.set(i, j, d(rng));
  return a;
}

}  // namespace oracle

namespace oracle {

/// All subgroups of a group of order <= 16 by testing every subset for
/// closure.  Subsets are encoded as bitmasks over element indices.
inline std::vector<std::uint32_t> subgroups_by_subset_search(const atmot::FiniteGroup& g) {
  std::size_t n = g.order();
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 1; mask < (1u << n); mask += 2) {  // identity = bit 0
    bool closed = true;
    for (std::size_t a = 0; a < n && closed; ++a) {
      if (!(mask >> a & 1)) continue;
      for (std::size_t b = 0; b < n; ++b)
        if ((mask >> b & 1) && !(mask >> g.mul(static_cast<int>(a), static_cast<int>(b)) & 1)) {
          closed = false;
          break;
        }
    }
    if (closed) out.push_back(mask);
  }
  return out;
}

/// Number of conjugacy classes among a list of subgroup bitmasks.
inline std::size_t conjugacy_class_count(const atmot::FiniteGroup& g,
                                         const std::vector<std::uint32_t>& subs) {
  std::set<std::uint32_t> seen;
  std::size_t classes = 0;
  for (auto s : subs) {
    if (seen.count(s)) continue;
    ++classes;
    for (std::size_t x = 0; x < g.order(); ++x) {
      std::uint32_t c = 0;
      for (std::size_t e = 0; e < g.order(); ++e)
        if (s >> e & 1) c |= 1u << g.conj(static_cast<int>(x), static_cast<int>(e));
      seen.insert(c);
    }
  }
  return classes;
}

}  // namespace oracle

namespace oracle {

/// |H^n(G, M)| for a rank-one module (g acts by scalar a[g]) with n in {1, 2},
/// counting all unnormalized cocycles and coboundaries by enumeration.
inline std::size_t cohomology_order_bruteforce(const atmot::FiniteGroup& g,
                                               const std::vector<Residue>& a, Residue m, int n) {
  std::size_t order = g.order();
  auto cells = [&](int k) {
    std::size_t c = 1;
    for (int i = 0; i < k; ++i) c *= order;
    return c;
  };
  // d of an unnormalized k-cochain given as a value list indexed by tuples
  auto coboundary = [&](const Vec& f, int k) {
    Vec out(cells(k + 1), 0);
    for (std::size_t s = 0; s < out.size(); ++s) {
      std::vector<int> t(k + 1);
      std::size_t x = s;
      for (int i = k; i >= 0; --i) {
        t[i] = static_cast<int>(x % order);
        x /= order;
      }
      auto idx = [&](const std::vector<int>& u) {
        std::size_t r = 0;
        for (int v : u) r = r * order + static_cast<std::size_t>(v);
        return r;
      };
      Residue v = a[t[0]] * f[idx(std::vector<int>(t.begin() + 1, t.end()))];
      for (int i = 1; i <= k; ++i) {
        std::vector<int> u;
        for (int j = 0; j <= k; ++j) {
          if (j == i - 1) {
            u.push_back(g.mul(t[j], t[j + 1]));
            ++j;
          } else {
            u.push_back(t[j]);
          }
        }
        v += (i % 2 ? m - 1 : 1) * f[idx(u)];
      }
      v += ((k + 1) % 2 ? m - 1 : 1) * f[idx(std::vector<int>(t.begin(), t.end() - 1))];
      out[s] = v % m;
    }
    return out;
  };
  std::size_t cocycles = 0;
  for (const auto& f : all_vectors(cells(n), m)) {
    Vec d = coboundary(f, n);
    if (std::all_of(d.begin(), d.end(), [](Residue x) { return x == 0; })) ++cocycles;
  }
  std::set<Vec> bounds;
  for (const auto& f : all_vectors(cells(n - 1), m)) bounds.insert(coboundary(f, n - 1));
  return cocycles / bounds.size();
}

/// Invariant factors of H^n(Z/k, M) for rank-one M where the generator acts
/// by a, from the periodic resolution: H^0 = M^G, H^odd = ker N / (a-1)M,
/// H^even = M^G / N M.
inline std::vector<Residue> cyclic_cohomology(std::size_t k, Residue a, Residue m, int n) {
  Residue norm = 0, p = 1;
  for (std::size_t i = 0; i < k; ++i) {
    norm = (norm + p) % m;
    p = p * a % m;
  }
  std::set<Residue> top, bottom;
  for (Residue x = 0; x < m; ++x) {
    bool fixed = (a * x - x) % m == 0;
    bool norm_zero = norm * x % m == 0;
    if (n == 0 ? fixed : (n % 2 ? norm_zero : fixed)) top.insert(x);
    if (n == 0) bottom.insert(0);
    else if (n % 2) bottom.insert(((a - 1) * x % m + m) % m);
    else bottom.insert(norm * x % m);
  }
  std::size_t q = top.size() / bottom.size();
  if (q == 1) return {};
  return {static_cast<Residue>(q)};  // subquotients of Z/m are cyclic
}

}  // namespace oracle
