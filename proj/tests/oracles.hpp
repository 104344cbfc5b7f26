#pragma once

// Slow reference implementations the tests compare the library against.
// Nothing here goes through the table-driven arithmetic or the sweep kernel.

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "rankscatter/fq_subspace.hpp"

namespace oracle {

using rankscatter::FieldElement;
using rankscatter::FieldTower;
using rankscatter::VectorQn;

// Schoolbook F_p[z]/(modulus) on coefficient vectors.
struct NaiveField {
  std::uint32_t p;
  std::vector<std::uint32_t> mod;  // monic, low to high
  std::size_t deg;

  NaiveField(std::uint32_t p_, std::vector<std::uint32_t> m) : p(p_), mod(std::move(m)), deg(mod.size() - 1) {}

  std::vector<std::uint32_t> decode(std::uint64_t code) const {
    std::vector<std::uint32_t> c(deg);
    for (auto& v : c) {
      v = static_cast<std::uint32_t>(code % p);
      code /= p;
    }
    return c;
  }
  std::uint64_t encode(const std::vector<std::uint32_t>& c) const {
    std::uint64_t v = 0;
    for (std::size_t i = deg; i-- > 0;) v = v * p + c[i];
    return v;
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    auto x = decode(a), y = decode(b);
    std::vector<std::uint64_t> prod(2 * deg, 0);
    for (std::size_t i = 0; i < deg; ++i)
      for (std::size_t j = 0; j < deg; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{x[i]} * y[j]) % p;
    for (std::size_t k = 2 * deg - 1; k >= deg; --k) {
      const std::uint64_t c = prod[k];
      if (!c) continue;
      for (std::size_t i = 0; i <= deg; ++i)
        prod[k - deg + i] = (prod[k - deg + i] + (p - c) * mod[i]) % p;
    }
    std::vector<std::uint32_t> out(deg);
    for (std::size_t i = 0; i < deg; ++i) out[i] = static_cast<std::uint32_t>(prod[i]);
    return encode(out);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    auto x = decode(a), y = decode(b);
    for (std::size_t i = 0; i < deg; ++i) x[i] = (x[i] + y[i]) % p;
    return encode(x);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
};

inline NaiveField naive(const FieldTower& f) { return NaiveField(f.p(), f.modulus()); }

// Elements of F_q inside F_{q^n}: the fixed points of x -> x^q.
inline std::vector<FieldElement> subfield_elements(const FieldTower& f) {
  const auto nf = naive(f);
  std::vector<FieldElement> out;
  for (std::uint64_t x = 0; x < f.order(); ++x)
    if (nf.pow(x, f.q()) == x) out.push_back({x});
  return out;
}

// Every element of the F_q-span of gens, by enumerating coefficient tuples.
inline std::set<VectorQn> fq_span_elements(const FieldTower& f, const std::vector<VectorQn>& gens, std::size_t k) {
  const auto nf = naive(f);
  const auto fq = subfield_elements(f);
  std::set<VectorQn> cur{VectorQn(k)};
  for (const auto& g : gens) {
    std::set<VectorQn> next;
    for (const auto& v : cur)
      for (auto c : fq) {
        VectorQn w = v;
        for (std::size_t i = 0; i < k; ++i) w[i] = {nf.add(w[i].code, nf.mul(c.code, g[i].code))};
        next.insert(std::move(w));
      }
    cur = std::move(next);
  }
  return cur;
}

inline std::size_t log_base(std::uint64_t v, std::uint64_t b) {
  std::size_t e = 0;
  while (v > 1) {
    v /= b;
    ++e;
  }
  return e;
}

// Membership in an F_{q^n}-span by brute force over coefficient tuples.
inline std::set<VectorQn> qn_span_elements(const FieldTower& f, const std::vector<VectorQn>& gens, std::size_t k) {
  const auto nf = naive(f);
  std::set<VectorQn> cur{VectorQn(k)};
  for (const auto& g : gens) {
    std::set<VectorQn> next;
    for (const auto& v : cur)
      for (std::uint64_t c = 0; c < f.order(); ++c) {
        VectorQn w = v;
        for (std::size_t i = 0; i < k; ++i) w[i] = {nf.add(w[i].code, nf.mul(c, g[i].code))};
        next.insert(std::move(w));
      }
    cur = std::move(next);
  }
  return cur;
}

// dim_Fq(U ∩ H) by counting common elements.
inline std::size_t brute_weight(const FieldTower& f, const std::vector<VectorQn>& u_gens,
                                const std::vector<VectorQn>& h_gens, std::size_t k) {
  const auto u = fq_span_elements(f, u_gens, k);
  const auto h = qn_span_elements(f, h_gens, k);
  std::size_t common = 0;
  for (const auto& v : u) common += h.count(v);
  return log_base(common, f.q());
}

// [k, d]_Q by the Pascal recursion.
inline std::uint64_t gauss_pascal(std::size_t k, std::size_t d, std::uint64_t Q) {
  if (d > k) return 0;
  if (d == 0 || d == k) return 1;
  std::uint64_t qd = 1;
  for (std::size_t i = 0; i < d; ++i) qd *= Q;
  return gauss_pascal(k - 1, d - 1, Q) + qd * gauss_pascal(k - 1, d, Q);
}

// F_2-subspaces of F_2^t as bases of bitmasks, all dimensions.
inline std::vector<std::vector<std::uint32_t>> binary_subspaces(std::size_t t) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::size_t d = 0; d <= t; ++d) {
    for (std::uint32_t piv = 0; piv < (1U << t); ++piv) {
      if (static_cast<std::size_t>(__builtin_popcount(piv)) != d) continue;
      // free positions of row r: non-pivot columns after its pivot
      std::vector<std::size_t> pivots;
      for (std::size_t c = 0; c < t; ++c)
        if (piv >> c & 1) pivots.push_back(c);
      std::vector<std::pair<std::size_t, std::size_t>> free;
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = pivots[r] + 1; c < t; ++c)
          if (!(piv >> c & 1)) free.emplace_back(r, c);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
        std::vector<std::uint32_t> rows(d);
        for (std::size_t r = 0; r < d; ++r) rows[r] = 1U << pivots[r];
        for (std::size_t i = 0; i < free.size(); ++i)
          if (bits >> i & 1) rows[free[i].first] |= 1U << free[i].second;
        out.push_back(rows);
      }
    }
  }
  return out;
}

// Code-side generalized rank weights for q = 2: d_rho is the least dim V over
// F_2-rational V of F_{2^n}^t with dim(C ∩ V) >= rho.
inline std::vector<std::size_t> code_side_weights(const FieldTower& f, const rankscatter::MatrixQn& G) {
  const std::size_t k = G.rows(), t = G.cols();
  std::vector<std::size_t> best(k + 1, t + 1);
  for (const auto& basis : binary_subspaces(t)) {
    rankscatter::MatrixQn m = G;
    for (auto row : basis) {
      VectorQn v(t);
      for (std::size_t c = 0; c < t; ++c) v[c] = (row >> c & 1) ? f.one() : f.zero();
      m.append_row(v);
    }
    const std::size_t inter = k + basis.size() - rankscatter::rank_qn(f, m);
    for (std::size_t rho = 1; rho <= inter; ++rho) best[rho] = std::min(best[rho], basis.size());
  }
  return {best.begin() + 1, best.end()};
}

}  // namespace oracle
