#include "rankscatter/field_tower.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rankscatter {

namespace {

using Poly = std::vector<std::uint64_t>;  // low degree first, coefficients mod p

constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 20;
constexpr std::uint64_t kOrderLimit = std::uint64_t{1} << 62;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint64_t inv_mod_p(std::uint64_t a, std::uint64_t p) { return powmod_u64(a % p, p - 2, p); }

Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t lead_inv = inv_mod_p(m.back(), p);
  while (a.size() >= m.size()) {
    const std::uint64_t f = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = (a[shift + i] + (p - f) * m[i]) % p;
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = poly_mod(std::move(a), b, p);
    std::swap(a, b);
  }
  return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

// Dense square matrix inverse over F_p; rows are coefficient vectors.
std::vector<std::vector<std::uint32_t>> invert_mod_p(std::vector<std::vector<std::uint32_t>> a,
                                                     std::uint32_t p) {
  const std::size_t n = a.size();
  std::vector<std::vector<std::uint32_t>> inv(n, std::vector<std::uint32_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw FieldError("basis matrix is singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const std::uint64_t f = inv_mod_p(a[col][col], p);
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] = static_cast<std::uint32_t>(a[col][j] * f % p);
      inv[col][j] = static_cast<std::uint32_t>(inv[col][j] * f % p);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const std::uint64_t g = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] = static_cast<std::uint32_t>((a[r][j] + (p - g) * a[col][j]) % p);
        inv[r][j] = static_cast<std::uint32_t>((inv[r][j] + (p - g) * inv[col][j]) % p);
      }
    }
  }
  return inv;
}

}  // namespace

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  if (m == 1) return 0;
  unsigned __int128 r = 1, b = base % m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

bool is_irreducible(std::span<const std::uint32_t> poly, std::uint32_t p) {
  Poly f(poly.begin(), poly.end());
  for (auto& c : f) c %= p;
  trim(f);
  if (f.size() < 2) return false;
  const std::uint64_t deg = f.size() - 1;
  if (deg == 1) return true;
  const Poly x{0, 1};
  // x^{p^i} mod f for i = 1..deg
  std::vector<Poly> frob(deg + 1);
  frob[0] = x;
  for (std::uint64_t i = 1; i <= deg; ++i) frob[i] = poly_powmod(frob[i - 1], p, f, p);
  auto minus_x = [&](Poly a) {
    if (a.size() < 2) a.resize(2, 0);
    a[1] = (a[1] + p - 1) % p;
    trim(a);
    return a;
  };
  if (!minus_x(frob[deg]).empty()) return false;
  for (std::uint64_t r : prime_factors(deg)) {
    Poly g = poly_gcd(f, minus_x(frob[deg / r]), p);
    if (g.size() != 1) return false;
  }
  return true;
}

struct FieldTower::Impl {
  std::uint32_t p = 2, s = 1, n = 2, degree = 2;
  std::uint64_t q = 2, order = 4;
  std::vector<std::uint32_t> modulus;
  std::vector<std::uint64_t> pw;  // p^i, i = 0..degree
  std::uint64_t modulus_code_full = 0;  // p == 2: modulus including z^degree

  bool tables = false;
  std::vector<std::uint32_t> exp_table;  // size 2(Q-1)
  std::vector<std::uint32_t> log_table;  // size Q

  // frob_images[j][i] = (z^i)^{q^j}
  std::vector<std::vector<std::uint64_t>> frob_images;
  std::vector<FieldElement> q_basis, subfield_basis, prime_basis;
  std::vector<std::vector<std::uint32_t>> coord_inverse;  // digits -> prime_basis coordinates

  std::uint32_t digit(std::uint64_t code, std::uint32_t i) const {
    if (p == 2) return static_cast<std::uint32_t>((code >> i) & 1U);
    return static_cast<std::uint32_t>(code / pw[i] % p);
  }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    if (p == 2) return a ^ b;
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < degree; ++i) {
      const std::uint64_t da = a % p, db = b % p;
      a /= p;
      b /= p;
      r += ((da + db) % p) * pw[i];
    }
    return r;
  }

  std::uint64_t scale(std::uint64_t a, std::uint32_t c) const {
    c %= p;
    if (c == 0) return 0;
    if (c == 1) return a;
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < degree; ++i) {
      r += (a % p) * c % p * pw[i];
      a /= p;
    }
    return r;
  }

  std::uint64_t mul_slow(std::uint64_t a, std::uint64_t b) const {
    if (p == 2) {
      std::uint64_t r = 0;
      const std::uint64_t top = std::uint64_t{1} << degree;
      while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= modulus_code_full;
      }
      return r;
    }
    std::vector<std::uint64_t> da(degree), db(degree), prod(2 * degree - 1, 0);
    for (std::uint32_t i = 0; i < degree; ++i) {
      da[i] = a % p;
      a /= p;
      db[i] = b % p;
      b /= p;
    }
    for (std::uint32_t i = 0; i < degree; ++i) {
      if (!da[i]) continue;
      for (std::uint32_t j = 0; j < degree; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
    }
    for (std::size_t k = prod.size(); k-- > degree;) {
      const std::uint64_t f = prod[k];
      if (!f) continue;
      for (std::uint32_t i = 0; i < degree; ++i)
        prod[k - degree + i] = (prod[k - degree + i] + (p - f) * modulus[i]) % p;
      prod[k] = 0;
    }
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < degree; ++i) r += prod[i] * pw[i];
    return r;
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    if (tables) return exp_table[log_table[a] + log_table[b]];
    return mul_slow(a, b);
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

  std::uint64_t apply_linear(const std::vector<std::uint64_t>& images, std::uint64_t x) const {
    std::uint64_t r = 0;
    if (p == 2) {
      while (x) {
        const int i = __builtin_ctzll(x);
        r ^= images[static_cast<std::size_t>(i)];
        x &= x - 1;
      }
      return r;
    }
    for (std::uint32_t i = 0; i < degree && x; ++i) {
      const auto c = static_cast<std::uint32_t>(x % p);
      x /= p;
      if (c) r = add(r, scale(images[i], c));
    }
    return r;
  }

  std::uint64_t frob(std::uint64_t x, std::int64_t j) const {
    const auto jj = static_cast<std::size_t>(((j % static_cast<std::int64_t>(n)) + n) % n);
    if (jj == 0) return x;
    return apply_linear(frob_images[jj], x);
  }
};

FieldTower FieldTower::create(std::uint32_t p, std::uint32_t s, std::uint32_t n,
                              std::optional<std::vector<std::uint32_t>> modulus) {
  if (!is_prime(p)) throw FieldError("characteristic p must be prime");
  if (p >= 65536) throw FieldError("characteristic p must be below 2^16");
  if (s < 1) throw FieldError("s must be at least 1");
  if (n < 2) throw FieldError("extension degree n >= 2 required");
  auto impl = std::make_shared<Impl>();
  impl->p = p;
  impl->s = s;
  impl->n = n;
  impl->degree = s * n;
  const std::uint32_t degree = impl->degree;
  {
    unsigned __int128 ord = 1;
    for (std::uint32_t i = 0; i < degree; ++i) {
      ord *= p;
      if (ord > kOrderLimit) throw FieldError("field order exceeds 2^62");
    }
    impl->order = static_cast<std::uint64_t>(ord);
  }
  impl->q = 1;
  for (std::uint32_t i = 0; i < s; ++i) impl->q *= p;
  impl->pw.resize(degree + 1);
  impl->pw[0] = 1;
  for (std::uint32_t i = 1; i <= degree; ++i) impl->pw[i] = impl->pw[i - 1] * p;

  if (modulus) {
    auto m = *modulus;
    for (auto c : m)
      if (c >= p) throw FieldError("modulus coefficient out of range");
    while (!m.empty() && m.back() == 0) m.pop_back();
    if (m.size() != degree + 1) throw FieldError("modulus must have degree s*n");
    if (m.back() != 1) throw FieldError("modulus must be monic");
    if (!is_irreducible(m, p)) throw FieldError("modulus is reducible");
    impl->modulus = std::move(m);
  } else {
    std::vector<std::uint32_t> m(degree + 1, 0);
    m[degree] = 1;
    bool found = false;
    for (std::uint64_t low = 0; low < impl->order && !found; ++low) {
      std::uint64_t v = low;
      for (std::uint32_t i = 0; i < degree; ++i) {
        m[i] = static_cast<std::uint32_t>(v % p);
        v /= p;
      }
      if (m[0] == 0) continue;
      found = is_irreducible(m, p);
    }
    if (!found) throw FieldError("no irreducible polynomial found");
    impl->modulus = std::move(m);
  }
  if (p == 2) {
    impl->modulus_code_full = 0;
    for (std::uint32_t i = 0; i <= degree; ++i)
      if (impl->modulus[i]) impl->modulus_code_full |= std::uint64_t{1} << i;
  }

  const std::uint64_t Q = impl->order;
  if (Q <= kTableLimit) {
    const auto factors = prime_factors(Q - 1);
    std::uint64_t gen = 0;
    for (std::uint64_t g = 2; g < Q && !gen; ++g) {
      bool primitive = true;
      for (auto r : factors) {
        std::uint64_t acc = 1, b = g, e = (Q - 1) / r;
        while (e) {
          if (e & 1) acc = impl->mul_slow(acc, b);
          b = impl->mul_slow(b, b);
          e >>= 1;
        }
        if (acc == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) gen = g;
    }
    if (Q == 2) gen = 1;
    impl->exp_table.resize(2 * (Q - 1));
    impl->log_table.assign(Q, 0);
    std::uint64_t cur = 1;
    for (std::uint64_t i = 0; i < Q - 1; ++i) {
      impl->exp_table[i] = static_cast<std::uint32_t>(cur);
      impl->exp_table[i + Q - 1] = static_cast<std::uint32_t>(cur);
      impl->log_table[cur] = static_cast<std::uint32_t>(i);
      cur = impl->mul_slow(cur, gen);
    }
    impl->tables = true;
  }

  // Frobenius x -> x^q is F_p-linear; tabulate images of z^i for every power.
  impl->frob_images.assign(n, std::vector<std::uint64_t>(degree));
  for (std::uint32_t i = 0; i < degree; ++i) impl->frob_images[0][i] = impl->pw[i];
  for (std::uint32_t j = 1; j < n; ++j)
    for (std::uint32_t i = 0; i < degree; ++i)
      impl->frob_images[j][i] = impl->pow(impl->frob_images[j - 1][i], impl->q);

  // Subfield generator w: smallest-code element of F_q of degree exactly s.
  FieldElement w{1};
  if (s > 1) {
    // F_q = ker(Frob_q - id) over F_p; enumerate it by brute force on its basis.
    std::vector<std::vector<std::uint32_t>> rows;  // matrix of (Frob - id), column i = image of z^i
    std::vector<std::vector<std::uint32_t>> mat(degree, std::vector<std::uint32_t>(degree));
    for (std::uint32_t i = 0; i < degree; ++i) {
      const std::uint64_t img = impl->add(impl->frob_images[1][i], impl->scale(impl->pw[i], p - 1));
      for (std::uint32_t r = 0; r < degree; ++r) mat[r][i] = impl->digit(img, r);
    }
    // RREF to read off kernel.
    std::vector<int> pivot_of_col(degree, -1);
    std::size_t rank = 0;
    for (std::uint32_t c = 0; c < degree && rank < degree; ++c) {
      std::size_t piv = rank;
      while (piv < degree && mat[piv][c] == 0) ++piv;
      if (piv == degree) continue;
      std::swap(mat[piv], mat[rank]);
      const std::uint64_t f = inv_mod_p(mat[rank][c], p);
      for (auto& v : mat[rank]) v = static_cast<std::uint32_t>(v * f % p);
      for (std::size_t r = 0; r < degree; ++r) {
        if (r == rank || mat[r][c] == 0) continue;
        const std::uint64_t g = mat[r][c];
        for (std::uint32_t j = 0; j < degree; ++j)
          mat[r][j] = static_cast<std::uint32_t>((mat[r][j] + (p - g) * mat[rank][j]) % p);
      }
      pivot_of_col[c] = static_cast<int>(rank);
      ++rank;
    }
    std::vector<std::uint64_t> kernel;
    for (std::uint32_t fc = 0; fc < degree; ++fc) {
      if (pivot_of_col[fc] >= 0) continue;
      std::uint64_t v = impl->pw[fc];
      for (std::uint32_t c = 0; c < degree; ++c)
        if (pivot_of_col[c] >= 0) {
          const std::uint32_t coef = mat[static_cast<std::size_t>(pivot_of_col[c])][fc];
          v = impl->add(v, impl->scale(impl->pw[c], (p - coef) % p));
        }
      kernel.push_back(v);
    }
    if (kernel.size() != s) throw FieldError("subfield dimension mismatch");
    const auto sub_primes = prime_factors(s);
    std::vector<std::uint64_t> candidates;
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < s; ++i) total *= p;
    for (std::uint64_t idx = 1; idx < total; ++idx) {
      std::uint64_t v = idx, x = 0;
      for (std::uint32_t i = 0; i < s; ++i) {
        x = impl->add(x, impl->scale(kernel[i], static_cast<std::uint32_t>(v % p)));
        v /= p;
      }
      candidates.push_back(x);
    }
    std::sort(candidates.begin(), candidates.end());
    bool found = false;
    for (auto x : candidates) {
      bool full = true;
      for (auto r : sub_primes) {
        std::uint64_t e = 1;
        for (std::uint32_t i = 0; i < s / r; ++i) e *= p;
        if (impl->pow(x, e) == x) {
          full = false;
          break;
        }
      }
      if (full) {
        w = FieldElement{x};
        found = true;
        break;
      }
    }
    if (!found) throw FieldError("no subfield generator");
  }
  std::uint64_t wa = 1;
  for (std::uint32_t a = 0; a < s; ++a) {
    impl->subfield_basis.push_back(FieldElement{wa});
    wa = impl->mul(wa, w.code);
  }
  for (std::uint32_t b = 0; b < n; ++b) impl->q_basis.push_back(FieldElement{impl->pw[b]});
  for (std::uint32_t b = 0; b < n; ++b)
    for (std::uint32_t a = 0; a < s; ++a)
      impl->prime_basis.push_back(
          FieldElement{impl->mul(impl->subfield_basis[a].code, impl->q_basis[b].code)});
  {
    std::vector<std::vector<std::uint32_t>> m(degree, std::vector<std::uint32_t>(degree));
    for (std::uint32_t col = 0; col < degree; ++col)
      for (std::uint32_t r = 0; r < degree; ++r) m[r][col] = impl->digit(impl->prime_basis[col].code, r);
    impl->coord_inverse = invert_mod_p(std::move(m), p);
  }
  return FieldTower(std::move(impl));
}

std::uint32_t FieldTower::p() const { return impl_->p; }
std::uint32_t FieldTower::s() const { return impl_->s; }
std::uint32_t FieldTower::n() const { return impl_->n; }
std::uint32_t FieldTower::degree() const { return impl_->degree; }
std::uint64_t FieldTower::q() const { return impl_->q; }
std::uint64_t FieldTower::order() const { return impl_->order; }
const std::vector<std::uint32_t>& FieldTower::modulus() const { return impl_->modulus; }

FieldElement FieldTower::generator() const { return FieldElement{impl_->p == 2 ? 2U : impl_->p}; }

FieldElement FieldTower::from_code(std::uint64_t code) const {
  if (code >= impl_->order) throw FieldError("element code out of range");
  return FieldElement{code};
}

FieldElement FieldTower::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > impl_->degree) throw FieldError("too many coefficients for field element");
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] >= impl_->p) throw FieldError("coefficient out of range");
    code += coeffs[i] * impl_->pw[i];
  }
  return FieldElement{code};
}

std::vector<std::uint32_t> FieldTower::coeffs(FieldElement x) const {
  std::vector<std::uint32_t> out(impl_->degree);
  for (std::uint32_t i = 0; i < impl_->degree; ++i) out[i] = impl_->digit(x.code, i);
  return out;
}

std::uint32_t FieldTower::digit(FieldElement x, std::uint32_t i) const { return impl_->digit(x.code, i); }

FieldElement FieldTower::add(FieldElement a, FieldElement b) const { return {impl_->add(a.code, b.code)}; }
FieldElement FieldTower::neg(FieldElement a) const { return {impl_->scale(a.code, impl_->p - 1)}; }
FieldElement FieldTower::sub(FieldElement a, FieldElement b) const { return add(a, neg(b)); }
FieldElement FieldTower::mul(FieldElement a, FieldElement b) const { return {impl_->mul(a.code, b.code)}; }
FieldElement FieldTower::scale(FieldElement a, std::uint32_t c) const { return {impl_->scale(a.code, c)}; }

FieldElement FieldTower::inv(FieldElement a) const {
  if (a.code == 0) throw FieldError("inverse of zero");
  if (impl_->tables) {
    const std::uint64_t l = impl_->log_table[a.code];
    return {impl_->exp_table[(impl_->order - 1 - l) % (impl_->order - 1)]};
  }
  return {impl_->pow(a.code, impl_->order - 2)};
}

FieldElement FieldTower::div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }
FieldElement FieldTower::pow(FieldElement a, std::uint64_t e) const { return {impl_->pow(a.code, e)}; }

FieldElement FieldTower::frobenius(FieldElement x, std::int64_t j) const { return {impl_->frob(x.code, j)}; }

bool FieldTower::in_subfield(FieldElement x) const { return frobenius(x, 1) == x; }

std::uint64_t FieldTower::residue_gcd(std::uint64_t e_mod) const {
  return gcd_u64(e_mod % (impl_->order - 1), impl_->order - 1);
}

bool FieldTower::is_power_residue(FieldElement x, std::uint64_t e) const {
  if (x.code == 0) throw FieldError("power residue test of zero");
  const std::uint64_t g = residue_gcd(e);
  return impl_->pow(x.code, (impl_->order - 1) / g) == 1;
}

const std::vector<FieldElement>& FieldTower::q_basis() const { return impl_->q_basis; }
const std::vector<FieldElement>& FieldTower::subfield_basis() const { return impl_->subfield_basis; }
const std::vector<FieldElement>& FieldTower::prime_basis() const { return impl_->prime_basis; }

std::vector<FieldElement> FieldTower::expand(FieldElement x) const {
  const auto& im = *impl_;
  std::vector<std::uint64_t> coords(im.degree, 0);
  for (std::uint32_t r = 0; r < im.degree; ++r) {
    std::uint64_t acc = 0;
    for (std::uint32_t c = 0; c < im.degree; ++c) acc += std::uint64_t{im.coord_inverse[r][c]} * im.digit(x.code, c);
    coords[r] = acc % im.p;
  }
  std::vector<FieldElement> out(im.n);
  for (std::uint32_t b = 0; b < im.n; ++b) {
    std::uint64_t v = 0;
    for (std::uint32_t a = 0; a < im.s; ++a)
      v = im.add(v, im.scale(im.subfield_basis[a].code, static_cast<std::uint32_t>(coords[b * im.s + a])));
    out[b] = FieldElement{v};
  }
  return out;
}

FieldElement FieldTower::combine(std::span<const FieldElement> fq_coords) const {
  if (fq_coords.size() != impl_->n) throw FieldError("expected n coordinates");
  FieldElement acc{};
  for (std::uint32_t b = 0; b < impl_->n; ++b) acc = add(acc, mul(fq_coords[b], impl_->q_basis[b]));
  return acc;
}

std::vector<FieldElement> FieldTower::elements() const {
  if (impl_->order > (std::uint64_t{1} << 24)) throw FieldError("field too large to enumerate");
  std::vector<FieldElement> out(impl_->order);
  for (std::uint64_t i = 0; i < impl_->order; ++i) out[i] = FieldElement{i};
  return out;
}

std::string FieldTower::describe() const {
  std::ostringstream os;
  os << "F_" << impl_->order << " over F_" << impl_->q << " (p=" << impl_->p << ", s=" << impl_->s
     << ", n=" << impl_->n << ")";
  return os.str();
}

bool operator==(const FieldTower& a, const FieldTower& b) {
  if (a.impl_ == b.impl_) return true;
  return a.impl_->p == b.impl_->p && a.impl_->s == b.impl_->s && a.impl_->n == b.impl_->n &&
         a.impl_->modulus == b.impl_->modulus;
}

}  // namespace rankscatter
