#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankscatter {

/// Error raised for malformed fields, parameters, or mismatched operands.
class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An element of F_{q^n}, stored as its coefficient vector over the prime
/// field packed base p: code = sum_i c_i p^i with c_i the coefficient of z^i.
struct FieldElement {
  std::uint64_t code = 0;

  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

using VectorQn = std::vector<FieldElement>;

/// F_q ⊂ F_{q^n}, q = p^s, realised flat as F_p[z]/(modulus) with
/// deg(modulus) = s·n. The subfield F_q is the fixed field of x ↦ x^q.
///
/// Instances are cheap handles onto shared immutable tables and can be
/// shared across threads.
class FieldTower {
 public:
  /// Builds the tower. Without a modulus, picks the monic irreducible of
  /// degree s·n whose packed code of c_0..c_{sn-1} is smallest.
  static FieldTower create(std::uint32_t p, std::uint32_t s, std::uint32_t n,
                           std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

  std::uint32_t p() const;
  std::uint32_t s() const;
  std::uint32_t n() const;
  /// s·n, the degree over the prime field.
  std::uint32_t degree() const;
  std::uint64_t q() const;
  /// Q = q^n.
  std::uint64_t order() const;
  /// c_0..c_{sn}, monic.
  const std::vector<std::uint32_t>& modulus() const;

  FieldElement zero() const { return {}; }
  FieldElement one() const { return {1}; }
  /// Class of z.
  FieldElement generator() const;
  FieldElement from_code(std::uint64_t code) const;
  FieldElement from_coeffs(std::span<const std::uint32_t> coeffs) const;
  std::vector<std::uint32_t> coeffs(FieldElement x) const;
  /// Coefficient of z^i.
  std::uint32_t digit(FieldElement x, std::uint32_t i) const;

  FieldElement add(FieldElement a, FieldElement b) const;
  FieldElement sub(FieldElement a, FieldElement b) const;
  FieldElement neg(FieldElement a) const;
  FieldElement mul(FieldElement a, FieldElement b) const;
  /// Multiplication by a prime-field scalar.
  FieldElement scale(FieldElement a, std::uint32_t c) const;
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const;
  FieldElement pow(FieldElement a, std::uint64_t e) const;

  /// x^{q^j}; j is taken mod n.
  FieldElement frobenius(FieldElement x, std::int64_t j) const;
  bool in_subfield(FieldElement x) const;
  /// True iff x = y^e for some nonzero y. Throws on x = 0.
  bool is_power_residue(FieldElement x, std::uint64_t e) const;
  /// gcd(e, Q-1) where e is given only through its residue e mod (Q-1).
  std::uint64_t residue_gcd(std::uint64_t e_mod_order_minus_one) const;

  /// F_q-basis of F_{q^n}: 1, z, ..., z^{n-1}.
  const std::vector<FieldElement>& q_basis() const;
  /// F_p-basis 1, w, ..., w^{s-1} of the subfield F_q.
  const std::vector<FieldElement>& subfield_basis() const;
  /// F_p-basis of F_{q^n}: w^a z^b, ordered with b major.
  const std::vector<FieldElement>& prime_basis() const;
  /// Coordinates on q_basis; each entry lies in F_q.
  std::vector<FieldElement> expand(FieldElement x) const;
  FieldElement combine(std::span<const FieldElement> fq_coords) const;

  /// All elements, in code order. Only for small fields.
  std::vector<FieldElement> elements() const;

  std::string describe() const;

  friend bool operator==(const FieldTower& a, const FieldTower& b);

 private:
  struct Impl;
  explicit FieldTower(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

bool is_prime(std::uint64_t v);
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
/// (base^e) mod m with 128-bit intermediates.
std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m);

/// Irreducibility of a monic polynomial over F_p (Rabin's test).
bool is_irreducible(std::span<const std::uint32_t> poly, std::uint32_t p);

}  // namespace rankscatter
