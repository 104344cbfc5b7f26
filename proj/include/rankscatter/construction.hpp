#pragma once

#include <string>
#include <vector>

#include "rankscatter/fq_subspace.hpp"

namespace rankscatter {

/// (q, n, m, h, alpha_1..alpha_m) for the family V_{A,h} in F_{q^n}^{m(h+1)}.
struct ConstructionParams {
  FieldTower tower;
  std::size_t m = 3;
  std::size_t h = 1;
  std::vector<FieldElement> alphas;

  /// Throws FieldError unless m >= 3, 1 <= h <= n-2 and every alpha is a
  /// nonzero element of the tower.
  void validate() const;
  /// alpha_i with the index taken mod m into 1..m.
  FieldElement alpha(std::int64_t i) const;
};

enum class SystemKind { family, pseudoregulus, direct_sum, line_control, custom };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& s);

/// A q-system: a t-dimensional F_q-subspace of F_{q^n}^k.
struct QSystemDesc {
  FqSubspace space;
  SystemKind kind = SystemKind::custom;

  std::size_t k() const { return space.ambient(); }
  std::size_t t() const { return space.dim(); }
};

/// K_A = alpha_1^{q^{m-1}} alpha_2 alpha_3^q ... alpha_m^{q^{m-2}}.
FieldElement k_invariant(const ConstructionParams& params);
/// A in the admissible set: K_A is not a (1 + q + ... + q^{m-1})-th power.
bool is_in_A(const ConstructionParams& params);
/// gcd(1 + q + ... + q^{m-1}, q^n - 1) > 1, i.e. the admissible set can be
/// nonempty at all for this (q, n, m).
bool is_nonvacuous(const FieldTower& f, std::size_t m);
/// (1 + q + ... + q^{m-1}) mod (q^n - 1).
std::uint64_t norm_exponent_mod(const FieldTower& f, std::size_t m);

/// Pi_i = alpha_i^{q^{m-1}} alpha_{i-1}^{q^{m-2}} ... alpha_{i+2}^q alpha_{i+1}, i in 1..m.
FieldElement pi_invariant(const ConstructionParams& params, std::size_t i);
/// In A, and Pi_{d+2}/Pi_2 is not a (q^m - 1)-th power for every d = 1..m-1.
bool is_in_B(const ConstructionParams& params);

/// The defining map x -> (x, x^q, ..., x^{q^{h-1}}, f_1(x), ..., f_m(x)).
VectorQn phi(const ConstructionParams& params, std::span<const FieldElement> x);

/// V_{A,h}, generated by phi(b_j e_i) with i major, j minor.
QSystemDesc build_V(const ConstructionParams& params);
/// {(x, x^q, ..., x^{q^h})} in F_{q^n}^{h+1}.
QSystemDesc build_pseudoregulus(const FieldTower& f, std::size_t h);
/// Block-diagonal sum; ambient and F_q-dimensions add.
QSystemDesc direct_sum(const std::vector<QSystemDesc>& systems);
/// Planted negative control in F_{q^n}^2: the F_q-expansion of <e_1>, i.e.
/// {(x, 0)}, completed by F_q e_2 so that it spans. The point <e_1> has
/// weight n.
QSystemDesc line_control(const FieldTower& f);

}  // namespace rankscatter
