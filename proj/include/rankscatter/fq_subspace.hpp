#pragma once

#include <vector>

#include "rankscatter/fp_rows.hpp"
#include "rankscatter/linear.hpp"

namespace rankscatter {

/// Coordinates of v on q_basis, coordinate-major: entry i*n + b is the b-th
/// F_q-coordinate of v_i. F_q-linear and injective.
VectorQn expand_to_fq(std::span<const FieldElement> v, const FieldTower& f);

/// Prime-field digits of v (entry i*sn + j is the z^j coefficient of v_i).
/// This is the coordinatisation every F_q-rank in the library runs on: an
/// F_q-subspace of F_q-dimension r has F_p-dimension s*r.
std::vector<std::uint32_t> prime_expand(std::span<const FieldElement> v, const FieldTower& f);

/// F_q-subspace of F_{q^n}^k given by F_q-generators.
class FqSubspace {
 public:
  FqSubspace(FieldTower f, std::size_t k, std::vector<VectorQn> generators);

  const FieldTower& tower() const { return f_; }
  std::size_t ambient() const { return k_; }
  const std::vector<VectorQn>& generators() const { return generators_; }
  /// dim over F_q.
  std::size_t dim() const { return expansion_.rows() / f_.s(); }
  /// RREF over F_p of the F_p-spanning set {w^a g}.
  const FpMatrix& expansion() const { return expansion_; }
  const std::vector<std::size_t>& expansion_pivots() const { return pivots_; }

  /// Maximal F_q-independent prefix-greedy subset of the generators.
  std::vector<VectorQn> basis() const;
  /// F_p-basis {w^a b_i} for an F_q-basis b of the subspace; size s*dim.
  std::vector<VectorQn> prime_generators() const;
  bool contains(std::span<const FieldElement> v) const;
  /// <U>_{F_{q^n}} == F_{q^n}^k.
  bool spans_ambient() const;

 private:
  FieldTower f_;
  std::size_t k_;
  std::vector<VectorQn> generators_;
  FpMatrix expansion_;
  std::vector<std::size_t> pivots_;
};

std::size_t fq_dim(const FqSubspace& s);
std::size_t fq_intersection_dim(const FqSubspace& s, const FqSubspace& t);
/// dim_Fq of the F_q-span of arbitrary vectors.
std::size_t fq_span_dim(const FieldTower& f, std::size_t k, const std::vector<VectorQn>& vectors);

/// Treats an F_{q^n}-subspace as an F_q-subspace (generators b_j h_r).
FqSubspace as_fq_subspace(const FieldTower& f, const SubspaceQn& h);

}  // namespace rankscatter
