#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rankscatter/field_tower.hpp"

namespace rankscatter {

using BigInt = boost::multiprecision::cpp_int;

/// Dense row-major matrix over F_{q^n}.
class MatrixQn {
 public:
  MatrixQn() = default;
  MatrixQn(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static MatrixQn from_rows(const std::vector<VectorQn>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  FieldElement operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<FieldElement> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const FieldElement> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  VectorQn row_vector(std::size_t r) const { return {row(r).begin(), row(r).end()}; }
  std::vector<VectorQn> to_rows() const;
  void append_row(std::span<const FieldElement> v);
  MatrixQn transpose() const;

  friend bool operator==(const MatrixQn&, const MatrixQn&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElement> data_;
};

struct RrefResult {
  MatrixQn matrix;  ///< same shape as the input; zero rows at the bottom
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

/// Reduced row echelon form; pivot = leftmost column, first nonzero row.
RrefResult rref_qn(const FieldTower& f, MatrixQn m);
std::size_t rank_qn(const FieldTower& f, const MatrixQn& m);
MatrixQn multiply(const FieldTower& f, const MatrixQn& a, const MatrixQn& b);
/// Rows spanning {x : M x^T = 0}.
MatrixQn null_space_qn(const FieldTower& f, const MatrixQn& m);

/// F_{q^n}-subspace of F_{q^n}^k held by its canonical RREF basis.
class SubspaceQn {
 public:
  SubspaceQn() = default;
  static SubspaceQn span(const FieldTower& f, std::size_t k, const MatrixQn& generators);
  /// Wraps a basis already in RREF (not re-checked).
  static SubspaceQn from_rref(std::size_t k, MatrixQn basis, std::vector<std::size_t> pivots);
  static SubspaceQn full(const FieldTower& f, std::size_t k);

  std::size_t ambient() const { return k_; }
  std::size_t dim() const { return basis_.rows(); }
  const MatrixQn& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  bool contains(const FieldTower& f, std::span<const FieldElement> v) const;
  /// (k - d) x k parity check rows P with P v^T = 0 iff v in the subspace.
  MatrixQn annihilator(const FieldTower& f) const;

  friend bool operator==(const SubspaceQn& a, const SubspaceQn& b) {
    return a.k_ == b.k_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t k_ = 0;
  MatrixQn basis_;
  std::vector<std::size_t> pivots_;
};

/// Number of d-dimensional subspaces of a k-dimensional space over F_Q.
BigInt gaussian_binomial(std::size_t k, std::size_t d, std::uint64_t Q);

/// The d-dimensional subspaces of F_{q^n}^k in a frozen order: pivot column
/// sets in lexicographic order, then the free RREF entries read row-major as a
/// base-Q number (the last free entry varies fastest, digits in code order).
class Grassmannian {
 public:
  Grassmannian(FieldTower f, std::size_t k, std::size_t d);

  std::size_t ambient() const { return k_; }
  std::size_t dim() const { return d_; }
  /// Total count; throws FieldError if it exceeds 2^64 - 1.
  std::uint64_t size() const;
  SubspaceQn at(std::uint64_t index) const;

  /// Streaming position inside the enumeration.
  class Cursor {
   public:
    Cursor(const Grassmannian& g, std::uint64_t index);
    bool valid() const { return valid_; }
    std::uint64_t index() const { return index_; }
    const MatrixQn& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return combo_; }
    SubspaceQn subspace() const { return SubspaceQn::from_rref(g_->k_, basis_, combo_); }
    void advance();

   private:
    void load_combo();
    const Grassmannian* g_;
    std::uint64_t index_ = 0;
    bool valid_ = true;
    std::size_t combo_index_ = 0;
    std::vector<std::size_t> combo_;
    std::vector<std::pair<std::size_t, std::size_t>> free_;  // (row, col)
    std::vector<std::uint64_t> digits_;
    MatrixQn basis_;
  };

  Cursor cursor(std::uint64_t index = 0) const { return Cursor(*this, index); }

 private:
  FieldTower f_;
  std::size_t k_, d_;
  std::vector<std::vector<std::size_t>> combos_;
  std::vector<BigInt> counts_;  // per combo
};

/// Calls fn for every d-subspace of F_{q^n}^k in the frozen order.
void grassmannian_enumerate(const FieldTower& f, std::size_t k, std::size_t d,
                            const std::function<void(const SubspaceQn&)>& fn);

/// Seeded generator: mt19937_64 seeded through splitmix64(seed ^ stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);
/// Uniform integer in [0, bound) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
FieldElement random_element(const FieldTower& f, std::mt19937_64& rng);

/// Uniform d-subspace: random full-rank d x k matrix, then canonical RREF.
SubspaceQn sample_subspace(std::size_t k, std::size_t d, const FieldTower& f, std::uint64_t seed);
SubspaceQn sample_subspace(std::size_t k, std::size_t d, const FieldTower& f, std::mt19937_64& rng);

}  // namespace rankscatter
