#pragma once

// Linear algebra over the prime field F_p.
//
// FpMatrix is the plain dense reference (one uint32 per entry). The sweep
// kernels instead use packed row policies: BitRows<W> packs W 64-bit words per
// row for p = 2, ModRows keeps one uint16 lane per coordinate for odd p.
// Echelon<Ops> is an incremental forward echelon over either policy and
// supports truncation back to an earlier rank, which is what depth-first
// tuple sweeps need.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rankscatter {

std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t p);

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::uint32_t p, std::size_t rows, std::size_t cols)
      : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::uint32_t p() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint32_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint32_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<std::uint32_t> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const std::uint32_t> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const std::uint32_t> values);

  /// In-place reduced row echelon form; returns pivot columns. Zero rows are
  /// dropped, so rows() == rank afterwards.
  std::vector<std::size_t> rref();
  std::size_t rank() const;
  /// Basis of {x : M x = 0} as rows.
  FpMatrix null_space() const;
  FpMatrix transpose() const;

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  std::uint32_t p_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> data_;
};

/// Rank of p = 2 rows packed `words` 64-bit words each; rows are clobbered.
std::size_t rank_f2(std::span<std::uint64_t> rows, std::size_t words);

/// p = 2, W words per row.
template <std::size_t W>
struct BitRows {
  using Row = std::array<std::uint64_t, W>;
  static constexpr std::size_t kWords = W;

  std::size_t cols = 0;

  Row zero() const { return Row{}; }
  static void set(Row& r, std::size_t c, std::uint32_t v) {
    const std::uint64_t m = std::uint64_t{1} << (c & 63);
    if (v & 1) r[c >> 6] |= m; else r[c >> 6] &= ~m;
  }
  static std::uint32_t get(const Row& r, std::size_t c) { return (r[c >> 6] >> (c & 63)) & 1U; }
  /// a += f * b
  static void axpy(Row& a, std::uint32_t f, const Row& b) {
    if (f & 1)
      for (std::size_t i = 0; i < W; ++i) a[i] ^= b[i];
  }
  static void add(Row& a, const Row& b) {
    for (std::size_t i = 0; i < W; ++i) a[i] ^= b[i];
  }
  static bool is_zero(const Row& r) {
    for (std::size_t i = 0; i < W; ++i)
      if (r[i]) return false;
    return true;
  }
  /// First nonzero column; requires !is_zero(r).
  static std::size_t leading(const Row& r) {
    for (std::size_t i = 0; i < W; ++i)
      if (r[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(r[i]));
    return W * 64;
  }
  static void normalize(Row&, std::size_t) {}
};

/// Odd p, one coordinate per lane.
struct ModRows {
  using Row = std::vector<std::uint16_t>;
  static constexpr std::size_t kWords = 0;

  std::size_t cols = 0;
  std::uint32_t p = 3;

  Row zero() const { return Row(cols, 0); }
  static void set(Row& r, std::size_t c, std::uint32_t v) { r[c] = static_cast<std::uint16_t>(v); }
  static std::uint32_t get(const Row& r, std::size_t c) { return r[c]; }
  void axpy(Row& a, std::uint32_t f, const Row& b) const {
    if (f == 0) return;
    for (std::size_t i = 0; i < cols; ++i)
      a[i] = static_cast<std::uint16_t>((a[i] + std::uint64_t{f} * b[i]) % p);
  }
  void add(Row& a, const Row& b) const { axpy(a, 1, b); }
  static bool is_zero(const Row& r) {
    for (auto v : r)
      if (v) return false;
    return true;
  }
  static std::size_t leading(const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i]) return i;
    return r.size();
  }
  void normalize(Row& r, std::size_t lead) const {
    const std::uint32_t f = inverse_mod(r[lead], p);
    for (auto& v : r) v = static_cast<std::uint16_t>(std::uint64_t{v} * f % p);
  }
  std::uint32_t neg(std::uint32_t v) const { return v ? p - v : 0; }
};

template <class Ops>
std::uint32_t negate_coeff(const Ops& ops, std::uint32_t v) {
  if constexpr (Ops::kWords == 0) return ops.neg(v);
  else return v;
}

/// Forward echelon with normalized pivots, built incrementally.
template <class Ops>
class Echelon {
 public:
  using Row = typename Ops::Row;

  explicit Echelon(Ops ops) : ops_(std::move(ops)) {}

  const Ops& ops() const { return ops_; }
  std::size_t rank() const { return rows_.size(); }
  const Row& row(std::size_t i) const { return rows_[i]; }
  std::size_t pivot(std::size_t i) const { return pivots_[i]; }

  /// Reduces r against the stored rows; true iff something is left.
  bool reduce(Row& r) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::uint32_t c = Ops::get(r, pivots_[i]);
      if (c) ops_.axpy(r, negate_coeff(ops_, c), rows_[i]);
    }
    return !Ops::is_zero(r);
  }

  /// Adds r; returns whether the rank grew.
  bool insert(Row r) {
    if (!reduce(r)) return false;
    const std::size_t lead = Ops::leading(r);
    ops_.normalize(r, lead);
    rows_.push_back(std::move(r));
    pivots_.push_back(lead);
    return true;
  }

  void truncate(std::size_t rank) {
    rows_.resize(rank);
    pivots_.resize(rank);
  }
  void clear() { truncate(0); }

 private:
  Ops ops_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace rankscatter
