#include "rankscatter/fp_rows.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rankscatter {

std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t p) {
  std::uint64_t r = 1, b = a % p, e = p - 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

void FpMatrix::append_row(std::span<const std::uint32_t> values) {
  if (values.size() != cols_) throw std::invalid_argument("row length mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<std::size_t> FpMatrix::rref() {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t piv = rank;
    while (piv < rows_ && (*this)(piv, c) == 0) ++piv;
    if (piv == rows_) continue;
    if (piv != rank) std::swap_ranges(row(piv).begin(), row(piv).end(), row(rank).begin());
    const std::uint64_t f = inverse_mod((*this)(rank, c), p_);
    for (auto& v : row(rank)) v = static_cast<std::uint32_t>(v * f % p_);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == rank) continue;
      const std::uint64_t g = (*this)(r, c);
      if (!g) continue;
      const std::uint64_t neg = p_ - g;
      auto dst = row(r);
      auto src = row(rank);
      for (std::size_t j = c; j < cols_; ++j) dst[j] = static_cast<std::uint32_t>((dst[j] + neg * src[j]) % p_);
    }
    pivots.push_back(c);
    ++rank;
  }
  rows_ = rank;
  data_.resize(rank * cols_);
  return pivots;
}

std::size_t rank_f2(std::span<std::uint64_t> rows, std::size_t words) {
  const std::size_t n = words ? rows.size() / words : 0;
  std::size_t rank = 0;
  for (std::size_t w = 0; w < words && rank < n; ++w) {
    for (int b = 0; b < 64 && rank < n; ++b) {
      const std::uint64_t mask = std::uint64_t{1} << b;
      std::size_t piv = rank;
      while (piv < n && !(rows[piv * words + w] & mask)) ++piv;
      if (piv == n) continue;
      if (piv != rank)
        for (std::size_t j = w; j < words; ++j) std::swap(rows[piv * words + j], rows[rank * words + j]);
      for (std::size_t r = rank + 1; r < n; ++r)
        if (rows[r * words + w] & mask)
          for (std::size_t j = w; j < words; ++j) rows[r * words + j] ^= rows[rank * words + j];
      ++rank;
    }
  }
  return rank;
}

std::size_t FpMatrix::rank() const {
  if (p_ == 2) {
    const std::size_t words = (cols_ + 63) / 64;
    std::vector<std::uint64_t> packed(rows_ * words, 0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if ((*this)(r, c) & 1) packed[r * words + c / 64] |= std::uint64_t{1} << (c % 64);
    return rank_f2(packed, words);
  }
  FpMatrix copy = *this;
  return copy.rref().size();
}

FpMatrix FpMatrix::null_space() const {
  FpMatrix reduced = *this;
  const auto pivots = reduced.rref();
  std::vector<bool> is_pivot(cols_, false);
  for (auto c : pivots) is_pivot[c] = true;
  FpMatrix out(p_, 0, cols_);
  std::vector<std::uint32_t> v(cols_);
  for (std::size_t f = 0; f < cols_; ++f) {
    if (is_pivot[f]) continue;
    std::fill(v.begin(), v.end(), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      const std::uint32_t a = reduced(i, f);
      v[pivots[i]] = a ? p_ - a : 0;
    }
    out.append_row(v);
  }
  return out;
}

FpMatrix FpMatrix::transpose() const {
  FpMatrix t(p_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

}  // namespace rankscatter
