#include "rankscatter/linear.hpp"

#include <algorithm>
#include <limits>

namespace rankscatter {

MatrixQn MatrixQn::from_rows(const std::vector<VectorQn>& rows, std::size_t cols) {
  MatrixQn m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

std::vector<VectorQn> MatrixQn::to_rows() const {
  std::vector<VectorQn> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.push_back(row_vector(r));
  return out;
}

void MatrixQn::append_row(std::span<const FieldElement> v) {
  if (v.size() != cols_) throw FieldError("row length mismatch");
  data_.insert(data_.end(), v.begin(), v.end());
  ++rows_;
}

MatrixQn MatrixQn::transpose() const {
  MatrixQn t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

RrefResult rref_qn(const FieldTower& f, MatrixQn m) {
  RrefResult out;
  std::size_t rank = 0;
  const std::size_t rows = m.rows(), cols = m.cols();
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m(piv, c).code == 0) ++piv;
    if (piv == rows) continue;
    if (piv != rank) std::swap_ranges(m.row(piv).begin(), m.row(piv).end(), m.row(rank).begin());
    const FieldElement inv = f.inv(m(rank, c));
    for (std::size_t j = c; j < cols; ++j) m(rank, j) = f.mul(m(rank, j), inv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m(r, c).code == 0) continue;
      const FieldElement g = f.neg(m(r, c));
      for (std::size_t j = c; j < cols; ++j) m(r, j) = f.add(m(r, j), f.mul(g, m(rank, j)));
    }
    out.pivots.push_back(c);
    ++rank;
  }
  out.rank = rank;
  out.matrix = std::move(m);
  return out;
}

std::size_t rank_qn(const FieldTower& f, const MatrixQn& m) { return rref_qn(f, m).rank; }

MatrixQn multiply(const FieldTower& f, const MatrixQn& a, const MatrixQn& b) {
  if (a.cols() != b.rows()) throw FieldError("dimension mismatch in multiply");
  MatrixQn out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const FieldElement x = a(i, l);
      if (x.code == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = f.add(out(i, j), f.mul(x, b(l, j)));
    }
  return out;
}

namespace {

MatrixQn kernel_from_rref(const FieldTower& f, const MatrixQn& reduced, std::size_t rank,
                          const std::vector<std::size_t>& pivots) {
  const std::size_t k = reduced.cols();
  std::vector<bool> is_pivot(k, false);
  for (auto c : pivots) is_pivot[c] = true;
  MatrixQn out(0, k);
  VectorQn v(k);
  for (std::size_t free = 0; free < k; ++free) {
    if (is_pivot[free]) continue;
    std::fill(v.begin(), v.end(), FieldElement{});
    v[free] = f.one();
    for (std::size_t r = 0; r < rank; ++r) v[pivots[r]] = f.neg(reduced(r, free));
    out.append_row(v);
  }
  return out;
}

}  // namespace

MatrixQn null_space_qn(const FieldTower& f, const MatrixQn& m) {
  auto res = rref_qn(f, m);
  return kernel_from_rref(f, res.matrix, res.rank, res.pivots);
}

SubspaceQn SubspaceQn::span(const FieldTower& f, std::size_t k, const MatrixQn& generators) {
  if (generators.cols() != k) throw FieldError("generator length does not match ambient dimension");
  auto res = rref_qn(f, generators);
  MatrixQn basis(0, k);
  for (std::size_t r = 0; r < res.rank; ++r) basis.append_row(res.matrix.row(r));
  return from_rref(k, std::move(basis), std::move(res.pivots));
}

SubspaceQn SubspaceQn::from_rref(std::size_t k, MatrixQn basis, std::vector<std::size_t> pivots) {
  SubspaceQn s;
  s.k_ = k;
  s.basis_ = std::move(basis);
  s.pivots_ = std::move(pivots);
  return s;
}

SubspaceQn SubspaceQn::full(const FieldTower& f, std::size_t k) {
  MatrixQn id(k, k);
  std::vector<std::size_t> piv(k);
  for (std::size_t i = 0; i < k; ++i) {
    id(i, i) = f.one();
    piv[i] = i;
  }
  return from_rref(k, std::move(id), std::move(piv));
}

bool SubspaceQn::contains(const FieldTower& f, std::span<const FieldElement> v) const {
  if (v.size() != k_) throw FieldError("vector length does not match ambient dimension");
  VectorQn w(v.begin(), v.end());
  for (std::size_t r = 0; r < basis_.rows(); ++r) {
    const FieldElement c = w[pivots_[r]];
    if (c.code == 0) continue;
    const FieldElement g = f.neg(c);
    for (std::size_t j = 0; j < k_; ++j) w[j] = f.add(w[j], f.mul(g, basis_(r, j)));
  }
  return std::all_of(w.begin(), w.end(), [](FieldElement x) { return x.code == 0; });
}

MatrixQn SubspaceQn::annihilator(const FieldTower& f) const {
  return kernel_from_rref(f, basis_, basis_.rows(), pivots_);
}

BigInt gaussian_binomial(std::size_t k, std::size_t d, std::uint64_t Q) {
  if (d > k) return 0;
  BigInt num = 1, den = 1, qb = Q;
  for (std::size_t i = 0; i < d; ++i) {
    num *= boost::multiprecision::pow(qb, static_cast<unsigned>(k - i)) - 1;
    den *= boost::multiprecision::pow(qb, static_cast<unsigned>(i + 1)) - 1;
  }
  return num / den;
}

Grassmannian::Grassmannian(FieldTower f, std::size_t k, std::size_t d) : f_(std::move(f)), k_(k), d_(d) {
  if (d > k) throw FieldError("subspace dimension exceeds ambient dimension");
  std::vector<std::size_t> combo(d);
  for (std::size_t i = 0; i < d; ++i) combo[i] = i;
  while (true) {
    combos_.push_back(combo);
    std::size_t free = 0;
    for (std::size_t r = 0; r < d; ++r) free += (k - 1 - combo[r]) - (d - 1 - r);
    counts_.push_back(boost::multiprecision::pow(BigInt(f_.order()), static_cast<unsigned>(free)));
    // next lexicographic combination
    std::size_t i = d;
    while (i > 0 && combo[i - 1] == k - d + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < d; ++j) combo[j] = combo[j - 1] + 1;
  }
}

std::uint64_t Grassmannian::size() const {
  BigInt total = 0;
  for (const auto& c : counts_) total += c;
  if (total > std::numeric_limits<std::uint64_t>::max()) throw FieldError("Grassmannian too large to index");
  return total.convert_to<std::uint64_t>();
}

SubspaceQn Grassmannian::at(std::uint64_t index) const {
  Cursor c(*this, index);
  if (!c.valid()) throw FieldError("Grassmannian index out of range");
  return c.subspace();
}

Grassmannian::Cursor::Cursor(const Grassmannian& g, std::uint64_t index) : g_(&g), index_(index) {
  BigInt rem = index;
  combo_index_ = 0;
  while (combo_index_ < g.combos_.size() && rem >= g.counts_[combo_index_]) {
    rem -= g.counts_[combo_index_];
    ++combo_index_;
  }
  if (combo_index_ == g.combos_.size()) {
    valid_ = false;
    return;
  }
  load_combo();
  const std::uint64_t Q = g.f_.order();
  for (std::size_t i = free_.size(); i-- > 0;) {
    digits_[i] = static_cast<std::uint64_t>(rem % Q);
    rem /= Q;
  }
  for (std::size_t i = 0; i < free_.size(); ++i) basis_(free_[i].first, free_[i].second) = FieldElement{digits_[i]};
}

void Grassmannian::Cursor::load_combo() {
  const std::size_t k = g_->k_, d = g_->d_;
  combo_ = g_->combos_[combo_index_];
  free_.clear();
  std::vector<bool> is_pivot(k, false);
  for (auto c : combo_) is_pivot[c] = true;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = combo_[r] + 1; c < k; ++c)
      if (!is_pivot[c]) free_.emplace_back(r, c);
  digits_.assign(free_.size(), 0);
  basis_ = MatrixQn(d, k);
  for (std::size_t r = 0; r < d; ++r) basis_(r, combo_[r]) = FieldElement{1};
}

void Grassmannian::Cursor::advance() {
  if (!valid_) return;
  ++index_;
  const std::uint64_t Q = g_->f_.order();
  for (std::size_t i = free_.size(); i-- > 0;) {
    if (++digits_[i] < Q) {
      basis_(free_[i].first, free_[i].second) = FieldElement{digits_[i]};
      return;
    }
    digits_[i] = 0;
    basis_(free_[i].first, free_[i].second) = FieldElement{0};
  }
  ++combo_index_;
  if (combo_index_ == g_->combos_.size()) {
    valid_ = false;
    return;
  }
  load_combo();
}

void grassmannian_enumerate(const FieldTower& f, std::size_t k, std::size_t d,
                            const std::function<void(const SubspaceQn&)>& fn) {
  Grassmannian g(f, k, d);
  for (auto c = g.cursor(); c.valid(); c.advance()) fn(c.subspace());
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

FieldElement random_element(const FieldTower& f, std::mt19937_64& rng) {
  return FieldElement{uniform_below(rng, f.order())};
}

SubspaceQn sample_subspace(std::size_t k, std::size_t d, const FieldTower& f, std::mt19937_64& rng) {
  if (d > k) throw FieldError("subspace dimension exceeds ambient dimension");
  while (true) {
    MatrixQn m(d, k);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < k; ++c) m(r, c) = random_element(f, rng);
    auto res = rref_qn(f, m);
    if (res.rank != d) continue;
    return SubspaceQn::from_rref(k, std::move(res.matrix), std::move(res.pivots));
  }
}

SubspaceQn sample_subspace(std::size_t k, std::size_t d, const FieldTower& f, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return sample_subspace(k, d, f, rng);
}

}  // namespace rankscatter
