#include "rankscatter/fq_subspace.hpp"

namespace rankscatter {

VectorQn expand_to_fq(std::span<const FieldElement> v, const FieldTower& f) {
  VectorQn out;
  out.reserve(v.size() * f.n());
  for (auto x : v) {
    const auto c = f.expand(x);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<std::uint32_t> prime_expand(std::span<const FieldElement> v, const FieldTower& f) {
  const std::uint32_t D = f.degree();
  std::vector<std::uint32_t> out(v.size() * D);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::uint32_t j = 0; j < D; ++j) out[i * D + j] = f.digit(v[i], j);
  return out;
}

namespace {

VectorQn scaled(const FieldTower& f, FieldElement c, const VectorQn& v) {
  VectorQn out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f.mul(c, v[i]);
  return out;
}

}  // namespace

FqSubspace::FqSubspace(FieldTower f, std::size_t k, std::vector<VectorQn> generators)
    : f_(std::move(f)), k_(k), generators_(std::move(generators)) {
  expansion_ = FpMatrix(f_.p(), 0, k_ * f_.degree());
  for (const auto& g : generators_) {
    if (g.size() != k_) throw FieldError("generator does not lie in the ambient space");
    for (auto w : f_.subfield_basis()) expansion_.append_row(prime_expand(scaled(f_, w, g), f_));
  }
  pivots_ = expansion_.rref();
}

std::vector<VectorQn> FqSubspace::basis() const {
  std::vector<VectorQn> out;
  FpMatrix acc(f_.p(), 0, k_ * f_.degree());
  std::size_t rank = 0;
  for (const auto& g : generators_) {
    FpMatrix trial = acc;
    for (auto w : f_.subfield_basis()) trial.append_row(prime_expand(scaled(f_, w, g), f_));
    const std::size_t r = trial.rank();
    if (r > rank) {
      rank = r;
      acc = std::move(trial);
      out.push_back(g);
    }
  }
  return out;
}

std::vector<VectorQn> FqSubspace::prime_generators() const {
  std::vector<VectorQn> out;
  for (const auto& b : basis())
    for (auto w : f_.subfield_basis()) out.push_back(scaled(f_, w, b));
  return out;
}

bool FqSubspace::contains(std::span<const FieldElement> v) const {
  FpMatrix m = expansion_;
  m.append_row(prime_expand(v, f_));
  return m.rank() == expansion_.rows();
}

bool FqSubspace::spans_ambient() const {
  return rank_qn(f_, MatrixQn::from_rows(generators_, k_)) == k_;
}

std::size_t fq_dim(const FqSubspace& s) { return s.dim(); }

std::size_t fq_intersection_dim(const FqSubspace& s, const FqSubspace& t) {
  if (s.ambient() != t.ambient()) throw FieldError("ambient dimension mismatch");
  if (!(s.tower() == t.tower())) throw FieldError("field mismatch");
  FpMatrix sum = s.expansion();
  for (std::size_t r = 0; r < t.expansion().rows(); ++r) sum.append_row(t.expansion().row(r));
  const std::size_t sum_dim = sum.rank() / s.tower().s();
  return s.dim() + t.dim() - sum_dim;
}

std::size_t fq_span_dim(const FieldTower& f, std::size_t k, const std::vector<VectorQn>& vectors) {
  return FqSubspace(f, k, vectors).dim();
}

FqSubspace as_fq_subspace(const FieldTower& f, const SubspaceQn& h) {
  std::vector<VectorQn> gens;
  for (std::size_t r = 0; r < h.dim(); ++r)
    for (auto b : f.q_basis()) gens.push_back(scaled(f, b, h.basis().row_vector(r)));
  return FqSubspace(f, h.ambient(), std::move(gens));
}

}  // namespace rankscatter
