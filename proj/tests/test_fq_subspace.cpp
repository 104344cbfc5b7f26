#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rankscatter/fq_subspace.hpp"

using namespace rankscatter;

namespace {

std::vector<VectorQn> random_vectors(const FieldTower& f, std::size_t count, std::size_t k, std::mt19937_64& rng) {
  std::vector<VectorQn> out(count, VectorQn(k));
  for (auto& v : out)
    for (auto& x : v) x = random_element(f, rng);
  return out;
}

}  // namespace

TEST_CASE("expansion over F_q") {
  const auto f = FieldTower::create(2, 2, 3);
  std::mt19937_64 rng(1);
  const VectorQn zero(3);
  for (auto x : expand_to_fq(zero, f)) CHECK(x == f.zero());
  const VectorQn e1{f.one(), f.zero(), f.zero()};
  const auto ex = expand_to_fq(e1, f);
  CHECK(ex.size() == 9);
  CHECK(ex[0] == f.one());
  for (std::size_t i = 1; i < ex.size(); ++i) CHECK(ex[i] == f.zero());
  for (int t = 0; t < 50; ++t) {
    const auto vs = random_vectors(f, 2, 3, rng);
    VectorQn sum(3);
    for (std::size_t i = 0; i < 3; ++i) sum[i] = f.add(vs[0][i], vs[1][i]);
    const auto a = expand_to_fq(vs[0], f), b = expand_to_fq(vs[1], f), c = expand_to_fq(sum, f);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == f.add(a[i], b[i]));
  }
}

TEST_CASE("dimensions and intersections against enumeration") {
  for (auto [p, s, n, k] : {std::tuple{2U, 1U, 3U, 2UL}, {2U, 2U, 2U, 2UL}, {3U, 1U, 2U, 2UL}, {2U, 1U, 2U, 3UL}}) {
    const auto f = FieldTower::create(p, s, n);
    std::mt19937_64 rng(p * 100 + s * 10 + n);
    for (int t = 0; t < 25; ++t) {
      const auto sg = random_vectors(f, 1 + rng() % 3, k, rng);
      const auto tg = random_vectors(f, 1 + rng() % 3, k, rng);
      const FqSubspace S(f, k, sg), T(f, k, tg);
      const auto se = oracle::fq_span_elements(f, sg, k);
      const auto te = oracle::fq_span_elements(f, tg, k);
      REQUIRE(S.dim() == oracle::log_base(se.size(), f.q()));
      std::size_t common = 0;
      for (const auto& v : se) common += te.count(v);
      const std::size_t inter = fq_intersection_dim(S, T);
      CHECK(inter == oracle::log_base(common, f.q()));
      CHECK(inter == fq_intersection_dim(T, S));
      CHECK(inter <= std::min(S.dim(), T.dim()));
      CHECK(fq_intersection_dim(S, S) == S.dim());
      for (const auto& v : te) CHECK(S.contains(v) == (se.count(v) == 1));
      CHECK(S.basis().size() == S.dim());
      CHECK(S.prime_generators().size() == S.dim() * s);
    }
  }
}

TEST_CASE("coordinate subspaces") {
  const auto f = FieldTower::create(2, 1, 4);
  std::vector<VectorQn> a, b;
  for (auto x : f.q_basis()) {
    a.push_back({x, f.zero()});
    b.push_back({f.zero(), x});
  }
  const FqSubspace A(f, 2, a), B(f, 2, b);
  CHECK(fq_intersection_dim(A, B) == 0);
  CHECK_FALSE(A.spans_ambient());
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(FqSubspace(f, 2, ab).spans_ambient());
  const FqSubspace other(f, 3, {{f.one(), f.zero(), f.zero()}});
  CHECK_THROWS_AS(fq_intersection_dim(A, other), FieldError);
  CHECK_THROWS_AS(FqSubspace(f, 2, {{f.one()}}), FieldError);
}

TEST_CASE("F_{q^n}-subspaces as F_q-subspaces") {
  const auto f = FieldTower::create(2, 2, 2);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto h = sample_subspace(3, 1 + rng() % 2, f, rng);
    const auto fq = as_fq_subspace(f, h);
    CHECK(fq.dim() == h.dim() * f.n());
    for (std::size_t r = 0; r < h.dim(); ++r) {
      VectorQn v = h.basis().row_vector(r);
      for (auto& x : v) x = f.mul(x, f.generator());
      CHECK(fq.contains(v));
    }
  }
}
