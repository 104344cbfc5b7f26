#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rankscatter/verifiers.hpp"

using namespace rankscatter;

namespace {

ConstructionParams make(const FieldTower& f, std::size_t m, std::size_t h, std::vector<FieldElement> a) {
  return ConstructionParams{f, m, h, std::move(a)};
}

std::vector<FieldElement> random_alphas(const FieldTower& f, std::size_t m, std::mt19937_64& rng) {
  std::vector<FieldElement> a(m);
  for (auto& x : a) x = FieldElement{1 + rng() % (f.order() - 1)};
  return a;
}

// K_A straight from the definition with the naive field.
std::uint64_t naive_k(const FieldTower& f, const std::vector<FieldElement>& a) {
  const auto nf = oracle::naive(f);
  const std::size_t m = a.size();
  std::uint64_t qpow = 1;
  for (std::size_t i = 0; i + 1 < m; ++i) qpow *= f.q();
  std::uint64_t k = nf.pow(a[0].code, qpow);
  std::uint64_t e = 1;
  for (std::size_t i = 1; i < m; ++i) {
    k = nf.mul(k, nf.pow(a[i].code, e));
    e *= f.q();
  }
  return k;
}

}  // namespace

TEST_CASE("K_A") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto g = f.generator();
  CHECK(k_invariant(make(f, 4, 2, {f.one(), f.one(), f.one(), f.one()})) == f.one());
  CHECK(k_invariant(make(f, 4, 2, {g, f.one(), f.one(), f.one()})) == f.pow(g, 8));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 3 + rng() % 3;
    auto a = random_alphas(f, m, rng);
    const auto p = make(f, m, 1, a);
    REQUIRE(k_invariant(p).code == naive_k(f, a));
    for (auto& x : a) x = f.frobenius(x, 1);
    const auto pq = make(f, m, 1, a);
    CHECK(k_invariant(pq) == f.frobenius(k_invariant(p), 1));
    CHECK(is_in_A(pq) == is_in_A(p));
  }
}

TEST_CASE("admissible set membership") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto g = f.generator();
  CHECK_FALSE(is_in_A(make(f, 4, 2, {f.one(), f.one(), f.one(), f.one()})));
  CHECK(is_in_A(make(f, 4, 2, {g, f.one(), f.one(), f.one()})));
  for (std::uint64_t a = 1; a < 16; ++a)
    for (std::uint64_t b = 1; b < 16; ++b)
      for (std::uint64_t c = 1; c < 16; ++c) REQUIRE_FALSE(is_in_A(make(f, 3, 1, {{a}, {b}, {c}})));
  CHECK_FALSE(is_nonvacuous(f, 3));
  CHECK(is_nonvacuous(f, 4));
  CHECK(is_nonvacuous(FieldTower::create(2, 1, 6), 3));
  CHECK(norm_exponent_mod(f, 4) == 0);
  CHECK(norm_exponent_mod(f, 3) == 7);
}

TEST_CASE("census for q=2, n=4, m=4") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto nf = oracle::naive(f);
  std::set<std::uint64_t> fifteenth;
  for (std::uint64_t y = 1; y < 16; ++y) fifteenth.insert(nf.pow(y, 15));
  std::size_t members = 0, oracle_members = 0, trivial = 0;
  std::vector<FieldElement> a(4);
  for (std::uint64_t i = 0; i < 50625; ++i) {
    std::uint64_t r = i;
    for (auto& x : a) {
      x = FieldElement{1 + r % 15};
      r /= 15;
    }
    const auto p = make(f, 4, 2, a);
    members += is_in_A(p);
    const auto k = naive_k(f, a);
    oracle_members += fifteenth.count(k) == 0;
    trivial += k == 1;
  }
  CHECK(members == 47250);
  CHECK(oracle_members == 47250);
  CHECK(trivial == 3375);
}

TEST_CASE("Pi invariants and B") {
  const auto f = FieldTower::create(2, 1, 6);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_alphas(f, 3, rng);
    const auto p = make(f, 3, 1, a);
    // m = 3: Pi_2 = a2^{q^2} a1^q a3
    const auto pi2 = f.mul(f.mul(f.frobenius(a[1], 2), f.frobenius(a[0], 1)), a[2]);
    CHECK(pi_invariant(p, 2) == pi2);
    const auto pi1 = f.mul(f.mul(f.frobenius(a[0], 2), f.frobenius(a[2], 1)), a[1]);
    CHECK(pi_invariant(p, 1) == pi1);
  }
  const auto ones = make(f, 3, 1, {f.one(), f.one(), f.one()});
  for (std::size_t i = 1; i <= 3; ++i) CHECK(pi_invariant(ones, i) == f.one());
  CHECK_FALSE(is_in_B(ones));
  CHECK_THROWS_AS(pi_invariant(ones, 0), FieldError);
  std::size_t found = 0;
  for (int t = 0; t < 2000 && !found; ++t) found += is_in_B(make(f, 3, 1, random_alphas(f, 3, rng)));
  CHECK(found > 0);
}

TEST_CASE("build_V") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto g = f.generator();
  const auto p = make(f, 4, 2, {g, f.one(), f.one(), f.one()});
  const auto v = build_V(p);
  CHECK(v.k() == 12);
  CHECK(v.t() == 16);
  CHECK(v.t() == max_dim_bound(12, 4, 2));
  CHECK(v.space.generators().size() == 16);
  CHECK(rank_qn(f, MatrixQn::from_rows(v.space.generators(), 12)) == 12);
  CHECK(v.space.spans_ambient());
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    VectorQn x(4), y(4), xy(4);
    for (std::size_t i = 0; i < 4; ++i) {
      x[i] = random_element(f, rng);
      y[i] = random_element(f, rng);
      xy[i] = f.add(x[i], y[i]);
    }
    const auto px = phi(p, x), py = phi(p, y), pxy = phi(p, xy);
    for (std::size_t i = 0; i < 12; ++i) CHECK(pxy[i] == f.add(px[i], py[i]));
    CHECK(v.space.contains(px));
    for (std::size_t i = 0; i < 4; ++i) CHECK(px[i] == x[i]);
    // f_m wraps round to alpha_1
    CHECK(px[11] == f.add(f.frobenius(x[3], 2), f.mul(g, f.frobenius(x[0], 3))));
    CHECK(px[8] == f.add(f.frobenius(x[0], 2), f.frobenius(x[1], 3)));
  }
  for (auto x : phi(p, VectorQn(4))) CHECK(x == f.zero());
  // random parameters keep full dimension and span
  for (int t = 0; t < 10; ++t) {
    const auto f6 = FieldTower::create(2, 1, 6);
    const std::size_t m = 3 + rng() % 2, h = 1 + rng() % 4;
    const auto q = make(f6, m, h, random_alphas(f6, m, rng));
    const auto vq = build_V(q);
    CHECK(vq.t() == m * 6);
    CHECK(vq.space.spans_ambient());
  }
}

TEST_CASE("parameter validation") {
  const auto f = FieldTower::create(2, 1, 4);
  CHECK_THROWS_AS(build_V(make(f, 2, 1, {f.one(), f.one()})), FieldError);
  CHECK_THROWS_AS(build_V(make(f, 3, 3, {f.one(), f.one(), f.one()})), FieldError);
  CHECK_THROWS_AS(build_V(make(f, 3, 1, {f.one(), f.zero(), f.one()})), FieldError);
  CHECK_THROWS_AS(build_V(make(f, 3, 1, {f.one(), f.one()})), FieldError);
  CHECK_THROWS_AS(build_pseudoregulus(f, 4), FieldError);
}

TEST_CASE("baseline systems") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto pr = build_pseudoregulus(f, 2);
  CHECK(pr.k() == 3);
  CHECK(pr.t() == 4);
  CHECK(pr.space.spans_ambient());
  const auto f8 = FieldTower::create(2, 1, 3);
  const auto one = build_pseudoregulus(f8, 1);
  CHECK(direct_sum({one}).space.expansion() == one.space.expansion());
  const auto two = direct_sum({one, one});
  CHECK(two.k() == 4);
  CHECK(two.t() == 6);
  CHECK(two.space.spans_ambient());
  CHECK_THROWS_AS(direct_sum({one, pr}), FieldError);
  CHECK_THROWS_AS(direct_sum({}), FieldError);
  const auto line = line_control(f);
  CHECK(line.k() == 2);
  CHECK(line.t() == 5);
  CHECK(line.space.spans_ambient());
}
