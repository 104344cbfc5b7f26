#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rankscatter/construction.hpp"
#include "rankscatter/verifiers.hpp"

using namespace rankscatter;

namespace {

FqSubspace random_space(const FieldTower& f, std::size_t k, std::size_t gens, std::mt19937_64& rng) {
  std::vector<VectorQn> g(gens, VectorQn(k));
  for (auto& v : g)
    for (auto& x : v) x = (rng() % 4 == 0) ? f.zero() : random_element(f, rng);
  return FqSubspace(f, k, g);
}

SweepOptions opts(Mode m, std::uint64_t budget = 0, std::uint64_t seed = 0, unsigned workers = 1) {
  SweepOptions o;
  o.mode = m;
  o.budget = budget;
  o.seed = seed;
  o.workers = workers;
  return o;
}

void check_witness(const FqSubspace& u, const Verdict& v) {
  REQUIRE(v.status == Status::violated);
  REQUIRE(v.witness);
  const auto& w = *v.witness;
  CHECK(w.subspace.dim() == v.hdim);
  CHECK(w.weight > v.bound);
  CHECK(w.weight == oracle::brute_weight(u.tower(), u.generators(), w.subspace.basis().to_rows(), u.ambient()));
  CHECK(recheck_witness(u, w, v.bound));
}

}  // namespace

TEST_CASE("subspace weight against enumeration") {
  for (auto [p, s, n, k] : {std::tuple{2U, 1U, 3U, 2UL}, {2U, 2U, 2U, 2UL}, {3U, 1U, 2U, 2UL}, {2U, 1U, 2U, 3UL}}) {
    const auto f = FieldTower::create(p, s, n);
    std::mt19937_64 rng(p + 10 * s + 100 * n);
    for (int t = 0; t < 20; ++t) {
      const auto u = random_space(f, k, 1 + rng() % 3, rng);
      const auto h = sample_subspace(k, rng() % (k + 1), f, rng);
      const std::size_t w = subspace_weight(u, h);
      CHECK(w == oracle::brute_weight(f, u.generators(), h.basis().to_rows(), k));
      const WeightKernel kernel(u);
      CHECK(kernel.weight(h) == w);
      const auto ib = intersection_basis(u, h);
      CHECK(ib.size() == w);
      for (const auto& v : ib) CHECK((u.contains(v) && h.contains(f, v)));
      CHECK(fq_span_dim(f, k, ib) == w);
    }
  }
}

TEST_CASE("kernel agrees with the reference weight on larger fields") {
  for (auto [p, s, n, k] : {std::tuple{2U, 1U, 6U, 5UL}, {2U, 3U, 3U, 3UL}, {3U, 2U, 2U, 4UL}, {2U, 1U, 24U, 3UL},
                            {5U, 1U, 3U, 3UL}, {2U, 1U, 8U, 12UL}}) {
    const auto f = FieldTower::create(p, s, n);
    std::mt19937_64 rng(k * 31 + n);
    for (int t = 0; t < 15; ++t) {
      const auto u = random_space(f, k, 1 + rng() % (k * n), rng);
      const WeightKernel kernel(u);
      for (int j = 0; j < 5; ++j) {
        const auto h = sample_subspace(k, rng() % (k + 1), f, rng);
        REQUIRE(kernel.weight(h) == subspace_weight(u, h));
      }
    }
  }
}

TEST_CASE("trivial weights") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto u = build_V(ConstructionParams{f, 3, 1, {f.generator(), f.one(), f.one()}}).space;
  CHECK(subspace_weight(u, SubspaceQn::full(f, 6)) == u.dim());
  CHECK(subspace_weight(u, SubspaceQn::span(f, 6, MatrixQn(0, 6))) == 0);
  CHECK_THROWS_AS(subspace_weight(u, SubspaceQn::full(f, 5)), FieldError);
}

TEST_CASE("pseudoregulus, h = 1") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto pr = build_pseudoregulus(f, 1).space;
  const MatrixQn diag = MatrixQn::from_rows({{f.one(), f.one()}}, 2);
  CHECK(subspace_weight(pr, SubspaceQn::span(f, 2, diag)) == 1);
  const WeightKernel kernel(pr);
  CHECK(kernel.max_weight(1, 0, 17) == 1);
  for (auto m : {Mode::exhaustive, Mode::witness_span}) {
    const auto v = verify_h_scattered(pr, 1, opts(m));
    CHECK(v.status == Status::holds);
  }
}

TEST_CASE("pseudoregulus, h = 2: both proof modes hold") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto pr = build_pseudoregulus(f, 2).space;
  const auto ex = verify_h_scattered(pr, 2, opts(Mode::exhaustive));
  CHECK(ex.status == Status::holds);
  CHECK(ex.checked == 273);
  const auto ws = verify_h_scattered(pr, 2, opts(Mode::witness_span));
  CHECK(ws.status == Status::holds);
  // d = 1: 15 points; d = 2: 15 * 15 ordered pairs
  CHECK(ws.checked == 15 + 15 * 15);
}

TEST_CASE("line control is caught with a weight-n witness") {
  for (std::uint32_t n : {3U, 4U}) {
    const auto f = FieldTower::create(2, 1, n);
    const auto u = line_control(f).space;
    for (auto m : {Mode::exhaustive, Mode::witness_span}) {
      const auto v = verify_h_scattered(u, 1, opts(m));
      check_witness(u, v);
      CHECK(v.witness->weight == n);
      CHECK(v.witness->intersection_basis.size() == n);
    }
    const auto s = verify_h_scattered(u, 1, opts(Mode::sampled, 500, 3));
    check_witness(u, s);
    const auto ss = verify_h_scattered(u, 1, opts(Mode::sampled_span, 500, 3));
    check_witness(u, ss);
  }
}

TEST_CASE("exhaustive and witness-span agree on small instances") {
  struct Case {
    std::uint32_t p, s, n;
    std::size_t k;
  };
  for (auto c : {Case{2, 1, 2, 3}, Case{3, 1, 2, 3}, Case{2, 2, 2, 2}, Case{2, 1, 3, 3}, Case{2, 2, 2, 3}}) {
    const auto f = FieldTower::create(c.p, c.s, c.n);
    std::mt19937_64 rng(c.p * 7 + c.s * 3 + c.n + c.k);
    int violated = 0, held = 0;
    for (int t = 0; t < 30; ++t) {
      const auto u = random_space(f, c.k, 1 + rng() % (c.k + 1), rng);
      const std::size_t hdim = 1 + rng() % (c.k - 1);
      const std::size_t r = hdim + rng() % 2;
      const auto ex = verify_evasive(u, hdim, r, opts(Mode::exhaustive));
      const auto ws = verify_evasive(u, hdim, r, opts(Mode::witness_span));
      REQUIRE(ex.status == ws.status);
      if (ex.status == Status::violated) {
        ++violated;
        check_witness(u, ex);
        check_witness(u, ws);
      } else {
        ++held;
        CHECK(ex.status == Status::holds);
        // the exhaustive maximum is indeed within the bound
        if (r < u.dim()) {
          const WeightKernel kernel(u);
          const auto g = Grassmannian(f, c.k, hdim);
          CHECK(kernel.max_weight(hdim, 0, g.size()) <= r);
        }
      }
    }
    CHECK(violated > 0);
    CHECK(held > 0);
  }
}

TEST_CASE("vacuous and invalid requests") {
  const auto f = FieldTower::create(2, 1, 3);
  const auto u = build_pseudoregulus(f, 1).space;
  const auto v = verify_evasive(u, 1, 3, opts(Mode::witness_span));
  CHECK(v.status == Status::holds);
  CHECK(v.checked == 0);
  CHECK_THROWS_AS(verify_evasive(u, 2, 2, opts(Mode::exhaustive)), FieldError);
  CHECK_THROWS_AS(verify_evasive(u, 1, 0, opts(Mode::exhaustive)), FieldError);
  CHECK_THROWS_AS(verify_evasive(u, 1, 1, opts(Mode::sampled, 0)), FieldError);
  const FqSubspace line(f, 2, {{f.one(), f.zero()}});
  CHECK_THROWS_AS(verify_h_scattered(line, 1, opts(Mode::exhaustive)), FieldError);
  CHECK(max_dim_bound(9, 4, 2) == 12);
  CHECK(max_dim_bound(2, 4, 1) == 4);
  CHECK(max_dim_bound(12, 4, 2) == 16);
}

TEST_CASE("sampled modes never prove") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto pr = build_pseudoregulus(f, 2).space;
  for (auto m : {Mode::sampled, Mode::sampled_span}) {
    const auto v = verify_h_scattered(pr, 2, opts(m, 5000, 11));
    CHECK(v.status == Status::inconclusive);
    CHECK(v.checked == 5000);
    CHECK_FALSE(v.witness);
  }
  // a truncated proof sweep is not a proof either
  const auto t = verify_h_scattered(pr, 2, opts(Mode::exhaustive, 100));
  CHECK(t.status == Status::inconclusive);
  CHECK(t.checked == 100);
}

TEST_CASE("scatteredness implies evasiveness") {
  const auto f = FieldTower::create(2, 1, 4);
  std::mt19937_64 rng(77);
  for (int t = 0; t < 20; ++t) {
    const auto u = random_space(f, 2, 2 + rng() % 3, rng);
    if (!u.spans_ambient()) continue;
    const auto sc = verify_h_scattered(u, 1, opts(Mode::witness_span));
    const auto ev = verify_evasive(u, 1, 1, opts(Mode::witness_span));
    CHECK(sc.status == ev.status);
  }
}

TEST_CASE("V_{A,1} is point-scattered for q=2, n=4, m=4") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto u = build_V(ConstructionParams{f, 4, 1, {f.generator(), f.one(), f.one(), f.one()}}).space;
  const auto v = verify_h_scattered(u, 1, opts(Mode::witness_span));
  CHECK(v.status == Status::holds);
  CHECK(v.checked == 65535);
}

TEST_CASE("the sweep is independent of the worker count") {
  const auto f = FieldTower::create(2, 1, 3);
  // weight-2 planes exist but are rare: U = pseudoregulus(3,1) + a stray vector
  auto gens = build_pseudoregulus(f, 2).space.generators();
  gens.push_back({f.one(), f.one(), f.zero()});
  const FqSubspace u(f, 3, gens);
  for (auto m : {Mode::exhaustive, Mode::witness_span, Mode::sampled_span}) {
    const auto a = verify_evasive(u, 1, 1, opts(m, m == Mode::sampled_span ? 20000 : 0, 5, 1));
    const auto b = verify_evasive(u, 1, 1, opts(m, m == Mode::sampled_span ? 20000 : 0, 5, 4));
    CHECK(a.status == b.status);
    CHECK(a.checked == b.checked);
    REQUIRE(a.witness.has_value() == b.witness.has_value());
    if (a.witness) {
      CHECK(a.witness->subspace == b.witness->subspace);
      CHECK(a.witness->tuple_index == b.witness->tuple_index);
    }
  }
}

TEST_CASE("checkpoint and resume") {
  const auto dir = std::filesystem::temp_directory_path() / "rankscatter_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "sweep.ckpt").string();
  std::filesystem::remove(path);
  const auto f = FieldTower::create(2, 1, 4);
  const auto u = build_V(ConstructionParams{f, 4, 2, {f.generator(), f.one(), f.one(), f.one()}}).space;
  auto o = opts(Mode::sampled_span, 40000, 9);
  const auto full = verify_h_scattered(u, 2, o);
  o.checkpoint = path;
  o.stop_after_ranges = 4;
  const auto part = verify_h_scattered(u, 2, o);
  CHECK(part.status == Status::interrupted);
  o.stop_after_ranges = 0;
  const auto resumed = verify_h_scattered(u, 2, o);
  CHECK(resumed.status == full.status);
  CHECK(resumed.checked == full.checked);
  // a checkpoint from another job is refused
  o.seed = 10;
  CHECK_THROWS_AS(verify_h_scattered(u, 2, o), FieldError);
  std::filesystem::remove(path);

  // resume reconstructs a witness found before the interruption
  const auto line = line_control(f).space;
  auto lo = opts(Mode::witness_span);
  const auto direct = verify_h_scattered(line, 1, lo);
  lo.checkpoint = path;
  verify_h_scattered(line, 1, lo);
  const auto again = verify_h_scattered(line, 1, lo);
  CHECK(again.status == Status::violated);
  CHECK(again.checked == direct.checked);
  CHECK(again.witness->subspace == direct.witness->subspace);
  std::filesystem::remove_all(dir);
}

TEST_CASE("witness recheck rejects tampering") {
  const auto f = FieldTower::create(2, 1, 4);
  const auto u = line_control(f).space;
  const auto v = verify_h_scattered(u, 1, opts(Mode::witness_span));
  REQUIRE(v.witness);
  auto w = *v.witness;
  CHECK(recheck_witness(u, w, 1));
  CHECK_FALSE(recheck_witness(u, w, 4));
  auto bad = w;
  bad.weight = 3;
  CHECK_FALSE(recheck_witness(u, bad, 1));
  bad = w;
  bad.intersection_basis.pop_back();
  CHECK_FALSE(recheck_witness(u, bad, 1));
  bad = w;
  bad.subspace = SubspaceQn::span(f, 2, MatrixQn::from_rows({{f.one(), f.one()}}, 2));
  CHECK_FALSE(recheck_witness(u, bad, 1));
}

TEST_CASE("element indexing") {
  const auto f = FieldTower::create(3, 1, 2);
  const auto u = build_pseudoregulus(f, 1).space;
  const WeightKernel kernel(u);
  CHECK(kernel.element_count() == 9);
  std::set<VectorQn> seen;
  for (std::uint64_t i = 0; i < 9; ++i) {
    const auto e = kernel.element(i);
    CHECK(u.contains(e));
    seen.insert(e);
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("maximum weights by sweep") {
  const auto f = FieldTower::create(2, 1, 3);
  std::mt19937_64 rng(15);
  for (int t = 0; t < 10; ++t) {
    const auto u = random_space(f, 3, 2 + rng() % 4, rng);
    const WeightKernel kernel(u);
    for (std::size_t d = 0; d <= 3; ++d) {
      std::size_t brute = 0;
      grassmannian_enumerate(f, 3, d, [&](const SubspaceQn& h) { brute = std::max(brute, subspace_weight(u, h)); });
      const auto r = sweep_max_weight(kernel, d, Mode::exhaustive, 0, 0, 2);
      CHECK(r.max_weight == brute);
      CHECK(r.complete);
      REQUIRE(r.argmax);
      CHECK(subspace_weight(u, *r.argmax) == brute);
      const auto s = sweep_max_weight(kernel, d, Mode::sampled_span, 300, 1, 1);
      CHECK(s.max_weight <= brute);
      if (d > 0) CHECK_FALSE(s.complete);
    }
  }
}
