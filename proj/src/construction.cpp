#include "rankscatter/construction.hpp"

namespace rankscatter {

void ConstructionParams::validate() const {
  if (m < 3) throw FieldError("m >= 3 required");
  if (h < 1 || h + 2 > tower.n()) throw FieldError("1 <= h <= n-2 required");
  if (alphas.size() != m) throw FieldError("expected m alphas");
  for (auto a : alphas) {
    if (a.code >= tower.order()) throw FieldError("alpha is not an element of the field");
    if (a.code == 0) throw FieldError("degenerate parameters: every alpha must be nonzero");
  }
}

FieldElement ConstructionParams::alpha(std::int64_t i) const {
  const auto mm = static_cast<std::int64_t>(m);
  const std::int64_t idx = (((i - 1) % mm) + mm) % mm;
  return alphas[static_cast<std::size_t>(idx)];
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::family: return "family";
    case SystemKind::pseudoregulus: return "pseudoregulus";
    case SystemKind::direct_sum: return "direct-sum";
    case SystemKind::line_control: return "line-control";
    case SystemKind::custom: return "custom";
  }
  return "custom";
}

SystemKind system_kind_from_string(const std::string& s) {
  if (s == "family") return SystemKind::family;
  if (s == "pseudoregulus") return SystemKind::pseudoregulus;
  if (s == "direct-sum") return SystemKind::direct_sum;
  if (s == "line-control") return SystemKind::line_control;
  if (s == "custom") return SystemKind::custom;
  throw FieldError("unknown system kind: " + s);
}

FieldElement k_invariant(const ConstructionParams& params) {
  params.validate();
  const auto& f = params.tower;
  const auto m = static_cast<std::int64_t>(params.m);
  FieldElement k = f.frobenius(params.alpha(1), m - 1);
  for (std::int64_t i = 2; i <= m; ++i) k = f.mul(k, f.frobenius(params.alpha(i), i - 2));
  return k;
}

std::uint64_t norm_exponent_mod(const FieldTower& f, std::size_t m) {
  const std::uint64_t mod = f.order() - 1;
  unsigned __int128 acc = 0;
  for (std::size_t i = 0; i < m; ++i) acc = (acc + powmod_u64(f.q(), i, mod)) % mod;
  return static_cast<std::uint64_t>(acc);
}

bool is_in_A(const ConstructionParams& params) {
  const FieldElement k = k_invariant(params);
  return !params.tower.is_power_residue(k, norm_exponent_mod(params.tower, params.m));
}

bool is_nonvacuous(const FieldTower& f, std::size_t m) { return f.residue_gcd(norm_exponent_mod(f, m)) > 1; }

FieldElement pi_invariant(const ConstructionParams& params, std::size_t i) {
  params.validate();
  if (i < 1 || i > params.m) throw FieldError("Pi index must lie in 1..m");
  const auto& f = params.tower;
  const auto m = static_cast<std::int64_t>(params.m);
  FieldElement acc = f.one();
  for (std::int64_t j = 0; j < m; ++j)
    acc = f.mul(acc, f.frobenius(params.alpha(static_cast<std::int64_t>(i) - j), m - 1 - j));
  return acc;
}

bool is_in_B(const ConstructionParams& params) {
  if (!is_in_A(params)) return false;
  const auto& f = params.tower;
  const std::uint64_t mod = f.order() - 1;
  const std::uint64_t e = (powmod_u64(f.q(), params.m, mod) + mod - 1) % mod;
  const FieldElement pi2 = pi_invariant(params, 2);
  for (std::size_t delta = 1; delta + 1 <= params.m; ++delta) {
    const std::size_t idx = (delta + 2 - 1) % params.m + 1;
    const FieldElement ratio = f.div(pi_invariant(params, idx), pi2);
    if (f.is_power_residue(ratio, e)) return false;
  }
  return true;
}

VectorQn phi(const ConstructionParams& params, std::span<const FieldElement> x) {
  const auto& f = params.tower;
  const std::size_t m = params.m, h = params.h;
  if (x.size() != m) throw FieldError("phi expects m coordinates");
  VectorQn out;
  out.reserve(m * (h + 1));
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t i = 0; i < m; ++i) out.push_back(f.frobenius(x[i], static_cast<std::int64_t>(j)));
  const auto hh = static_cast<std::int64_t>(h);
  for (std::size_t i = 0; i < m; ++i) {
    // f_i = x_i^{q^h} + alpha_{i+1} x_{i+1}^{q^{h+1}}, indices mod m
    const std::size_t next = (i + 1) % m;
    out.push_back(f.add(f.frobenius(x[i], hh),
                        f.mul(params.alpha(static_cast<std::int64_t>(i) + 2), f.frobenius(x[next], hh + 1))));
  }
  return out;
}

QSystemDesc build_V(const ConstructionParams& params) {
  params.validate();
  const auto& f = params.tower;
  std::vector<VectorQn> gens;
  gens.reserve(params.m * f.n());
  VectorQn x(params.m);
  for (std::size_t i = 0; i < params.m; ++i) {
    for (auto b : f.q_basis()) {
      std::fill(x.begin(), x.end(), FieldElement{});
      x[i] = b;
      gens.push_back(phi(params, x));
    }
  }
  return QSystemDesc{FqSubspace(f, params.m * (params.h + 1), std::move(gens)), SystemKind::family};
}

QSystemDesc build_pseudoregulus(const FieldTower& f, std::size_t h) {
  if (h < 1 || h + 1 > f.n()) throw FieldError("1 <= h <= n-1 required");
  std::vector<VectorQn> gens;
  for (auto b : f.q_basis()) {
    VectorQn v;
    for (std::size_t j = 0; j <= h; ++j) v.push_back(f.frobenius(b, static_cast<std::int64_t>(j)));
    gens.push_back(std::move(v));
  }
  return QSystemDesc{FqSubspace(f, h + 1, std::move(gens)), SystemKind::pseudoregulus};
}

QSystemDesc direct_sum(const std::vector<QSystemDesc>& systems) {
  if (systems.empty()) throw FieldError("direct sum of no systems");
  if (systems.size() == 1) return systems.front();
  const FieldTower& f = systems.front().space.tower();
  std::size_t k = 0;
  for (const auto& s : systems) {
    if (!(s.space.tower() == f)) throw FieldError("direct sum requires a common field");
    k += s.k();
  }
  std::vector<VectorQn> gens;
  std::size_t offset = 0;
  for (const auto& s : systems) {
    for (const auto& g : s.space.generators()) {
      VectorQn v(k);
      std::copy(g.begin(), g.end(), v.begin() + static_cast<std::ptrdiff_t>(offset));
      gens.push_back(std::move(v));
    }
    offset += s.k();
  }
  return QSystemDesc{FqSubspace(f, k, std::move(gens)), SystemKind::direct_sum};
}

QSystemDesc line_control(const FieldTower& f) {
  std::vector<VectorQn> gens;
  for (auto b : f.q_basis()) gens.push_back({b, f.zero()});
  gens.push_back({f.zero(), f.one()});
  return QSystemDesc{FqSubspace(f, 2, std::move(gens)), SystemKind::line_control};
}

}  // namespace rankscatter
