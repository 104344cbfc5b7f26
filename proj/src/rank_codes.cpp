#include "rankscatter/rank_codes.hpp"

#include <algorithm>

namespace rankscatter {

RankCode make_code(const FieldTower& f, MatrixQn G) {
  if (rank_qn(f, G) != G.rows()) throw FieldError("generator matrix rows are dependent");
  RankCode c{f, G.rows(), G.cols(), std::move(G)};
  return c;
}

RankCode code_from_system(const QSystemDesc& u) {
  if (!u.space.spans_ambient()) throw FieldError("system does not span its ambient space");
  const auto cols = u.space.basis();
  const std::size_t k = u.k();
  MatrixQn G(k, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < k; ++i) G(i, j) = cols[j][i];
  return make_code(u.space.tower(), std::move(G));
}

FqSubspace system_of(const RankCode& c) { return FqSubspace(c.tower, c.k, c.G.transpose().to_rows()); }

bool is_nondegenerate(const RankCode& c) { return system_of(c).dim() == c.t; }

std::size_t rank_weight(const FieldTower& f, std::span<const FieldElement> v) {
  const std::size_t D = f.degree();
  if (f.p() == 2 && D <= 64) {
    std::vector<std::uint64_t> rows;
    rows.reserve(v.size() * f.s());
    for (auto x : v)
      for (auto w : f.subfield_basis()) rows.push_back(f.mul(w, x).code);
    return rank_f2(rows, 1) / f.s();
  }
  FpMatrix full(f.p(), 0, D);
  for (auto x : v)
    for (auto w : f.subfield_basis()) {
      const FieldElement y = f.mul(w, x);
      full.append_row(prime_expand(std::span<const FieldElement>(&y, 1), f));
    }
  return full.rank() / f.s();
}

std::string to_string(DistanceMode m) {
  switch (m) {
    case DistanceMode::exhaustive: return "exhaustive";
    case DistanceMode::projective: return "projective";
    case DistanceMode::sampled: return "sampled";
  }
  return "projective";
}

DistanceMode distance_mode_from_string(const std::string& s) {
  if (s == "exhaustive") return DistanceMode::exhaustive;
  if (s == "projective") return DistanceMode::projective;
  if (s == "sampled") return DistanceMode::sampled;
  throw FieldError("unknown distance mode: " + s);
}

namespace {

std::uint64_t checked_pow(std::uint64_t b, std::size_t e) {
  unsigned __int128 v = 1;
  for (std::size_t i = 0; i < e; ++i) {
    v *= b;
    if (v > (static_cast<unsigned __int128>(1) << 62)) throw FieldError("message space too large to enumerate");
  }
  return static_cast<std::uint64_t>(v);
}

VectorQn encode(const RankCode& c, std::span<const FieldElement> msg) {
  const auto& f = c.tower;
  VectorQn out(c.t);
  for (std::size_t i = 0; i < c.k; ++i) {
    if (msg[i].code == 0) continue;
    for (std::size_t j = 0; j < c.t; ++j) out[j] = f.add(out[j], f.mul(msg[i], c.G(i, j)));
  }
  return out;
}

}  // namespace

DistanceResult min_distance(const RankCode& c, DistanceMode mode, std::uint64_t budget, std::uint64_t seed) {
  if (c.k == 0) throw FieldError("the zero code has no minimum distance");
  const auto& f = c.tower;
  const std::uint64_t Q = f.order();
  DistanceResult best;
  best.value = c.t + 1;
  auto consider = [&](const VectorQn& msg) {
    const auto cw = encode(c, msg);
    const std::size_t w = rank_weight(f, cw);
    ++best.checked;
    if (w < best.value) {
      best.value = w;
      best.codeword = cw;
    }
  };
  VectorQn msg(c.k);
  switch (mode) {
    case DistanceMode::exhaustive: {
      const std::uint64_t total = checked_pow(Q, c.k);
      for (std::uint64_t idx = 1; idx < total; ++idx) {
        std::uint64_t r = idx;
        for (auto& x : msg) {
          x = FieldElement{r % Q};
          r /= Q;
        }
        consider(msg);
      }
      break;
    }
    case DistanceMode::projective:
      for (std::size_t lead = 0; lead < c.k; ++lead) {
        const std::uint64_t tail = checked_pow(Q, c.k - 1 - lead);
        for (std::uint64_t idx = 0; idx < tail; ++idx) {
          std::fill(msg.begin(), msg.end(), FieldElement{});
          msg[lead] = f.one();
          std::uint64_t r = idx;
          for (std::size_t i = lead + 1; i < c.k; ++i) {
            msg[i] = FieldElement{r % Q};
            r /= Q;
          }
          consider(msg);
        }
      }
      break;
    case DistanceMode::sampled: {
      if (budget == 0) throw FieldError("sampled mode needs a positive budget");
      auto rng = make_rng(seed);
      for (std::uint64_t i = 0; i < budget; ++i) {
        bool nonzero = false;
        while (!nonzero) {
          for (auto& x : msg) {
            x = random_element(f, rng);
            nonzero = nonzero || x.code != 0;
          }
        }
        consider(msg);
      }
      best.exact = false;
      break;
    }
  }
  return best;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::lower_bound: return "lower_bound";
    case Provenance::upper_bound: return "upper_bound";
  }
  return "exact";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "exact") return Provenance::exact;
  if (s == "lower_bound") return Provenance::lower_bound;
  if (s == "upper_bound") return Provenance::upper_bound;
  throw FieldError("unknown provenance: " + s);
}

namespace {

std::optional<std::size_t> find_entry(const WeightProfile& p, std::size_t rho, Provenance kind) {
  for (const auto& e : p.entries)
    if (e.rho == rho && e.provenance == kind) return e.value;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> WeightProfile::exact(std::size_t rho) const {
  return find_entry(*this, rho, Provenance::exact);
}

std::optional<std::size_t> WeightProfile::lower(std::size_t rho) const {
  if (auto e = exact(rho)) return e;
  return find_entry(*this, rho, Provenance::lower_bound);
}

std::optional<std::size_t> WeightProfile::upper(std::size_t rho) const {
  if (auto e = exact(rho)) return e;
  return find_entry(*this, rho, Provenance::upper_bound);
}

bool WeightProfile::complete() const {
  for (std::size_t rho = 1; rho <= k; ++rho)
    if (!exact(rho)) return false;
  return true;
}

std::vector<std::size_t> WeightProfile::values() const {
  if (!complete()) throw FieldError("profile has no exact value for every rho");
  std::vector<std::size_t> out;
  for (std::size_t rho = 1; rho <= k; ++rho) out.push_back(*exact(rho));
  return out;
}

WeightProfile generalized_weights(const QSystemDesc& u, std::vector<std::size_t> rhos, Mode mode,
                                  std::uint64_t budget, std::uint64_t seed, unsigned workers) {
  if (!u.space.spans_ambient()) throw FieldError("system does not span its ambient space");
  WeightProfile out;
  out.k = u.k();
  out.t = u.t();
  if (rhos.empty())
    for (std::size_t rho = 1; rho <= out.k; ++rho) rhos.push_back(rho);
  const WeightKernel kernel(u.space);
  for (auto rho : rhos) {
    if (rho < 1 || rho > out.k) throw FieldError("rho must lie in 1..k");
    WeightEntry e;
    e.rho = rho;
    const auto r = sweep_max_weight(kernel, out.k - rho, mode, budget, seed, workers);
    e.value = out.t - r.max_weight;
    e.provenance = r.complete ? Provenance::exact : Provenance::upper_bound;
    e.subspaces_checked = r.checked;
    e.witness = r.argmax;
    out.entries.push_back(std::move(e));
  }
  return out;
}

WeightProfile generalized_weights(const RankCode& c, std::vector<std::size_t> rhos, Mode mode, std::uint64_t budget,
                                  std::uint64_t seed, unsigned workers) {
  return generalized_weights(QSystemDesc{system_of(c), SystemKind::custom}, std::move(rhos), mode, budget, seed,
                             workers);
}

RankCode dual_code(const RankCode& c) { return make_code(c.tower, null_space_qn(c.tower, c.G)); }

bool meets_singleton(std::size_t n, std::size_t k, std::size_t t, std::size_t d) {
  if (d < 1 || d > t || d > n) return false;
  return n * k == std::min(n * (t - d + 1), t * (n - d + 1));
}

bool is_mrd(const RankCode& c, const DistanceResult& d) {
  if (!d.exact) throw FieldError("MRD check needs the exact minimum distance");
  return meets_singleton(c.tower.n(), c.k, c.t, d.value);
}

bool check_weight_axioms(const WeightProfile& p, const WeightProfile& dual, std::size_t t) {
  const auto a = p.values();
  const auto b = dual.values();
  if (a.size() + b.size() != t) return false;
  auto monotone = [t](const std::vector<std::size_t>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 1 || v[i] > t) return false;
      if (i > 0 && v[i] <= v[i - 1]) return false;
    }
    return true;
  };
  if (!monotone(a) || !monotone(b)) return false;
  std::vector<int> hits(t + 1, 0);
  for (auto d : a) ++hits[d];
  for (auto d : b) ++hits[t + 1 - d];
  for (std::size_t i = 1; i <= t; ++i)
    if (hits[i] != 1) return false;
  return true;
}

WeightProfile predicted_direct_sum_profile(std::size_t m, std::size_t n, std::size_t h) {
  if (m < 2) throw FieldError("m >= 2 required");
  if (h < 1 || h + 1 > n) throw FieldError("1 <= h <= n-1 required");
  WeightProfile out;
  out.k = m * (h + 1);
  out.t = m * n;
  const std::size_t top = (m - 1) * (h + 1);
  auto add = [&](std::size_t rho, std::size_t v, Provenance p) {
    WeightEntry e;
    e.rho = rho;
    e.value = v;
    e.provenance = p;
    out.entries.push_back(std::move(e));
  };
  for (std::size_t i = 1; i <= out.k; ++i) {
    if (i <= h + 1) {
      add(i, n - h - 1 + i, Provenance::exact);
    } else if (i + h >= out.k) {
      add(i, m * n - (out.k - i), Provenance::exact);
    } else if (i == top) {
      add(i, (m - 1) * n, Provenance::exact);
    } else {
      // strictly between d_{h+1} = n and d_top = (m-1)n
      const std::size_t lo = n + 1 + (i - h - 2);
      std::size_t hi = (m - 1) * n - (top - i);
      if (i % (h + 1) == 0) hi = std::min(hi, (i / (h + 1)) * n);
      if (lo == hi) {
        add(i, lo, Provenance::exact);
      } else {
        add(i, lo, Provenance::lower_bound);
        add(i, hi, Provenance::upper_bound);
      }
    }
  }
  return out;
}

WeightProfile family_weight_bounds(const ConstructionParams& params, const std::vector<std::size_t>& s_list) {
  params.validate();
  const std::size_t m = params.m, h = params.h, n = params.tower.n();
  if (h < 2) throw FieldError("family bounds need h >= 2");
  if (!is_in_A(params)) throw FieldError("parameters are not in the admissible set");
  WeightProfile out;
  out.k = m * (h + 1);
  out.t = m * n;
  auto add = [&](std::size_t rho, std::size_t v) {
    WeightEntry e;
    e.rho = rho;
    e.value = v;
    e.provenance = Provenance::lower_bound;
    out.entries.push_back(std::move(e));
  };
  add(h + 1, 2 * n - 2 * h - 2);
  if (!s_list.empty()) {
    const bool in_b = is_in_B(params);
    for (auto s : s_list) {
      if (s < 2 || s + 2 > m) throw FieldError("s must lie in 2..m-2");
      if (!in_b) throw FieldError("parameters are not in the set B needed for the s-bounds");
      add(s * (h + 1), (s + 1) * (n - h - 1));
    }
  }
  add((m - 1) * (h + 1), m * n - h - 2);
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const WeightEntry& a, const WeightEntry& b) { return a.rho < b.rho; });
  return out;
}

std::vector<BoundComparison> compare_with_direct_sum(const ConstructionParams& params,
                                                     const std::vector<std::size_t>& s_list) {
  const auto family = family_weight_bounds(params, s_list);
  const std::size_t m = params.m, h = params.h, n = params.tower.n();
  const auto baseline = predicted_direct_sum_profile(m, n, h);
  std::vector<BoundComparison> out;
  for (const auto& e : family.entries) {
    BoundComparison c;
    c.rho = e.rho;
    c.family_lower = e.value;
    if (auto x = baseline.exact(e.rho)) {
      c.baseline = *x;
      c.baseline_provenance = Provenance::exact;
    } else {
      c.baseline = *baseline.upper(e.rho);
      c.baseline_provenance = Provenance::upper_bound;
    }
    c.exceeds = c.family_lower > c.baseline;
    if (e.rho == h + 1) c.source = "((m-1)(h+1), mn-(2n-2h-2))-evasive";
    else if (e.rho == (m - 1) * (h + 1)) c.source = "(h+1, h+2)-evasive";
    else c.source = "((m-s)(h+1), mn-(s+1)(n-h-1))-evasive, s=" + std::to_string(e.rho / (h + 1));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace rankscatter
