#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankscatter/verifiers.hpp"

namespace rankscatter {

/// [t, k]_{q^n/q} code given by a k x t generator matrix of rank k.
struct RankCode {
  FieldTower tower;
  std::size_t k = 0;
  std::size_t t = 0;
  MatrixQn G;
};

/// Checks the rank of G and wraps it.
RankCode make_code(const FieldTower& f, MatrixQn G);
/// Columns of G are an F_q-basis of U. Throws unless U spans its ambient space.
RankCode code_from_system(const QSystemDesc& u);
/// The F_q-span of the columns of G.
FqSubspace system_of(const RankCode& c);
/// Columns F_q-independent.
bool is_nondegenerate(const RankCode& c);

/// dim_Fq of the span of the coordinates of v.
std::size_t rank_weight(const FieldTower& f, std::span<const FieldElement> v);

enum class DistanceMode { exhaustive, projective, sampled };
std::string to_string(DistanceMode m);
DistanceMode distance_mode_from_string(const std::string& s);

struct DistanceResult {
  std::size_t value = 0;
  bool exact = true;  ///< false for sampled: then value only bounds d from above
  std::uint64_t checked = 0;
  VectorQn codeword;  ///< a codeword attaining value
};

/// Minimum rank distance. Projective mode walks one message per
/// F_{q^n}-scalar class (first nonzero entry 1).
DistanceResult min_distance(const RankCode& c, DistanceMode mode, std::uint64_t budget = 0, std::uint64_t seed = 0);

enum class Provenance { exact, lower_bound, upper_bound };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct WeightEntry {
  std::size_t rho = 0;
  std::size_t value = 0;
  Provenance provenance = Provenance::exact;
  std::uint64_t subspaces_checked = 0;
  /// (k - rho)-subspace of maximum weight, when one was found by a sweep.
  std::optional<SubspaceQn> witness;
};

/// d_1..d_k with per-entry provenance. A rho may carry both a lower and an
/// upper bound entry; exact entries are unique.
struct WeightProfile {
  std::size_t k = 0;
  std::size_t t = 0;
  std::vector<WeightEntry> entries;

  std::optional<std::size_t> exact(std::size_t rho) const;
  std::optional<std::size_t> lower(std::size_t rho) const;
  std::optional<std::size_t> upper(std::size_t rho) const;
  /// Every rho in 1..k has an exact entry.
  bool complete() const;
  /// Exact values d_1..d_k; throws unless complete().
  std::vector<std::size_t> values() const;
};

/// d_rho = dim_Fq U - max{wt_U(H) : dim H = k - rho}. Exhaustive mode gives
/// exact entries; sampled modes only find some H, so they give upper bounds
/// on d_rho. An empty rho list means 1..k.
WeightProfile generalized_weights(const QSystemDesc& u, std::vector<std::size_t> rhos, Mode mode,
                                  std::uint64_t budget = 0, std::uint64_t seed = 0, unsigned workers = 1);
WeightProfile generalized_weights(const RankCode& c, std::vector<std::size_t> rhos, Mode mode,
                                  std::uint64_t budget = 0, std::uint64_t seed = 0, unsigned workers = 1);

/// [t, t - k] code spanning the kernel of G.
RankCode dual_code(const RankCode& c);

/// nk == min(n(t - d + 1), t(n - d + 1)).
bool meets_singleton(std::size_t n, std::size_t k, std::size_t t, std::size_t d);
/// Throws FieldError if d is not an exact minimum distance.
bool is_mrd(const RankCode& c, const DistanceResult& d);

/// Strict monotonicity of both profiles and the reflected Wei-type partition
/// {d_i} ⊔ {t + 1 - d_j^⊥} = {1..t}. Throws unless both are complete.
bool check_weight_axioms(const WeightProfile& p, const WeightProfile& dual, std::size_t t);

/// Generalized weights of the direct sum of m maximum h-scattered systems of
/// F_{q^n}^{h+1}: exact where pinned, lower/upper bounds in the middle.
WeightProfile predicted_direct_sum_profile(std::size_t m, std::size_t n, std::size_t h);

/// Lower bounds on d_rho for the family code at rho = h+1, s(h+1) (s in
/// s_list, 2 <= s <= m-2, needs B) and (m-1)(h+1). Requires A in the
/// admissible set and h >= 2; throws FieldError otherwise.
WeightProfile family_weight_bounds(const ConstructionParams& params, const std::vector<std::size_t>& s_list);

struct BoundComparison {
  std::size_t rho = 0;
  std::size_t family_lower = 0;
  std::size_t baseline = 0;  ///< exact value or upper bound for the direct sum
  Provenance baseline_provenance = Provenance::exact;
  bool exceeds = false;      ///< family_lower > baseline
  std::string source;
};

std::vector<BoundComparison> compare_with_direct_sum(const ConstructionParams& params,
                                                     const std::vector<std::size_t>& s_list);

}  // namespace rankscatter
