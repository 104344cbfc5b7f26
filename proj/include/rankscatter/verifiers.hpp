#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankscatter/construction.hpp"

namespace rankscatter {

enum class Mode {
  exhaustive,    ///< every hdim-subspace in Grassmannian order
  witness_span,  ///< spans of d <= hdim tuples of U-vectors; complete
  sampled,       ///< uniform random hdim-subspaces; never proves anything
  sampled_span,  ///< spans of random hdim-tuples of U-vectors; never proves anything
};

enum class Status { holds, violated, inconclusive, interrupted };

std::string to_string(Mode m);
std::string to_string(Status s);
Mode mode_from_string(const std::string& s);
Status status_from_string(const std::string& s);
inline bool is_proof_mode(Mode m) { return m == Mode::exhaustive || m == Mode::witness_span; }

struct Witness {
  SubspaceQn subspace;
  std::vector<VectorQn> intersection_basis;
  std::size_t weight = 0;
  /// witness_span / sampled_span: indices of the tuple vectors among the
  /// elements of U; exhaustive: {Grassmannian index}; sampled: {sample index}.
  std::vector<std::uint64_t> tuple_index;
};

struct Verdict {
  Status status = Status::inconclusive;
  Mode mode = Mode::exhaustive;
  std::size_t hdim = 0;
  std::size_t bound = 0;
  std::optional<Witness> witness;
  std::uint64_t checked = 0;
  std::uint64_t seed = 0;
};

struct SweepOptions {
  Mode mode = Mode::witness_span;
  /// Items to check; 0 means unlimited for the proof modes. Required for
  /// the sampled modes.
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Append-only checkpoint; resumes from it when it already exists.
  std::string checkpoint;
  /// Stop after evaluating this many ranges (0 = run to completion).
  std::uint64_t stop_after_ranges = 0;
};

/// Largest F_q-dimension an h-scattered subspace of F_{q^n}^r can have,
/// floor(rn/(h+1)).
std::size_t max_dim_bound(std::size_t r, std::size_t n, std::size_t h);

/// dim_Fq(U ∩ H), computed as dim U + dim H - dim(U + H) on F_p expansions.
std::size_t subspace_weight(const FqSubspace& u, const SubspaceQn& h);

/// F_q-basis of U ∩ H.
std::vector<VectorQn> intersection_basis(const FqSubspace& u, const SubspaceQn& h);

/// Precomputed weight evaluator for a fixed U. Reduces F_p expansions of
/// H against the RREF of U and reads the weight off the residual rank; for
/// small fields the residuals of every (multiplier, coordinate, element)
/// triple are tabulated. Thread-safe after construction.
class WeightKernel {
 public:
  explicit WeightKernel(const FqSubspace& u);
  ~WeightKernel();
  WeightKernel(WeightKernel&&) noexcept;
  WeightKernel& operator=(WeightKernel&&) noexcept;

  const FqSubspace& space() const;
  /// Weight of the span of the rows of basis (rows must be independent).
  std::size_t weight(const MatrixQn& basis) const;
  std::size_t weight(const SubspaceQn& h) const { return weight(h.basis()); }
  /// Number of elements of U (p^{s·dim}); throws if it does not fit 64 bits.
  std::uint64_t element_count() const;
  /// The element of U with the given index: digit l of the base-p index is
  /// the coefficient of the l-th row of U's canonical F_p basis.
  VectorQn element(std::uint64_t index) const;
  /// Maximum weight over all d-subspaces with Grassmannian index in [begin, end).
  std::size_t max_weight(std::size_t d, std::uint64_t begin, std::uint64_t end) const;

  struct Impl;

 private:
  friend class SweepAccess;
  std::unique_ptr<Impl> impl_;
};

/// (hdim, r)-evasiveness: every hdim-dimensional F_{q^n}-subspace meets U in
/// F_q-dimension at most r.
Verdict verify_evasive(const FqSubspace& u, std::size_t hdim, std::size_t r, const SweepOptions& opts);
/// h-scatteredness: U spans the ambient space and is (h, h)-evasive. Throws
/// FieldError when U does not span.
Verdict verify_h_scattered(const FqSubspace& u, std::size_t h, const SweepOptions& opts);

/// Re-derives the witness weight from its serialised pieces: the recorded
/// weight must equal dim_Fq(U ∩ H), exceed the bound, and the intersection
/// basis must lie in U ∩ H with the recorded F_q-rank.
bool recheck_witness(const FqSubspace& u, const Witness& w, std::size_t bound);

/// Maximum of wt_U(H) over d-subspaces (exhaustive), swept in parallel
/// ranges. Used by the generalized-weight code.
struct MaxWeightResult {
  std::size_t max_weight = 0;
  std::uint64_t checked = 0;
  bool complete = true;
  std::optional<SubspaceQn> argmax;
};
MaxWeightResult sweep_max_weight(const WeightKernel& kernel, std::size_t d, Mode mode, std::uint64_t budget,
                                 std::uint64_t seed, unsigned workers);

}  // namespace rankscatter
