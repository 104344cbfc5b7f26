#include "rankscatter/verifiers.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rankscatter {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::exhaustive: return "exhaustive";
    case Mode::witness_span: return "witness_span";
    case Mode::sampled: return "sampled";
    case Mode::sampled_span: return "sampled_span";
  }
  return "exhaustive";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::violated: return "violated";
    case Status::inconclusive: return "inconclusive";
    case Status::interrupted: return "interrupted";
  }
  return "inconclusive";
}

Mode mode_from_string(const std::string& s) {
  if (s == "exhaustive") return Mode::exhaustive;
  if (s == "witness_span" || s == "witness-span") return Mode::witness_span;
  if (s == "sampled") return Mode::sampled;
  if (s == "sampled_span" || s == "sampled-span") return Mode::sampled_span;
  throw FieldError("unknown mode: " + s);
}

Status status_from_string(const std::string& s) {
  if (s == "holds") return Status::holds;
  if (s == "violated") return Status::violated;
  if (s == "inconclusive") return Status::inconclusive;
  if (s == "interrupted") return Status::interrupted;
  throw FieldError("unknown status: " + s);
}

std::size_t max_dim_bound(std::size_t r, std::size_t n, std::size_t h) {
  if (h < 1) throw FieldError("h >= 1 required");
  return r * n / (h + 1);
}

std::size_t subspace_weight(const FqSubspace& u, const SubspaceQn& h) {
  if (u.ambient() != h.ambient()) throw FieldError("ambient dimension mismatch");
  return fq_intersection_dim(u, as_fq_subspace(u.tower(), h));
}

namespace {

VectorQn combine_prime(const FieldTower& f, const std::vector<VectorQn>& basis, std::span<const std::uint32_t> coeffs,
                       std::size_t k) {
  VectorQn out(k);
  for (std::size_t l = 0; l < basis.size(); ++l) {
    if (!coeffs[l]) continue;
    for (std::size_t c = 0; c < k; ++c) out[c] = f.add(out[c], f.scale(basis[l][c], coeffs[l]));
  }
  return out;
}

// Decodes the RREF rows of U's F_p expansion back into vectors of F_{q^n}^k.
std::vector<VectorQn> canonical_prime_basis(const FqSubspace& u) {
  const auto& f = u.tower();
  const std::size_t D = f.degree();
  std::vector<VectorQn> out;
  const auto& ex = u.expansion();
  for (std::size_t r = 0; r < ex.rows(); ++r) {
    VectorQn v(u.ambient());
    for (std::size_t c = 0; c < u.ambient(); ++c) v[c] = f.from_coeffs(ex.row(r).subspan(c * D, D));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<VectorQn> intersection_basis(const FqSubspace& u, const SubspaceQn& h) {
  if (u.ambient() != h.ambient()) throw FieldError("ambient dimension mismatch");
  const auto& f = u.tower();
  const std::size_t k = u.ambient(), D = f.degree();
  const auto gamma = canonical_prime_basis(u);
  const MatrixQn parity = h.annihilator(f);
  // rows: expansion of P gamma_l; kernel of the transpose gives the F_p relations
  FpMatrix m(f.p(), 0, parity.rows() * D);
  for (const auto& g : gamma) {
    VectorQn img(parity.rows());
    for (std::size_t i = 0; i < parity.rows(); ++i) {
      FieldElement acc{};
      for (std::size_t c = 0; c < k; ++c) acc = f.add(acc, f.mul(parity(i, c), g[c]));
      img[i] = acc;
    }
    m.append_row(prime_expand(img, f));
  }
  const FpMatrix relations = m.transpose().null_space();
  std::vector<VectorQn> prime_vectors;
  for (std::size_t r = 0; r < relations.rows(); ++r)
    prime_vectors.push_back(combine_prime(f, gamma, relations.row(r), k));
  std::vector<VectorQn> out;
  std::size_t dim = 0;
  for (const auto& v : prime_vectors) {
    auto trial = out;
    trial.push_back(v);
    const std::size_t d = fq_span_dim(f, k, trial);
    if (d > dim) {
      dim = d;
      out = std::move(trial);
    }
  }
  return out;
}

bool recheck_witness(const FqSubspace& u, const Witness& w, std::size_t bound) {
  if (w.subspace.ambient() != u.ambient()) return false;
  const auto& f = u.tower();
  // the stored basis must be a genuine RREF basis
  const auto re = SubspaceQn::span(f, u.ambient(), w.subspace.basis());
  if (!(re == w.subspace)) return false;
  const std::size_t weight = subspace_weight(u, w.subspace);
  if (weight != w.weight || weight <= bound) return false;
  for (const auto& v : w.intersection_basis) {
    if (v.size() != u.ambient()) return false;
    if (!u.contains(v) || !w.subspace.contains(f, v)) return false;
  }
  return fq_span_dim(f, u.ambient(), w.intersection_basis) == weight &&
         w.intersection_basis.size() == weight;
}

// ---------------------------------------------------------------------------
// Kernel

struct ScanResult {
  std::uint64_t checked = 0;
  std::optional<std::uint64_t> found;
  std::size_t max_fp = 0;
  std::uint64_t argmax = 0;
};

struct WeightKernel::Impl {
  FqSubspace u;
  FieldTower f;
  std::size_t k = 0, D = 0, s = 1, ts = 0;
  std::uint32_t p = 2;
  std::vector<VectorQn> gamma;
  bool count_fits = false;
  std::uint64_t count = 0;  // p^ts

  explicit Impl(const FqSubspace& space) : u(space), f(space.tower()) {
    k = u.ambient();
    D = f.degree();
    s = f.s();
    p = f.p();
    gamma = canonical_prime_basis(u);
    ts = gamma.size();
    unsigned __int128 c = 1;
    count_fits = true;
    for (std::size_t i = 0; i < ts; ++i) {
      c *= p;
      if (c > (static_cast<unsigned __int128>(1) << 62)) {
        count_fits = false;
        break;
      }
    }
    if (count_fits) count = static_cast<std::uint64_t>(c);
  }
  virtual ~Impl() = default;

  VectorQn element(std::uint64_t index) const {
    std::vector<std::uint32_t> digits(ts);
    for (std::size_t l = 0; l < ts; ++l) {
      digits[l] = static_cast<std::uint32_t>(index % p);
      index /= p;
    }
    return combine_prime(f, gamma, digits, k);
  }

  // Number of admissible first vectors in a span tuple, and their indices.
  std::uint64_t first_count() const {
    if (s == 1) return (count - 1) / (p - 1);
    return count - 1;
  }
  std::uint64_t first_element(std::uint64_t rank) const {
    if (s != 1 || p == 2) return rank + 1;
    std::uint64_t block = 1, start = 0;
    while (rank >= start + block) {
      start += block;
      block *= p;
    }
    return block + (rank - start);
  }

  virtual std::size_t weight_fp(const MatrixQn& basis) const = 0;
  virtual ScanResult scan_grassmannian(const Grassmannian& g, std::uint64_t begin, std::uint64_t end,
                                       std::size_t threshold_fp) const = 0;
  virtual ScanResult scan_spans(std::size_t d, std::uint64_t begin, std::uint64_t end,
                                std::size_t threshold_fp) const = 0;
  /// F_p-dimension of U ∩ span(elements).
  virtual std::size_t span_weight_fp(std::span<const std::uint64_t> elements) const = 0;
};

namespace {

constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 21;

template <class Ops>
struct KernelT final : WeightKernel::Impl {
  using Row = typename Ops::Row;

  Ops ops;
  std::vector<Row> u_rows;
  std::vector<std::size_t> u_piv;
  std::uint64_t Q = 0;
  bool tabulated = false;
  std::vector<Row> res_tab;  // ((mu * k) + c) * Q + x
  std::vector<Row> e_tab, r_tab;  // l * D + mu
  std::vector<FieldElement> mus;

  KernelT(const FqSubspace& space, Ops o) : Impl(space), ops(std::move(o)) {
    Q = f.order();
    mus = f.prime_basis();
    const auto& ex = u.expansion();
    for (std::size_t r = 0; r < ex.rows(); ++r) {
      Row row = ops.zero();
      for (std::size_t c = 0; c < ex.cols(); ++c)
        if (ex(r, c)) Ops::set(row, c, ex(r, c));
      u_rows.push_back(row);
      u_piv.push_back(u.expansion_pivots()[r]);
    }
    if (static_cast<unsigned __int128>(D) * k * Q <= kTableLimit) {
      tabulated = true;
      res_tab.resize(D * k * Q, ops.zero());
      for (std::size_t mu = 0; mu < D; ++mu)
        for (std::size_t c = 0; c < k; ++c)
          for (std::uint64_t x = 0; x < Q; ++x) res_tab[(mu * k + c) * Q + x] = compute_residual(mu, c, FieldElement{x});
    }
    for (std::size_t l = 0; l < ts; ++l)
      for (std::size_t mu = 0; mu < D; ++mu) {
        Row e = ops.zero();
        for (std::size_t c = 0; c < k; ++c) place(e, c, f.mul(mus[mu], gamma[l][c]));
        Row r = e;
        residual(r);
        e_tab.push_back(e);
        r_tab.push_back(r);
      }
  }

  void place(Row& row, std::size_t c, FieldElement y) const {
    for (std::size_t j = 0; j < D; ++j) {
      const std::uint32_t v = f.digit(y, static_cast<std::uint32_t>(j));
      if (v) Ops::set(row, c * D + j, v);
    }
  }

  void residual(Row& row) const {
    for (std::size_t i = 0; i < u_rows.size(); ++i) {
      const std::uint32_t c = Ops::get(row, u_piv[i]);
      if (c) ops.axpy(row, negate_coeff(ops, c), u_rows[i]);
    }
  }

  Row compute_residual(std::size_t mu, std::size_t c, FieldElement x) const {
    Row row = ops.zero();
    place(row, c, f.mul(mus[mu], x));
    residual(row);
    return row;
  }

  void add_residual(Row& acc, std::size_t mu, std::size_t c, FieldElement x) const {
    if (x.code == 0) return;
    if (tabulated) ops.add(acc, res_tab[(mu * k + c) * Q + x.code]);
    else ops.add(acc, compute_residual(mu, c, x));
  }

  void row_residuals(std::span<const FieldElement> h, std::vector<Row>& out) const {
    out.assign(D, ops.zero());
    for (std::size_t mu = 0; mu < D; ++mu)
      for (std::size_t c = 0; c < k; ++c) add_residual(out[mu], mu, c, h[c]);
  }

  std::size_t weight_fp(const MatrixQn& basis) const override {
    Echelon<Ops> ech(ops);
    std::vector<Row> rows;
    for (std::size_t r = 0; r < basis.rows(); ++r) {
      row_residuals(basis.row(r), rows);
      for (auto& row : rows) ech.insert(row);
    }
    return basis.rows() * D - ech.rank();
  }

  ScanResult scan_grassmannian(const Grassmannian& g, std::uint64_t begin, std::uint64_t end,
                               std::size_t threshold_fp) const override {
    ScanResult res;
    const std::size_t d = g.dim();
    auto cur = g.cursor(begin);
    MatrixQn prev;
    std::vector<std::vector<Row>> cached(d);
    std::vector<std::size_t> rank_at(d + 1, 0);
    Echelon<Ops> ech(ops);
    bool first = true;
    for (std::uint64_t idx = begin; idx < end && cur.valid(); ++idx, cur.advance()) {
      const MatrixQn& basis = cur.basis();
      std::size_t changed = 0;
      if (!first) {
        while (changed < d && std::equal(basis.row(changed).begin(), basis.row(changed).end(),
                                         prev.row(changed).begin()))
          ++changed;
      }
      for (std::size_t r = changed; r < d; ++r) {
        if (first || !std::equal(basis.row(r).begin(), basis.row(r).end(), prev.row(r).begin()))
          row_residuals(basis.row(r), cached[r]);
      }
      ech.truncate(rank_at[changed]);
      for (std::size_t r = changed; r < d; ++r) {
        for (const auto& row : cached[r]) ech.insert(row);
        rank_at[r + 1] = ech.rank();
      }
      const std::size_t w = d * D - ech.rank();
      ++res.checked;
      if (w > res.max_fp || res.checked == 1) {
        if (w > res.max_fp || res.checked == 1) res.argmax = idx;
        res.max_fp = std::max(res.max_fp, w);
      }
      if (w >= threshold_fp) {
        res.found = idx;
        return res;
      }
      prev = basis;
      first = false;
    }
    return res;
  }

  struct Walker {
    std::uint64_t index = 0;
    std::vector<std::uint32_t> digits;
    std::vector<Row> e, r;
  };

  void walker_set(Walker& w, std::uint64_t index) const {
    w.index = index;
    w.digits.assign(ts, 0);
    w.e.assign(D, ops.zero());
    w.r.assign(D, ops.zero());
    for (std::size_t l = 0; l < ts; ++l) {
      w.digits[l] = static_cast<std::uint32_t>(index % p);
      index /= p;
      if (!w.digits[l]) continue;
      for (std::size_t mu = 0; mu < D; ++mu) {
        ops.axpy(w.e[mu], w.digits[l], e_tab[l * D + mu]);
        ops.axpy(w.r[mu], w.digits[l], r_tab[l * D + mu]);
      }
    }
  }

  void walker_step(Walker& w) const {
    ++w.index;
    for (std::size_t l = 0; l < ts; ++l) {
      for (std::size_t mu = 0; mu < D; ++mu) {
        ops.add(w.e[mu], e_tab[l * D + mu]);
        ops.add(w.r[mu], r_tab[l * D + mu]);
      }
      w.digits[l] = (w.digits[l] + 1) % p;
      if (w.digits[l] != 0) return;
    }
  }

  void walker_goto(Walker& w, std::uint64_t index) const {
    if (index == w.index + 1 && !w.digits.empty()) walker_step(w);
    else if (index != w.index || w.digits.empty()) walker_set(w, index);
  }

  ScanResult scan_spans(std::size_t d, std::uint64_t begin, std::uint64_t end,
                        std::size_t threshold_fp) const override {
    ScanResult res;
    const std::uint64_t M = count - 1;
    std::vector<std::uint64_t> radix(d, M), stride(d, 1);
    radix[0] = first_count();
    for (std::size_t j = d - 1; j-- > 0;) stride[j] = stride[j + 1] * M;
    auto elem = [&](std::size_t j, std::uint64_t r) { return j == 0 ? first_element(r) : r + 1; };

    std::vector<std::uint64_t> digit(d);
    {
      std::uint64_t rem = begin;
      for (std::size_t j = 0; j < d; ++j) {
        digit[j] = rem / stride[j];
        rem %= stride[j];
      }
    }
    std::vector<Walker> walkers(d);
    for (std::size_t j = 0; j < d; ++j) walker_set(walkers[j], elem(j, digit[j]));
    Echelon<Ops> eE(ops), rE(ops);
    std::vector<std::size_t> e_at(d + 1, 0), r_at(d + 1, 0);
    std::size_t built = 0;

    // Moves digit j (and carries) one step forward; prefix depths >= the
    // lowest changed digit are invalidated.
    auto bump = [&](std::size_t j) {
      while (true) {
        if (++digit[j] < radix[j]) {
          walker_goto(walkers[j], elem(j, digit[j]));
          built = std::min(built, j);
          return;
        }
        digit[j] = 0;
        walker_set(walkers[j], elem(j, 0));
        built = std::min(built, j);
        if (j == 0) return;
        --j;
      }
    };

    std::uint64_t idx = begin;
    while (idx < end) {
      std::size_t dependent = d;
      for (; built + 1 < d; ++built) {
        const std::size_t j = built;
        eE.truncate(e_at[j]);
        rE.truncate(r_at[j]);
        if (j > 0) {
          Row v = walkers[j].e[0];
          if (!eE.reduce(v)) {
            dependent = j;
            break;
          }
        }
        for (const auto& row : walkers[j].e) eE.insert(row);
        for (const auto& row : walkers[j].r) rE.insert(row);
        e_at[j + 1] = eE.rank();
        r_at[j + 1] = rE.rank();
      }
      if (dependent < d) {
        std::uint64_t offset = 0;
        for (std::size_t i = dependent + 1; i < d; ++i) offset += digit[i] * stride[i];
        const std::uint64_t rem = stride[dependent] - offset;
        if (rem >= end - idx) {
          res.checked += end - idx;
          break;
        }
        idx += rem;
        res.checked += rem;
        for (std::size_t i = dependent + 1; i < d; ++i) {
          digit[i] = 0;
          walker_set(walkers[i], elem(i, 0));
        }
        bump(dependent);
        continue;
      }
      const std::size_t j = d - 1;
      eE.truncate(e_at[j]);
      rE.truncate(r_at[j]);
      bool independent = true;
      if (j > 0) {
        Row v = walkers[j].e[0];
        independent = eE.reduce(v);
      }
      ++res.checked;
      if (independent) {
        for (const auto& row : walkers[j].r) rE.insert(row);
        const std::size_t w = d * D - rE.rank();
        if (w > res.max_fp) {
          res.max_fp = w;
          res.argmax = idx;
        }
        if (w >= threshold_fp) {
          res.found = idx;
          return res;
        }
      }
      ++idx;
      if (idx < end) bump(j);
    }
    return res;
  }

  std::size_t span_weight_fp(std::span<const std::uint64_t> elements) const override {
    Echelon<Ops> eE(ops), rE(ops);
    Walker w;
    for (auto e : elements) {
      walker_set(w, e);
      for (const auto& row : w.e) eE.insert(row);
      for (const auto& row : w.r) rE.insert(row);
    }
    return eE.rank() - rE.rank();
  }
};

template <std::size_t W>
std::unique_ptr<WeightKernel::Impl> make_bits(const FqSubspace& u, std::size_t cols) {
  BitRows<W> ops;
  ops.cols = cols;
  return std::make_unique<KernelT<BitRows<W>>>(u, ops);
}

std::unique_ptr<WeightKernel::Impl> make_kernel(const FqSubspace& u) {
  const std::size_t cols = u.ambient() * u.tower().degree();
  if (u.tower().p() != 2) {
    ModRows ops;
    ops.cols = cols;
    ops.p = u.tower().p();
    return std::make_unique<KernelT<ModRows>>(u, ops);
  }
  const std::size_t words = (cols + 63) / 64;
  if (words <= 1) return make_bits<1>(u, cols);
  if (words <= 2) return make_bits<2>(u, cols);
  if (words <= 4) return make_bits<4>(u, cols);
  if (words <= 8) return make_bits<8>(u, cols);
  if (words <= 16) return make_bits<16>(u, cols);
  if (words <= 32) return make_bits<32>(u, cols);
  if (words <= 64) return make_bits<64>(u, cols);
  throw FieldError("expanded rows wider than 4096 bits are not supported");
}

}  // namespace

class SweepAccess {
 public:
  static const WeightKernel::Impl& impl(const WeightKernel& k) { return *k.impl_; }
};

WeightKernel::WeightKernel(const FqSubspace& u) : impl_(make_kernel(u)) {}
WeightKernel::~WeightKernel() = default;
WeightKernel::WeightKernel(WeightKernel&&) noexcept = default;
WeightKernel& WeightKernel::operator=(WeightKernel&&) noexcept = default;

const FqSubspace& WeightKernel::space() const { return impl_->u; }

std::size_t WeightKernel::weight(const MatrixQn& basis) const {
  if (basis.cols() != impl_->k) throw FieldError("ambient dimension mismatch");
  return impl_->weight_fp(basis) / impl_->s;
}

std::uint64_t WeightKernel::element_count() const {
  if (!impl_->count_fits) throw FieldError("subspace too large to index its elements");
  return impl_->count;
}

VectorQn WeightKernel::element(std::uint64_t index) const { return impl_->element(index); }

std::size_t WeightKernel::max_weight(std::size_t d, std::uint64_t begin, std::uint64_t end) const {
  Grassmannian g(impl_->f, impl_->k, d);
  return impl_->scan_grassmannian(g, begin, end, std::numeric_limits<std::size_t>::max()).max_fp / impl_->s;
}

// ---------------------------------------------------------------------------
// Range orchestration

namespace {

struct Unit {
  std::size_t level = 0;
  std::uint64_t begin = 0, end = 0;
};

struct UnitOutcome {
  bool done = false;
  ScanResult scan;
};

constexpr std::uint64_t kGrassmannianRange = std::uint64_t{1} << 14;
constexpr std::uint64_t kSpanRange = std::uint64_t{1} << 20;
constexpr std::uint64_t kSampleRange = std::uint64_t{1} << 12;
constexpr const char* kCheckpointHeader = "# rankscatter-checkpoint/1";

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

// Evaluates units on a worker pool. Units are claimed in order; a unit that
// lies after one already holding a witness is never started. Completed units
// are appended to the checkpoint (single writer under a mutex).
std::vector<UnitOutcome> run_units(const std::vector<Unit>& units,
                                   const std::function<ScanResult(std::size_t)>& eval, unsigned workers,
                                   const std::string& checkpoint, const std::string& fingerprint,
                                   std::uint64_t stop_after, bool& interrupted) {
  std::vector<UnitOutcome> out(units.size());
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  if (!checkpoint.empty() && std::filesystem::exists(checkpoint)) {
    std::ifstream in(checkpoint);
    std::string line;
    if (!std::getline(in, line) || line != std::string(kCheckpointHeader) + " " + fingerprint)
      throw FieldError("checkpoint does not belong to this job: " + checkpoint);
    std::size_t cursor = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      Unit u;
      std::string checked, found;
      if (!(ls >> u.level >> u.begin >> u.end >> checked >> found)) continue;  // torn trailing line
      // locate the unit; ranges are usually appended in order
      std::size_t i = cursor < units.size() && units[cursor].level == u.level && units[cursor].begin == u.begin
                          ? cursor
                          : units.size();
      if (i == units.size())
        for (std::size_t j = 0; j < units.size(); ++j)
          if (units[j].level == u.level && units[j].begin == u.begin) {
            i = j;
            break;
          }
      if (i == units.size() || units[i].end != u.end) throw FieldError("checkpoint range does not match job");
      out[i].done = true;
      out[i].scan.checked = std::stoull(checked);
      if (found != "-") {
        out[i].scan.found = std::stoull(found);
        best = std::min(best.load(), i);
      }
      cursor = i + 1;
    }
  }
  std::ofstream ckpt;
  if (!checkpoint.empty()) {
    const bool fresh = !std::filesystem::exists(checkpoint);
    ckpt.open(checkpoint, std::ios::app);
    if (!ckpt) throw FieldError("cannot open checkpoint: " + checkpoint);
    if (fresh) ckpt << kCheckpointHeader << ' ' << fingerprint << '\n' << std::flush;
  }
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> started{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  auto worker = [&] {
    try {
      while (!stop) {
        const std::size_t i = next.fetch_add(1);
        if (i >= units.size()) return;
        if (out[i].done || i > best.load()) continue;
        if (stop_after && started.fetch_add(1) >= stop_after) {
          stop = true;
          return;
        }
        ScanResult r = eval(i);
        std::lock_guard lock(mu);
        out[i].scan = r;
        out[i].done = true;
        if (r.found) {
          std::size_t b = best.load();
          while (i < b && !best.compare_exchange_weak(b, i)) {}
        }
        if (ckpt.is_open()) {
          ckpt << units[i].level << ' ' << units[i].begin << ' ' << units[i].end << ' ' << r.checked << ' '
               << (r.found ? std::to_string(*r.found) : std::string("-")) << '\n'
               << std::flush;
        }
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
      stop = true;
    }
  };
  const unsigned n = std::max(1U, workers);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  interrupted = false;
  const std::size_t limit = std::min(best.load(), units.size());
  for (std::size_t i = 0; i < limit; ++i)
    if (!out[i].done) interrupted = true;
  if (best.load() < units.size() && !out[best.load()].done) interrupted = true;
  return out;
}

std::uint64_t pow_checked(std::uint64_t base, std::size_t e) {
  unsigned __int128 v = 1;
  for (std::size_t i = 0; i < e; ++i) {
    v *= base;
    if (v > (static_cast<unsigned __int128>(1) << 63)) throw FieldError("tuple space too large to index; use a sampled mode");
  }
  return static_cast<std::uint64_t>(v);
}

// Appends [0, total) split into ranges of `step`, capped by the remaining budget.
bool append_units(std::vector<Unit>& units, std::size_t level, std::uint64_t total, std::uint64_t step,
                  std::uint64_t& budget_left, bool limited) {
  for (std::uint64_t b = 0; b < total; b += step) {
    const std::uint64_t natural = std::min(total, b + step);
    std::uint64_t e = natural;
    if (limited) {
      if (budget_left == 0) return true;
      e = std::min(e, b + budget_left);
      budget_left -= e - b;
    }
    units.push_back({level, b, e});
    if (e < natural) return true;
  }
  return false;
}

SubspaceQn extend_to_dim(const FieldTower& f, const SubspaceQn& h, std::size_t target) {
  if (h.dim() >= target) return h;
  MatrixQn gens = h.basis();
  std::vector<bool> pivot(h.ambient(), false);
  for (auto c : h.pivots()) pivot[c] = true;
  for (std::size_t c = 0; c < h.ambient() && gens.rows() < target; ++c) {
    if (pivot[c]) continue;
    VectorQn e(h.ambient());
    e[c] = f.one();
    gens.append_row(e);
  }
  return SubspaceQn::span(f, h.ambient(), gens);
}

std::string job_fingerprint(const FqSubspace& u, Mode mode, std::size_t hdim, std::size_t bound,
                            std::uint64_t seed, std::uint64_t budget) {
  std::ostringstream os;
  const auto& f = u.tower();
  os << to_string(mode) << '|' << hdim << '|' << bound << '|' << seed << '|' << budget << '|' << f.p() << ','
     << f.s() << ',' << f.n() << '|';
  for (auto c : f.modulus()) os << c << ',';
  os << '|';
  const auto& ex = u.expansion();
  for (std::size_t r = 0; r < ex.rows(); ++r) {
    for (auto v : ex.row(r)) os << v;
    os << ';';
  }
  return hex64(fnv1a(os.str()));
}

// Replays sample `index` of a sampled range.
template <class Fn>
void replay_samples(std::uint64_t seed, std::uint64_t unit_begin, std::uint64_t index, Fn&& draw) {
  auto rng = make_rng(seed, unit_begin / kSampleRange);
  for (std::uint64_t i = unit_begin; i <= index; ++i) draw(rng, i == index);
}

std::vector<std::uint64_t> draw_tuple(std::mt19937_64& rng, std::uint64_t count, std::size_t d) {
  std::vector<std::uint64_t> t(d);
  for (auto& e : t) e = 1 + uniform_below(rng, count - 1);
  return t;
}

}  // namespace

Verdict verify_evasive(const FqSubspace& u, std::size_t hdim, std::size_t r, const SweepOptions& opts) {
  const std::size_t k = u.ambient();
  if (hdim >= k) throw FieldError("hdim must be smaller than the ambient dimension");
  if (r < hdim) throw FieldError("r >= hdim required");
  if (!is_proof_mode(opts.mode) && opts.budget == 0) throw FieldError("sampled modes need a positive budget");
  Verdict v;
  v.mode = opts.mode;
  v.hdim = hdim;
  v.bound = r;
  v.seed = opts.seed;
  if (r >= u.dim()) {
    v.status = Status::holds;
    return v;
  }
  const auto& f = u.tower();
  WeightKernel kernel(u);
  const auto& impl = SweepAccess::impl(kernel);
  const std::size_t threshold_fp = f.s() * (r + 1);
  const std::size_t D = f.degree();

  std::vector<Unit> units;
  bool truncated = false;
  std::uint64_t budget_left = opts.budget;
  const bool limited = opts.budget > 0;
  std::optional<Grassmannian> grass;
  switch (opts.mode) {
    case Mode::exhaustive:
      grass.emplace(f, k, hdim);
      truncated = append_units(units, hdim, grass->size(), kGrassmannianRange, budget_left, limited);
      break;
    case Mode::witness_span: {
      const std::uint64_t count = kernel.element_count();
      for (std::size_t d = 1; d <= hdim && !truncated; ++d) {
        // a d-tuple spans F_q-dimension d*n, so weights above the bound need d*n > r
        const std::uint64_t total = impl.first_count() * pow_checked(count - 1, d - 1);
        if (d * D < threshold_fp) {
          truncated = append_units(units, d, 0, kSpanRange, budget_left, limited);
          continue;
        }
        truncated = append_units(units, d, total, kSpanRange, budget_left, limited);
      }
      break;
    }
    case Mode::sampled:
    case Mode::sampled_span:
      if (opts.mode == Mode::sampled_span) kernel.element_count();
      append_units(units, hdim, opts.budget, kSampleRange, budget_left, false);
      break;
  }

  auto eval = [&](std::size_t i) -> ScanResult {
    const Unit& unit = units[i];
    switch (opts.mode) {
      case Mode::exhaustive: return impl.scan_grassmannian(*grass, unit.begin, unit.end, threshold_fp);
      case Mode::witness_span: return impl.scan_spans(unit.level, unit.begin, unit.end, threshold_fp);
      case Mode::sampled:
      case Mode::sampled_span: {
        ScanResult res;
        auto rng = make_rng(opts.seed, unit.begin / kSampleRange);
        for (std::uint64_t idx = unit.begin; idx < unit.end; ++idx) {
          std::size_t w = 0;
          if (opts.mode == Mode::sampled) {
            w = impl.weight_fp(sample_subspace(k, hdim, f, rng).basis());
          } else {
            const auto t = draw_tuple(rng, impl.count, hdim);
            w = impl.span_weight_fp(t);
          }
          ++res.checked;
          res.max_fp = std::max(res.max_fp, w);
          if (w >= threshold_fp) {
            res.found = idx;
            return res;
          }
        }
        return res;
      }
    }
    return {};
  };

  bool interrupted = false;
  const auto fingerprint = job_fingerprint(u, opts.mode, hdim, r, opts.seed, opts.budget);
  const auto outcomes =
      run_units(units, eval, opts.workers, opts.checkpoint, fingerprint, opts.stop_after_ranges, interrupted);

  std::optional<std::size_t> found_unit;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!outcomes[i].done) break;
    v.checked += outcomes[i].scan.checked;
    if (outcomes[i].scan.found) {
      found_unit = i;
      break;
    }
  }
  if (interrupted) {
    v.status = Status::interrupted;
    return v;
  }
  if (!found_unit) {
    v.status = (is_proof_mode(opts.mode) && !truncated) ? Status::holds : Status::inconclusive;
    return v;
  }

  const Unit& unit = units[*found_unit];
  const std::uint64_t idx = *outcomes[*found_unit].scan.found;
  Witness w;
  SubspaceQn h;
  switch (opts.mode) {
    case Mode::exhaustive:
      h = grass->at(idx);
      w.tuple_index = {idx};
      break;
    case Mode::witness_span: {
      const std::size_t d = unit.level;
      const std::uint64_t M = kernel.element_count() - 1;
      std::uint64_t stride = pow_checked(M, d - 1), rem = idx;
      MatrixQn gens(0, k);
      for (std::size_t j = 0; j < d; ++j) {
        const std::uint64_t digit = rem / stride;
        rem %= stride;
        const std::uint64_t e = j == 0 ? impl.first_element(digit) : digit + 1;
        w.tuple_index.push_back(e);
        gens.append_row(kernel.element(e));
        if (j + 1 < d) stride /= M;
      }
      h = SubspaceQn::span(f, k, gens);
      break;
    }
    case Mode::sampled:
    case Mode::sampled_span: {
      replay_samples(opts.seed, unit.begin, idx, [&](std::mt19937_64& rng, bool last) {
        if (opts.mode == Mode::sampled) {
          auto s = sample_subspace(k, hdim, f, rng);
          if (last) h = std::move(s);
        } else {
          auto t = draw_tuple(rng, impl.count, hdim);
          if (last) {
            MatrixQn gens(0, k);
            for (auto e : t) gens.append_row(kernel.element(e));
            h = SubspaceQn::span(f, k, gens);
            w.tuple_index = t;
          }
        }
      });
      if (opts.mode == Mode::sampled) w.tuple_index = {idx};
      break;
    }
  }
  w.subspace = extend_to_dim(f, h, hdim);
  w.weight = subspace_weight(u, w.subspace);
  if (w.weight <= r) throw std::logic_error("sweep kernel and reference weight disagree");
  w.intersection_basis = intersection_basis(u, w.subspace);
  v.witness = std::move(w);
  v.status = Status::violated;
  return v;
}

Verdict verify_h_scattered(const FqSubspace& u, std::size_t h, const SweepOptions& opts) {
  if (!u.spans_ambient()) throw FieldError("U does not span the ambient space");
  return verify_evasive(u, h, h, opts);
}

MaxWeightResult sweep_max_weight(const WeightKernel& kernel, std::size_t d, Mode mode, std::uint64_t budget,
                                 std::uint64_t seed, unsigned workers) {
  const auto& impl = SweepAccess::impl(kernel);
  const auto& f = impl.f;
  const std::size_t k = impl.k;
  MaxWeightResult out;
  if (d == 0) {
    out.checked = 1;
    out.argmax = SubspaceQn::span(f, k, MatrixQn(0, k));
    return out;
  }
  std::vector<Unit> units;
  std::uint64_t budget_left = budget;
  std::optional<Grassmannian> grass;
  if (mode == Mode::exhaustive) {
    grass.emplace(f, k, d);
    out.complete = !append_units(units, d, grass->size(), kGrassmannianRange, budget_left, budget > 0);
  } else if (mode == Mode::sampled || mode == Mode::sampled_span) {
    if (budget == 0) throw FieldError("sampled modes need a positive budget");
    if (mode == Mode::sampled_span) kernel.element_count();
    append_units(units, d, budget, kSampleRange, budget_left, false);
    out.complete = false;
  } else {
    throw FieldError("generalized weights support exhaustive, sampled and sampled_span modes");
  }
  auto eval = [&](std::size_t i) -> ScanResult {
    const Unit& unit = units[i];
    if (mode == Mode::exhaustive)
      return impl.scan_grassmannian(*grass, unit.begin, unit.end, std::numeric_limits<std::size_t>::max());
    ScanResult res;
    auto rng = make_rng(seed, unit.begin / kSampleRange);
    for (std::uint64_t idx = unit.begin; idx < unit.end; ++idx) {
      std::size_t w = 0;
      if (mode == Mode::sampled) {
        w = impl.weight_fp(sample_subspace(k, d, f, rng).basis());
      } else {
        w = impl.span_weight_fp(draw_tuple(rng, impl.count, d));
      }
      if (w > res.max_fp || res.checked == 0) {
        res.argmax = idx;
        res.max_fp = std::max(res.max_fp, w);
      }
      ++res.checked;
    }
    return res;
  };
  bool interrupted = false;
  const auto outcomes = run_units(units, eval, workers, "", "", 0, interrupted);
  std::optional<std::pair<std::size_t, std::uint64_t>> best;  // (max_fp, index)
  std::size_t best_unit = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    out.checked += outcomes[i].scan.checked;
    if (!best || outcomes[i].scan.max_fp > best->first) {
      best = {outcomes[i].scan.max_fp, outcomes[i].scan.argmax};
      best_unit = i;
    }
  }
  if (best) {
    out.max_weight = best->first / impl.s;
    if (mode == Mode::exhaustive) {
      out.argmax = grass->at(best->second);
    } else {
      replay_samples(seed, units[best_unit].begin, best->second, [&](std::mt19937_64& rng, bool last) {
        if (mode == Mode::sampled) {
          auto s = sample_subspace(k, d, f, rng);
          if (last) out.argmax = std::move(s);
        } else {
          auto t = draw_tuple(rng, impl.count, d);
          if (last) {
            MatrixQn gens(0, k);
            for (auto e : t) gens.append_row(impl.element(e));
            out.argmax = extend_to_dim(f, SubspaceQn::span(f, k, gens), d);
          }
        }
      });
    }
  }
  return out;
}

}  // namespace rankscatter
