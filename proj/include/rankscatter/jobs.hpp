#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankscatter/rank_codes.hpp"

namespace rankscatter {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "rankscatter-report/1";

enum ExitCode : int {
  kExitHolds = 0,
  kExitViolated = 1,
  kExitInconclusive = 2,
  kExitUsage = 3,
  kExitVacuous = 4,
  kExitInterrupted = 5,
  kExitMismatch = 6,
};

/// Which q-system a job runs on.
struct SystemSpec {
  SystemKind kind = SystemKind::family;
  FieldTower tower = FieldTower::create(2, 1, 4);
  std::size_t m = 3;
  std::size_t h = 1;
  std::vector<FieldElement> alphas;  ///< family only

  ConstructionParams params() const { return {tower, m, h, alphas}; }
  /// family: V_{A,h}; pseudoregulus: h-th pseudoregulus; direct_sum: m
  /// copies of it; line_control: the planted line in F_{q^n}^2.
  QSystemDesc build() const;
};

struct JobConfig {
  std::string command;
  SystemSpec system;
  Mode mode = Mode::witness_span;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string checkpoint;
  std::uint64_t stop_after = 0;  ///< ranges; simulates an interrupted run
  bool force = false;

  std::optional<std::size_t> hdim;  ///< verify-*: defaults to h
  std::optional<std::size_t> r;     ///< verify-evasive: defaults to hdim
  std::vector<std::size_t> rhos;    ///< weights: empty means all
  bool dual = false;                ///< weights: profile the dual code too
  std::optional<DistanceMode> distance;
  std::vector<std::size_t> s_list;  ///< compare
  bool with_b = false;              ///< search: also count B-members
};

struct JobResult {
  int exit_code = kExitHolds;
  Json report;
  std::vector<std::string> warnings;
};

/// Runs one subcommand. FieldError from bad parameters propagates.
JobResult run_job(const JobConfig& cfg);

/// Re-verifies a report from its own contents: rebuilds the system and
/// checks it against the stored basis, re-derives every witness, and unless
/// witnesses_only reruns the recorded job and compares report bodies.
JobResult recheck_report(const Json& report, bool witnesses_only = false, unsigned workers = 1);

/// The report with the timing block removed, serialised; equal bodies mean
/// equal results.
std::string report_body(const Json& report);
Json load_report(const std::string& path);
void write_report(const std::string& path, const Json& report);
/// Profile table: code,rho,value,provenance,subspaces_checked.
std::string profile_csv(const Json& report);

/// "p,s,n" or "p,s,n,c0:c1:...:c_sn".
FieldTower parse_field_spec(const std::string& spec);
/// Comma-separated elements: decimal codes, "g" or "g^e" for powers of the
/// class of z, or coefficient lists "c0:c1:...".
std::vector<FieldElement> parse_elements(const FieldTower& f, const std::string& spec);

Json field_to_json(const FieldTower& f);
FieldTower field_from_json(const Json& j);
Json element_to_json(const FieldTower& f, FieldElement x);
FieldElement element_from_json(const FieldTower& f, const Json& j);
Json vectors_to_json(const FieldTower& f, const std::vector<VectorQn>& rows);
std::vector<VectorQn> vectors_from_json(const FieldTower& f, const Json& j);
Json witness_to_json(const FieldTower& f, const Witness& w, Mode mode, std::size_t bound);
Witness witness_from_json(const FieldTower& f, const Json& j, std::size_t k);
Json profile_to_json(const FieldTower& f, const WeightProfile& p);

}  // namespace rankscatter
