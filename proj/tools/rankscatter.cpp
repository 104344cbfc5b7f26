// rankscatter: construct, verify and profile h-scattered systems and their codes.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rankscatter/jobs.hpp"

using namespace rankscatter;

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("RANKSCATTER_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoul(tok));
  return out;
}

struct Options {
  std::string field = "2,1,4";
  std::string params_file;
  std::string system = "family";
  std::size_t m = 3;
  std::size_t h = 1;
  std::string alphas;
  std::string mode = "witness_span";
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  unsigned workers = default_workers();
  std::string checkpoint;
  std::string out;
  std::string csv;
  bool force = false;
  std::uint64_t stop_after = 0;
  std::size_t hdim = 0;
  std::size_t r = 0;
  std::string rhos;
  bool dual = false;
  std::string distance;
  std::string s_list;
  bool with_b = false;
  bool witnesses_only = false;
  std::string report;
};

JobConfig to_config(const std::string& command, const Options& o, const CLI::App& sub) {
  JobConfig c;
  c.command = command;
  if (!o.params_file.empty()) {
    // a previous report or a bare params object
    const Json j = load_report(o.params_file);
    const Json& p = j.contains("params") ? j["params"] : j;
    c.system.tower = field_from_json(p.at("field"));
    c.system.kind = system_kind_from_string(p.value("kind", "family"));
    c.system.m = p.at("m").get<std::size_t>();
    c.system.h = p.at("h").get<std::size_t>();
    if (p.contains("alphas"))
      for (const auto& a : p["alphas"]) c.system.alphas.push_back(element_from_json(c.system.tower, a));
  } else {
    c.system.tower = parse_field_spec(o.field);
    c.system.kind = system_kind_from_string(o.system);
    c.system.m = o.m;
    c.system.h = o.h;
    if (c.system.kind == SystemKind::family && command != "search") {
      if (o.alphas.empty()) throw FieldError("--alphas is required for the family system");
      c.system.alphas = parse_elements(c.system.tower, o.alphas);
    }
  }
  c.mode = mode_from_string(o.mode);
  c.budget = o.budget;
  c.seed = o.seed;
  c.workers = o.workers;
  c.checkpoint = o.checkpoint;
  c.stop_after = o.stop_after;
  c.force = o.force;
  auto given = [&](const char* name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (given("--hdim")) c.hdim = o.hdim;
  if (given("--r")) c.r = o.r;
  c.rhos = parse_sizes(o.rhos);
  c.dual = o.dual;
  if (!o.distance.empty()) c.distance = distance_mode_from_string(o.distance);
  c.s_list = parse_sizes(o.s_list);
  c.with_b = o.with_b;
  return c;
}

void summarize(const JobResult& res) {
  const Json& r = res.report;
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (r.contains("verdict")) {
    const Json& v = r["verdict"];
    std::cout << v["status"].get<std::string>() << " (" << v["mode"].get<std::string>() << ", checked "
              << v["checked"] << ")";
    if (v.contains("witness")) std::cout << " witness weight " << v["witness"]["weight"];
    std::cout << '\n';
  }
  if (r.contains("census")) std::cout << "census: " << r["census"].dump() << '\n';
  if (r.contains("construct")) std::cout << "system: " << r["construct"].dump() << '\n';
  for (const char* key : {"profile", "dual_profile"}) {
    if (!r.contains(key)) continue;
    std::cout << key << ":";
    for (const auto& e : r[key]["entries"]) {
      const auto prov = e["provenance"].get<std::string>();
      std::cout << " d" << e["rho"] << (prov == "exact" ? "=" : prov == "upper_bound" ? "<=" : ">=") << e["value"];
    }
    std::cout << '\n';
  }
  if (r.contains("wei_duality")) std::cout << "wei duality: " << r["wei_duality"] << '\n';
  if (r.contains("distance")) std::cout << "distance: " << r["distance"]["value"] << '\n';
  if (r.contains("comparison"))
    for (const auto& c : r["comparison"])
      std::cout << "d" << c["rho"] << " >= " << c["family_lower"] << " vs direct sum " << c["baseline"] << " ("
                << c["baseline_provenance"].get<std::string>() << ")" << (c["exceeds"].get<bool>() ? " exceeds" : "")
                << '\n';
  if (r.contains("checks"))
    for (const auto& c : r["checks"])
      std::cout << c["check"].get<std::string>() << ": " << (c["pass"].get<bool>() ? "ok" : "MISMATCH") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rankscatter: h-scattered subspaces and rank-metric codes"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help");  // -h would clash with --h
  Options o;

  auto add_system = [&](CLI::App* sub) {
    sub->add_option("--field", o.field, "p,s,n[,c0:c1:...:c_sn]");
    sub->add_option("--params", o.params_file, "params JSON (or a report carrying one)");
    sub->add_option("--system", o.system, "family|pseudoregulus|direct-sum|line-control");
    sub->add_option("--m", o.m, "blocks (family, direct-sum)");
    sub->add_option("--h", o.h, "scattering parameter");
    sub->add_option("--alphas", o.alphas, "alpha_1..alpha_m: codes, g^e, or c0:c1:...");
    sub->add_option("--out", o.out, "report path");
    sub->add_flag("--force", o.force, "run even when the admissible set is empty");
  };
  auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "exhaustive|witness_span|sampled|sampled_span");
    sub->add_option("--budget", o.budget, "items to check (required for sampled modes)");
    sub->add_option("--seed", o.seed);
    sub->add_option("--workers", o.workers)->envname("RANKSCATTER_WORKERS");
  };

  auto* construct = app.add_subcommand("construct", "build a system and report dimensions and membership");
  add_system(construct);

  auto* scattered = app.add_subcommand("verify-scattered", "check h-scatteredness");
  auto* evasive = app.add_subcommand("verify-evasive", "check (hdim, r)-evasiveness");
  for (auto* sub : {scattered, evasive}) {
    add_system(sub);
    add_sweep(sub);
    sub->add_option("--hdim", o.hdim, "dimension of the test subspaces (default h)");
    sub->add_option("--checkpoint", o.checkpoint, "append-only checkpoint; resumes when present");
    sub->add_option("--stop-after", o.stop_after, "stop after this many ranges");
  }
  evasive->add_option("--r", o.r, "weight bound (default hdim)");

  auto* weights = app.add_subcommand("weights", "generalized rank weights of the associated code");
  add_system(weights);
  add_sweep(weights);
  weights->add_option("--rho", o.rhos, "comma-separated indices (default all)");
  weights->add_flag("--dual", o.dual, "also profile the dual code and check Wei duality");
  weights->add_option("--distance", o.distance, "minimum distance mode: projective|exhaustive|sampled");
  weights->add_option("--csv", o.csv, "write the profile table here");

  auto* compare = app.add_subcommand("compare", "family weight bounds against the direct-sum baseline");
  add_system(compare);
  compare->add_option("--s", o.s_list, "comma-separated s for the s(h+1) bounds (needs B)");

  auto* search = app.add_subcommand("search", "count alpha tuples in the admissible sets");
  add_system(search);
  search->add_option("--budget", o.budget, "scan at most this many tuples");
  search->add_flag("--with-b", o.with_b, "also count members of B");

  auto* recheck = app.add_subcommand("recheck", "re-verify a report");
  recheck->add_option("report", o.report, "report file")->required();
  recheck->add_flag("--witness-only", o.witnesses_only, "skip rerunning the job");
  recheck->add_option("--workers", o.workers)->envname("RANKSCATTER_WORKERS");
  recheck->add_option("--out", o.out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    JobResult res;
    CLI::App* sub = app.get_subcommands().front();
    if (sub == recheck) {
      res = recheck_report(load_report(o.report), o.witnesses_only, o.workers);
    } else {
      res = run_job(to_config(sub->get_name(), o, *sub));
      if (!o.csv.empty()) {
        std::ofstream csv(o.csv);
        if (!csv) throw FieldError("cannot write " + o.csv);
        csv << profile_csv(res.report);
      }
    }
    if (!o.out.empty())
      write_report(o.out, res.report);
    else if (sub != recheck)
      std::cout << res.report.dump(2) << '\n';
    summarize(res);
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
