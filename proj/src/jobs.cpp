#include "rankscatter/jobs.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace rankscatter {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw FieldError("not a number: '" + s + "'");
  }
  if (used != s.size() || s.empty() || s[0] == '-') throw FieldError("not a number: '" + s + "'");
  return v;
}

int exit_for(Status s) {
  switch (s) {
    case Status::holds: return kExitHolds;
    case Status::violated: return kExitViolated;
    case Status::inconclusive: return kExitInconclusive;
    case Status::interrupted: return kExitInterrupted;
  }
  return kExitUsage;
}

Json subspace_to_json(const FieldTower& f, const SubspaceQn& h) { return vectors_to_json(f, h.basis().to_rows()); }

SubspaceQn subspace_from_json(const FieldTower& f, const Json& j, std::size_t k) {
  const auto rows = vectors_from_json(f, j);
  for (const auto& r : rows)
    if (r.size() != k) throw FieldError("subspace row has the wrong length");
  auto s = SubspaceQn::span(f, k, MatrixQn::from_rows(rows, k));
  if (s.dim() != rows.size()) throw FieldError("subspace rows are dependent");
  return s;
}

Json params_to_json(const SystemSpec& s) {
  Json j;
  j["field"] = field_to_json(s.tower);
  j["kind"] = to_string(s.kind);
  j["m"] = s.m;
  j["h"] = s.h;
  if (s.kind == SystemKind::family) {
    j["alphas"] = Json::array();
    for (auto a : s.alphas) j["alphas"].push_back(element_to_json(s.tower, a));
  }
  return j;
}

SystemSpec params_from_json(const Json& j) {
  SystemSpec s;
  s.tower = field_from_json(j.at("field"));
  s.kind = system_kind_from_string(j.at("kind").get<std::string>());
  s.m = j.at("m").get<std::size_t>();
  s.h = j.at("h").get<std::size_t>();
  if (j.contains("alphas"))
    for (const auto& a : j.at("alphas")) s.alphas.push_back(element_from_json(s.tower, a));
  return s;
}

Json config_to_json(const JobConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  if (c.hdim) j["hdim"] = *c.hdim;
  if (c.r) j["r"] = *c.r;
  if (!c.rhos.empty()) j["rhos"] = c.rhos;
  if (c.dual) j["dual"] = true;
  if (c.distance) j["distance"] = to_string(*c.distance);
  if (!c.s_list.empty()) j["s_list"] = c.s_list;
  if (c.with_b) j["with_b"] = true;
  if (c.force) j["force"] = true;
  return j;
}

JobConfig config_from_report(const Json& rep) {
  JobConfig c;
  c.command = rep.at("command").get<std::string>();
  c.system = params_from_json(rep.at("params"));
  const Json& j = rep.at("config");
  c.mode = mode_from_string(j.at("mode").get<std::string>());
  c.budget = j.at("budget").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("hdim")) c.hdim = j["hdim"].get<std::size_t>();
  if (j.contains("r")) c.r = j["r"].get<std::size_t>();
  if (j.contains("rhos")) c.rhos = j["rhos"].get<std::vector<std::size_t>>();
  c.dual = j.value("dual", false);
  if (j.contains("distance")) c.distance = distance_mode_from_string(j["distance"].get<std::string>());
  if (j.contains("s_list")) c.s_list = j["s_list"].get<std::vector<std::size_t>>();
  c.with_b = j.value("with_b", false);
  c.force = j.value("force", false);
  return c;
}

Json system_to_json(const QSystemDesc& u) {
  Json j;
  j["kind"] = to_string(u.kind);
  j["k"] = u.k();
  j["t"] = u.t();
  j["basis"] = vectors_to_json(u.space.tower(), u.space.basis());
  return j;
}

Json verdict_to_json(const FieldTower& f, const Verdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  j["mode"] = to_string(v.mode);
  j["hdim"] = v.hdim;
  j["bound"] = v.bound;
  j["checked"] = v.checked;
  if (v.witness) j["witness"] = witness_to_json(f, *v.witness, v.mode, v.bound);
  return j;
}

Json code_profile(const FieldTower& f, const WeightProfile& p) {
  Json j;
  j["k"] = p.k;
  j["t"] = p.t;
  j["complete"] = p.complete();
  j["entries"] = profile_to_json(f, p);
  return j;
}

bool needs_family(const JobConfig& c) {
  return c.system.kind == SystemKind::family || c.command == "search" || c.command == "compare";
}

void run_construct(const JobConfig& cfg, const QSystemDesc& u, JobResult& res) {
  Json j;
  const auto& f = cfg.system.tower;
  j["k"] = u.k();
  j["t"] = u.t();
  j["spans_ambient"] = u.space.spans_ambient();
  const std::size_t h = cfg.system.kind == SystemKind::line_control ? 1 : cfg.system.h;
  j["max_dim_bound"] = max_dim_bound(u.k(), f.n(), h);
  j["meets_bound"] = u.t() == max_dim_bound(u.k(), f.n(), h);
  if (cfg.system.kind == SystemKind::family) {
    const auto p = cfg.system.params();
    j["K_A"] = element_to_json(f, k_invariant(p));
    j["in_A"] = is_in_A(p);
    j["in_B"] = is_in_B(p);
    j["nonvacuous"] = is_nonvacuous(f, p.m);
  }
  res.report["construct"] = j;
  res.exit_code = kExitHolds;
}

void run_verify(const JobConfig& cfg, const QSystemDesc& u, JobResult& res) {
  const std::size_t hdim = cfg.hdim.value_or(cfg.system.kind == SystemKind::line_control ? 1 : cfg.system.h);
  SweepOptions o;
  o.mode = cfg.mode;
  o.budget = cfg.budget;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  o.checkpoint = cfg.checkpoint;
  o.stop_after_ranges = cfg.stop_after;
  Verdict v;
  if (cfg.command == "verify-scattered") {
    if (cfg.r) throw FieldError("--r only applies to verify-evasive");
    v = verify_h_scattered(u.space, hdim, o);
  } else {
    v = verify_evasive(u.space, hdim, cfg.r.value_or(hdim), o);
  }
  res.report["verdict"] = verdict_to_json(u.space.tower(), v);
  res.exit_code = exit_for(v.status);
  if (v.status == Status::violated && cfg.system.kind == SystemKind::family && cfg.command == "verify-scattered") {
    const auto p = cfg.system.params();
    if (is_in_A(p) && p.h >= 2 && hdim == p.h)
      res.warnings.push_back("witness found for a family instance with A in the admissible set");
  }
}

void run_weights(const JobConfig& cfg, const QSystemDesc& u, JobResult& res) {
  const auto& f = cfg.system.tower;
  const auto prof = generalized_weights(u, cfg.rhos, cfg.mode, cfg.budget, cfg.seed, cfg.workers);
  res.report["profile"] = code_profile(f, prof);
  auto all_exact = [](const WeightProfile& p) {
    return std::all_of(p.entries.begin(), p.entries.end(),
                       [](const WeightEntry& e) { return e.provenance == Provenance::exact; });
  };
  bool complete = all_exact(prof);
  bool contradiction = false;

  const RankCode code = code_from_system(u);
  if (cfg.dual) {
    const auto dual = dual_code(code);
    const auto dprof = generalized_weights(dual, cfg.rhos, cfg.mode, cfg.budget, cfg.seed, cfg.workers);
    res.report["dual_profile"] = code_profile(f, dprof);
    complete = complete && all_exact(dprof);
    if (prof.complete() && dprof.complete()) {
      const bool ok = check_weight_axioms(prof, dprof, code.t);
      res.report["wei_duality"] = ok;
      contradiction = contradiction || !ok;
    }
  }
  if (cfg.distance) {
    const auto d = min_distance(code, *cfg.distance, cfg.budget, cfg.seed);
    Json j;
    j["value"] = d.value;
    j["exact"] = d.exact;
    j["checked"] = d.checked;
    j["mode"] = to_string(*cfg.distance);
    j["codeword"] = vectors_to_json(f, {d.codeword});
    if (d.exact) j["mrd"] = is_mrd(code, d);
    complete = complete && d.exact;
    res.report["distance"] = j;
  }
  if (cfg.system.kind == SystemKind::family && cfg.system.h >= 2 && is_in_A(cfg.system.params())) {
    // the family bounds are lower bounds, so only exact values and upper
    // bounds can contradict them
    const auto bounds = family_weight_bounds(cfg.system.params(), {});
    Json checks = Json::array();
    for (const auto& b : bounds.entries) {
      std::optional<std::size_t> seen = prof.exact(b.rho);
      if (!seen) seen = prof.upper(b.rho);
      if (!seen) continue;
      Json c;
      c["rho"] = b.rho;
      c["family_lower"] = b.value;
      c["observed"] = *seen;
      c["respected"] = *seen >= b.value;
      contradiction = contradiction || *seen < b.value;
      checks.push_back(c);
    }
    res.report["family_bounds"] = checks;
  }
  if (contradiction) res.warnings.push_back("profile contradicts a proven bound or identity");
  res.exit_code = contradiction ? kExitViolated : complete ? kExitHolds : kExitInconclusive;
}

void run_compare(const JobConfig& cfg, JobResult& res) {
  const auto p = cfg.system.params();
  const auto cmp = compare_with_direct_sum(p, cfg.s_list);
  Json rows = Json::array();
  for (const auto& c : cmp) {
    Json j;
    j["rho"] = c.rho;
    j["family_lower"] = c.family_lower;
    j["baseline"] = c.baseline;
    j["baseline_provenance"] = to_string(c.baseline_provenance);
    j["exceeds"] = c.exceeds;
    j["source"] = c.source;
    rows.push_back(j);
  }
  res.report["comparison"] = rows;
  res.report["predicted_direct_sum"] =
      profile_to_json(p.tower, predicted_direct_sum_profile(p.m, p.tower.n(), p.h));
  res.exit_code = kExitHolds;
}

void run_search(const JobConfig& cfg, JobResult& res) {
  const auto& f = cfg.system.tower;
  const std::size_t m = cfg.system.m;
  if (m < 3) throw FieldError("search needs m >= 3");
  const std::uint64_t base = f.order() - 1;
  unsigned __int128 total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    total *= base;
    if (total > (static_cast<unsigned __int128>(1) << 62)) throw FieldError("too many alpha tuples to index");
  }
  const auto all = static_cast<std::uint64_t>(total);
  const std::uint64_t limit = cfg.budget ? std::min(cfg.budget, all) : all;
  ConstructionParams p{f, m, 1, std::vector<FieldElement>(m, f.one())};
  std::uint64_t in_a = 0, in_b = 0, k_one = 0;
  std::vector<std::uint64_t> digits(m, 0);
  for (std::uint64_t idx = 0; idx < limit; ++idx) {
    // alpha_1 is the most significant digit; codes run 1..Q-1
    for (std::size_t i = 0; i < m; ++i) p.alphas[i] = FieldElement{digits[i] + 1};
    if (k_invariant(p) == f.one()) ++k_one;
    if (is_in_A(p)) {
      ++in_a;
      if (cfg.with_b && is_in_B(p)) ++in_b;
    }
    for (std::size_t i = m; i-- > 0;) {
      if (++digits[i] < base) break;
      digits[i] = 0;
    }
  }
  Json j;
  j["tuples"] = all;
  j["scanned"] = limit;
  j["complete"] = limit == all;
  j["in_A"] = in_a;
  j["K_A_one"] = k_one;
  if (cfg.with_b) j["in_B"] = in_b;
  res.report["census"] = j;
  res.exit_code = limit == all ? kExitHolds : kExitInconclusive;
}

bool same_system(const FqSubspace& a, const std::vector<VectorQn>& stored) {
  if (a.dim() != fq_span_dim(a.tower(), a.ambient(), stored)) return false;
  for (const auto& v : stored)
    if (v.size() != a.ambient() || !a.contains(v)) return false;
  return true;
}

}  // namespace

QSystemDesc SystemSpec::build() const {
  switch (kind) {
    case SystemKind::family: return build_V(params());
    case SystemKind::pseudoregulus: return build_pseudoregulus(tower, h);
    case SystemKind::direct_sum: {
      if (m < 2) throw FieldError("direct sum needs m >= 2");
      const auto one = build_pseudoregulus(tower, h);
      auto sum = direct_sum(std::vector<QSystemDesc>(m, one));
      sum.kind = SystemKind::direct_sum;
      return sum;
    }
    case SystemKind::line_control: return line_control(tower);
    case SystemKind::custom: break;
  }
  throw FieldError("custom systems cannot be rebuilt from parameters");
}

JobResult run_job(const JobConfig& cfg) {
  static const std::vector<std::string> commands = {"construct", "verify-scattered", "verify-evasive", "weights",
                                                    "compare",   "search"};
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    throw FieldError("unknown command: " + cfg.command);
  const auto start = std::chrono::steady_clock::now();
  JobResult res;
  Json& r = res.report;
  r["schema"] = kReportSchema;
  r["command"] = cfg.command;
  r["field"] = field_to_json(cfg.system.tower);
  r["params"] = params_to_json(cfg.system);
  r["config"] = config_to_json(cfg);

  if (needs_family(cfg) && !is_nonvacuous(cfg.system.tower, cfg.system.m)) {
    res.warnings.push_back("the admissible set is empty for this (q, n, m): gcd(1 + q + ... + q^(m-1), q^n - 1) = 1");
    if (!cfg.force) {
      r["refused"] = "vacuous";
      r["warnings"] = res.warnings;
      res.exit_code = kExitVacuous;
      return res;
    }
  }
  if (cfg.system.kind == SystemKind::family && cfg.command != "search" && !is_in_A(cfg.system.params()))
    res.warnings.push_back("A is not in the admissible set; the family bounds do not apply");

  if (cfg.command == "search") {
    run_search(cfg, res);
  } else if (cfg.command == "compare") {
    run_compare(cfg, res);
  } else {
    const QSystemDesc u = cfg.system.build();
    r["system"] = system_to_json(u);
    if (cfg.command == "construct")
      run_construct(cfg, u, res);
    else if (cfg.command == "weights")
      run_weights(cfg, u, res);
    else
      run_verify(cfg, u, res);
  }
  r["exit_code"] = res.exit_code;
  if (!res.warnings.empty()) r["warnings"] = res.warnings;
  r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                 {"workers", cfg.workers}};
  return res;
}

JobResult recheck_report(const Json& rep, bool witnesses_only, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  JobResult res;
  Json checks = Json::array();
  bool ok = true;
  auto note = [&](const std::string& what, bool pass, const std::string& detail = "") {
    Json c{{"check", what}, {"pass", pass}};
    if (!detail.empty()) c["detail"] = detail;
    checks.push_back(c);
    ok = ok && pass;
  };

  if (rep.value("schema", "") != kReportSchema) throw FieldError("not a " + std::string(kReportSchema) + " report");
  const JobConfig cfg = config_from_report(rep);
  const FieldTower& f = cfg.system.tower;
  note("field", field_from_json(rep.at("field")) == f);

  std::optional<QSystemDesc> u;
  if (rep.contains("system")) {
    u = cfg.system.build();
    const auto stored = vectors_from_json(f, rep["system"].at("basis"));
    note("system", same_system(u->space, stored) && rep["system"].at("t").get<std::size_t>() == u->t());
  }

  if (rep.contains("verdict") && rep["verdict"].contains("witness")) {
    const Json& v = rep["verdict"];
    const Json& wj = v["witness"];
    bool pass = false;
    std::string detail;
    try {
      const Witness w = witness_from_json(f, wj, u->k());
      pass = wj.at("bound") == v.at("bound") && wj.at("mode") == v.at("mode") &&
             w.subspace.dim() == v.at("hdim").get<std::size_t>() &&
             recheck_witness(u->space, w, v.at("bound").get<std::size_t>());
    } catch (const std::exception& e) {
      detail = e.what();
    }
    note("witness", pass, detail);
  }

  auto check_profile = [&](const char* key, const FqSubspace& sys) {
    if (!rep.contains(key)) return;
    const Json& p = rep[key];
    const std::size_t k = p.at("k").get<std::size_t>(), t = p.at("t").get<std::size_t>();
    bool pass = t == sys.dim() && k == sys.ambient();
    for (const auto& e : p.at("entries")) {
      if (!e.contains("witness")) continue;
      const std::size_t rho = e.at("rho").get<std::size_t>();
      const auto h = subspace_from_json(f, e["witness"].at("H_basis"), k);
      const std::size_t wt = subspace_weight(sys, h);
      pass = pass && h.dim() + rho == k && wt == e["witness"].at("weight").get<std::size_t>() &&
             t - wt == e.at("value").get<std::size_t>();
    }
    note(key, pass);
  };
  if (u) {
    check_profile("profile", u->space);
    if (rep.contains("dual_profile")) check_profile("dual_profile", system_of(dual_code(code_from_system(*u))));
  }

  const bool interrupted = rep.contains("verdict") && rep["verdict"].value("status", "") == "interrupted";
  if (!witnesses_only && !interrupted) {
    JobConfig again = cfg;
    again.workers = workers;
    const auto rerun = run_job(again);
    note("rerun", report_body(rerun.report) == report_body(rep));
  }

  Json& r = res.report;
  r["schema"] = kReportSchema;
  r["command"] = "recheck";
  r["of"] = rep.at("command");
  r["checks"] = checks;
  r["confirmed"] = ok;
  res.exit_code = ok ? kExitHolds : kExitMismatch;
  r["exit_code"] = res.exit_code;
  r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                 {"workers", workers}};
  return res;
}

std::string report_body(const Json& report) {
  Json body = report;
  body.erase("timing");
  return body.dump(2);
}

Json load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FieldError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FieldError(path + ": " + e.what());
  }
}

void write_report(const std::string& path, const Json& report) {
  std::ofstream out(path);
  if (!out) throw FieldError("cannot write " + path);
  out << report.dump(2) << '\n';
}

std::string profile_csv(const Json& report) {
  std::ostringstream out;
  out << "code,rho,value,provenance,subspaces_checked\n";
  for (const char* key : {"profile", "dual_profile"}) {
    if (!report.contains(key)) continue;
    const char* name = std::string(key) == "profile" ? "C" : "dual";
    for (const auto& e : report[key].at("entries"))
      out << name << ',' << e.at("rho") << ',' << e.at("value") << ',' << e.at("provenance").get<std::string>() << ','
          << e.at("subspaces_checked") << '\n';
  }
  return out.str();
}

FieldTower parse_field_spec(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 3 && parts.size() != 4) throw FieldError("--field expects p,s,n[,c0:c1:...:c_sn]");
  const auto p = static_cast<std::uint32_t>(parse_u64(parts[0]));
  const auto s = static_cast<std::uint32_t>(parse_u64(parts[1]));
  const auto n = static_cast<std::uint32_t>(parse_u64(parts[2]));
  if (parts.size() == 3) return FieldTower::create(p, s, n);
  std::vector<std::uint32_t> mod;
  for (const auto& c : split(parts[3], ':')) mod.push_back(static_cast<std::uint32_t>(parse_u64(c)));
  return FieldTower::create(p, s, n, mod);
}

std::vector<FieldElement> parse_elements(const FieldTower& f, const std::string& spec) {
  std::vector<FieldElement> out;
  for (const auto& tok : split(spec, ',')) {
    if (tok.empty()) throw FieldError("empty element in '" + spec + "'");
    if (tok[0] == 'g' || tok[0] == 'z') {
      std::uint64_t e = 1;
      if (tok.size() > 1) {
        if (tok[1] != '^') throw FieldError("bad element '" + tok + "'");
        e = parse_u64(tok.substr(2));
      }
      out.push_back(f.pow(f.generator(), e));
    } else if (tok.find(':') != std::string::npos) {
      std::vector<std::uint32_t> c;
      for (const auto& d : split(tok, ':')) c.push_back(static_cast<std::uint32_t>(parse_u64(d)));
      out.push_back(f.from_coeffs(c));
    } else {
      out.push_back(f.from_code(parse_u64(tok)));
    }
  }
  return out;
}

Json field_to_json(const FieldTower& f) {
  return {{"p", f.p()}, {"s", f.s()}, {"n", f.n()}, {"modulus", f.modulus()}};
}

FieldTower field_from_json(const Json& j) {
  return FieldTower::create(j.at("p").get<std::uint32_t>(), j.at("s").get<std::uint32_t>(),
                            j.at("n").get<std::uint32_t>(), j.at("modulus").get<std::vector<std::uint32_t>>());
}

Json element_to_json(const FieldTower& f, FieldElement x) { return f.coeffs(x); }

FieldElement element_from_json(const FieldTower& f, const Json& j) {
  const auto c = j.get<std::vector<std::uint32_t>>();
  if (c.size() != f.degree()) throw FieldError("element has the wrong number of coefficients");
  return f.from_coeffs(c);
}

Json vectors_to_json(const FieldTower& f, const std::vector<VectorQn>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json row = Json::array();
    for (auto x : r) row.push_back(element_to_json(f, x));
    out.push_back(row);
  }
  return out;
}

std::vector<VectorQn> vectors_from_json(const FieldTower& f, const Json& j) {
  std::vector<VectorQn> out;
  for (const auto& row : j) {
    VectorQn v;
    for (const auto& x : row) v.push_back(element_from_json(f, x));
    out.push_back(std::move(v));
  }
  return out;
}

Json witness_to_json(const FieldTower& f, const Witness& w, Mode mode, std::size_t bound) {
  Json j;
  j["mode"] = to_string(mode);
  j["bound"] = bound;
  j["weight"] = w.weight;
  j["H_basis"] = subspace_to_json(f, w.subspace);
  j["intersection_basis"] = vectors_to_json(f, w.intersection_basis);
  j["tuple_index"] = w.tuple_index;
  return j;
}

Witness witness_from_json(const FieldTower& f, const Json& j, std::size_t k) {
  Witness w;
  w.subspace = subspace_from_json(f, j.at("H_basis"), k);
  w.intersection_basis = vectors_from_json(f, j.at("intersection_basis"));
  w.weight = j.at("weight").get<std::size_t>();
  w.tuple_index = j.at("tuple_index").get<std::vector<std::uint64_t>>();
  return w;
}

Json profile_to_json(const FieldTower& f, const WeightProfile& p) {
  Json out = Json::array();
  for (const auto& e : p.entries) {
    Json j;
    j["rho"] = e.rho;
    j["value"] = e.value;
    j["provenance"] = to_string(e.provenance);
    j["subspaces_checked"] = e.subspaces_checked;
    if (e.witness) j["witness"] = {{"H_basis", subspace_to_json(f, *e.witness)}, {"weight", p.t - e.value}};
    out.push_back(j);
  }
  return out;
}

}  // namespace rankscatter
