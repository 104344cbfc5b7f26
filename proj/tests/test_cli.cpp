#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kDir = fs::temp_directory_path() / "rankscatter_cli_test";

int run(const std::string& args) {
  fs::create_directories(kDir);
  const std::string cmd = std::string(RANKSCATTER_CLI) + " " + args + " >" + (kDir / "stdout").string() + " 2>" +
                          (kDir / "stderr").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json report(const std::string& name) { return Json::parse(slurp(kDir / name)); }
std::string out(const std::string& name) { return (kDir / name).string(); }

const std::string kFamily = "--field 2,1,4 --m 4 --h 2 --alphas g,1,1,1";

}  // namespace

TEST_CASE("usage errors exit above 2") {
  CHECK(run("") == 3);
  CHECK(run("frobnicate") == 3);
  CHECK(run("verify-scattered --bogus") == 3);
  CHECK(run("verify-scattered --field 2,1 --system pseudoregulus") == 3);
  CHECK(run("verify-scattered --field 2,1,4") == 3);  // family without alphas
  CHECK(run("verify-scattered " + kFamily + " --mode sampled") == 3);  // no budget
  CHECK(run("verify-scattered " + kFamily + " --mode guess") == 3);
  CHECK(run("recheck " + out("missing.json")) == 3);
  CHECK(run("--help") == 0);
}

TEST_CASE("search census") {
  CHECK(run("search --field 2,1,4 --m 4 --out " + out("search.json")) == 0);
  const auto r = report("search.json");
  CHECK(r["census"]["in_A"] == 47250);
  CHECK(r["census"]["tuples"] == 50625);
}

TEST_CASE("vacuous admissible set") {
  CHECK(run("construct --field 2,1,4 --m 3 --h 1 --alphas g,1,1") == 4);
  CHECK(slurp(kDir / "stderr").find("warning") != std::string::npos);
  CHECK(run("construct --field 2,1,4 --m 3 --h 1 --alphas g,1,1 --force") == 0);
}

TEST_CASE("line control: violated, then rechecked") {
  CHECK(run("verify-scattered --system line-control --field 2,1,4 --mode exhaustive --out " + out("line.json")) == 1);
  const auto r = report("line.json");
  CHECK(r["verdict"]["witness"]["weight"] == 4);
  CHECK(run("recheck " + out("line.json")) == 0);

  auto bad = r;
  bad["verdict"]["witness"]["intersection_basis"].erase(0);
  std::ofstream(out("line_bad.json")) << bad.dump();
  CHECK(run("recheck " + out("line_bad.json")) == 6);
}

TEST_CASE("pseudoregulus holds in both proof modes") {
  CHECK(run("verify-scattered --system pseudoregulus --field 2,1,4 --h 2 --mode exhaustive") == 0);
  CHECK(run("verify-scattered --system pseudoregulus --field 2,1,4 --h 2 --mode witness-span") == 0);
  CHECK(run("verify-evasive --system pseudoregulus --field 2,1,4 --h 2 --hdim 2 --r 1 --mode exhaustive") == 3);
  CHECK(run("verify-evasive --system line-control --field 2,1,4 --hdim 1 --r 3 --mode witness_span") == 1);
  CHECK(run("verify-evasive --system line-control --field 2,1,4 --hdim 1 --r 4 --mode witness_span") == 0);
}

TEST_CASE("sampled family run, worker env var, resume") {
  const std::string base = "verify-scattered " + kFamily + " --mode sampled_span --budget 30000 --seed 5";
  CHECK(run(base + " --out " + out("a.json")) == 2);
  setenv("RANKSCATTER_WORKERS", "3", 1);
  CHECK(run(base + " --out " + out("b.json")) == 2);
  unsetenv("RANKSCATTER_WORKERS");
  auto a = report("a.json"), b = report("b.json");
  CHECK(b["timing"]["workers"] == 3);
  a.erase("timing");
  b.erase("timing");
  CHECK(a == b);

  fs::remove(kDir / "ckpt");
  CHECK(run(base + " --checkpoint " + out("ckpt") + " --stop-after 3 --out " + out("c.json")) == 5);
  CHECK(run(base + " --checkpoint " + out("ckpt") + " --out " + out("d.json")) == 2);
  auto d = report("d.json");
  d.erase("timing");
  CHECK(d == a);
  CHECK(run("recheck " + out("d.json")) == 0);
}

TEST_CASE("weights, csv and compare") {
  CHECK(run("weights --system direct-sum --field 2,1,3 --m 2 --h 1 --mode exhaustive --dual --csv " + out("w.csv") +
            " --out " + out("w.json")) == 0);
  CHECK(slurp(kDir / "w.csv").find("C,4,6,exact,") != std::string::npos);
  CHECK(report("w.json")["wei_duality"] == true);
  CHECK(run("weights --system direct-sum --field 2,1,3 --m 2 --h 1 --mode exhaustive --rho 1,2") == 0);

  CHECK(run("compare " + kFamily + " --out " + out("cmp.json")) == 0);
  CHECK(report("cmp.json")["comparison"].size() == 2);
  CHECK(run("compare --field 2,1,4 --m 4 --h 2 --alphas 1,1,1,1") == 3);  // K_A = 1

  CHECK(run("construct --params " + out("cmp.json") + " --out " + out("k.json")) == 0);
  CHECK(report("k.json")["construct"]["t"] == 16);
}
