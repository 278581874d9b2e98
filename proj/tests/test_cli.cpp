//==============================================================================
// test_cli.cpp — end-to-end checks of the command-line driver: exit codes,
// artifacts, overrides, and byte-level determinism.
//==============================================================================
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kExe = BEAMLAB_PATH;
const std::string kTmp = TEST_TMPDIR;

int run(const std::string& args) {
  const std::string cmd = kExe + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path);
  f << text;
}

const char* kConfig = R"(
[grid]
points = 48,48
L = 24,24

[physics]
m = 1
lambda = 1
p = 3

[time]
dt = 2e-3
T = 0.2
snapshot_stride = 10

[initial]
kind = gaussian
amplitude = 0.5
width = 2
seed = 11

[diagnostics]
R = 3
)";

}  // namespace

TEST_CASE("simulate runs, writes artifacts, and honors --out") {
  const std::string cfg = kTmp + "/run.ini";
  write(cfg, kConfig);
  const std::string out = kTmp + "/out_a";
  CHECK(run("simulate --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(out + "/diagnostics.csv"));
  CHECK(fs::exists(out + "/summary.json"));
  const std::string csv = slurp(out + "/diagnostics.csv");
  CHECK(csv.find("# format_version = 1") != std::string::npos);
  CHECK(csv.find("t,E,E0,Mom_1,Mom_2,Omega_12,Scum") != std::string::npos);
  const std::string js = slurp(out + "/summary.json");
  CHECK(js.find("\"format_version\": 1") != std::string::npos);
  CHECK(js.find("\"config\"") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
  const std::string cfg = kTmp + "/det.ini";
  write(cfg, kConfig);
  // identical config (including the output directory), run twice
  const std::string out = kTmp + "/det_out";
  REQUIRE(run("simulate --config " + cfg + " --seed 7 --out " + out) == 0);
  const std::string csv1 = slurp(out + "/diagnostics.csv");
  const std::string js1 = slurp(out + "/summary.json");
  REQUIRE(run("simulate --config " + cfg + " --seed 7 --out " + out) == 0);
  CHECK(csv1 == slurp(out + "/diagnostics.csv"));
  CHECK(js1 == slurp(out + "/summary.json"));
}

TEST_CASE("configuration problems exit with status 2") {
  const std::string missing = kTmp + "/nope.ini";
  CHECK(run("simulate --config " + missing) == 2);

  const std::string bad = kTmp + "/bad.ini";
  write(bad, "[grid]\npoints = 48,48\n");  // no lengths
  CHECK(run("simulate --config " + bad) == 2);

  const std::string badp = kTmp + "/badp.ini";
  write(badp, std::string(kConfig) + "\n[physics]\np = 1\n");
  CHECK(run("simulate --config " + badp) == 2);

  // over-budget horizon refused; --allow-wraparound accepts it
  const std::string cfg = kTmp + "/budget.ini";
  write(cfg, kConfig);
  CHECK(run("simulate --config " + cfg + " --override time.T=50 --override "
            "time.snapshot_stride=2500") == 2);
  CHECK(run("simulate --config " + cfg + " --override time.T=50 --override "
            "time.snapshot_stride=2500 --allow-wraparound") == 0);

  CHECK(run("simulate --config " + cfg + " --override bogus.key=1") == 2);
}

TEST_CASE("checkpoints are written and reloadable") {
  const std::string cfg = kTmp + "/ckpt.ini";
  write(cfg, std::string(kConfig) + "\n[output]\ncheckpoints = on\n");
  const std::string out = kTmp + "/ckpt_out";
  REQUIRE(run("simulate --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(out + "/final.ckpt"));
  // restart from the checkpoint
  const std::string cfg2 = kTmp + "/restart.ini";
  write(cfg2, std::string(kConfig) + "\n[initial]\nkind = checkpoint\ncheckpoint = " +
                  out + "/final.ckpt\n");
  CHECK(run("simulate --config " + cfg2 + " --out " + kTmp + "/restart_out") == 0);
}

TEST_CASE("overrides change the run") {
  const std::string cfg = kTmp + "/ovr.ini";
  write(cfg, kConfig);
  const std::string out = kTmp + "/ovr_out";
  REQUIRE(run("simulate --config " + cfg + " --override time.T=0.5 --out " + out) == 0);
  const std::string csv = slurp(out + "/diagnostics.csv");
  CHECK(csv.find("# time.T = 0.5\n") != std::string::npos);
}

TEST_CASE("virial-check passes on a compactly supported run") {
  const std::string cfg = kTmp + "/virial.ini";
  write(cfg, std::string(kConfig) + "\n[diagnostics]\naction_R = 6\n"
                                    "\n[time]\nT = 0.1\nsnapshot_stride = 5\n");
  const std::string out = kTmp + "/virial_out";
  CHECK(run("virial-check --config " + cfg + " --out " + out) == 0);
  const std::string js = slurp(out + "/virial_check.json");
  CHECK(js.find("\"res_A2_max\"") != std::string::npos);
  const std::string csv = slurp(out + "/diagnostics.csv");
  CHECK(csv.find("res_A2") != std::string::npos);
}

TEST_CASE("small-data and lp-test subcommands") {
  const std::string cfg = kTmp + "/exp.ini";
  write(cfg, std::string(kConfig) +
                 "\n[experiment]\namplitudes = 1e-3,1e-2\n"
                 "\n[time]\nT = 0.5\nsnapshot_stride = 25\n");
  const std::string out = kTmp + "/exp_out";
  CHECK(run("small-data --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(out + "/small_data.json"));
  CHECK(run("lp-test --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(out + "/lp_test.json"));
}

TEST_CASE("unknown subcommand is a usage error") {
  CHECK(run("frobnicate --config /dev/null") != 0);
}
