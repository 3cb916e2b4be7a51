#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrnet/io.hpp"
#include "corrnet/synthgen.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace corrnet;

namespace {

const fs::path kCli = CORRNET_CLI_PATH;
const fs::path kData = CORRNET_DATA_DIR;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("corrnet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "env -u SOURCE_DATE_EPOCH '" + kCli.string() + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fixture_args() {
  return "-c '" + (kData / "snapshot.conf").string() + "'";
}

const char* kOutputs[] = {"panel.csv",          "model.json",         "network.json",
                          "adjacency_phi.csv",  "adjacency_pi.csv",   "adjacency_psi.csv",
                          "adjacency_gamma.csv", "network_phi.dot",    "network_pi.dot",
                          "network_psi.dot",    "network_gamma.dot",  "diagnostics.json",
                          "cusum_gdp.csv",      "cusum_cpi.csv",      "run_report.json"};

}  // namespace

TEST_CASE("run on the bundled snapshot is byte-for-byte reproducible") {
  const auto dir = scratch("repro");
  const auto a = run("run " + fixture_args() + " -o '" + (dir / "a").string() + "'", dir);
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const auto b = run("run " + fixture_args() + " -o '" + (dir / "b").string() + "'", dir);
  REQUIRE(b.code == 0);
  for (const char* f : kOutputs) {
    INFO(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("staged commands reproduce run exactly") {
  const auto dir = scratch("staged");
  const std::string cfg = fixture_args();
  const std::string staged = " -o '" + (dir / "staged").string() + "'";
  REQUIRE(run("run " + cfg + " -o '" + (dir / "single").string() + "'", dir).code == 0);
  REQUIRE(run("ingest " + cfg + staged, dir).code == 0);
  REQUIRE(run("fit " + cfg + staged, dir).code == 0);
  REQUIRE(run("network " + cfg + staged, dir).code == 0);
  REQUIRE(run("diagnose " + cfg + staged, dir).code == 0);
  for (const char* f : kOutputs) {
    if (std::string(f) == "run_report.json") continue;
    INFO(f);
    CHECK(slurp(dir / "staged" / f) == slurp(dir / "single" / f));
  }
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  const auto r = run("run " + fixture_args() + " --alpha 0.01 --diagnostics false -o '" +
                         (dir / "o").string() + "'",
                     dir);
  REQUIRE(r.code == 0);
  const auto report = Json::parse(slurp(dir / "o" / "run_report.json"));
  CHECK(report.at("config").at("alpha") == "0.01");
  CHECK_FALSE(fs::exists(dir / "o" / "diagnostics.json"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  SUBCASE("usage") {
    CHECK(run("", dir).code == 1);
    CHECK(run("run --bogus", dir).code == 1);
    CHECK(run("run " + fixture_args() + " --alpha 0.03 -o '" + (dir / "o").string() + "'", dir).code == 1);
    std::ofstream(dir / "both.conf") << "p = 1\np_max = 2\n";
    const auto r = run("fit -c '" + (dir / "both.conf").string() + "' -o '" + dir.string() + "'", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("p_max") != std::string::npos);
    CHECK(run("--help", dir).code == 0);
  }
  SUBCASE("ingest") {
    const auto r = run("ingest --gdp '" + (dir / "missing.csv").string() + "' --cpi '" +
                           (kData / "cpi_annual.csv").string() + "' -o '" + dir.string() + "'",
                       dir);
    CHECK(r.code == 2);
    std::ofstream(dir / "gap.csv") << "period,A\n2015Q1,1\n2015Q3,2\n";
    const auto g = run("ingest --gdp '" + (dir / "gap.csv").string() + "' --cpi '" +
                           (dir / "gap.csv").string() + "' --cpi-frequency quarterly -o '" +
                           dir.string() + "'",
                       dir);
    CHECK(g.code == 2);
    CHECK(g.err.find("2015Q2") != std::string::npos);
  }
  SUBCASE("fit: strict policy on the snapshot is singular") {
    const auto o = " -o '" + dir.string() + "'";
    REQUIRE(run("ingest " + fixture_args() + o, dir).code == 0);
    const auto r = run("fit " + fixture_args() + " --rank-policy strict" + o, dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("rank deficient") != std::string::npos);
    const auto big = run("fit " + fixture_args() + " --p-max 4" + o, dir);
    CHECK(big.code == 3);
  }
  SUBCASE("network: model does not belong to the panel") {
    const auto o = " -o '" + dir.string() + "'";
    REQUIRE(run("ingest " + fixture_args() + o, dir).code == 0);
    REQUIRE(run("fit " + fixture_args() + o, dir).code == 0);
    auto model = Json::parse(slurp(dir / "model.json"));
    model["fit"]["gdp"]["intercepts"][0] = 1.0;
    std::ofstream(dir / "model.json") << model.dump(2);
    CHECK(run("network " + fixture_args() + o, dir).code == 4);
  }
  SUBCASE("simulate: unstable spec cites the radius") {
    auto spec = GeneratorSpec::zeros(2, 1);
    spec.phi[0] = 1.2 * Eigen::MatrixXd::Identity(2, 2);
    std::ofstream(dir / "spec.json") << to_json(spec).dump(2);
    const auto r = run("simulate --spec '" + (dir / "spec.json").string() + "' -T 50 -o '" +
                           dir.string() + "'",
                       dir);
    CHECK(r.code == 6);
    CHECK(r.err.find("1.2") != std::string::npos);
  }
}

TEST_CASE("diagnose warns but exits 0 on an explosive model") {
  const auto dir = scratch("explosive");
  auto spec = GeneratorSpec::zeros(2, 1);
  spec.seed = 3;
  std::ofstream(dir / "spec.json") << to_json(spec).dump(2);
  REQUIRE(run("simulate --spec '" + (dir / "spec.json").string() + "' -T 60 -o '" + dir.string() + "'", dir)
              .code == 0);
  // Evaluate a 1.2 I model against that panel.
  spec.phi[0] = 1.2 * Eigen::MatrixXd::Identity(2, 2);
  std::ofstream(dir / "model.json") << to_json(spec).dump(2);
  const auto r = run("diagnose -o '" + dir.string() + "'", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("stable=false") != std::string::npos);
  CHECK(r.err.find("WARN") != std::string::npos);
  const auto diag = Json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag.at("stable") == false);
}

TEST_CASE("simulate is deterministic and honours the noise-free constant case") {
  const auto dir = scratch("simulate");
  auto spec = GeneratorSpec::zeros(3, 1);
  spec.seed = 11;
  std::ofstream(dir / "spec.json") << to_json(spec).dump(2);
  const std::string args = "simulate --spec '" + (dir / "spec.json").string() + "' -T 40 -o ";
  REQUIRE(run(args + "'" + (dir / "a").string() + "'", dir).code == 0);
  REQUIRE(run(args + "'" + (dir / "b").string() + "'", dir).code == 0);
  CHECK(slurp(dir / "a" / "panel.csv") == slurp(dir / "b" / "panel.csv"));
  REQUIRE(run(args + "'" + (dir / "c").string() + "' --seed 12", dir).code == 0);
  CHECK(slurp(dir / "a" / "panel.csv") != slurp(dir / "c" / "panel.csv"));

  spec.noise_free = true;
  spec.b.setConstant(2.5);
  std::ofstream(dir / "const.json") << to_json(spec).dump(2);
  REQUIRE(run("simulate --spec '" + (dir / "const.json").string() + "' -T 5 -o '" +
                  (dir / "k").string() + "'",
              dir)
              .code == 0);
  const auto panel = load_panel_csv(dir / "k" / "panel.csv");
  CHECK((panel.x.array() == 2.5).all());
  CHECK((panel.y.array() == 0.0).all());
}

TEST_CASE("lag selection writes its score table") {
  const auto dir = scratch("select");
  auto spec = random_stable_spec(2, 1, 4, 0.6);
  std::ofstream(dir / "spec.json") << to_json(spec).dump(2);
  REQUIRE(run("simulate --spec '" + (dir / "spec.json").string() + "' -T 200 -o '" + dir.string() + "'", dir)
              .code == 0);
  const auto r = run("fit --p-max 3 --criterion both -o '" + dir.string() + "'", dir);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(dir / "lag_selection.csv"));
  const auto model = Json::parse(slurp(dir / "model.json"));
  CHECK(model.at("lag_selection").is_object());
  CHECK(model.at("p") == 1);
}
