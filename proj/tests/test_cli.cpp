#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lightcone/field.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "lightcone_cli_out.txt";
  const std::string cmd =
      std::string(LIGHTCONE_CLI_PATH) + " " + args + " > " + log.string() +
      " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  res.output = ss.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help lists the subcommands and common keys") {
  const RunResult res = run_cli("--help");
  CHECK(res.exit_code == 0);
  for (const char* word :
       {"apply", "scaling", "hedberg", "theta-sum", "ortho-decay",
        "cone-measure", "survey"})
    CHECK(res.output.find(word) != std::string::npos);

  const RunResult sub = run_cli("scaling --help");
  CHECK(sub.exit_code == 0);
  for (const char* word : {"--n", "--alpha", "--p", "--q", "--grid-m",
                           "--grid-L", "--grid-T", "--eta", "--jmin", "--jmax",
                           "--seed", "--out", "--field", "--lambdas"})
    CHECK(sub.output.find(word) != std::string::npos);
}

TEST_CASE("a missing experiment is a usage error") {
  const RunResult res = run_cli("");
  CHECK(res.exit_code != 0);
}

TEST_CASE("the degenerate exponent line is rejected with a message") {
  // n = 1, alpha = 1/2, p = 2 forces 1/q = 0
  const RunResult res = run_cli(
      "scaling --n 1 --alpha 0.5 --p 2 --grid-m 16 --out /tmp/lc_reject");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("no finite q") != std::string::npos);
}

TEST_CASE("q is derived from the exponent relation when omitted") {
  TempDir dir("lc_cli_survey");
  // n = 2, alpha = 1, p = 1.5: q = 1 / (2/3 - 1/2) = 6
  const RunResult res = run_cli(
      "survey --n 2 --alpha 1 --p 1.5 --grid-m 16 --grid-L 2 --grid-T 2 "
      "--eta 4 --sub-u 2 --sub-v 2 --sub-omega 8 "
      "--field-cell-ell 1 --field-cell-j 1 --out " +
      dir.path.string());
  CHECK(res.exit_code == 0);
  const auto rep = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(rep.at("params").at("q").get<double>() == doctest::Approx(6.0));
  CHECK(rep.at("params").at("q_derived").get<bool>());
}

TEST_CASE("theta-sum on a Gaussian passes and writes its artifacts") {
  TempDir dir("lc_cli_theta");
  const RunResult res = run_cli(
      "theta-sum --n 1 --alpha 0.5 --p 2 --grid-m 32 --grid-L 2 --grid-T 2 "
      "--out " +
      dir.path.string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir.path / "report.json"));
  CHECK(fs::exists(dir.path / "samples.csv"));
  const auto rep = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(rep.at("flags").at("theta_sum_le_one").get<bool>());
  CHECK(rep.at("metrics").at("max_theta_sum").get<double>() <= 1.0 + 1e-6);
}

TEST_CASE("apply writes the output field and summary metrics") {
  TempDir dir("lc_cli_apply");
  const RunResult res = run_cli(
      "apply --n 1 --alpha 0.5 --grid-m 16 --grid-L 2 --grid-T 2 --eta 4 "
      "--field ball --out " +
      dir.path.string());
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(dir.path / "field.lcf"));
  const lightcone::SampledField out =
      lightcone::load_field(dir.path / "field.lcf");
  CHECK(out.spec.m == 16);
  CHECK((out.values >= 0.0).all());
  CHECK(out.values.maxCoeff() > 0.0);

  // zero input gives the zero field
  TempDir dir2("lc_cli_apply_zero");
  const RunResult res2 = run_cli(
      "apply --n 1 --alpha 0.5 --grid-m 16 --grid-L 2 --grid-T 2 --eta 4 "
      "--field ball --field-radius 1e-9 --out " +
      dir2.path.string());
  CHECK(res2.exit_code == 0);
  const lightcone::SampledField zero =
      lightcone::load_field(dir2.path / "field.lcf");
  CHECK(zero.values.maxCoeff() == 0.0);
}

TEST_CASE("identical config and seed produce byte-identical CSV") {
  TempDir a("lc_cli_det_a");
  TempDir b("lc_cli_det_b");
  const std::string flags =
      "cone-measure --n 2 --configs 4 --volume-cells 3 --mc-samples 20000 "
      "--seed 31 --out ";
  CHECK(run_cli(flags + a.path.string()).exit_code == 0);
  CHECK(run_cli(flags + b.path.string()).exit_code == 0);
  CHECK(slurp(a.path / "samples.csv") == slurp(b.path / "samples.csv"));
  CHECK(slurp(a.path / "volumes.csv") == slurp(b.path / "volumes.csv"));
  CHECK(!slurp(a.path / "samples.csv").empty());
}

TEST_CASE("config files feed flags, and flags win") {
  TempDir dir("lc_cli_config");
  const fs::path cfg = dir.path / "run.cfg";
  {
    std::ofstream os(cfg);
    os << "n = 1\nalpha = 0.5\np = 2\ngrid-m = 32\ngrid-L = 2\ngrid-T = 2\n";
  }
  const RunResult res = run_cli("theta-sum --config " + cfg.string() +
                                " --grid-m 16 --out " + dir.path.string());
  CHECK(res.exit_code == 0);
  const auto rep = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(rep.at("params").at("grid").at("m").get<int>() == 16);  // flag wins

  {
    std::ofstream os(cfg, std::ios::app);
    os << "no-such-key = 3\n";
  }
  const RunResult bad = run_cli("theta-sum --config " + cfg.string() +
                                " --out " + dir.path.string());
  CHECK(bad.exit_code != 0);
}

TEST_CASE("a field file round trips through the CLI") {
  TempDir dir("lc_cli_field");
  const lightcone::GridSpec spec{1, 2.0, 2.0, 16};
  lightcone::TestFieldParams params;
  params.sigma = 0.5;
  const lightcone::SampledField f = lightcone::make_test_field(
      lightcone::TestFieldKind::gaussian, spec, params);
  const fs::path field_path = dir.path / "input.lcf";
  lightcone::save_field(f, field_path);
  const RunResult res = run_cli(
      "apply --n 1 --alpha 0.5 --eta 4 --field " + field_path.string() +
      " --out " + dir.path.string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir.path / "field.lcf"));
}
