#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "kslab_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path log = dir / "cli_output.log";
  std::string cmd = std::string(KSLAB_CLI_PATH) + " " + args + " > " +
                    log.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(log);
  return r;
}

}  // namespace

TEST_CASE("steady command reports the profile constants") {
  fs::path d = scratch("steady");
  CliResult r = run_cli("steady --N 2 --out " + (d / "run").string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("M=2") != std::string::npos);
  CHECK(fs::exists(d / "run" / "profile.csv"));
  CHECK(fs::exists(d / "run" / "manifest.json"));
  auto j = json::parse(slurp(d / "run" / "manifest.json"));
  CHECK(j["command"] == "steady");
  CHECK(j["status"] == "completed");
}

TEST_CASE("usage errors exit with code 2") {
  fs::path d = scratch("usage");
  CHECK(run_cli("", d).code == 2);
  CHECK(run_cli("frobnicate", d).code == 2);
  CHECK(run_cli("steady --no-such-flag", d).code == 2);
  CHECK(run_cli("evolve --N 2 --m 1 --u0 power:0.5 --out " + (d / "x").string(), d).code == 2);
  // missing required output directory
  CHECK(run_cli("evolve --N 2 --m 1", d).code == 2);
}

TEST_CASE("domain errors exit with code 3") {
  fs::path d = scratch("domain");
  CliResult r = run_cli("lambda1 --N 2 --m 0 --n 64 --out " + (d / "run").string(), d);
  CHECK(r.code == 3);
}

TEST_CASE("config files feed defaults and flags override them") {
  fs::path d = scratch("config");
  std::ofstream(d / "run.cfg") << "# solver settings\nN = 2\nm = 1\nn = 128\n";
  CliResult base = run_cli("lambda1 --config " + (d / "run.cfg").string() + " --out " +
                               (d / "a").string(),
                           d);
  CHECK(base.code == 0);
  auto ja = json::parse(slurp(d / "a" / "manifest.json"));
  CHECK(ja["config"]["n"] == "128");

  CliResult over = run_cli("lambda1 --config " + (d / "run.cfg").string() +
                               " --n 256 --out " + (d / "b").string(),
                           d);
  CHECK(over.code == 0);
  auto jb = json::parse(slurp(d / "b" / "manifest.json"));
  CHECK(jb["config"]["n"] == "256");

  std::ofstream(d / "bad.cfg") << "n 128\n";
  CHECK(run_cli("lambda1 --config " + (d / "bad.cfg").string(), d).code == 2);
}

TEST_CASE("eigenvalue command writes tables and the ground mode") {
  fs::path d = scratch("lambda1");
  CliResult r = run_cli("lambda1 --N 2 --m 1 --n 256 --out " + (d / "run").string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("lambda1") != std::string::npos);
  CHECK(fs::exists(d / "run" / "lambda1.csv"));
  CHECK(fs::exists(d / "run" / "phi1.csv"));
  std::string table = slurp(d / "run" / "lambda1.csv");
  CHECK(table.find("\n2,2.000") != std::string::npos);  // a(m=1) = 2 to solver tol
}

TEST_CASE("evolution runs are deterministic across reruns") {
  fs::path d = scratch("determinism");
  std::string cfg = "evolve --N 2 --m 1 --n 64 --dt 1e-3 --t-end 0.05 --out ";
  CHECK(run_cli(cfg + (d / "r1").string(), d).code == 0);
  CHECK(run_cli(cfg + (d / "r2").string(), d).code == 0);
  CHECK(slurp(d / "r1" / "series.csv") == slurp(d / "r2" / "series.csv"));
  auto j = json::parse(slurp(d / "r1" / "manifest.json"));
  CHECK(j["status"] == "completed");
  for (auto& f : j["files"]) CHECK(fs::exists(d / "r1" / f.get<std::string>()));
}

TEST_CASE("supercritical mass is detected and honored by the expectation flag") {
  fs::path d = scratch("super");
  std::string base = "evolve --N 3 --m 1.3 --n 256 --dt 1e-3 --t-end 100 "
                     "--sup-threshold 20 --out ";
  CliResult plain = run_cli(base + (d / "plain").string(), d);
  CHECK(plain.code == 0);
  auto j = json::parse(slurp(d / "plain" / "manifest.json"));
  CHECK(j["status"] == "supercritical-detected");

  CliResult strict =
      run_cli(base + (d / "strict").string() + " --expect-subcritical", d);
  CHECK(strict.code == 4);
}

TEST_CASE("rate command fits a completed run directory") {
  fs::path d = scratch("rate");
  std::string evo = "evolve --N 2 --m 1 --n 256 --dt 1e-3 --t-end 8 "
                    "--snapshot-growth 1.1 --out " + (d / "run").string();
  REQUIRE(run_cli(evo, d).code == 0);
  CliResult r = run_cli("rate --run-dir " + (d / "run").string() + " --window 2:8", d);
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "run" / "ratefit.json"));
  auto j = json::parse(slurp(d / "run" / "ratefit.json"));
  REQUIRE(j.is_array());
  REQUIRE(j.size() >= 1);
  double slope = j[0]["slope"].get<double>();
  CHECK(slope > 1.5);
  CHECK(slope < 3.5);
}

TEST_CASE("self check command passes") {
  fs::path d = scratch("validate");
  CliResult r = run_cli("validate", d);
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
