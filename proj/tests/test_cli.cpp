#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ionsync/cli.hpp"
#include "ionsync/config.hpp"
#include "ionsync/emit.hpp"

using namespace ionsync;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ionsync");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ionsync-test-" + name);
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

nlohmann::json meta(const std::string& dir) { return nlohmann::json::parse(slurp(fs::path(dir) / "meta.json")); }

}  // namespace

TEST_CASE("usage errors exit with status 1") {
  const Run gamma = cli({"pair", "--omega1", "0", "--gamma", "0"});
  CHECK(gamma.status == kExitUsage);
  CHECK(gamma.err.find("--gamma") != std::string::npos);
  CHECK(gamma.err.find("accepted keys") != std::string::npos);
  CHECK(cli({"pair", "--bogus", "1"}).status == kExitUsage);
  CHECK(cli({"pair", "--delta", "abc"}).status == kExitUsage);
  CHECK(cli({}).status == kExitUsage);
  CHECK(cli({"teleport"}).status == kExitUsage);
  CHECK(cli({"single", "--Gamma", "0.2", "--gamma-ratio", "3"}).status == kExitUsage);
  CHECK(cli({"single", "--omega1", "-1", "--output", scratch("neg")}).status == kExitUsage);
  CHECK(cli({"single", "--format", "xml"}).status == kExitUsage);
  CHECK(cli({"lab", "--omega-d", "1.8 MHz", "--output", scratch("lab-bad")}).status == kExitUsage);
}

TEST_CASE("help exits with status 0") {
  const Run r = cli({"--help"});
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("fig3") != std::string::npos);
  CHECK(cli({"pair", "--help"}).status == kExitOk);
}

TEST_CASE("config files and flags") {
  const std::string dir = scratch("cfg");
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / "run.json").string();
  std::ofstream(path) << R"({"Delta": 0.5, "J": 0.2, "cutoff": 6})";
  const FileConfig f = load_config_file(path);
  const RunConfig c = make_config("pair", f, {{"Delta", "1"}}, std::string("out"), std::nullopt);
  CHECK(c.number("Delta", 0) == 1.0);
  CHECK(c.number("J", 0) == doctest::Approx(0.2));
  CHECK(c.integer("cutoff", 0) == 6);
  CHECK(c.format == "csv");
  CHECK_THROWS_AS(make_config("single", f, {}, std::nullopt, std::nullopt), ConfigError);
  CHECK_THROWS_AS(load_config_file((fs::path(dir) / "missing.json").string()), ConfigError);
  const ModelParams p = resolve_params(make_config("pair", {}, {}, std::nullopt, std::nullopt));
  CHECK(p.Omega1 == 1.0);
  CHECK(p.Omega2 == 1.0);
  CHECK(p.Gamma == doctest::Approx(1.0 / 3.0));
  CHECK(p.J == doctest::Approx(0.1));
  CHECK(p.Delta == 0.0);
  CHECK(resolve_params(make_config("single", {}, {{"gamma_ratio", "3"}}, std::nullopt, std::nullopt)).Gamma ==
        doctest::Approx(1.0 / 3.0));
}

TEST_CASE("single-ion run emits the documented files") {
  const std::string dir = scratch("single");
  const Run r = cli({"single", "--gamma-ratio", "3", "--output", dir});
  REQUIRE(r.status == kExitOk);
  for (const char* f : {"single.csv", "pn.csv", "wigner.csv", "meta.json"}) CHECK(fs::exists(fs::path(dir) / f));
  const std::string csv = slurp(fs::path(dir) / "single.csv");
  CHECK(csv.find('\r') == std::string::npos);
  const auto rows = lines(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].rfind("Gamma,mean_n,mode_n,mandel_q,", 0) == 0);
  CHECK(rows[0].find(",residual,min_eig,converged") != std::string::npos);
  CHECK(rows[1].back() == '1');
  CHECK(rows[1].rfind("3.33333333333333315e-01,", 0) == 0);
  const auto m = meta(dir);
  CHECK(m["vectorization"] == "column-stacking");
  CHECK(m["conventions"]["vectorization"] == "column-stacking");
  CHECK(m["software"] == software_version());
  CHECK(m.contains("sparse_lu_backend"));
  CHECK_FALSE(m.contains("started"));
  const auto w = lines(slurp(fs::path(dir) / "wigner.csv"));
  CHECK(w[0] == "x,p,W");
  CHECK(w.size() == 1 + 121 * 121);
}

TEST_CASE("meta.json config block round-trips") {
  const std::string dir = scratch("roundtrip");
  REQUIRE(cli({"single", "--gamma-ratio", "3", "--cutoff", "6", "--gate", "false", "--output", dir, "--format",
               "both"})
              .status == kExitOk);
  const RunConfig original = make_config("single", {}, {{"gamma_ratio", "3"}, {"cutoff", "6"}, {"gate", "false"}},
                                         dir, std::string("both"));
  const FileConfig f = load_config_file((fs::path(dir) / "meta.json").string());
  const RunConfig back = make_config(*f.subcommand, f, {}, f.output, f.format);
  CHECK(back == original);
  CHECK(fs::exists(fs::path(dir) / "single.json"));
  // a run from the saved meta.json reproduces the outputs byte for byte
  const std::string before = slurp(fs::path(dir) / "single.csv");
  REQUIRE(cli({"--config", (fs::path(dir) / "meta.json").string(), "single"}).status == kExitOk);
  CHECK(slurp(fs::path(dir) / "single.csv") == before);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string dir = scratch("determinism");
  const std::vector<std::string> args = {"pair", "--cutoff", "5", "--convergence-step", "1", "--convergence-tol",
                                         "1", "--omega1", "1.25", "--delta", "0.5", "--output", dir, "--workers", "2"};
  REQUIRE(cli(args).status == kExitOk);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) first[e.path().string()] = slurp(e.path());
  REQUIRE(cli(args).status == kExitOk);
  for (const auto& [path, text] : first) CHECK(slurp(path) == text);
  CHECK(first.count((fs::path(dir) / "phase.csv").string()) == 1);
  const auto phase = lines(first[(fs::path(dir) / "phase.csv").string()]);
  CHECK(phase[0] == "phi,P");
  CHECK(phase.size() == 1 + 1024);
}

TEST_CASE("uncoupled pair records a flat floor") {
  const std::string dir = scratch("flat");
  REQUIRE(cli({"pair", "--j", "0", "--cutoff", "6", "--gate", "false", "--output", dir}).status == kExitOk);
  CHECK(meta(dir)["flatness_floor"].get<double>() <= 1e-8);
}

TEST_CASE("detuning sweep has the default resolution") {
  const std::string dir = scratch("fig3");
  REQUIRE(cli({"fig3", "--cutoff", "4", "--gate", "false", "--ratio-points", "2", "--output", dir}).status ==
          kExitOk);
  const auto rows = lines(slurp(fs::path(dir) / "S_vs_delta.csv"));
  CHECK(rows.size() == 18);
  CHECK(rows[0].rfind("Delta,S,", 0) == 0);
  CHECK(fs::exists(fs::path(dir) / "fig3a_phase.csv"));
  CHECK(fs::exists(fs::path(dir) / "S_vs_delta_phase" / "point_16.csv"));
  CHECK(lines(slurp(fs::path(dir) / "S_vs_ratio.csv")).size() == 3);
}

TEST_CASE("unconverged points give status 2") {
  const std::string dir = scratch("deep");
  const Run r = cli({"single", "--gamma-ratio", "9", "--cutoff", "8", "--output", dir});
  CHECK(r.status == kExitFailure);
  const auto rows = lines(slurp(fs::path(dir) / "single.csv"));
  CHECK(rows[1].back() == '0');
  CHECK(meta(dir)["exit_status"] == 2);
}

TEST_CASE("validation model refuses to skip the gate") {
  CHECK(cli({"pair", "--model", "validation", "--gate", "false", "--output", scratch("nogate")}).status ==
        kExitUsage);
}

TEST_CASE("wigner subcommand with a spin projection") {
  const std::string dir = scratch("wigner");
  // spin up (sigma_z = +1) leaves a negative phonon Wigner function, spin down does not
  REQUIRE(cli({"wigner", "--projection", "z+", "--cutoff", "10", "--grid-points", "31", "--output", dir}).status ==
          kExitOk);
  auto m = meta(dir);
  CHECK(m["wigner"]["projection"] == "z+");
  CHECK(m["wigner"]["min"].get<double>() < -1e-3);
  CHECK(lines(slurp(fs::path(dir) / "wigner.csv")).size() == 1 + 31 * 31);
  REQUIRE(cli({"wigner", "--projection", "z-", "--cutoff", "10", "--grid-points", "31", "--output", dir}).status ==
          kExitOk);
  m = meta(dir);
  CHECK(m["wigner"]["projection"] == "z-");
  CHECK(m["wigner"]["min"].get<double>() > -1e-8);
  CHECK(cli({"wigner", "--ion", "2", "--output", dir}).status == kExitUsage);
}

TEST_CASE("lab calculator output") {
  const std::string dir = scratch("lab");
  REQUIRE(cli({"lab", "--omega-d", "2pi*1.8MHz", "--cooling-source", "quoted", "--output", dir}).status == kExitOk);
  const auto j = nlohmann::json::parse(slurp(fs::path(dir) / "lab.json"));
  CHECK(j["gamma_over_2pi_Hz"].get<double>() == doctest::Approx(16.7e3).epsilon(0.01));
  CHECK(j["cooling_source"] == "quoted");
  CHECK(j["cooling_discrepancy_flag"] == true);
  CHECK(j["ratios"]["omega_over_gamma"].get<double>() == doctest::Approx(500).epsilon(0.02));
}

TEST_CASE("output directory from the environment") {
  const std::string dir = scratch("env");
  setenv("IONSYNC_OUTPUT", dir.c_str(), 1);
  const RunConfig c = make_config("lab", {}, {}, std::nullopt, std::nullopt);
  unsetenv("IONSYNC_OUTPUT");
  CHECK(c.output == dir);
  CHECK(make_config("lab", {}, {}, std::nullopt, std::nullopt).output == "ionsync-out");
}
