#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hollow/cli.hpp"
#include "hollow/error.hpp"

using namespace hollow;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HOLLOW_SOURCE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hollowlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::path("cli_out") / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::istringstream is(slurp(p));
  std::vector<std::string> v;
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') v.push_back(line);
  return v;
}

std::string cfg(const std::string& name) { return (kSource / "tools" / "configs" / name).string(); }

}  // namespace

TEST_CASE("config text") {
  RunConfig c;
  apply_config_text(c, "# comment\nmap = radial\n\ndimension = 3  \nk_max=12\norbit_start = 1, 2, 3\n");
  CHECK(c.dimension == 3);
  CHECK(c.k_max == 12);
  CHECK(c.orbit_start == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(apply_config_text(c, "nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "k_max = many\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "k_max 3\n"), ConfigError);
  try {
    apply_config_text(c, "n0 = x\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n0") != std::string::npos);
  }
  RunConfig bad;
  bad.n0 = 1;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = RunConfig{};
  bad.r_prime = 4.0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  CHECK_NOTHROW(validate_config(RunConfig{}));
  // The echo lists every key and round trips.
  RunConfig d;
  d.epsilon = 0.3;
  d.grid_extents = {11, 13};
  std::string text;
  for (const auto& [k, v] : config_echo(d)) text += k + " = " + v + "\n";
  RunConfig e;
  apply_config_text(e, text);
  CHECK(config_echo(e) == config_echo(d));
}

TEST_CASE("exit codes") {
  CHECK(run({"--set", "n0=1", "--out", fresh("x").string(), "profile"}).code == kExitConfig);
  const auto r = run({"--set", "r_prime=4", "--out", fresh("x").string(), "profile"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("r_prime") != std::string::npos);
  CHECK(run({"--config", "missing.cfg", "profile"}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"--set", "nokey", "profile"}).code == kExitConfig);
  const auto b = run({"--set", "cell_budget=1000", "--set", "grid_extents=41,41", "--out", fresh("b").string(), "topology"});
  CHECK(b.code == kExitBudget);
  CHECK(b.err.find("budget") != std::string::npos);
  CHECK(run({"--version"}).code == kExitOk);
  CHECK(run({"--help"}).code == kExitOk);
  // Orbit starting point of the wrong dimension.
  CHECK(run({"--set", "orbit_start=1,2,3", "--out", fresh("x").string(), "orbit"}).code != kExitOk);
}

TEST_CASE("profile output") {
  const fs::path out = fresh("profile");
  REQUIRE(run({"--config", cfg("profile.cfg"), "--out", out.string(), "profile"}).code == kExitOk);
  const auto prof = data_lines(out / "profile.txt");
  REQUIRE(prof.size() > 3);
  CHECK(prof[0] == "n log_r_n delta_n");
  CHECK(prof[1].rfind("2 1.6094379124341", 0) == 0);
  CHECK(prof[2].rfind("3 3.218875824868", 0) == 0);
  const auto c4 = data_lines(out / "spacing_growth.csv");
  CHECK(c4[0] == "n,log_r_n,delta_n,n_delta_n,increasing");
  CHECK(c4[1].rfind("2,1.6094379124341", 0) == 0);
  CHECK(data_lines(out / "liminf.csv").size() > 10);
  CHECK(slurp(out / "profile.txt").rfind("#", 0) == 0);
}

TEST_CASE("every command writes its files") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"orbit", {"orbit.csv", "orbit.json"}},
      {"classify", {"classification.csv", "classification.json", "classification.pgm"}},
      {"topology", {"topology.json", "hull.mask", "hull.mask.json", "mask_slice.pgm", "hull_slice.pgm", "labels_slice.pgm"}},
      {"certify", {"certificate.json"}},
      {"rings", {"rings.json"}}};
  for (const auto& [cmd, files] : cases) {
    CAPTURE(cmd);
    const fs::path out = fresh("cmd_" + cmd);
    const auto r = run({"--out", out.string(), "--set", "grid_extents=21,21", cmd});
    CHECK(r.code == kExitOk);
    CHECK(r.err.empty());
    for (const auto& f : files) CHECK(fs::exists(out / f));
    for (const auto& f : files)
      if (f.ends_with(".json") && f != "hull.mask.json") {
        const auto j = nlohmann::json::parse(slurp(out / f));
        CHECK(j["tool"] == version_string());
        CHECK(j["command"] == cmd);
        CHECK(j.contains("config"));
      }
  }
}

TEST_CASE("shipped configs reproduce the headline results") {
  {
    const fs::path out = fresh("certify");
    REQUIRE(run({"--config", cfg("certify.cfg"), "--out", out.string(), "certify"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "certificate.json"));
    CHECK(j["hypothesis_ok"] == true);
    CHECK(j["ell"].get<int>() <= 4);
    CHECK(j["k2"] == 11);
    CHECK(j["failures"].empty());
  }
  {
    const fs::path out = fresh("shell");
    REQUIRE(run({"--config", cfg("shell_topology.cfg"), "--out", out.string(), "topology"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "topology.json"));
    CHECK(j["verdict"] == "hollow");
    CHECK(j["grid"]["extents"] == nlohmann::json::array({33, 33, 33}));
  }
  {
    const fs::path out = fresh("web");
    REQUIRE(run({"--config", cfg("web.cfg"), "--out", out.string(), "topology"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "topology.json"));
    CHECK(j["spiders_web"]["verdict"] == "ConsistentWithSpidersWeb");
    CHECK(j["spiders_web"]["n_levels"] == 3);
  }
  {
    const fs::path out = fresh("rings");
    REQUIRE(run({"--config", cfg("rings.cfg"), "--out", out.string(), "rings"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "rings.json"));
    CHECK(j["containment"]["violations"].empty());
    CHECK(j["containment"]["N0"] == 2);
    for (const auto& s : j["wandering"]["steps"]) CHECK(s["passed"] == true);
  }
  {
    const fs::path out = fresh("entire");
    REQUIRE(run({"--config", cfg("entire_rings.cfg"), "--out", out.string(), "rings"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "rings.json"));
    CHECK(j["containment"]["preconditions_ok"] == true);
    CHECK(j["containment"]["violations"].empty());
    CHECK(j["containment"]["samples_checked"] == 500);
    CHECK(j["wandering"]["skipped"].get<std::string>().rfind("box too small", 0) != std::string::npos);
  }
}

TEST_CASE("outputs do not depend on the thread count") {
  for (const std::string cmd : {"profile", "orbit", "classify", "topology", "certify", "rings"}) {
    CAPTURE(cmd);
    const fs::path a = fresh("det1_" + cmd), b = fresh("det4_" + cmd);
    REQUIRE(run({"--seed", "7", "--threads", "1", "--out", a.string(), cmd}).code == kExitOk);
    REQUIRE(run({"--seed", "7", "--threads", "4", "--out", b.string(), cmd}).code == kExitOk);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++n;
      CAPTURE(e.path().filename().string());
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
    CHECK(n > 0);
  }
}
