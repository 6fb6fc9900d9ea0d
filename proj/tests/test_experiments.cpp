#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "heatlab/experiments.hpp"
#include "heatlab/io.hpp"

using namespace heatlab;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& root) {
  const std::string cmd =
      "HEATLAB_OUTPUT_ROOT='" + root + "' '" + std::string(HEATLAB_CLI) + "' " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("heatlab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string write_config(const fs::path& dir, const nlohmann::json& j) {
  const auto p = dir / "config.json";
  write_json(p.string(), j);
  return p.string();
}

nlohmann::json control_config() {
  return read_json(std::string(HEATLAB_CONFIG_DIR) + "/control.json");
}

}  // namespace

TEST_CASE("config validation diagnostics") {
  auto j = read_json(std::string(HEATLAB_CONFIG_DIR) + "/spectral-sweep.json");
  CHECK_NOTHROW(parse_config(j));

  auto bad = j;
  bad["params"]["lambda_list"] = nlohmann::json::array();
  CHECK_THROWS_WITH_AS(parse_config(bad), "params.lambda_list: must be nonempty", ConfigError);

  bad = j;
  bad["set"]["gamma"] = 1.5;
  CHECK_THROWS_WITH_AS(parse_config(bad), "set.gamma: γ must lie in (0,1)", ConfigError);

  bad = j;
  bad["params"]["foo"] = 1;
  CHECK_THROWS_WITH_AS(parse_config(bad), "params.foo: unknown field", ConfigError);

  bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  auto c = control_config();
  c["params"]["zeta"] = 2.0;
  CHECK_THROWS_WITH_AS(parse_config(c), "params.zeta: Lebeau-Robbiano exponent must satisfy ζ<2",
                       ConfigError);

  c = control_config();
  c["set"]["tau"] = 0.5;
  const auto cfg = parse_config(c);
  bool warned = false;
  for (const auto& w : cfg.warnings)
    warned = warned || w.find("strict inequality τ < β1/4 required") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("cli partition run") {
  const auto root = scratch("partition");
  const auto r = run_cli("run '" + std::string(HEATLAB_CONFIG_DIR) + "/partition.json'", root.string());
  CHECK(r.code == 0);
  const auto csv = slurp(root / "out/partition/partition.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,x_n,ratio");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() >= 4);
  CHECK(rows[2].find(format_double(2.0)) != std::string::npos);
  CHECK(rows[3].find(format_double(2.5)) != std::string::npos);
  CHECK(fs::exists(root / "out/partition/metadata.json"));
  CHECK(fs::exists(root / "out/partition/summary.txt"));

  const auto rep = run_cli("report '" + (root / "out/partition").string() + "'", root.string());
  CHECK(rep.code == 0);
  CHECK_FALSE(rep.out.empty());
}

TEST_CASE("cli exit codes") {
  const auto root = scratch("codes");
  auto j = read_json(std::string(HEATLAB_CONFIG_DIR) + "/spectral-sweep.json");
  j["params"]["lambda_list"] = nlohmann::json::array();
  const auto r = run_cli("run '" + write_config(root, j) + "'", root.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("lambda_list: must be nonempty") != std::string::npos);

  const auto v = run_cli("validate '" + write_config(root, j) + "'", root.string());
  CHECK(v.code == 2);

  auto c = control_config();
  c["set"]["gamma"] = 1.5;
  const auto g = run_cli("validate '" + write_config(root, c) + "'", root.string());
  CHECK(g.code == 2);
  CHECK(g.out.find("γ must lie in (0,1)") != std::string::npos);

  c = control_config();
  c["params"]["zeta"] = 2;
  const auto z = run_cli("validate '" + write_config(root, c) + "'", root.string());
  CHECK(z.code == 2);
  CHECK(z.out.find("ζ<2") != std::string::npos);

  c = control_config();
  c["set"]["tau"] = 0.5;
  const auto w = run_cli("validate '" + write_config(root, c) + "'", root.string());
  CHECK(w.code == 0);
  CHECK(w.out.find("WARNING set.tau: strict inequality τ < β1/4 required") != std::string::npos);

  const auto missing = run_cli("run '" + (root / "nope.json").string() + "'", root.string());
  CHECK(missing.code == 2);

  // an empty control set leaves the Gramian singular: numerical flag
  c = control_config();
  c["set"] = {{"type", "empty"}};
  const auto e = run_cli("run '" + write_config(root, c) + "'", root.string());
  CHECK(e.code == 1);
}

TEST_CASE("cli determinism") {
  for (const char* name : {"control", "smallness", "lift"}) {
    const auto a = scratch(std::string("det_a_") + name);
    const auto b = scratch(std::string("det_b_") + name);
    const std::string cfg = std::string(HEATLAB_CONFIG_DIR) + "/" + name + ".json";
    const auto ra = run_cli("run '" + cfg + "'", a.string());
    const auto rb = run_cli("run '" + cfg + "'", b.string());
    CHECK(ra.code == 0);
    CHECK(ra.out == rb.out);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), a);
      REQUIRE(fs::exists(b / rel));
      CHECK(slurp(e.path()) == slurp(b / rel));
      ++files;
    }
    CHECK(files >= 3);
  }
}

TEST_CASE("every shipped config runs") {
  for (const char* name : {"thickness", "eigen", "spectral-sweep", "costlaw"}) {
    const auto root = scratch(std::string("ship_") + name);
    const auto r = run_cli("run '" + std::string(HEATLAB_CONFIG_DIR) + "/" + name + ".json'", root.string());
    INFO(name << "\n" << r.out);
    CHECK(r.code == 0);
  }
}
