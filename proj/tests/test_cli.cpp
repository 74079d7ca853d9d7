#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "maser/io.hpp"
#include "maser/sync.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(MASER_CLI_PATH) + " " + args;
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "maser_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// stderr carries one JSON document per line (run metadata first, then the
// error, if any); the last line is the one under test
std::string last_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return last;
}

json params_json(double n_h, double lambda = 0.1) {
  return json{{"n_deg", 2},          {"omega1", 1.0},  {"omega_deg", 3.0},
              {"drive_freq", 2.0},   {"gamma_h", 0.05}, {"gamma_c", 0.2},
              {"n_h", n_h},          {"n_c", 0.5},
              {"drive_amps", {lambda, lambda}}};
}

}  // namespace

TEST_CASE("config errors exit with code 2 and JSON on stderr") {
  fs::path dir = work_dir();
  write_file(dir / "broken.json", "{ not json");
  fs::path err = dir / "stderr.txt";
  CHECK(run("sync --config " + (dir / "broken.json").string() + " --out " +
            (dir / "o.json").string() + " 2> " + err.string()) == 2);
  json e = json::parse(last_line(read_file(err)));
  CHECK(e.contains("error"));
  CHECK(e["error"]["type"] == "config");

  write_file(dir / "badparams.json", json{{"schema_version", 1},
                                          {"params", params_json(-1.0)}}.dump());
  CHECK(run("sync --config " + (dir / "badparams.json").string() + " 2> " +
            err.string()) == 2);

  write_file(dir / "badschema.json", json{{"schema_version", 99},
                                          {"params", params_json(0.2)}}.dump());
  CHECK(run("sync --config " + (dir / "badschema.json").string() + " 2> " +
            err.string()) == 2);

  CHECK(run("no-such-command 2> " + err.string()) == 2);
}

TEST_CASE("sync reports the cooperative branch for a refrigerator") {
  fs::path dir = work_dir();
  write_file(dir / "fridge.json",
             json{{"schema_version", 1}, {"params", params_json(0.2)}, {"starts", 32}}.dump());
  fs::path out = dir / "sync.json";
  REQUIRE(run("sync --config " + (dir / "fridge.json").string() + " --out " + out.string() +
              " 2> /dev/null") == 0);
  json doc = json::parse(read_file(out));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["result"]["s_max"].get<double>() > 0.0);
  // the optimizer lands on the l1-saturating phases; check against the measure
  maser::SystemParams p = maser::params_from_json(doc["params"]);
  maser::SyncResult closed = maser::closed_form_smax_n2(p);
  CHECK(closed.branch == maser::SyncBranch::RefrigeratorCooperative);
  CHECK(doc["result"]["s_max"].get<double>() ==
        doctest::Approx(closed.s_max).epsilon(1e-8));

  SUBCASE("provenance echo round-trips the parameters") {
    maser::SystemParams echoed = maser::params_from_json(doc["params"]);
    CHECK(echoed.n_h == 0.2);
    CHECK(echoed.n_c == 0.5);
    CHECK(echoed.drive_amps == std::vector<double>{0.1, 0.1});
    CHECK(echoed.detuning == 0.0);
  }
}

TEST_CASE("reruns with the same config are byte-identical") {
  fs::path dir = work_dir();
  write_file(dir / "cfg.json",
             json{{"schema_version", 1}, {"params", params_json(5.0)}, {"seed", 9},
                  {"starts", 24}}.dump());
  fs::path a = dir / "a.json", b = dir / "b.json";
  REQUIRE(run("sync --config " + (dir / "cfg.json").string() + " --out " + a.string() +
              " 2> /dev/null") == 0);
  REQUIRE(run("sync --config " + (dir / "cfg.json").string() + " --out " + b.string() +
              " 2> /dev/null") == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(!read_file(a).empty());
}

TEST_CASE("steady-state CSV output carries a provenance header") {
  fs::path dir = work_dir();
  write_file(dir / "cfg.json", json{{"schema_version", 1}, {"params", params_json(0.2)}}.dump());
  fs::path out = dir / "rho.csv";
  REQUIRE(run("steady-state --config " + (dir / "cfg.json").string() + " --out " +
              out.string() + " 2> /dev/null") == 0);
  std::string text = read_file(out);
  REQUIRE(text.rfind("# params: ", 0) == 0);
  std::string header = text.substr(10, text.find('\n') - 10);
  json echo = json::parse(header);
  CHECK(echo["command"] == "steady-state");
  CHECK(echo["params"]["n_h"] == 0.2);
  CHECK(text.find("row,col,re,im") != std::string::npos);
}

TEST_CASE("phase-grid argmax matches the weak-dissipation optimum") {
  // k = gamma_h (1+n_h)/lambda = 0.05 * 2 / 5.0 = 0.02, so the two phases
  // should be out-of-phase well within one cell: |phi_21 - phi_31 - pi| < spacing
  fs::path dir = work_dir();
  write_file(dir / "cfg.json",
             json{{"schema_version", 1}, {"params", params_json(1.0, 5.0)}}.dump());
  fs::path out = dir / "grid.csv";
  REQUIRE(run("phase-grid --config " + (dir / "cfg.json").string() + " --resolution 32 --out " +
              out.string() + " 2> /dev/null") == 0);

  std::ifstream in(out);
  std::string line;
  std::getline(in, line);  // provenance
  std::getline(in, line);  // column header
  double best = -1.0, best_row = 0.0, best_col = 0.0;
  std::vector<double> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // corner label
    while (std::getline(ss, tok, ',')) cols.push_back(std::stod(tok));
  }
  REQUIRE(cols.size() == 32);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    double row_phase = std::stod(tok);
    for (std::size_t c = 0; std::getline(ss, tok, ','); ++c) {
      double v = std::stod(tok);
      if (v > best) {
        best = v;
        best_row = row_phase;
        best_col = cols.at(c);
      }
    }
  }
  double spacing = 2.0 * M_PI / 32.0;
  CHECK(maser::circular_distance(best_row - best_col, M_PI) < spacing);

  SUBCASE("resolution below the minimum is a config error") {
    CHECK(run("phase-grid --config " + (dir / "cfg.json").string() +
              " --resolution 4 --out " + out.string() + " 2> /dev/null") == 2);
  }
}

TEST_CASE("sweep-bath writes per-row results") {
  fs::path dir = work_dir();
  write_file(dir / "cfg.json",
             json{{"schema_version", 1},
                  {"params", params_json(0.5)},
                  {"values", {0.4, 1.0, 10.0}},
                  {"starts", 24},
                  {"threads", 2}}.dump());
  fs::path out = dir / "bath.csv";
  REQUIRE(run("sweep-bath --config " + (dir / "cfg.json").string() + " --out " + out.string() +
              " 2> /dev/null") == 0);
  std::string text = read_file(out);
  CHECK(text.find("ratio,n_h,s_max_numeric") != std::string::npos);
  CHECK(text.find("RefrigeratorCooperative") != std::string::npos);
  CHECK(text.find("EngineEntrainmentDominant") != std::string::npos);
}

TEST_CASE("validate subcommand passes on the default corpus") {
  fs::path dir = work_dir();
  fs::path out = dir / "validate.txt";
  REQUIRE(run("validate --seed 2024 > " + out.string() + " 2> /dev/null") == 0);
  std::string text = read_file(out);
  CHECK(text.find("[PASS]") != std::string::npos);
  CHECK(text.find("[FAIL]") == std::string::npos);
}
