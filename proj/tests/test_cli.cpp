#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wdecor/csv_io.hpp"

namespace fs = std::filesystem;

namespace {

const char* kEcb = R"({
  "process": {"kind": "bandit", "arm_means": [0.3, 0.3], "noise": {"kind": "uniform"}, "horizon": 200},
  "policy": {"kind": "ECB", "epsilon": 0.1},
  "targets": [{"label": "avg", "v": [0.5, 0.5]}, {"label": "b1", "v": [1, 0]}],
  "levels": [0.9],
  "lambda": {"rule": "percentile", "pilot_runs": 40},
  "trials": 30,
  "seed": 17,
  "output_dir": "from_config"
})";

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("wdecor_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI inside `dir`; stdout and stderr land in dir/out.txt.
int run(const fs::path& dir, const std::string& args, const std::string& env = "unset OUTPUT_DIR;") {
  const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" WDECOR_CLI_PATH "' " + args + " > out.txt 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes trials, summary and run metadata") {
  TempDir tmp;
  write(tmp.path / "ecb.json", kEcb);
  REQUIRE(run(tmp.path, "simulate --config ecb.json --workers 2") == 0);
  const fs::path out = tmp.path / "from_config";
  REQUIRE(fs::exists(out / "trials.csv"));
  REQUIRE(fs::exists(out / "run.json"));
  const auto summary = csv(out / "summary.csv");
  REQUIRE(summary.size() > 1);
  CHECK(summary[0][0] == "estimator");
  bool found = false;
  for (const auto& row : summary) {
    if (row[1] == "W_DECORR" && row[2] == "avg" && row[3] == "0.9" && row[4] == "two_sided") {
      found = true;
      const double coverage = std::stod(row[5]);
      CHECK(coverage >= 0.0);
      CHECK(coverage <= 1.0);
      CHECK(row[6] == "30");
    }
  }
  CHECK(found);
  CHECK(csv(out / "trials.csv").size() == 1 + 30 * 3 * 2 * 3);
  const auto meta = nlohmann::json::parse(read(out / "run.json"));
  CHECK(meta["seed"] == 17);
  CHECK(meta["trials"] == 30);
  CHECK(meta["lambda"].get<double>() >= 1.0);
  CHECK(meta["config"]["process"]["horizon"] == 200);
}

TEST_CASE("same config and seed give byte-identical output") {
  TempDir tmp;
  write(tmp.path / "ecb.json", kEcb);
  REQUIRE(run(tmp.path, "simulate --config ecb.json --output a --workers 1") == 0);
  REQUIRE(run(tmp.path, "simulate --config ecb.json --output b --workers 3") == 0);
  CHECK(read(tmp.path / "a" / "trials.csv") == read(tmp.path / "b" / "trials.csv"));
  CHECK(read(tmp.path / "a" / "summary.csv") == read(tmp.path / "b" / "summary.csv"));
  REQUIRE(run(tmp.path, "simulate --config ecb.json --output c --seed 18") == 0);
  CHECK(read(tmp.path / "a" / "trials.csv") != read(tmp.path / "c" / "trials.csv"));
  CHECK(nlohmann::json::parse(read(tmp.path / "c" / "run.json"))["seed"] == 18);
}

TEST_CASE("output directory precedence") {
  TempDir tmp;
  write(tmp.path / "ecb.json", kEcb);
  REQUIRE(run(tmp.path, "simulate --config ecb.json", "OUTPUT_DIR=env_dir") == 0);
  CHECK(fs::exists(tmp.path / "env_dir" / "trials.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "from_config"));
  REQUIRE(run(tmp.path, "simulate --config ecb.json --output flag_dir", "OUTPUT_DIR=env_dir2") == 0);
  CHECK(fs::exists(tmp.path / "flag_dir" / "trials.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "env_dir2"));
}

TEST_CASE("configuration errors exit with code 2") {
  TempDir tmp;
  std::string text = kEcb;
  text.erase(text.find("\"trials\": 30,"), std::string("\"trials\": 30,").size());
  write(tmp.path / "bad.json", text);
  CHECK(run(tmp.path, "simulate --config bad.json") == 2);
  CHECK(read(tmp.path / "out.txt").find("key 'trials'") != std::string::npos);
  write(tmp.path / "broken.json", "{\n \"trials\": }");
  CHECK(run(tmp.path, "simulate --config broken.json") == 2);
  CHECK(read(tmp.path / "out.txt").find("line 2") != std::string::npos);
  CHECK(run(tmp.path, "simulate --config missing.json") == 2);
  CHECK(run(tmp.path, "frobnicate") == 2);
  CHECK(run(tmp.path, "") == 2);
  CHECK(run(tmp.path, "--version") == 0);
}

TEST_CASE("tune-lambda") {
  TempDir tmp;
  std::string rr = kEcb;
  rr.replace(rr.find("\"ECB\", \"epsilon\": 0.1"), std::string("\"ECB\", \"epsilon\": 0.1").size(), "\"RR\"");
  rr.replace(rr.find("\"horizon\": 200"), std::string("\"horizon\": 200").size(), "\"horizon\": 1000");
  write(tmp.path / "rr.json", rr);
  REQUIRE(run(tmp.path, "tune-lambda --config rr.json --output rr") == 0);
  const auto doc = nlohmann::json::parse(read(tmp.path / "rr" / "lambda.json"));
  CHECK(doc["rule"] == "percentile");
  CHECK(doc["lambda"] == 500.0);
  for (const char* q : {"q01", "q05", "q25", "q50"}) CHECK(doc["pilot_quantiles"][q] == 500.0);

  write(tmp.path / "ecb.json", kEcb);
  REQUIRE(run(tmp.path, "tune-lambda --config ecb.json --output ecb") == 0);
  const auto e = nlohmann::json::parse(read(tmp.path / "ecb" / "lambda.json"));
  CHECK(e["pilot_runs"] == 40);
  CHECK(e["pilot_quantiles"]["q01"].get<double>() <= e["pilot_quantiles"]["q05"].get<double>());
  CHECK(e["pilot_quantiles"]["q05"].get<double>() <= e["pilot_quantiles"]["q50"].get<double>());
  CHECK(e["lambda"] == e["pilot_quantiles"]["q05"]);

  std::string fixed = kEcb;
  fixed.replace(fixed.find("\"rule\": \"percentile\", \"pilot_runs\": 40"),
                std::string("\"rule\": \"percentile\", \"pilot_runs\": 40").size(), "\"rule\": \"fixed\", \"value\": 7.5");
  write(tmp.path / "fixed.json", fixed);
  REQUIRE(run(tmp.path, "tune-lambda --config fixed.json --output fixed") == 0);
  const auto f = nlohmann::json::parse(read(tmp.path / "fixed" / "lambda.json"));
  CHECK(f["lambda"] == 7.5);
  CHECK(f["pilot_quantiles"].is_null());
}

TEST_CASE("report reproduces the summary") {
  TempDir tmp;
  write(tmp.path / "ecb.json", kEcb);
  REQUIRE(run(tmp.path, "simulate --config ecb.json --output sim") == 0);
  REQUIRE(run(tmp.path, "report --trials sim/trials.csv --output rep") == 0);
  const auto a = csv(tmp.path / "sim" / "summary.csv");
  const auto b = csv(tmp.path / "rep" / "summary.csv");
  REQUIRE(a.size() == b.size());
  CHECK(a[0] == b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) {
    REQUIRE(a[i].size() == b[i].size());
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (j < 5) {
        CHECK(a[i][j] == b[i][j]);
        continue;
      }
      const double x = std::stod(a[i][j]), y = std::stod(b[i][j]);
      if (std::isnan(x)) {
        CHECK(std::isnan(y));
      } else {
        CHECK(std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x)));
      }
    }
  }
  fs::remove(tmp.path / "sim" / "run.json");
  CHECK(run(tmp.path, "report --trials sim/trials.csv") == 2);
}

}  // TEST_SUITE
