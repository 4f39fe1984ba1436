#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdecor/config.hpp"
#include "wdecor/csv_io.hpp"
#include "wdecor/error.hpp"
#include "wdecor/mc_harness.hpp"
#include "wdecor/tuning.hpp"

namespace fs = std::filesystem;
using wdecor::Error;
using wdecor::ErrorCode;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::string config_path;
  std::optional<unsigned> workers;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
};

wdecor::RunConfig load(const Overrides& o) {
  wdecor::RunConfig cfg = wdecor::load_run_config(o.config_path);
  if (o.seed) cfg.experiment.base_seed = *o.seed;
  if (o.workers) cfg.experiment.workers = *o.workers;
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (o.output) cfg.output_dir = *o.output;
  return cfg;
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create output directory " + dir + ": " + ec.message());
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

int cmd_simulate(const Overrides& o) {
  const wdecor::RunConfig cfg = load(o);
  const fs::path dir = prepare_dir(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();

  const wdecor::MCResult result = wdecor::run_experiment(cfg.experiment, [](std::size_t done, std::size_t total) {
    const std::size_t stride = total < 100 ? 1 : total / 100;
    if (done % stride != 0 && done != total) return;
    std::fprintf(stderr, "\rtrial %zu/%zu", done, total);
    if (done == total) std::fputc('\n', stderr);
  });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto rows = wdecor::flatten(result, cfg.experiment);
  {
    auto out = open_out(dir / "trials.csv");
    wdecor::write_trials_csv(out, rows);
  }
  {
    auto out = open_out(dir / "summary.csv");
    wdecor::write_summary_csv(out, result.summary);
  }

  nlohmann::ordered_json run;
  run["version"] = WDECOR_VERSION;
  run["seed"] = cfg.experiment.base_seed;
  run["lambda"] = result.lambda_used;
  run["trials"] = cfg.experiment.trials;
  run["failed_trials"] = result.failed_trials;
  run["wall_time_seconds"] = wall;
  run["config"] = wdecor::to_json(cfg);
  write_json(dir / "run.json", run);

  std::printf("wrote %s (%zu rows), summary.csv, run.json; lambda = %s; failed trials = %zu\n",
              (dir / "trials.csv").string().c_str(), rows.size(),
              wdecor::format_double(result.lambda_used).c_str(), result.failed_trials);
  return 0;
}

int cmd_tune_lambda(const Overrides& o) {
  const wdecor::RunConfig cfg = load(o);
  const fs::path dir = prepare_dir(cfg.output_dir);
  const auto& e = cfg.experiment;
  const wdecor::LambdaSelection sel =
      wdecor::select_lambda_detailed(e.lambda_rule, e.process, e.base_seed, e.workers);

  nlohmann::ordered_json doc;
  doc["rule"] = std::string(wdecor::to_string(e.lambda_rule.kind));
  doc["lambda"] = sel.lambda;
  doc["seed"] = e.base_seed;
  nlohmann::ordered_json quantiles = nullptr;
  std::printf("rule      %s\nlambda    %s\n", std::string(wdecor::to_string(e.lambda_rule.kind)).c_str(),
              wdecor::format_double(sel.lambda).c_str());
  if (!sel.pilot_lambda_mins.empty()) {
    quantiles = nlohmann::ordered_json::object();
    for (const auto& [name, q] : {std::pair{"q01", 0.01}, {"q05", 0.05}, {"q25", 0.25}, {"q50", 0.50}}) {
      const double value = wdecor::lower_quantile(sel.pilot_lambda_mins, q);
      quantiles[name] = value;
      std::printf("%-9s %s\n", name, wdecor::format_double(value).c_str());
    }
    doc["pilot_runs"] = sel.pilot_lambda_mins.size();
  }
  doc["pilot_quantiles"] = quantiles;
  write_json(dir / "lambda.json", doc);
  return 0;
}

int cmd_report(const std::string& trials_path, const std::optional<std::string>& output) {
  const fs::path trials(trials_path);
  const fs::path run_path = trials.parent_path() / "run.json";
  std::ifstream run_in(run_path);
  if (!run_in) throw Error(ErrorCode::ConfigError, "cannot read " + run_path.string() + " next to trials.csv");
  nlohmann::json run;
  try {
    run = nlohmann::json::parse(run_in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ConfigError, run_path.string() + ": " + ex.what());
  }
  if (!run.contains("config")) throw Error(ErrorCode::ConfigError, "key 'config': missing in run.json");
  const wdecor::RunConfig cfg = wdecor::parse_run_config(run.at("config").dump());

  std::map<std::string, double> truth;
  const Eigen::VectorXd beta = wdecor::true_beta(cfg.experiment.process);
  for (const auto& t : cfg.experiment.targets) truth[t.label] = t.direction.dot(beta);

  std::ifstream in(trials);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + trials.string());
  const auto rows = wdecor::read_trials_csv(in);
  const auto summary = wdecor::summarize(rows, truth);

  const fs::path dir = prepare_dir(output ? *output : trials.parent_path().string());
  auto out = open_out(dir / "summary.csv");
  wdecor::write_summary_csv(out, summary);
  std::printf("wrote %s (%zu rows)\n", (dir / "summary.csv").string().c_str(), summary.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decorrelated confidence intervals for adaptively collected linear-model data"};
  app.set_version_flag("--version", std::string(WDECOR_VERSION));
  app.require_subcommand(1);

  Overrides sim, tune;
  std::string report_trials;
  std::optional<std::string> report_output;

  const auto add_common = [](CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--workers", o.workers, "Cap on worker threads (0 = hardware concurrency)");
    cmd->add_option("--output", o.output, "Output directory (overrides OUTPUT_DIR and the config)");
    cmd->add_option("--seed", o.seed, "Base seed (overrides the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo experiment; writes trials.csv, summary.csv, run.json");
  add_common(simulate, sim);
  auto* tune_lambda = app.add_subcommand("tune-lambda", "Select lambda from pilot runs; writes lambda.json");
  add_common(tune_lambda, tune);
  auto* report = app.add_subcommand("report", "Re-aggregate an existing trials.csv into summary.csv");
  report->add_option("--trials", report_trials, "trials.csv written by simulate (run.json must sit beside it)")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--output", report_output, "Directory for summary.csv (default: next to trials.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*tune_lambda) return cmd_tune_lambda(tune);
    return cmd_report(report_trials, report_output);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
