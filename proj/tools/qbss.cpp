// qbss: experiment harness. One subcommand per study; every command writes
// tidy CSVs plus a JSON sidecar with the flags it ran with.

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbss/errors.hpp"
#include "qbss/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitGuard = 4;

struct Common {
  std::uint64_t seed = 0;
  std::uint64_t reps = 0;  // 0 keeps the command's default
  std::string out;
  unsigned threads = 1;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& common, bool with_timing) {
  cmd->add_option("--seed", common.seed, "Master seed")->capture_default_str();
  cmd->add_option("--reps", common.reps, "Replications (default depends on the command)");
  cmd->add_option("--out", common.out, "Output directory (default results/<command>)");
  cmd->add_option("--threads", common.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  if (with_timing) cmd->add_flag("--timing", common.timing, "Fill wall_time_ms (otherwise written as 0)");
}

fs::path out_dir(const Common& common, const std::string& command) {
  fs::path dir = common.out.empty() ? fs::path("results") / command : fs::path(common.out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_sidecar(const fs::path& dir, const std::string& command, json flags) {
  json doc;
  doc["command"] = command;
  doc["version"] = qbss::version();
  doc["flags"] = std::move(flags);
  auto out = open_out(dir / (command + ".json"));
  out << doc.dump(2) << '\n';
}

json common_json(const Common& c) {
  return {{"seed", c.seed}, {"reps", c.reps}, {"threads", c.threads}, {"timing", c.timing}};
}

std::vector<std::string> sparsity_names(const std::vector<qbss::Sparsity>& list) {
  std::vector<std::string> names;
  for (auto s : list) names.push_back(qbss::to_string(s));
  return names;
}

struct ScenarioFlags {
  std::vector<std::string> sparsity;
};

void add_scenario(CLI::App* cmd, qbss::ScenarioOptions& o, ScenarioFlags& flags) {
  cmd->add_option("--n", o.n, "Training observations")->capture_default_str();
  cmd->add_option("--n-test", o.n_test, "Test observations")->capture_default_str();
  cmd->add_option("--p", o.p, "Covariates")->capture_default_str();
  cmd->add_option("--s", o.s, "Active covariates")->capture_default_str();
  cmd->add_option("--rho-list", o.rho_list, "Autocorrelation grid")->delimiter(',')->capture_default_str();
  cmd->add_option("--snr-list", o.snr_list, "Signal-to-noise grid")->delimiter(',')->capture_default_str();
  cmd->add_option("--k", o.k, "Quantum nodes (odd)")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "Learning rate")->capture_default_str();
  cmd->add_option("--stop-constant", o.stop_constant, "C in the stopping rule m > C ln D")->capture_default_str();
  cmd->add_option("--sparsity", flags.sparsity, "strong and/or weak")
      ->delimiter(',')
      ->check(CLI::IsMember({"strong", "weak"}));
}

json scenario_json(const qbss::ScenarioOptions& o) {
  return {{"n", o.n},           {"n_test", o.n_test}, {"p", o.p},
          {"s", o.s},           {"rho_list", o.rho_list}, {"snr_list", o.snr_list},
          {"k", o.k},           {"lambda", o.lambda}, {"stop_constant", o.stop_constant},
          {"sparsity", sparsity_names(o.sparsity_list)}};
}

void finish_scenario(qbss::ScenarioOptions& o, const ScenarioFlags& flags, const Common& c) {
  if (!flags.sparsity.empty()) {
    o.sparsity_list.clear();
    for (const auto& s : flags.sparsity) o.sparsity_list.push_back(qbss::parse_sparsity(s));
  }
  if (c.reps > 0) o.reps = c.reps;
  o.seed = c.seed;
  o.threads = c.threads;
  o.timing = c.timing;
}

int exit_code(const qbss::Error& e) {
  switch (e.kind()) {
    case qbss::ErrorKind::InvalidArgument:
    case qbss::ErrorKind::DomainError:
    case qbss::ErrorKind::ConditionViolated:
      return kExitUsage;
    case qbss::ErrorKind::DimensionTooLarge:
    case qbss::ErrorKind::SubsetTooLarge:
      return kExitGuard;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum adaptive search for best subset selection: experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qbss::version()));

  // tune
  Common tune_common;
  qbss::TuneOptions tune;
  std::uint64_t tune_d = 32;
  auto* tune_cmd = app.add_subcommand("tune", "Accuracy rate over K and the learning-rate grid on uniform tables");
  add_common(tune_cmd, tune_common, false);
  tune_cmd->add_option("--k-list", tune.k_list, "Node counts")->delimiter(',')->capture_default_str();
  tune_cmd->add_option("--lambda-min", tune.lambda_min)->capture_default_str();
  tune_cmd->add_option("--lambda-max", tune.lambda_max)->capture_default_str();
  tune_cmd->add_option("--lambda-step", tune.lambda_step)->capture_default_str();
  tune_cmd->add_option("--d", tune_d, "Table size, a power of two")->capture_default_str();
  tune_cmd->add_option("--stop-constant", tune.stop_constant)->capture_default_str();

  // select
  Common select_common;
  qbss::ScenarioOptions select = qbss::select_defaults();
  ScenarioFlags select_flags;
  auto* select_cmd = app.add_subcommand("select", "QAS against Grover with the loss-table argmin and a random index as oracle");
  add_common(select_cmd, select_common, true);
  add_scenario(select_cmd, select, select_flags);

  // compare
  Common compare_common;
  qbss::ScenarioOptions compare = qbss::compare_defaults();
  ScenarioFlags compare_flags;
  auto* compare_cmd = app.add_subcommand("compare", "QAS against exhaustive BSS, forward stepwise and LASSO");
  add_common(compare_cmd, compare_common, true);
  add_scenario(compare_cmd, compare, compare_flags);

  // theory
  Common theory_common;
  qbss::TheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("theory", "Iteration scaling, update cost, descent chain, averaged success");
  add_common(theory_cmd, theory_common, false);
  theory_cmd->add_option("--episodes", theory.cost_episodes, "Episodes per update-cost cell")->capture_default_str();
  theory_cmd->add_option("--chain-reps", theory.chain_reps, "Descent-chain simulations")->capture_default_str();
  theory_cmd->add_option("--samples", theory.avg_samples, "Draws per averaged-success case")->capture_default_str();
  theory_cmd->add_option("--lambda", theory.lambda)->capture_default_str();
  theory_cmd->add_option("--stop-constant", theory.stop_constant)->capture_default_str();

  // run
  Common run_common;
  qbss::UserRunOptions run;
  std::string run_data;
  auto* run_cmd = app.add_subcommand("run", "One selection method on a user CSV");
  add_common(run_cmd, run_common, false);
  run_cmd->add_option("--data", run_data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--response", run.response, "Response column")->required();
  run_cmd->add_option("--drop", run.drop, "Columns to leave out")->delimiter(',');
  run_cmd->add_option("--split", run.split, "Training fraction")->capture_default_str();
  run_cmd->add_option("--method", run.method)->capture_default_str()->check(
      CLI::IsMember({"qas", "bss", "stepwise", "lasso"}));
  run_cmd->add_option("--lambda", run.lambda)->capture_default_str();
  run_cmd->add_option("--k", run.k)->capture_default_str();
  run_cmd->add_option("--stop-constant", run.stop_constant)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*tune_cmd) {
      if (tune_d < 2 || !std::has_single_bit(tune_d)) {
        std::cerr << "error: --d must be a power of two >= 2\n";
        return kExitUsage;
      }
      tune.p = std::countr_zero(tune_d);
      if (tune_common.reps > 0) tune.reps = tune_common.reps;
      tune.seed = tune_common.seed;
      tune.threads = tune_common.threads;
      const auto result = qbss::run_tune(tune);
      const fs::path dir = out_dir(tune_common, "tune");
      auto rows = open_out(dir / "tune.csv");
      qbss::write_tune_csv(rows, result.rows);
      auto summary = open_out(dir / "tune_accuracy.csv");
      qbss::write_tune_summary_csv(summary, result.summary);
      json flags = common_json(tune_common);
      flags["reps"] = tune.reps;
      flags["k_list"] = tune.k_list;
      flags["lambda_min"] = tune.lambda_min;
      flags["lambda_max"] = tune.lambda_max;
      flags["lambda_step"] = tune.lambda_step;
      flags["d"] = tune_d;
      flags["stop_constant"] = tune.stop_constant;
      write_sidecar(dir, "tune", flags);
      std::cout << "wrote " << result.rows.size() << " rows to " << (dir / "tune.csv").string() << '\n';
    } else if (*select_cmd || *compare_cmd) {
      const bool is_select = static_cast<bool>(*select_cmd);
      const std::string name = is_select ? "select" : "compare";
      Common& common = is_select ? select_common : compare_common;
      qbss::ScenarioOptions& options = is_select ? select : compare;
      finish_scenario(options, is_select ? select_flags : compare_flags, common);
      const auto rows = is_select ? qbss::run_select(options) : qbss::run_compare(options);
      const fs::path dir = out_dir(common, name);
      auto metrics = open_out(dir / "metrics.csv");
      qbss::write_metrics_csv(metrics, rows);
      if (!is_select) {
        auto sizes = open_out(dir / "sizes.csv");
        qbss::write_sizes_csv(sizes, qbss::size_histogram(rows));
      }
      json flags = common_json(common);
      flags["reps"] = options.reps;
      flags.update(scenario_json(options));
      flags["loss"] = "test_mse";
      flags["test_set"] = "independent draw of n_test rows per replication";
      if (!is_select) flags["stepwise_rule"] = "path model with the smallest test_mse";
      write_sidecar(dir, name, flags);
      std::cout << "wrote " << rows.size() << " rows to " << (dir / "metrics.csv").string() << '\n';
    } else if (*theory_cmd) {
      if (theory_common.reps > 0) theory.scaling_runs = theory_common.reps;
      theory.seed = theory_common.seed;
      theory.threads = theory_common.threads;
      const auto rows = qbss::run_theory(theory);
      const fs::path dir = out_dir(theory_common, "theory");
      auto out = open_out(dir / "theory.csv");
      qbss::write_theory_csv(out, rows);
      json flags = common_json(theory_common);
      flags["reps"] = theory.scaling_runs;
      flags["episodes"] = theory.cost_episodes;
      flags["chain_reps"] = theory.chain_reps;
      flags["samples"] = theory.avg_samples;
      flags["lambda"] = theory.lambda;
      flags["stop_constant"] = theory.stop_constant;
      write_sidecar(dir, "theory", flags);
      std::cout << "wrote " << rows.size() << " rows to " << (dir / "theory.csv").string() << '\n';
    } else if (*run_cmd) {
      run.data = run_data;
      run.seed = run_common.seed;
      run.threads = run_common.threads;
      const auto result = qbss::run_user(run);
      const fs::path dir = out_dir(run_common, "run");
      auto out = open_out(dir / "run.csv");
      qbss::write_run_csv(out, result, run.seed);
      json flags = common_json(run_common);
      flags["data"] = run_data;
      flags["response"] = run.response;
      flags["drop"] = run.drop;
      flags["split"] = run.split;
      flags["method"] = run.method;
      flags["lambda"] = run.lambda;
      flags["k"] = run.k;
      flags["stop_constant"] = run.stop_constant;
      write_sidecar(dir, "run", flags);

      std::cout << "method: " << result.method << '\n' << "selected:";
      for (const auto& n : result.selected) std::cout << ' ' << n;
      std::cout << "\nsize: " << result.selected.size() << '\n'
                << "test_mse: " << qbss::format_number(result.test_mse) << '\n';
    }
  } catch (const qbss::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
