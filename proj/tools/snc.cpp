// Command-line front end: parameter sweeps, figure presets, verification and
// generator archives.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "snc/code.hpp"
#include "snc/error.hpp"
#include "snc/experiments.hpp"

namespace ex = snc::experiments;

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> epsilon;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--epsilon", o.epsilon, "Erasure probabilities (replaces the grid)")->delimiter(',');
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per simulated point");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "Output directory");
}

ex::SweepConfig apply_overrides(ex::SweepConfig cfg, const Overrides& o) {
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ex::IoError("cannot read configuration " + o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ex::ConfigError(o.config_path + ": " + e.what());
    }
    cfg = ex::apply_json(std::move(cfg), j);
  }
  if (!o.epsilon.empty()) cfg.epsilons = o.epsilon;
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

ex::SweepConfig defaults() {
  ex::SweepConfig cfg;
  if (const char* dir = std::getenv(ex::kOutputDirEnv); dir && *dir) cfg.out_dir = dir;
  return cfg;
}

int run_sweep(const ex::SweepConfig& cfg) {
  const auto result = ex::run(cfg);
  std::cout << result.rows.size() << " rows";
  if (result.csv_path) std::cout << " -> " << result.csv_path->string();
  if (result.json_path) std::cout << " (+ " << result.json_path->filename().string() << ")";
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window RS network coding: analysis, simulation and verification"};
  app.set_version_flag("--version", std::string(ex::version()));
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a sweep described by a JSON configuration");
  run_cmd->add_option("--config", run_opts.config_path, "JSON sweep configuration")->check(CLI::ExistingFile);
  add_override_flags(run_cmd, run_opts);

  Overrides preset_opts;
  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "Run a built-in figure preset");
  preset_cmd->add_option("name", preset_name, "fig1 | fig2 | fig3 | fig4")->required();
  preset_cmd->add_option("--config", preset_opts.config_path, "JSON overlay applied on top of the preset");
  add_override_flags(preset_cmd, preset_opts);

  std::string level = "quick";
  bool inject_fault = false;
  unsigned verify_threads = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in invariant checks");
  verify_cmd->add_option("level", level, "quick | exhaustive")->check(CLI::IsMember({"quick", "exhaustive"}));
  verify_cmd->add_flag("--inject-fault", inject_fault, "Replace P_1 by P_0 before the MDP check");
  verify_cmd->add_option("--threads", verify_threads, "Worker threads for simulation checks");

  snc::CodeParams gen_params{12, 8, 1, 256};
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generators", "Build a generator set and write it as JSON");
  gen_cmd->add_option("-n", gen_params.n, "Packets per coded block")->required();
  gen_cmd->add_option("-k", gen_params.k, "Source packets per block")->required();
  gen_cmd->add_option("-L,--memory", gen_params.memory, "Memory length");
  gen_cmd->add_option("-q", gen_params.q, "Field size (power of two, at most 256)");
  gen_cmd->add_option("--seed", gen_seed, "Point-shuffle seed");
  gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) {
      if (run_opts.config_path.empty()) throw ex::ConfigError("run requires --config");
      return run_sweep(apply_overrides(defaults(), run_opts));
    }
    if (*preset_cmd) return run_sweep(apply_overrides(ex::preset(preset_name), preset_opts));
    if (*verify_cmd) {
      ex::VerifyOptions opts;
      opts.level = level == "exhaustive" ? ex::VerifyLevel::Exhaustive : ex::VerifyLevel::Quick;
      opts.inject_fault = inject_fault;
      opts.threads = verify_threads;
      const auto report = ex::verify(opts, &std::cout);
      std::size_t failed = 0;
      for (const auto& c : report.checks) failed += c.passed ? 0 : 1;
      std::cout << report.checks.size() - failed << '/' << report.checks.size() << " checks passed\n";
      if (failed) {
        std::cerr << "failed checks:\n";
        for (const auto& c : report.checks)
          if (!c.passed) std::cerr << "  " << c.name << '\n';
        return 1;
      }
      return 0;
    }
    if (*gen_cmd) {
      const auto gens = snc::build_generators(gen_params, gen_seed);
      const std::string text = nlohmann::json(gens).dump(2) + "\n";
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(gen_out);
        if (!os || !(os << text)) throw ex::IoError("cannot write " + gen_out);
      }
      return 0;
    }
  } catch (const ex::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
