// coopa: train coordinated Q-learning power allocation and export CSV results.
//
//   coopa run     --config <path> [--seed N] [--out <dir>]
//   coopa sweep   --config <path> --betas 0:1:0.05 [--seed N] [--out <dir>]
//   coopa surface --config <path> --beta 0.3 --out <file>
//
// COOPA_THREADS caps the number of beta points trained concurrently.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qcopa/experiment.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

qcopa::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> seed,
                             const std::optional<std::string>& out) {
  auto cfg = qcopa::load_config(path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.output_dir = *out;
  return cfg;
}

int cmd_run(const qcopa::ExperimentConfig& cfg) {
  const auto outcome = qcopa::run_single(cfg);
  const auto& training = outcome.training;

  {
    auto os = open_out(cfg.output_dir / "trace.csv");
    qcopa::write_trace_csv(training.traces, os);
  }
  for (const auto& agent : training.agents) {
    auto os = open_out(cfg.output_dir / ("q_agent_" + std::to_string(agent.id + 1) + ".csv"));
    qcopa::write_q_csv(agent.q, 0, os);
  }

  std::cout << "episodes: " << training.traces.size() << '\n';
  std::cout << "learned powers (mW):";
  for (double p : outcome.learned.powers_mw) std::cout << ' ' << p;
  std::cout << "\nlearned sum throughput: " << outcome.learned.sum_throughput << '\n';
  if (cfg.network.n_agents() == 2) {
    const auto opt = qcopa::optimal_two_user(cfg.network);
    std::cout << "closed-form optimum:    " << opt.sum_throughput << " at (" << opt.powers_mw[0]
              << ", " << opt.powers_mw[1] << ")\n";
  }
  std::cout << "wrote " << (cfg.output_dir / "trace.csv").string() << '\n';
  return 0;
}

int cmd_sweep(qcopa::ExperimentConfig cfg, const std::optional<std::string>& betas) {
  if (betas) cfg.betas = qcopa::parse_betas(*betas);
  const auto rows = qcopa::run_sweep(cfg, qcopa::threads_from_env(1));
  const auto path = cfg.output_dir / "sweep.csv";
  auto os = open_out(path);
  qcopa::write_sweep_csv(rows, os);
  std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
  return 0;
}

int cmd_surface(qcopa::ExperimentConfig cfg, double beta, const fs::path& out) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  cfg.network = qcopa::with_beta(cfg.network, beta);
  const auto outcome = qcopa::run_single(cfg);
  auto os = open_out(out);
  qcopa::export_q_surface(outcome.training.agents, outcome.training.grid, os);
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated multi-agent Q-learning for joint power allocation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "Train once and write the trace and Q-tables");
  run->add_option("--config", config_path, "Experiment config (INI)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Output directory");

  std::optional<std::string> betas;
  auto* sweep = app.add_subcommand("sweep", "Train across interference ratios");
  sweep->add_option("--config", config_path, "Experiment config (INI)")->required();
  sweep->add_option("--betas", betas, "start:stop:step or comma list (default: config, else 0:1:0.05)");
  sweep->add_option("--seed", seed, "Override the config seed");
  sweep->add_option("--out", out_dir, "Output directory");

  double beta = 0.3;
  std::string surface_out;
  auto* surface = app.add_subcommand("surface", "Export the learned two-agent global Q");
  surface->add_option("--config", config_path, "Experiment config (INI)")->required();
  surface->add_option("--beta", beta, "Interference ratio")->capture_default_str();
  surface->add_option("--seed", seed, "Override the config seed");
  surface->add_option("--out", surface_out, "Output CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load(config_path, seed, out_dir);
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, betas);
    if (surface->parsed()) return cmd_surface(cfg, beta, surface_out);
  } catch (const qcopa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
