#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcopa/oracle.hpp"
#include "qcopa/runtime.hpp"

namespace qcopa {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { missing_file, parse, validation };

  ConfigError(Kind kind, std::size_t line, const std::string& what);

  Kind kind() const { return kind_; }
  /// 1-based line the error refers to, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

struct ExperimentConfig {
  NetworkConfig network = two_user_config(0.3);
  LearningParams learning;
  /// Unset: 50 x (size of the largest local Q-table).
  std::optional<std::size_t> episodes;
  /// Fraction of the run over which epsilon decays, unless
  /// learning.epsilon_decay_episodes is set explicitly.
  double exploration_fraction = 0.8;
  bool explicit_decay = false;
  std::uint64_t seed = 1;
  std::vector<double> betas;
  EliminationStrategy elimination = EliminationStrategy::fixed_reverse;
  std::filesystem::path output_dir = ".";

  std::size_t resolved_episodes() const;
  /// Learning parameters with the decay horizon filled in for `episodes`.
  LearningParams resolved_learning(std::size_t episodes) const;
  RuntimeOptions runtime_options() const;
};

/// INI-style text with [network], [learning] and [experiment] sections.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_betas(const std::string& text);

/// Same network with every interference ratio set to `beta`.
NetworkConfig with_beta(NetworkConfig cfg, double beta);

/// Seed for the k-th independent run derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k);

struct RunOutcome {
  TrainResult training;
  Allocation learned;
};

RunOutcome run_single(const ExperimentConfig& config);

struct SweepRow {
  double beta = 0.0;
  double qcopa_p1_mw = 0.0;
  double qcopa_p2_mw = 0.0;
  double qcopa_throughput = 0.0;
  double optimal_throughput = 0.0;
  double greedy_throughput = 0.0;
  double simultaneous_throughput = 0.0;
};

/// Trains one runtime per beta (two-agent networks only) and compares the
/// learned greedy allocation with the closed form and both baselines.
/// Rows come back in beta order whatever the thread count.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int threads = 1);

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& os);
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Rows p1_mw,p2_mw,global_q over the full two-agent grid (state 0).
void export_q_surface(std::span<const Agent> agents, const ActionGrid& grid,
                      std::ostream& os);

/// Reads COOPA_THREADS; falls back to `fallback` when unset or invalid.
int threads_from_env(int fallback);

}  // namespace qcopa
