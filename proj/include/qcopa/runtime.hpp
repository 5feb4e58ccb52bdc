#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qcopa/bus.hpp"
#include "qcopa/coordgraph.hpp"
#include "qcopa/learner.hpp"
#include "qcopa/radio.hpp"

namespace qcopa {

/// An SBS: owns its local Q-function and the action it was last assigned.
struct Agent {
  AgentId id;
  LocalQ q;
  ActionIndex assigned = 0;
};

struct EpisodeTrace {
  std::size_t episode = 0;
  double epsilon = 0.0;
  JointAction actions;
  std::vector<double> powers_mw;
  std::vector<double> rewards;
  double sum_reward = 0.0;
  std::size_t message_count = 0;

  friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

struct RuntimeOptions {
  /// Parallelizes reward observation and local updates across agents.
  Exec exec = Exec::serial;
  EliminationStrategy elimination = EliminationStrategy::fixed_reverse;
  VeOptions ve;
  /// One scope per agent; empty selects interference_scopes().
  std::vector<Scope> scopes;
  bool keep_message_history = false;
};

/// Agent-based decomposition: Scope[Q_j] = {j} u D_j, sorted.
std::vector<Scope> interference_scopes(const NetworkConfig& cfg);

/// Runs variable elimination as a message exchange between agents.
///
/// Agent `order[k]` eliminates its own variable at step k. Before that
/// step, every agent still holding a local Q-table that mentions it sends
/// the table over (ShareQ). The resulting f table goes to the agent in its
/// scope that is eliminated next (FFunction); b stays with the eliminating
/// agent. The recovery pass then walks the order backwards, each agent
/// reading its action off b and forwarding the partial joint action
/// (Assignment). Requires agents[j].id == j.
ArgmaxResult ve_via_messages(std::span<Agent> agents,
                             std::span<const AgentId> order, StateId x,
                             Transport& bus, const VeOptions& options = {});

/// Coordinated Q-learning over a simulated backhaul.
class Runtime {
 public:
  Runtime(NetworkConfig cfg, LearningParams params, std::uint64_t seed,
          RuntimeOptions options = {});

  /// One pass of the episode loop using epsilon_at(episode).
  EpisodeTrace run_episode(std::size_t episode);
  EpisodeTrace run_episode(std::size_t episode, double epsilon);

  /// Greedy joint action of the current tables (no exploration).
  ArgmaxResult greedy();

  const NetworkConfig& config() const { return cfg_; }
  const LearningParams& params() const { return params_; }
  const ActionGrid& grid() const { return grid_; }
  const std::vector<AgentId>& order() const { return order_; }
  const std::vector<Agent>& agents() const { return agents_; }
  std::vector<Agent>& agents() { return agents_; }
  InMemoryBus& bus() { return bus_; }

 private:
  NetworkConfig cfg_;
  LearningParams params_;
  RuntimeOptions options_;
  ActionGrid grid_;
  std::vector<Agent> agents_;
  std::vector<AgentId> order_;
  std::vector<Rng> rngs_;
  InMemoryBus bus_;
  StateId state_ = 0;
};

struct TrainResult {
  std::vector<Agent> agents;
  std::vector<EpisodeTrace> traces;
  ActionGrid grid;
  ArgmaxResult greedy;
};

TrainResult train(const NetworkConfig& cfg, const LearningParams& params,
                  std::size_t episodes, std::uint64_t seed,
                  const RuntimeOptions& options = {});

/// Header: episode,epsilon,actions,powers_mw,rewards,sum_reward.
/// List-valued columns are semicolon-joined.
void write_trace_csv(std::span<const EpisodeTrace> traces, std::ostream& os);

}  // namespace qcopa
