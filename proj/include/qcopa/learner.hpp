#pragma once

#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "qcopa/coordgraph.hpp"

namespace qcopa {

struct LearningParams {
  double alpha = 0.5;
  double gamma = 0.9;
  double epsilon_start = 0.9;
  double epsilon_end = 0.05;
  std::size_t epsilon_decay_episodes = 0;

  void validate() const;
};

using Rng = std::mt19937_64;

/// One agent's local Q-function: a table over its scope for every state.
class LocalQ {
 public:
  LocalQ(AgentId owner, Scope scope, std::vector<std::size_t> cards,
         std::size_t n_states = 1);

  AgentId owner() const { return owner_; }
  const Scope& scope() const { return scope_; }
  const std::vector<std::size_t>& cards() const { return cards_; }
  std::size_t n_states() const { return tables_.size(); }

  const FunctionTable& table(StateId x) const;
  FunctionTable& table(StateId x);
  double value(StateId x, std::span<const ActionIndex> scoped) const;

  /// Restriction of a full joint action to this scope.
  std::vector<ActionIndex> slice(std::span<const ActionIndex> joint) const;

  friend bool operator==(const LocalQ&, const LocalQ&) = default;

 private:
  AgentId owner_;
  Scope scope_;
  std::vector<std::size_t> cards_;
  std::vector<FunctionTable> tables_;
};

/// Q_j(x, a_j) += alpha * (r_j + gamma * Q_j(x', a*_j) - Q_j(x, a_j)).
/// Touches exactly one entry and returns its new value.
double local_update(LocalQ& q, StateId x, std::span<const ActionIndex> a_j,
                    double reward, StateId x_next,
                    std::span<const ActionIndex> a_star_j,
                    const LearningParams& params);

/// Linear decay from epsilon_start to epsilon_end over the decay horizon.
double epsilon_at(std::size_t episode, const LearningParams& params);

/// With probability epsilon, a uniformly random index in [0, n_actions);
/// otherwise `assigned`.
ActionIndex explore_override(ActionIndex assigned, std::size_t n_actions,
                             double epsilon, Rng& rng);

/// Header `state,agent_<id+1>...,q`, one row per scoped joint action.
void write_q_csv(const LocalQ& q, StateId x, std::ostream& os);

}  // namespace qcopa
