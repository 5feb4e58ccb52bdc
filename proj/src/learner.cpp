#include "qcopa/learner.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace qcopa {

void LearningParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
      !(epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (epsilon_start < epsilon_end)
    throw std::invalid_argument("epsilon_start must be >= epsilon_end");
}

LocalQ::LocalQ(AgentId owner, Scope scope, std::vector<std::size_t> cards,
               std::size_t n_states)
    : owner_(owner), scope_(std::move(scope)), cards_(std::move(cards)) {
  if (std::find(scope_.begin(), scope_.end(), owner_) == scope_.end())
    throw std::invalid_argument("local Q scope must contain its owner");
  if (n_states == 0) throw std::invalid_argument("need at least one state");
  tables_.assign(n_states, FunctionTable::filled(scope_, cards_, 0.0));
}

const FunctionTable& LocalQ::table(StateId x) const { return tables_.at(x); }
FunctionTable& LocalQ::table(StateId x) { return tables_.at(x); }

double LocalQ::value(StateId x, std::span<const ActionIndex> scoped) const {
  return table(x).at(scoped);
}

std::vector<ActionIndex> LocalQ::slice(std::span<const ActionIndex> joint) const {
  std::vector<ActionIndex> out(scope_.size());
  for (std::size_t a = 0; a < scope_.size(); ++a) out[a] = joint[scope_.at(a)];
  return out;
}

double local_update(LocalQ& q, StateId x, std::span<const ActionIndex> a_j,
                    double reward, StateId x_next,
                    std::span<const ActionIndex> a_star_j,
                    const LearningParams& params) {
  const double bootstrap = q.value(x_next, a_star_j);
  double& entry = q.table(x).at(a_j);
  entry += params.alpha * (reward + params.gamma * bootstrap - entry);
  return entry;
}

double epsilon_at(std::size_t episode, const LearningParams& params) {
  if (params.epsilon_decay_episodes == 0 ||
      episode >= params.epsilon_decay_episodes)
    return params.epsilon_end;
  const double t = static_cast<double>(episode) /
                   static_cast<double>(params.epsilon_decay_episodes);
  return params.epsilon_start + (params.epsilon_end - params.epsilon_start) * t;
}

ActionIndex explore_override(ActionIndex assigned, std::size_t n_actions,
                             double epsilon, Rng& rng) {
  if (n_actions == 0) throw std::invalid_argument("empty action set");
  std::bernoulli_distribution explore(epsilon);
  if (!explore(rng)) return assigned;
  std::uniform_int_distribution<ActionIndex> pick(0, n_actions - 1);
  return pick(rng);
}

void write_q_csv(const LocalQ& q, StateId x, std::ostream& os) {
  const auto& t = q.table(x);
  os << "state";
  for (AgentId a : q.scope()) os << ",agent_" << a + 1;
  os << ",q\n";
  const auto old_precision = os.precision(12);
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    os << x;
    for (ActionIndex k : t.decode(flat)) os << ',' << k;
    os << ',' << t[flat] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace qcopa
