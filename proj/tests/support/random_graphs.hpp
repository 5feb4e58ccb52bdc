#pragma once

// Random coordination-graph instances for property tests.

#include <algorithm>
#include <random>
#include <vector>

#include "qcopa/coordgraph.hpp"

namespace qcopa::testing {

struct RandomInstance {
  std::vector<std::size_t> cards;
  std::vector<FunctionTable> functions;
};

/// `n_agents` agents with 2..max_card actions, 1..n_agents+2 tables of
/// scope size 1..3 (capped by n_agents), values uniform in [-10, 10].
/// Every agent is covered by at least one scope.
inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t n_agents,
                                      std::size_t max_card) {
  std::uniform_int_distribution<std::size_t> card_dist(2, max_card);
  std::uniform_real_distribution<double> value(-10.0, 10.0);

  RandomInstance inst;
  for (std::size_t a = 0; a < n_agents; ++a) inst.cards.push_back(card_dist(rng));

  std::uniform_int_distribution<std::size_t> n_tables_dist(1, n_agents + 2);
  const std::size_t max_scope = std::min<std::size_t>(3, n_agents);
  std::uniform_int_distribution<std::size_t> scope_size_dist(1, max_scope);

  std::vector<Scope> scopes;
  std::vector<bool> covered(n_agents, false);
  const std::size_t n_tables = n_tables_dist(rng);
  std::vector<AgentId> ids(n_agents);
  for (std::size_t a = 0; a < n_agents; ++a) ids[a] = a;
  for (std::size_t t = 0; t < n_tables; ++t) {
    std::shuffle(ids.begin(), ids.end(), rng);
    Scope s(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(scope_size_dist(rng)));
    for (AgentId a : s) covered[a] = true;
    scopes.push_back(s);
  }
  // Pair every uncovered agent with a random partner.
  for (AgentId a = 0; a < n_agents; ++a) {
    if (covered[a]) continue;
    Scope s{a};
    if (n_agents > 1) {
      std::uniform_int_distribution<AgentId> other(0, n_agents - 1);
      AgentId b = other(rng);
      while (b == a) b = other(rng);
      s.push_back(b);
    }
    scopes.push_back(s);
    covered[a] = true;
  }

  for (const auto& s : scopes) {
    std::vector<std::size_t> cards;
    for (AgentId a : s) cards.push_back(inst.cards[a]);
    auto table = FunctionTable::filled(s, cards, 0.0);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = value(rng);
    inst.functions.push_back(std::move(table));
  }
  return inst;
}

/// Independent exhaustive maximum: nested enumeration with lexicographic
/// lowest-index tie-break, evaluated with scoped (not joint) lookups.
inline std::pair<JointAction, double> enumerate_max(const RandomInstance& inst) {
  const std::size_t n = inst.cards.size();
  JointAction joint(n, 0), best_joint;
  double best = -1e300;
  while (true) {
    double v = 0.0;
    for (const auto& t : inst.functions) {
      std::vector<ActionIndex> scoped;
      for (AgentId a : t.scope()) scoped.push_back(joint[a]);
      v += t.at(scoped);
    }
    if (best_joint.empty() || v > best) {
      best = v;
      best_joint = joint;
    }
    std::size_t a = n;
    while (a > 0) {
      --a;
      if (++joint[a] < inst.cards[a]) break;
      joint[a] = 0;
      if (a == 0) return {best_joint, best};
    }
  }
}

}  // namespace qcopa::testing
