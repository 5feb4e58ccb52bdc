#pragma once

// Agents with random local Q-tables for message-passing tests.

#include <random>
#include <vector>

#include "qcopa/runtime.hpp"

namespace qcopa::testing {

/// One agent per scope; scopes[j] must contain j. Values uniform in [-10, 10].
inline std::vector<Agent> random_agents(std::mt19937_64& rng, const std::vector<Scope>& scopes,
                                        const std::vector<std::size_t>& cards) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Agent> agents;
  for (AgentId j = 0; j < scopes.size(); ++j) {
    std::vector<std::size_t> c;
    for (AgentId a : scopes[j]) c.push_back(cards[a]);
    LocalQ q(j, scopes[j], c);
    for (std::size_t i = 0; i < q.table(0).size(); ++i) q.table(0)[i] = u(rng);
    agents.push_back({j, std::move(q), 0});
  }
  return agents;
}

/// Own id plus each other agent with probability `p_link`.
inline std::vector<Scope> random_scopes(std::mt19937_64& rng, std::size_t n, double p_link) {
  std::bernoulli_distribution link(p_link);
  std::vector<Scope> scopes(n);
  for (AgentId j = 0; j < n; ++j)
    for (AgentId a = 0; a < n; ++a)
      if (a == j || link(rng)) scopes[j].push_back(a);
  return scopes;
}

inline std::vector<FunctionTable> tables_of(const std::vector<Agent>& agents) {
  std::vector<FunctionTable> out;
  for (const auto& a : agents) out.push_back(a.q.table(0));
  return out;
}

}  // namespace qcopa::testing
