#include "qcopa/coordgraph.hpp"

#include <limits>
#include <numeric>
#include <set>

namespace qcopa {

namespace {

// Product of cardinalities, or nullopt-like max() once it exceeds `cap`.
std::size_t capped_product(std::span<const std::size_t> cards, std::size_t cap) {
  std::size_t total = 1;
  for (auto c : cards) {
    if (c != 0 && total > cap / c) return std::numeric_limits<std::size_t>::max();
    total *= c;
  }
  return total;
}

}  // namespace

EliminationRecord maximize_out(std::span<const FunctionTable* const> involved,
                               AgentId agent, const VeOptions& options) {
  if (involved.empty())
    throw std::invalid_argument("agent " + std::to_string(agent) +
                                " appears in no function scope");

  std::size_t agent_card = 0;
  Scope scope;
  std::vector<std::size_t> cards;
  for (const FunctionTable* t : involved) {
    const std::size_t pos = t->position(agent);  // throws if absent
    if (agent_card == 0) agent_card = t->cards()[pos];
    if (t->cards()[pos] != agent_card)
      throw std::invalid_argument("inconsistent action count for agent " +
                                  std::to_string(agent));
    for (std::size_t a = 0; a < t->scope().size(); ++a) {
      const AgentId other = t->scope()[a];
      if (other == agent) continue;
      auto it = std::lower_bound(scope.begin(), scope.end(), other);
      const auto at = static_cast<std::size_t>(it - scope.begin());
      if (it == scope.end() || *it != other) {
        scope.insert(it, other);
        cards.insert(cards.begin() + static_cast<std::ptrdiff_t>(at),
                     t->cards()[a]);
      } else if (cards[at] != t->cards()[a]) {
        throw std::invalid_argument("inconsistent action count for agent " +
                                    std::to_string(other));
      }
    }
  }
  if (scope.size() > options.max_induced_scope)
    throw std::length_error("eliminating agent " + std::to_string(agent) +
                            " induces a scope of " + std::to_string(scope.size()) +
                            " agents (limit " +
                            std::to_string(options.max_induced_scope) + ")");

  // strides[t][u]: stride of the u-th result-scope agent inside table t.
  const std::size_t n_tables = involved.size();
  std::vector<std::vector<std::size_t>> strides(
      n_tables, std::vector<std::size_t>(scope.size(), 0));
  std::vector<std::size_t> agent_stride(n_tables);
  for (std::size_t t = 0; t < n_tables; ++t) {
    const auto& ts = involved[t]->scope();
    for (std::size_t a = 0; a < ts.size(); ++a) {
      if (ts[a] == agent) {
        agent_stride[t] = involved[t]->strides()[a];
        continue;
      }
      const auto u = static_cast<std::size_t>(
          std::lower_bound(scope.begin(), scope.end(), ts[a]) - scope.begin());
      strides[t][u] = involved[t]->strides()[a];
    }
  }

  FunctionTable f = FunctionTable::filled(scope, cards, 0.0);
  ResponseTable b = ResponseTable::filled(scope, cards, 0);
  const std::size_t n_ctx = f.size();
  const auto& f_strides = f.strides();
  const bool parallel = options.exec == Exec::parallel && n_ctx >= 64;

#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t ctx = 0; ctx < n_ctx; ++ctx) {
    std::vector<std::size_t> base(n_tables, 0);
    std::size_t rest = ctx;
    for (std::size_t u = 0; u < scope.size(); ++u) {
      const std::size_t digit = rest / f_strides[u];
      rest %= f_strides[u];
      for (std::size_t t = 0; t < n_tables; ++t) base[t] += digit * strides[t][u];
    }
    double best = -std::numeric_limits<double>::infinity();
    ActionIndex best_k = 0;
    for (ActionIndex k = 0; k < agent_card; ++k) {
      double sum = 0.0;
      for (std::size_t t = 0; t < n_tables; ++t)
        sum += (*involved[t])[base[t] + k * agent_stride[t]];
      if (sum > best) {
        best = sum;
        best_k = k;
      }
    }
    f[ctx] = best;
    b[ctx] = best_k;
  }
  return {agent, std::move(f), std::move(b)};
}

Elimination eliminate_agent(std::span<const FunctionTable> functions,
                            AgentId agent, const VeOptions& options) {
  std::vector<const FunctionTable*> involved;
  std::vector<FunctionTable> untouched;
  for (const auto& t : functions) {
    if (t.contains(agent))
      involved.push_back(&t);
    else
      untouched.push_back(t);
  }
  auto rec = maximize_out(involved, agent, options);
  return {std::move(rec.f), std::move(rec.b), std::move(untouched)};
}

std::vector<std::size_t> agent_cards(std::span<const FunctionTable> functions) {
  if (functions.empty()) throw std::invalid_argument("empty function set");
  std::size_t n = 0;
  for (const auto& t : functions)
    for (AgentId a : t.scope()) n = std::max(n, a + 1);
  std::vector<std::size_t> cards(n, 0);
  for (const auto& t : functions) {
    for (std::size_t a = 0; a < t.scope().size(); ++a) {
      auto& c = cards[t.scope()[a]];
      if (c != 0 && c != t.cards()[a])
        throw std::invalid_argument("inconsistent action count for agent " +
                                    std::to_string(t.scope()[a]));
      c = t.cards()[a];
    }
  }
  for (AgentId a = 0; a < n; ++a)
    if (cards[a] == 0)
      throw std::invalid_argument("agent " + std::to_string(a) +
                                  " appears in no function scope");
  return cards;
}

double sum_at(std::span<const FunctionTable> functions,
              std::span<const ActionIndex> joint) {
  double total = 0.0;
  for (const auto& t : functions) total += t.at_joint(joint);
  return total;
}

VeResult ve_argmax(std::span<const FunctionTable> functions,
                   std::span<const AgentId> order, const VeOptions& options) {
  const auto cards = agent_cards(functions);
  const std::size_t n = cards.size();
  if (order.size() != n)
    throw std::invalid_argument("elimination order must list every agent once");
  std::vector<bool> seen(n, false);
  for (AgentId a : order) {
    if (a >= n || seen[a])
      throw std::invalid_argument("elimination order is not a permutation");
    seen[a] = true;
  }

  // Live functions in creation order: inputs first, then f tables as made.
  std::vector<FunctionTable> live(functions.begin(), functions.end());
  VeResult result;
  result.records.reserve(n);
  for (AgentId agent : order) {
    std::vector<const FunctionTable*> involved;
    for (const auto& t : live)
      if (t.contains(agent)) involved.push_back(&t);
    auto rec = maximize_out(involved, agent, options);

    std::vector<FunctionTable> next;
    next.reserve(live.size());
    for (auto& t : live)
      if (!t.contains(agent)) next.push_back(std::move(t));
    // A scalar f is a constant offset and cannot change the argmax.
    if (!rec.f.scope().empty()) next.push_back(rec.f);
    live = std::move(next);
    result.records.push_back(std::move(rec));
  }

  result.action.assign(n, 0);
  for (auto it = result.records.rbegin(); it != result.records.rend(); ++it)
    result.action[it->eliminated] = it->b.at_joint(result.action);
  result.value = sum_at(functions, result.action);
  return result;
}

ArgmaxResult brute_force_argmax(std::span<const FunctionTable> functions,
                                Exec exec, std::size_t limit) {
  const auto cards = agent_cards(functions);
  const std::size_t n = cards.size();
  const std::size_t total = capped_product(cards, limit);
  if (total > limit)
    throw std::length_error("joint action space exceeds the brute-force limit");

  // Lexicographic rank of a joint action, agent 0 most significant.
  auto decode = [&](std::size_t rank, JointAction& joint) {
    for (std::size_t a = n; a-- > 0;) {
      joint[a] = rank % cards[a];
      rank /= cards[a];
    }
  };
  auto advance = [&](JointAction& joint) {
    for (std::size_t a = n; a-- > 0;) {
      if (++joint[a] < cards[a]) return;
      joint[a] = 0;
    }
  };

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_rank = 0;
  const bool parallel = exec == Exec::parallel;

#pragma omp parallel if (parallel)
  {
    double local_best = -std::numeric_limits<double>::infinity();
    std::size_t local_rank = 0;
    JointAction joint(n, 0);
    bool positioned = false;
#pragma omp for schedule(static) nowait
    for (std::size_t rank = 0; rank < total; ++rank) {
      if (!positioned) {
        decode(rank, joint);
        positioned = true;
      }
      const double v = sum_at(functions, joint);
      if (v > local_best) {
        local_best = v;
        local_rank = rank;
      }
      advance(joint);
    }
#pragma omp critical(qcopa_brute_force_argmax)
    {
      if (local_best > best || (local_best == best && local_rank < best_rank)) {
        best = local_best;
        best_rank = local_rank;
      }
    }
  }

  ArgmaxResult out;
  out.action.assign(n, 0);
  decode(best_rank, out.action);
  out.value = best;
  return out;
}

void CoordinationGraph::validate() const {
  if (n_agents == 0) throw std::invalid_argument("graph has no agents");
  std::vector<bool> covered(n_agents, false);
  for (const auto& s : scopes) {
    if (s.empty()) throw std::invalid_argument("empty scope");
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s[a] >= n_agents) throw std::invalid_argument("scope agent out of range");
      for (std::size_t b = a + 1; b < s.size(); ++b)
        if (s[a] == s[b]) throw std::invalid_argument("duplicate agent in scope");
      covered[s[a]] = true;
    }
  }
  for (AgentId a = 0; a < n_agents; ++a)
    if (!covered[a])
      throw std::invalid_argument("agent " + std::to_string(a) +
                                  " appears in no scope");
}

std::vector<std::vector<AgentId>> CoordinationGraph::neighbors() const {
  std::vector<std::set<AgentId>> adj(n_agents);
  for (const auto& s : scopes)
    for (AgentId a : s)
      for (AgentId b : s)
        if (a != b) adj.at(a).insert(b);
  std::vector<std::vector<AgentId>> out(n_agents);
  for (AgentId a = 0; a < n_agents; ++a) out[a].assign(adj[a].begin(), adj[a].end());
  return out;
}

std::vector<AgentId> default_elimination_order(const CoordinationGraph& graph,
                                               EliminationStrategy strategy) {
  graph.validate();
  std::vector<AgentId> order;
  order.reserve(graph.n_agents);
  if (strategy == EliminationStrategy::fixed_reverse) {
    for (AgentId a = graph.n_agents; a-- > 0;) order.push_back(a);
    return order;
  }

  std::vector<std::set<AgentId>> adj(graph.n_agents);
  const auto nb = graph.neighbors();
  for (AgentId a = 0; a < graph.n_agents; ++a) adj[a].insert(nb[a].begin(), nb[a].end());
  std::vector<bool> gone(graph.n_agents, false);
  for (std::size_t step = 0; step < graph.n_agents; ++step) {
    AgentId pick = graph.n_agents;
    for (AgentId a = 0; a < graph.n_agents; ++a) {
      if (gone[a]) continue;
      if (pick == graph.n_agents || adj[a].size() < adj[pick].size()) pick = a;
    }
    // Induced edges among the eliminated agent's neighbors.
    for (AgentId u : adj[pick]) {
      adj[u].erase(pick);
      for (AgentId v : adj[pick])
        if (u != v) adj[u].insert(v);
    }
    adj[pick].clear();
    gone[pick] = true;
    order.push_back(pick);
  }
  return order;
}

}  // namespace qcopa
