#include "qcopa/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <stdexcept>

namespace qcopa {

namespace {

struct HeldTable {
  std::size_t tag;
  FunctionTable table;
};

// Per-agent scratch state for one VE exchange.
struct Workspace {
  std::vector<HeldTable> held;
  std::vector<EliminationRecord> records;
};

// Runs fn(j) for every agent, in parallel when asked. The exception from
// the lowest agent index is rethrown so failures are deterministic.
template <typename Fn>
void for_each_agent(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t j = 0; j < n; ++j) {
    try {
      fn(j);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<Scope> interference_scopes(const NetworkConfig& cfg) {
  std::vector<Scope> scopes(cfg.n_agents());
  for (AgentId j = 0; j < cfg.n_agents(); ++j) {
    scopes[j].push_back(j);
    for (const auto& link : cfg.interferers.at(j)) scopes[j].push_back(link.source);
    std::sort(scopes[j].begin(), scopes[j].end());
  }
  return scopes;
}

ArgmaxResult ve_via_messages(std::span<Agent> agents,
                             std::span<const AgentId> order, StateId x,
                             Transport& bus, const VeOptions& options) {
  const std::size_t n = agents.size();
  for (AgentId j = 0; j < n; ++j)
    if (agents[j].id != j) throw std::invalid_argument("agents must be indexed by id");
  if (order.size() != n)
    throw std::invalid_argument("elimination order must list every agent once");
  std::vector<std::size_t> step_of(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (order[k] >= n || step_of[order[k]] != n)
      throw std::invalid_argument("elimination order is not a permutation");
    step_of[order[k]] = k;
  }

  std::vector<Workspace> ws(n);
  for (AgentId j = 0; j < n; ++j) ws[j].held.push_back({j, agents[j].q.table(x)});

  std::size_t next_tag = n;
  for (std::size_t step = 0; step < n; ++step) {
    const AgentId self = order[step];

    // Holders hand over every live table that mentions `self`.
    for (AgentId h = 0; h < n; ++h) {
      if (h == self) continue;
      auto& held = ws[h].held;
      for (auto it = held.begin(); it != held.end();) {
        if (!it->table.contains(self)) {
          ++it;
          continue;
        }
        if (it->tag < n)
          bus.send(ShareQ{h, self, it->tag, std::move(it->table)});
        else
          bus.send(FFunction{h, self, it->tag, std::move(it->table)});
        it = held.erase(it);
      }
    }

    auto& mine = ws[self];
    for (auto& m : bus.drain(self)) {
      if (auto* s = std::get_if<ShareQ>(&m))
        mine.held.push_back({s->tag, std::move(s->table)});
      else if (auto* f = std::get_if<FFunction>(&m))
        mine.held.push_back({f->tag, std::move(f->table)});
      else
        throw std::logic_error("unexpected " + kind_name(m) +
                               " during elimination at agent " +
                               std::to_string(self));
    }

    std::vector<HeldTable> involved_owned;
    for (auto it = mine.held.begin(); it != mine.held.end();) {
      if (it->table.contains(self)) {
        involved_owned.push_back(std::move(*it));
        it = mine.held.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(involved_owned.begin(), involved_owned.end(),
              [](const HeldTable& a, const HeldTable& b) { return a.tag < b.tag; });
    std::vector<const FunctionTable*> involved;
    for (const auto& h : involved_owned) involved.push_back(&h.table);

    auto rec = maximize_out(involved, self, options);
    const std::size_t tag = next_tag++;
    if (rec.f.scope().empty()) {
      mine.held.push_back({tag, rec.f});
    } else {
      // Route f to whichever agent in its scope is eliminated first.
      AgentId target = rec.f.scope().front();
      for (AgentId a : rec.f.scope())
        if (step_of[a] < step_of[target]) target = a;
      bus.send(FFunction{self, target, tag, rec.f});
    }
    mine.records.push_back(std::move(rec));
  }

  // Recovery pass, last eliminated first.
  JointAction joint(n, 0);
  std::vector<std::pair<AgentId, ActionIndex>> partial;
  for (std::size_t k = n; k-- > 0;) {
    const AgentId self = order[k];
    if (k + 1 < n) {
      bool got = false;
      for (auto& m : bus.drain(self)) {
        auto* a = std::get_if<Assignment>(&m);
        if (!a)
          throw std::logic_error("unexpected " + kind_name(m) +
                                 " during recovery at agent " +
                                 std::to_string(self));
        partial = std::move(a->actions);
        got = true;
      }
      if (!got) throw std::logic_error("assignment lost on the backhaul");
    }
    std::fill(joint.begin(), joint.end(), 0);
    for (const auto& [agent, action] : partial) joint[agent] = action;

    const auto& rec = ws[self].records.back();
    const ActionIndex choice = rec.b.at_joint(joint);
    agents[self].assigned = choice;
    joint[self] = choice;
    partial.emplace_back(self, choice);
    if (k > 0) bus.send(Assignment{self, order[k - 1], partial});
  }

  ArgmaxResult out;
  out.action.assign(n, 0);
  for (const auto& [agent, action] : partial) out.action[agent] = action;
  for (AgentId j = 0; j < n; ++j) out.value += agents[j].q.table(x).at_joint(out.action);
  return out;
}

Runtime::Runtime(NetworkConfig cfg, LearningParams params, std::uint64_t seed,
                 RuntimeOptions options)
    : cfg_(std::move(cfg)),
      params_(params),
      options_(std::move(options)),
      bus_(cfg_.n_agents(), options_.keep_message_history) {
  cfg_.validate();
  params_.validate();
  grid_ = build_action_grid(cfg_);

  const std::size_t n = cfg_.n_agents();
  auto scopes = options_.scopes.empty() ? interference_scopes(cfg_) : options_.scopes;
  CoordinationGraph graph{n, scopes};
  graph.validate();
  if (scopes.size() != n)
    throw std::invalid_argument("need exactly one local scope per agent");
  order_ = default_elimination_order(graph, options_.elimination);

  agents_.reserve(n);
  for (AgentId j = 0; j < n; ++j) {
    std::vector<std::size_t> cards;
    for (AgentId a : scopes[j]) cards.push_back(grid_.size(a));
    agents_.push_back(Agent{j, LocalQ(j, scopes[j], std::move(cards)), 0});
  }

  rngs_.reserve(n);
  for (AgentId j = 0; j < n; ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j)};
    rngs_.emplace_back(seq);
  }
}

ArgmaxResult Runtime::greedy() {
  return ve_via_messages(agents_, order_, state_, bus_, options_.ve);
}

EpisodeTrace Runtime::run_episode(std::size_t episode) {
  return run_episode(episode, epsilon_at(episode, params_));
}

EpisodeTrace Runtime::run_episode(std::size_t episode, double epsilon) {
  const std::size_t n = agents_.size();
  const std::size_t sent_before = bus_.sent_count();
  const StateId x = state_;

  const JointAction chosen = ve_via_messages(agents_, order_, x, bus_, options_.ve).action;

  JointAction taken(n);
  for_each_agent(n, options_.exec, [&](AgentId j) {
    taken[j] = explore_override(chosen[j], grid_.size(j), epsilon, rngs_[j]);
  });
  const std::vector<double> powers = grid_.powers(taken);

  // Each UE measures its SINR and reports it to its own SBS.
  std::vector<double> rewards(n);
  for_each_agent(n, options_.exec, [&](AgentId j) {
    bus_.send(RewardFeedback{j, sinr(j, powers, cfg_)});
  });
  for_each_agent(n, options_.exec, [&](AgentId j) {
    auto inbox = bus_.drain(j);
    if (inbox.size() != 1 || !std::holds_alternative<RewardFeedback>(inbox[0]))
      throw std::logic_error("agent " + std::to_string(j) +
                             " expected exactly one reward report");
    rewards[j] = std::log2(1.0 + std::get<RewardFeedback>(inbox[0]).sinr);
  });

  // Stateless problem: the next state is the current one.
  const StateId x_next = x;
  const JointAction bootstrap =
      ve_via_messages(agents_, order_, x_next, bus_, options_.ve).action;

  for_each_agent(n, options_.exec, [&](AgentId j) {
    auto& q = agents_[j].q;
    local_update(q, x, q.slice(taken), rewards[j], x_next, q.slice(bootstrap),
                 params_);
  });
  state_ = x_next;

  EpisodeTrace trace;
  trace.episode = episode;
  trace.epsilon = epsilon;
  trace.actions = taken;
  trace.powers_mw = powers;
  trace.rewards = rewards;
  for (double r : rewards) trace.sum_reward += r;
  trace.message_count = bus_.sent_count() - sent_before;
  return trace;
}

TrainResult train(const NetworkConfig& cfg, const LearningParams& params,
                  std::size_t episodes, std::uint64_t seed,
                  const RuntimeOptions& options) {
  if (episodes == 0) throw std::invalid_argument("episodes must be >= 1");
  Runtime rt(cfg, params, seed, options);
  TrainResult out;
  out.traces.reserve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) out.traces.push_back(rt.run_episode(e));
  out.greedy = rt.greedy();
  out.agents = rt.agents();
  out.grid = rt.grid();
  return out;
}

void write_trace_csv(std::span<const EpisodeTrace> traces, std::ostream& os) {
  const auto old_precision = os.precision(12);
  auto join = [&os](const auto& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) os << ';';
      os << xs[i];
    }
  };
  os << "episode,epsilon,actions,powers_mw,rewards,sum_reward\n";
  for (const auto& t : traces) {
    os << t.episode << ',' << t.epsilon << ',';
    join(t.actions);
    os << ',';
    join(t.powers_mw);
    os << ',';
    join(t.rewards);
    os << ',' << t.sum_reward << '\n';
  }
  os.precision(old_precision);
}

}  // namespace qcopa
