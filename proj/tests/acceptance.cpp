// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "qcopa/experiment.hpp"
#include "support/random_agents.hpp"
#include "support/random_graphs.hpp"

using namespace qcopa;

namespace {

struct Verdict {
  bool ok;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = v.ok && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %d %s (%.2f s of %.0f s)%s%s\n", ok ? "PASS" : "FAIL", id, name, secs,
              budget_s, v.detail.empty() ? "" : ": ", v.detail.c_str());
  std::fflush(stdout);
}

ExperimentConfig reference(double beta) {
  ExperimentConfig cfg;
  cfg.network = two_user_config(beta, 21);
  cfg.learning.alpha = 0.5;
  cfg.learning.gamma = 0.9;
  cfg.seed = 7;
  return cfg;
}

Verdict ve_exactness() {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<std::size_t> agents(2, 6);
  double worst = 0.0;
  for (int g = 0; g < 200; ++g) {
    const auto inst = testing::random_instance(rng, agents(rng), 5);
    const auto bf = brute_force_argmax(inst.functions);
    CoordinationGraph graph{inst.cards.size(), {}};
    for (const auto& f : inst.functions) graph.scopes.push_back(f.scope());
    for (auto strategy : {EliminationStrategy::fixed_reverse, EliminationStrategy::min_degree}) {
      const auto r = ve_argmax(inst.functions, default_elimination_order(graph, strategy));
      worst = std::max(worst, std::abs(r.value - bf.value));
    }
  }
  std::ostringstream d;
  d << "max |ve - brute force| = " << worst << " over 200 graphs x 2 orders";
  return {worst <= 1e-9, d.str()};
}

Verdict message_equivalence() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> agents(1, 5);
  std::uniform_int_distribution<std::size_t> card(2, 5);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = agents(rng);
    std::vector<std::size_t> cards(n);
    for (auto& c : cards) c = card(rng);
    auto team = testing::random_agents(rng, testing::random_scopes(rng, n, 0.5), cards);
    std::vector<AgentId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    InMemoryBus bus(n);
    const auto msg = ve_via_messages(team, order, 0, bus);
    const auto mem = ve_argmax(testing::tables_of(team), order);
    if (msg.action != mem.action || msg.value != mem.value) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 100 instances"};
}

std::string trace_csv(const TrainResult& r) {
  std::ostringstream os;
  write_trace_csv(r.traces, os);
  return os.str();
}

Verdict two_user_reproduction() {
  const auto cfg = reference(0.3);
  const auto run = run_single(cfg);
  const auto p = run.learned.powers_mw;
  std::ostringstream d;
  d << run.training.traces.size() << " episodes, argmax global Q at (" << p[0] << ", " << p[1]
    << ") mW, expected (0, " << cfg.network.cap_mw(1) << ")";
  const bool ok = run.training.traces.size() == 22050 && p[0] == 0.0 &&
                  p[1] == cfg.network.cap_mw(1);
  return {ok, d.str()};
}

Verdict beta_sweep() {
  auto cfg = reference(0.3);
  cfg.betas = parse_betas("0:1:0.05");
  const int threads = threads_from_env(std::max(1, omp_get_num_procs()));
  const auto rows = run_sweep(cfg, threads);
  double worst_gap = 0.0;
  double worst_baseline = 0.0;
  for (const auto& r : rows) {
    worst_gap = std::max(worst_gap, std::abs(r.qcopa_throughput - r.optimal_throughput) /
                                        r.optimal_throughput);
    const double base = std::max(r.greedy_throughput, r.simultaneous_throughput);
    worst_baseline = std::max(worst_baseline, (base - r.qcopa_throughput) / base);
  }
  std::ostringstream d;
  d << rows.size() << " betas, max gap to optimum " << 100 * worst_gap
    << "%, max shortfall vs baselines " << 100 * std::max(0.0, worst_baseline) << "%";
  return {rows.size() == 21 && worst_gap <= 0.02 && worst_baseline <= 0.02, d.str()};
}

Verdict oracle_cross_check() {
  double worst = 0.0;
  for (double beta : parse_betas("0.05:1:0.05")) {
    const auto cfg = two_user_config(beta, 41);
    const auto opt = optimal_two_user(cfg);
    const auto bf = brute_force_grid_optimum(cfg, build_action_grid(cfg));
    worst = std::max(worst, std::abs(opt.sum_throughput - bf.sum_throughput) / bf.sum_throughput);
  }
  std::ostringstream d;
  d << "max relative disagreement " << 100 * worst << "%";
  return {worst <= 0.01, d.str()};
}

Verdict bandit_fixed_point() {
  NetworkConfig cfg;
  cfg.gain = {2.5};
  cfg.interferers = {{}};
  cfg.p_max_dbm = {10.0};
  cfg.n_power = 4;
  LearningParams p;
  p.alpha = 0.5;
  p.gamma = 0.9;
  p.epsilon_start = p.epsilon_end = 0.2;
  Runtime rt(cfg, p, 11);
  for (std::size_t e = 0; e < 50000; ++e) rt.run_episode(e, 0.2);

  std::vector<double> reward(4);
  for (ActionIndex a = 0; a < 4; ++a)
    reward[a] = throughput(0, std::vector<double>{rt.grid().power(0, a)}, cfg);
  const double max_r = *std::max_element(reward.begin(), reward.end());
  const auto& q = rt.agents()[0].q.table(0).values();
  double worst = 0.0;
  for (ActionIndex a = 0; a < 4; ++a)
    worst = std::max(worst, std::abs(q[a] - (reward[a] + p.gamma * max_r / (1 - p.gamma))));
  const bool same_argmax = std::max_element(q.begin(), q.end()) - q.begin() ==
                           std::max_element(reward.begin(), reward.end()) - reward.begin();
  std::ostringstream d;
  d << "max |Q - fixed point| = " << worst << (same_argmax ? ", argmax agrees" : ", argmax differs");
  return {worst <= 1e-2 && same_argmax, d.str()};
}

Verdict determinism() {
  const auto cfg = reference(0.3);
  const auto a = run_single(cfg);
  const auto b = run_single(cfg);
  const bool same_trace = trace_csv(a.training) == trace_csv(b.training);

  omp_set_num_threads(4);
  auto options = cfg.runtime_options();
  options.exec = Exec::parallel;
  const std::size_t episodes = cfg.resolved_episodes();
  const auto par = train(cfg.network, cfg.resolved_learning(episodes), episodes, cfg.seed, options);
  bool same_q = par.agents.size() == a.training.agents.size();
  for (std::size_t j = 0; same_q && j < par.agents.size(); ++j)
    same_q = par.agents[j].q == a.training.agents[j].q;

  std::string d = same_trace ? "trace CSVs identical" : "trace CSVs differ";
  d += same_q ? ", parallel Q-tables identical" : ", parallel Q-tables differ";
  return {same_trace && same_q, d};
}

}  // namespace

int main() {
  criterion(1, "VE exactness on random coordination graphs", 10, ve_exactness);
  criterion(2, "message-passing VE equals in-memory VE", 10, message_equivalence);
  criterion(3, "two-user network learns (0, P2max) at beta 0.3", 60, two_user_reproduction);
  criterion(4, "beta sweep tracks the closed-form optimum", 900, beta_sweep);
  criterion(5, "closed form agrees with the 41-level grid", 30, oracle_cross_check);
  criterion(6, "stateless Q-learning fixed point", 5, bandit_fixed_point);
  criterion(7, "determinism and parallel/serial equality", 120, determinism);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
