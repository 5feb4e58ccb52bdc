#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qcopa/runtime.hpp"
#include "support/random_agents.hpp"

using namespace qcopa;
using qcopa::testing::random_agents;
using qcopa::testing::random_scopes;
using qcopa::testing::tables_of;

namespace {

std::vector<std::string> describe(const std::vector<InMemoryBus::Record>& h) {
  std::vector<std::string> out;
  for (const auto& r : h)
    out.push_back(r.kind + " " + std::to_string(r.from + 1) + "->" + std::to_string(r.to + 1));
  return out;
}

}  // namespace

TEST_CASE("interference scopes are own id plus interferers") {
  const auto scopes = interference_scopes(two_user_config(0.3));
  CHECK(scopes == std::vector<Scope>{{0, 1}, {0, 1}});

  NetworkConfig cfg;
  cfg.gain = {1, 1, 1};
  cfg.p_max_dbm = {10, 10, 10};
  cfg.interferers = {{{2, 0.1}}, {}, {{1, 0.2}, {0, 0.3}}};
  CHECK(interference_scopes(cfg) == std::vector<Scope>{{0, 2}, {1}, {0, 1, 2}});
}

TEST_CASE("ve_via_messages: two agents exchange exactly three messages") {
  std::mt19937_64 rng(1);
  auto agents = random_agents(rng, {{0, 1}, {0, 1}}, {21, 21});
  const auto tables = tables_of(agents);
  const auto bf = brute_force_argmax(tables);

  for (const std::vector<AgentId>& order : {std::vector<AgentId>{1, 0}, std::vector<AgentId>{0, 1}}) {
    InMemoryBus bus(2, true);
    const auto r = ve_via_messages(agents, order, 0, bus);
    CHECK(r.action == bf.action);
    CHECK(r.value == bf.value);
    const auto first = std::to_string(order[0] + 1);
    const auto last = std::to_string(order[1] + 1);
    CHECK(describe(bus.history()) ==
          std::vector<std::string>{"ShareQ " + last + "->" + first,
                                   "FFunction " + first + "->" + last,
                                   "Assignment " + last + "->" + first});
    CHECK(agents[0].assigned == r.action[0]);
    CHECK(agents[1].assigned == r.action[1]);
  }
}

TEST_CASE("ve_via_messages: a single agent sends nothing") {
  std::mt19937_64 rng(2);
  auto agents = random_agents(rng, {{0}}, {6});
  InMemoryBus bus(1, true);
  const auto r = ve_via_messages(agents, std::vector<AgentId>{0}, 0, bus);
  CHECK(bus.sent_count() == 0);
  const auto& v = agents[0].q.table(0).values();
  CHECK(r.action[0] == static_cast<ActionIndex>(std::max_element(v.begin(), v.end()) - v.begin()));
}

TEST_CASE("ve_via_messages: four-agent ring follows the induced-edge pattern") {
  std::mt19937_64 rng(3);
  // Edge-like local functions: Q1(a1,a2), Q2(a2,a4), Q3(a1,a3), Q4(a3,a4).
  const std::vector<Scope> scopes{{0, 1}, {1, 3}, {0, 2}, {2, 3}};
  for (int trial = 0; trial < 20; ++trial) {
    auto agents = random_agents(rng, scopes, {2, 2, 2, 2});
    InMemoryBus bus(4, true);
    const std::vector<AgentId> order{3, 2, 1, 0};
    const auto r = ve_via_messages(agents, order, 0, bus);
    const auto bf = brute_force_argmax(tables_of(agents));
    CHECK(r.value == doctest::Approx(bf.value).epsilon(1e-12));
    CHECK(describe(bus.history()) == std::vector<std::string>{
                                         "ShareQ 2->4",
                                         "FFunction 4->3",
                                         "FFunction 3->2",
                                         "ShareQ 1->2",
                                         "FFunction 2->1",
                                         "Assignment 1->2",
                                         "Assignment 2->3",
                                         "Assignment 3->4",
                                     });
  }
}

TEST_CASE("property: message-passing VE equals in-memory VE") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> card(2, 4);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + trial % 5;
    std::vector<std::size_t> cards(n);
    for (auto& c : cards) c = card(rng);
    auto agents = random_agents(rng, random_scopes(rng, n, 0.4), cards);
    std::vector<AgentId> order(n);
    for (AgentId a = 0; a < n; ++a) order[a] = a;
    std::shuffle(order.begin(), order.end(), rng);

    InMemoryBus bus(n);
    const auto msg = ve_via_messages(agents, order, 0, bus);
    const auto mem = ve_argmax(tables_of(agents), order);
    CHECK(msg.action == mem.action);
    CHECK(msg.value == mem.value);
  }
}

TEST_CASE("ve_via_messages: closed backhaul is an error") {
  std::mt19937_64 rng(5);
  auto agents = random_agents(rng, {{0, 1}, {0, 1}}, {3, 3});
  InMemoryBus bus(2);
  bus.close();
  CHECK_THROWS_AS(ve_via_messages(agents, std::vector<AgentId>{1, 0}, 0, bus), std::runtime_error);
}

TEST_CASE("ve_via_messages: scope guard") {
  std::mt19937_64 rng(6);
  const std::vector<Scope> scopes{{0, 1, 2, 3}, {1}, {2}, {3}};
  auto agents = random_agents(rng, scopes, {2, 2, 2, 2});
  InMemoryBus bus(4);
  VeOptions tight;
  tight.max_induced_scope = 2;
  CHECK_THROWS_AS(ve_via_messages(agents, std::vector<AgentId>{0, 1, 2, 3}, 0, bus, tight),
                  std::length_error);
}

TEST_CASE("run_episode: greedy episodes from identical tables are identical") {
  LearningParams p;
  Runtime a(two_user_config(0.3), p, 11);
  Runtime b(two_user_config(0.3), p, 99);
  std::uniform_real_distribution<double> u(0, 5);
  for (auto* rt : {&a, &b}) {
    std::mt19937_64 rng(7);
    for (auto& agent : rt->agents())
      for (std::size_t i = 0; i < agent.q.table(0).size(); ++i) agent.q.table(0)[i] = u(rng);
  }
  const auto ta = a.run_episode(0, 0.0);
  const auto tb = b.run_episode(0, 0.0);
  CHECK(ta.actions == tb.actions);
  CHECK(ta.rewards == tb.rewards);
}

TEST_CASE("run_episode: single agent with full overwrite stores the observed rate") {
  NetworkConfig cfg;
  cfg.gain = {2.0};
  cfg.interferers = {{}};
  cfg.p_max_dbm = {10.0};
  cfg.n_power = 6;
  LearningParams p;
  p.alpha = 1.0;
  p.gamma = 0.0;
  Runtime rt(cfg, p, 3);
  const auto t = rt.run_episode(0, 1.0);
  const double expected = std::log2(1.0 + 2.0 * t.powers_mw[0] / 1.0);
  CHECK(rt.agents()[0].q.table(0).values()[t.actions[0]] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(t.message_count == 1);  // the reward report only
}

TEST_CASE("run_episode: rewards match the radio model for the powers actually used") {
  Runtime rt(two_user_config(0.45), LearningParams{}, 5);
  for (std::size_t e = 0; e < 300; ++e) {
    const auto t = rt.run_episode(e, 0.7);
    double sum = 0.0;
    for (AgentId i = 0; i < 2; ++i) {
      CHECK(std::abs(t.rewards[i] - throughput(i, t.powers_mw, rt.config())) <= 1e-12);
      CHECK(t.powers_mw[i] == rt.grid().power(i, t.actions[i]));
      sum += t.rewards[i];
    }
    CHECK(t.sum_reward == sum);
    // Two VE passes (3 messages each) plus two reward reports.
    CHECK(t.message_count == 8);
  }
}

TEST_CASE("train: determinism and trace length") {
  const auto cfg = two_user_config(0.3, 7);
  LearningParams p;
  p.epsilon_decay_episodes = 200;
  CHECK(train(cfg, p, 1, 1).traces.size() == 1);
  CHECK_THROWS(train(cfg, p, 0, 1));

  const auto a = train(cfg, p, 400, 42);
  const auto b = train(cfg, p, 400, 42);
  CHECK(a.traces == b.traces);
  const auto c = train(cfg, p, 400, 43);
  CHECK(a.traces != c.traces);
}

TEST_CASE("train: parallel agent execution is bit-identical to serial") {
  NetworkConfig cfg;
  cfg.gain = {2.5, 1.5, 2.0, 1.0};
  cfg.p_max_dbm = {10, 13, 12, 11};
  cfg.n_power = 4;
  cfg.interferers = {{{1, 0.3}, {2, 0.2}}, {{0, 0.3}}, {{3, 0.5}}, {{2, 0.1}, {1, 0.4}}};
  LearningParams p;
  p.epsilon_decay_episodes = 300;

  RuntimeOptions serial;
  RuntimeOptions parallel;
  parallel.exec = Exec::parallel;
  omp_set_num_threads(4);
  const auto s = train(cfg, p, 500, 9, serial);
  const auto q = train(cfg, p, 500, 9, parallel);
  CHECK(s.traces == q.traces);
  for (AgentId j = 0; j < 4; ++j) CHECK(s.agents[j].q == q.agents[j].q);
}

TEST_CASE("train: two-user network learns the interference-avoiding optimum") {
  const auto cfg = two_user_config(0.3, 21);
  LearningParams p;
  p.epsilon_decay_episodes = 17640;
  const auto r = train(cfg, p, 22050, 7);
  const auto powers = r.grid.powers(r.greedy.action);
  CHECK(powers[0] == 0.0);
  CHECK(powers[1] == cfg.cap_mw(1));
}

TEST_CASE("write_trace_csv") {
  EpisodeTrace t;
  t.episode = 3;
  t.epsilon = 0.25;
  t.actions = {0, 2};
  t.powers_mw = {0.0, 5.5};
  t.rewards = {0.0, 1.5};
  t.sum_reward = 1.5;
  std::ostringstream os;
  write_trace_csv(std::vector<EpisodeTrace>{t}, os);
  CHECK(os.str() ==
        "episode,epsilon,actions,powers_mw,rewards,sum_reward\n3,0.25,0;2,0;5.5,0;1.5,1.5\n");
}
