#include "qcopa/bus.hpp"

#include <stdexcept>

namespace qcopa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

AgentId sender(const Message& m) {
  return std::visit(overloaded{[](const RewardFeedback& r) { return r.agent; },
                               [](const auto& x) { return x.from; }},
                    m);
}

}  // namespace

AgentId recipient(const Message& m) {
  return std::visit(overloaded{[](const RewardFeedback& r) { return r.agent; },
                               [](const auto& x) { return x.to; }},
                    m);
}

std::string kind_name(const Message& m) {
  return std::visit(
      overloaded{[](const ShareQ&) { return std::string("ShareQ"); },
                 [](const FFunction&) { return std::string("FFunction"); },
                 [](const Assignment&) { return std::string("Assignment"); },
                 [](const RewardFeedback&) { return std::string("RewardFeedback"); }},
      m);
}

InMemoryBus::InMemoryBus(std::size_t n_agents, bool keep_history)
    : mailboxes_(n_agents), keep_history_(keep_history) {}

void InMemoryBus::send(Message m) {
  const AgentId to = recipient(m);
  const AgentId from = sender(m);
  if (!std::holds_alternative<RewardFeedback>(m) && from == to)
    throw std::invalid_argument("agent " + std::to_string(from) +
                                " sent a message to itself");
  std::lock_guard lock(mu_);
  if (closed_)
    throw std::runtime_error("backhaul closed; agent " + std::to_string(to) +
                             " unreachable");
  if (to >= mailboxes_.size())
    throw std::runtime_error("no mailbox for agent " + std::to_string(to));
  if (keep_history_) history_.push_back({kind_name(m), from, to});
  mailboxes_[to].push_back(std::move(m));
  ++sent_;
}

std::vector<Message> InMemoryBus::drain(AgentId agent) {
  std::lock_guard lock(mu_);
  if (agent >= mailboxes_.size())
    throw std::runtime_error("no mailbox for agent " + std::to_string(agent));
  auto& box = mailboxes_[agent];
  std::vector<Message> out(std::make_move_iterator(box.begin()),
                           std::make_move_iterator(box.end()));
  box.clear();
  return out;
}

void InMemoryBus::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
}

bool InMemoryBus::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::vector<InMemoryBus::Record> InMemoryBus::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

void InMemoryBus::clear_history() {
  std::lock_guard lock(mu_);
  history_.clear();
}

}  // namespace qcopa
