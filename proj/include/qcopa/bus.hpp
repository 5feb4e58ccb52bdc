#pragma once

#include <atomic>
#include <deque>
#include <mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcopa/coordgraph.hpp"

namespace qcopa {

/// A local Q-table handed to the agent that eliminates a variable in it.
struct ShareQ {
  AgentId from;
  AgentId to;
  std::size_t tag;  // creation rank; fixes the summation order
  FunctionTable table;
};

/// Conditional max-table produced by an eliminated agent.
struct FFunction {
  AgentId from;
  AgentId to;
  std::size_t tag;
  FunctionTable table;
};

/// Partial joint action propagated during the recovery pass.
struct Assignment {
  AgentId from;
  AgentId to;
  std::vector<std::pair<AgentId, ActionIndex>> actions;
};

/// SINR measured by an agent's UE and reported back to it.
struct RewardFeedback {
  AgentId agent;
  double sinr;
};

using Message = std::variant<ShareQ, FFunction, Assignment, RewardFeedback>;

AgentId recipient(const Message& m);
std::string kind_name(const Message& m);

/// Backhaul between SBSs. Delivery is reliable and in order per sender.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws std::runtime_error when the recipient cannot be reached.
  virtual void send(Message m) = 0;
  /// Removes and returns everything queued for `agent`, oldest first.
  virtual std::vector<Message> drain(AgentId agent) = 0;
  virtual std::size_t sent_count() const = 0;
};

/// In-process bus with one mailbox per agent. Thread-safe.
class InMemoryBus final : public Transport {
 public:
  struct Record {
    std::string kind;
    AgentId from;
    AgentId to;
  };

  explicit InMemoryBus(std::size_t n_agents, bool keep_history = false);

  void send(Message m) override;
  std::vector<Message> drain(AgentId agent) override;
  std::size_t sent_count() const override { return sent_.load(); }

  void close();
  bool closed() const;
  std::vector<Record> history() const;
  void clear_history();

 private:
  mutable std::mutex mu_;
  std::vector<std::deque<Message>> mailboxes_;
  std::vector<Record> history_;
  bool keep_history_;
  bool closed_ = false;
  std::atomic<std::size_t> sent_{0};
};

}  // namespace qcopa
