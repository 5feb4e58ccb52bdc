#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "qcopa/types.hpp"

namespace qcopa {

/// Ordered list of distinct agents indexing a table.
using Scope = std::vector<AgentId>;

/// Dense table over the joint actions of a scope.
///
/// Entries are stored row-major with the first scope agent most
/// significant, so iteration order is lexicographic in the scoped action.
/// An empty scope is a scalar with exactly one entry.
template <typename T>
class Table {
 public:
  Table() : values_(1) {}

  Table(Scope scope, std::vector<std::size_t> cards, std::vector<T> values)
      : scope_(std::move(scope)),
        cards_(std::move(cards)),
        values_(std::move(values)) {
    if (scope_.size() != cards_.size())
      throw std::invalid_argument("scope and cardinality lists differ in size");
    for (std::size_t a = 0; a < scope_.size(); ++a) {
      if (cards_[a] == 0)
        throw std::invalid_argument("agent with an empty action set");
      for (std::size_t b = a + 1; b < scope_.size(); ++b)
        if (scope_[a] == scope_[b])
          throw std::invalid_argument("duplicate agent " +
                                      std::to_string(scope_[a]) + " in scope");
    }
    strides_.assign(scope_.size(), 1);
    std::size_t total = 1;
    for (std::size_t a = scope_.size(); a-- > 0;) {
      strides_[a] = total;
      total *= cards_[a];
    }
    if (values_.size() != total)
      throw std::invalid_argument("table has " + std::to_string(values_.size()) +
                                  " values, scope requires " +
                                  std::to_string(total));
    if constexpr (std::is_floating_point_v<T>) {
      for (const T& v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite table value");
    }
  }

  static Table filled(Scope scope, std::vector<std::size_t> cards, T value) {
    std::size_t total = 1;
    for (auto c : cards) total *= c;
    return Table(std::move(scope), std::move(cards), std::vector<T>(total, value));
  }

  static Table scalar(T value) { return Table({}, {}, {value}); }

  const Scope& scope() const { return scope_; }
  const std::vector<std::size_t>& cards() const { return cards_; }
  const std::vector<std::size_t>& strides() const { return strides_; }
  const std::vector<T>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  bool contains(AgentId agent) const {
    return std::find(scope_.begin(), scope_.end(), agent) != scope_.end();
  }

  /// Position of `agent` in the scope; throws if absent.
  std::size_t position(AgentId agent) const {
    auto it = std::find(scope_.begin(), scope_.end(), agent);
    if (it == scope_.end())
      throw std::invalid_argument("agent " + std::to_string(agent) +
                                  " not in scope");
    return static_cast<std::size_t>(it - scope_.begin());
  }

  std::size_t card_of(AgentId agent) const { return cards_[position(agent)]; }

  /// Flat index of a scoped action (one index per scope entry).
  std::size_t index(std::span<const ActionIndex> scoped) const {
    if (scoped.size() != scope_.size())
      throw std::invalid_argument("scoped action has wrong arity");
    std::size_t idx = 0;
    for (std::size_t a = 0; a < scope_.size(); ++a) {
      if (scoped[a] >= cards_[a])
        throw std::out_of_range("action index out of range for agent " +
                                std::to_string(scope_[a]));
      idx += scoped[a] * strides_[a];
    }
    return idx;
  }

  /// Flat index of the entry selected by a full joint action.
  std::size_t joint_index(std::span<const ActionIndex> joint) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < scope_.size(); ++a) {
      if (scope_[a] >= joint.size())
        throw std::invalid_argument("joint action does not cover scope");
      const ActionIndex k = joint[scope_[a]];
      if (k >= cards_[a])
        throw std::out_of_range("action index out of range for agent " +
                                std::to_string(scope_[a]));
      idx += k * strides_[a];
    }
    return idx;
  }

  /// Inverse of index().
  std::vector<ActionIndex> decode(std::size_t flat) const {
    std::vector<ActionIndex> out(scope_.size());
    for (std::size_t a = 0; a < scope_.size(); ++a) {
      out[a] = flat / strides_[a];
      flat %= strides_[a];
    }
    return out;
  }

  const T& at(std::span<const ActionIndex> scoped) const {
    return values_[index(scoped)];
  }
  T& at(std::span<const ActionIndex> scoped) { return values_[index(scoped)]; }

  const T& at_joint(std::span<const ActionIndex> joint) const {
    return values_[joint_index(joint)];
  }

  T& operator[](std::size_t flat) { return values_[flat]; }
  const T& operator[](std::size_t flat) const { return values_[flat]; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  Scope scope_;
  std::vector<std::size_t> cards_;
  std::vector<std::size_t> strides_;
  std::vector<T> values_;
};

using FunctionTable = Table<double>;
/// Best-response table: the maximizing action of an eliminated agent.
using ResponseTable = Table<ActionIndex>;

struct EliminationRecord {
  AgentId eliminated;
  FunctionTable f;
  ResponseTable b;
};

/// Result of maximizing one agent out of a set of tables.
struct Elimination {
  FunctionTable f;
  ResponseTable b;
  std::vector<FunctionTable> untouched;
};

struct VeOptions {
  /// Largest scope an intermediate f table may have.
  std::size_t max_induced_scope = 8;
  Exec exec = Exec::serial;
};

struct ArgmaxResult {
  JointAction action;
  double value = 0.0;
};

struct VeResult {
  JointAction action;
  double value = 0.0;
  std::vector<EliminationRecord> records;
};

/// Maximizes `agent` out of the sum of `involved`, all of which must contain
/// it. Tables are summed in the order given; ties go to the lowest action.
/// The result scope is the sorted union of the inputs' scopes minus `agent`.
EliminationRecord maximize_out(std::span<const FunctionTable* const> involved,
                               AgentId agent, const VeOptions& options = {});

Elimination eliminate_agent(std::span<const FunctionTable> functions,
                            AgentId agent, const VeOptions& options = {});

/// Exact argmax of the sum of `functions` by variable elimination in
/// `order`, followed by the reverse recovery pass. The value is the sum of
/// the inputs (in input order) at the recovered action.
VeResult ve_argmax(std::span<const FunctionTable> functions,
                   std::span<const AgentId> order,
                   const VeOptions& options = {});

/// Exhaustive argmax over all joint actions, lexicographic lowest-index
/// tie-break. Throws when the joint space exceeds `limit`.
ArgmaxResult brute_force_argmax(std::span<const FunctionTable> functions,
                                Exec exec = Exec::serial,
                                std::size_t limit = 10'000'000);

/// Sum of all tables at a joint action, in input order.
double sum_at(std::span<const FunctionTable> functions,
              std::span<const ActionIndex> joint);

/// Number of agents and per-agent action counts implied by a set of tables.
/// Every id in [0, n) must appear in some scope with a consistent count.
std::vector<std::size_t> agent_cards(std::span<const FunctionTable> functions);

struct CoordinationGraph {
  std::size_t n_agents = 0;
  std::vector<Scope> scopes;

  void validate() const;
  /// Sorted neighbor lists: agents sharing at least one scope.
  std::vector<std::vector<AgentId>> neighbors() const;
};

enum class EliminationStrategy { fixed_reverse, min_degree };

std::vector<AgentId> default_elimination_order(const CoordinationGraph& graph,
                                               EliminationStrategy strategy);

}  // namespace qcopa
