#pragma once

#include <string_view>
#include <vector>

#include "qcopa/radio.hpp"

namespace qcopa {

enum class AllocationKind { closed_form, brute_force, greedy, simultaneous, learned };

std::string_view to_string(AllocationKind kind);

struct Allocation {
  std::vector<double> powers_mw;
  double sum_throughput = 0.0;
  AllocationKind kind = AllocationKind::closed_form;
};

/// Evaluates `powers_mw` through sum_throughput() and labels it.
Allocation make_allocation(std::vector<double> powers_mw, const NetworkConfig& cfg,
                           AllocationKind kind);

/// Closed-form sum-rate optimum of the symmetric two-user channel.
///
/// Full power to one user when its SNR at the cap dominates both the
/// other user's and 1/beta^2; otherwise both at full power. If both
/// single-user conditions hold the larger SNR wins, ties to agent 0.
Allocation optimal_two_user(const NetworkConfig& cfg);

/// Exhaustive search of sum_throughput over the grid.
Allocation brute_force_grid_optimum(const NetworkConfig& cfg, const ActionGrid& grid,
                                    Exec exec = Exec::serial,
                                    std::size_t limit = 10'000'000);

/// Cap to the agent with the larger linear cap, zero to the other.
Allocation greedy_allocation(const NetworkConfig& cfg);

/// Every agent at its cap.
Allocation simultaneous_allocation(const NetworkConfig& cfg);

}  // namespace qcopa
