#pragma once

#include <cstddef>
#include <vector>

namespace qcopa {

/// Zero-based agent (SBS) identifier.
using AgentId = std::size_t;

/// Index into an agent's power grid.
using ActionIndex = std::size_t;

/// Index of a (discrete) system state.
using StateId = std::size_t;

/// One action index per agent, indexed by AgentId.
using JointAction = std::vector<ActionIndex>;

/// Selects between the serial reference path and the OpenMP kernel.
/// Both paths produce bit-identical results.
enum class Exec { serial, parallel };

}  // namespace qcopa
