#pragma once

#include <span>
#include <vector>

#include "qcopa/types.hpp"

namespace qcopa {

/// Interference contribution of another SBS at a UE.
struct InterferenceLink {
  AgentId source;  // interfering SBS j
  double beta;     // fraction of j's power seen at this UE, in [0, 1]
};

/// Static description of the interference channel.
///
/// All powers are linear milliwatts except `p_max_dbm`, which is kept in
/// dBm because that is how deployments specify caps. `interferers[i]`
/// holds D_i together with the directional ratios beta_ji.
struct NetworkConfig {
  std::vector<double> gain;
  std::vector<std::vector<InterferenceLink>> interferers;
  double noise_mw = 1.0;
  std::vector<double> p_max_dbm;
  std::size_t n_power = 21;

  std::size_t n_agents() const { return gain.size(); }
  double cap_mw(AgentId i) const;
  /// beta_ji, or 0 when j does not interfere with i.
  double beta(AgentId j, AgentId i) const;

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Two SBSs interfering with each other through a symmetric ratio.
/// Defaults are the reference deployment: g = (2.5, 1.5), caps 10/13 dBm,
/// noise 0 dBm.
NetworkConfig two_user_config(double beta, std::size_t n_power = 21,
                              double g1 = 2.5, double g2 = 1.5,
                              double p1_max_dbm = 10.0,
                              double p2_max_dbm = 13.0,
                              double noise_dbm = 0.0);

/// Per-agent discrete transmit power levels in mW.
struct ActionGrid {
  std::vector<std::vector<double>> levels;

  std::size_t n_agents() const { return levels.size(); }
  std::size_t size(AgentId i) const { return levels.at(i).size(); }
  double power(AgentId i, ActionIndex k) const { return levels.at(i).at(k); }
  std::vector<double> powers(const JointAction& action) const;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

double sinr(AgentId i, std::span<const double> powers_mw,
            const NetworkConfig& cfg);
double throughput(AgentId i, std::span<const double> powers_mw,
                  const NetworkConfig& cfg);

/// Network objective. Throws std::invalid_argument when a power exceeds its
/// cap.
double sum_throughput(std::span<const double> powers_mw,
                      const NetworkConfig& cfg);

/// n_power levels per agent, linearly spaced in mW over [0, cap].
ActionGrid build_action_grid(const NetworkConfig& cfg);

}  // namespace qcopa
