#include "qcopa/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcopa {

namespace {

void check_agent(AgentId i, const NetworkConfig& cfg) {
  if (i >= cfg.n_agents())
    throw std::out_of_range("unknown agent id " + std::to_string(i));
}

}  // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double NetworkConfig::cap_mw(AgentId i) const {
  return dbm_to_mw(p_max_dbm.at(i));
}

double NetworkConfig::beta(AgentId j, AgentId i) const {
  for (const auto& link : interferers.at(i))
    if (link.source == j) return link.beta;
  return 0.0;
}

void NetworkConfig::validate() const {
  const std::size_t n = n_agents();
  if (n == 0) throw std::invalid_argument("network has no agents");
  if (interferers.size() != n || p_max_dbm.size() != n)
    throw std::invalid_argument(
        "gain, interferers and p_max_dbm must have one entry per agent");
  if (!(noise_mw > 0.0) || !std::isfinite(noise_mw))
    throw std::invalid_argument("noise power must be positive");
  if (n_power < 2) throw std::invalid_argument("n_power must be at least 2");

  for (AgentId i = 0; i < n; ++i) {
    if (!(gain[i] > 0.0) || !std::isfinite(gain[i]))
      throw std::invalid_argument("gain of agent " + std::to_string(i) +
                                  " must be positive");
    // -inf dBm is a switched-off transmitter.
    if (std::isnan(p_max_dbm[i]) || (std::isinf(p_max_dbm[i]) && p_max_dbm[i] > 0))
      throw std::invalid_argument("power cap of agent " + std::to_string(i) +
                                  " must be finite or -inf");
    std::vector<AgentId> seen;
    for (const auto& link : interferers[i]) {
      if (link.source >= n)
        throw std::invalid_argument("interferer id out of range");
      if (link.source == i)
        throw std::invalid_argument("agent " + std::to_string(i) +
                                    " lists itself as an interferer");
      if (std::find(seen.begin(), seen.end(), link.source) != seen.end())
        throw std::invalid_argument("duplicate interferer for agent " +
                                    std::to_string(i));
      if (!(link.beta >= 0.0 && link.beta <= 1.0))
        throw std::invalid_argument("interference ratio must lie in [0, 1]");
      seen.push_back(link.source);
    }
  }
}

NetworkConfig two_user_config(double beta, std::size_t n_power, double g1,
                              double g2, double p1_max_dbm, double p2_max_dbm,
                              double noise_dbm) {
  NetworkConfig cfg;
  cfg.gain = {g1, g2};
  cfg.interferers = {{{1, beta}}, {{0, beta}}};
  cfg.noise_mw = dbm_to_mw(noise_dbm);
  cfg.p_max_dbm = {p1_max_dbm, p2_max_dbm};
  cfg.n_power = n_power;
  cfg.validate();
  return cfg;
}

std::vector<double> ActionGrid::powers(const JointAction& action) const {
  if (action.size() != levels.size())
    throw std::invalid_argument("joint action size does not match grid");
  std::vector<double> out(action.size());
  for (AgentId i = 0; i < action.size(); ++i) out[i] = power(i, action[i]);
  return out;
}

double sinr(AgentId i, std::span<const double> powers_mw,
            const NetworkConfig& cfg) {
  check_agent(i, cfg);
  if (powers_mw.size() != cfg.n_agents())
    throw std::invalid_argument("power vector size does not match network");
  if (powers_mw[i] < 0.0) throw std::invalid_argument("negative power");

  const double g = cfg.gain[i];
  double interference = 0.0;
  for (const auto& link : cfg.interferers[i]) {
    const double p = powers_mw[link.source];
    if (p < 0.0) throw std::invalid_argument("negative power");
    interference += g * p * link.beta;
  }
  return g * powers_mw[i] / (interference + cfg.noise_mw);
}

double throughput(AgentId i, std::span<const double> powers_mw,
                  const NetworkConfig& cfg) {
  return std::log2(1.0 + sinr(i, powers_mw, cfg));
}

double sum_throughput(std::span<const double> powers_mw,
                      const NetworkConfig& cfg) {
  if (powers_mw.size() != cfg.n_agents())
    throw std::invalid_argument("power vector size does not match network");
  for (AgentId i = 0; i < cfg.n_agents(); ++i) {
    // Relative slack absorbs the dBm -> mW round trip.
    if (powers_mw[i] > cfg.cap_mw(i) * (1.0 + 1e-12))
      throw std::invalid_argument("power of agent " + std::to_string(i) +
                                  " exceeds its cap");
  }
  double total = 0.0;
  for (AgentId i = 0; i < cfg.n_agents(); ++i)
    total += throughput(i, powers_mw, cfg);
  return total;
}

ActionGrid build_action_grid(const NetworkConfig& cfg) {
  if (cfg.n_power < 2) throw std::invalid_argument("n_power must be at least 2");
  ActionGrid grid;
  grid.levels.resize(cfg.n_agents());
  const double steps = static_cast<double>(cfg.n_power - 1);
  for (AgentId i = 0; i < cfg.n_agents(); ++i) {
    const double cap = cfg.cap_mw(i);
    if (!(cap > 0.0))
      throw std::invalid_argument("agent " + std::to_string(i) +
                                  " has a zero power cap; grid would not be "
                                  "strictly increasing");
    auto& lv = grid.levels[i];
    lv.resize(cfg.n_power);
    for (std::size_t k = 0; k < cfg.n_power; ++k)
      lv[k] = cap * static_cast<double>(k) / steps;
    lv.back() = cap;
  }
  return grid;
}

}  // namespace qcopa
