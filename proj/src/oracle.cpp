#include "qcopa/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcopa {

std::string_view to_string(AllocationKind kind) {
  switch (kind) {
    case AllocationKind::closed_form: return "closed-form";
    case AllocationKind::brute_force: return "brute-force";
    case AllocationKind::greedy: return "greedy";
    case AllocationKind::simultaneous: return "simultaneous";
    case AllocationKind::learned: return "learned";
  }
  return "unknown";
}

Allocation make_allocation(std::vector<double> powers_mw, const NetworkConfig& cfg,
                           AllocationKind kind) {
  Allocation a;
  a.sum_throughput = sum_throughput(powers_mw, cfg);
  a.powers_mw = std::move(powers_mw);
  a.kind = kind;
  return a;
}

Allocation optimal_two_user(const NetworkConfig& cfg) {
  cfg.validate();
  if (cfg.n_agents() != 2)
    throw std::invalid_argument("closed form needs exactly two agents");
  const double beta = cfg.beta(1, 0);
  if (std::abs(beta - cfg.beta(0, 1)) > 1e-12)
    throw std::invalid_argument("closed form needs a symmetric interference ratio");

  const double p1 = cfg.cap_mw(0);
  const double p2 = cfg.cap_mw(1);
  // Received SNR at full power; with 1 mW noise this is g * P_max.
  const double s1 = cfg.gain[0] * p1 / cfg.noise_mw;
  const double s2 = cfg.gain[1] * p2 / cfg.noise_mw;
  const double threshold =
      beta == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (beta * beta);

  const bool only_1 = s1 >= std::max(s2, threshold);
  const bool only_2 = s2 >= std::max(s1, threshold);
  std::vector<double> powers;
  if (only_1 && only_2)
    powers = s1 >= s2 ? std::vector<double>{p1, 0.0} : std::vector<double>{0.0, p2};
  else if (only_1)
    powers = {p1, 0.0};
  else if (only_2)
    powers = {0.0, p2};
  else
    powers = {p1, p2};
  return make_allocation(std::move(powers), cfg, AllocationKind::closed_form);
}

Allocation brute_force_grid_optimum(const NetworkConfig& cfg, const ActionGrid& grid,
                                    Exec exec, std::size_t limit) {
  cfg.validate();
  const std::size_t n = cfg.n_agents();
  if (grid.n_agents() != n) throw std::invalid_argument("grid does not match network");
  std::size_t total = 1;
  for (AgentId i = 0; i < n; ++i) {
    const std::size_t k = grid.size(i);
    if (k == 0 || total > limit / k)
      throw std::length_error("grid joint space exceeds the brute-force limit");
    total *= k;
  }

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_rank = 0;
  const bool parallel = exec == Exec::parallel;

#pragma omp parallel if (parallel)
  {
    double local_best = -std::numeric_limits<double>::infinity();
    std::size_t local_rank = 0;
    JointAction joint(n, 0);
    std::vector<double> powers(n);
#pragma omp for schedule(static) nowait
    for (std::size_t rank = 0; rank < total; ++rank) {
      std::size_t rest = rank;
      for (std::size_t a = n; a-- > 0;) {
        joint[a] = rest % grid.size(a);
        rest /= grid.size(a);
        powers[a] = grid.levels[a][joint[a]];
      }
      double v = 0.0;
      for (AgentId i = 0; i < n; ++i) v += throughput(i, powers, cfg);
      if (v > local_best) {
        local_best = v;
        local_rank = rank;
      }
    }
#pragma omp critical(qcopa_grid_optimum)
    {
      if (local_best > best || (local_best == best && local_rank < best_rank)) {
        best = local_best;
        best_rank = local_rank;
      }
    }
  }

  std::vector<double> powers(n);
  for (std::size_t a = n; a-- > 0;) {
    powers[a] = grid.levels[a][best_rank % grid.size(a)];
    best_rank /= grid.size(a);
  }
  return make_allocation(std::move(powers), cfg, AllocationKind::brute_force);
}

Allocation greedy_allocation(const NetworkConfig& cfg) {
  cfg.validate();
  if (cfg.n_agents() != 2)
    throw std::invalid_argument("greedy baseline is defined for two agents");
  const double p1 = cfg.cap_mw(0);
  const double p2 = cfg.cap_mw(1);
  std::vector<double> powers =
      p1 >= p2 ? std::vector<double>{p1, 0.0} : std::vector<double>{0.0, p2};
  return make_allocation(std::move(powers), cfg, AllocationKind::greedy);
}

Allocation simultaneous_allocation(const NetworkConfig& cfg) {
  cfg.validate();
  std::vector<double> powers(cfg.n_agents());
  for (AgentId i = 0; i < cfg.n_agents(); ++i) powers[i] = cfg.cap_mw(i);
  return make_allocation(std::move(powers), cfg, AllocationKind::simultaneous);
}

}  // namespace qcopa
