#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coopd2d/channel.hpp"
#include "coopd2d/common.hpp"

namespace coopd2d {

/// QoS targets, priority weights, power limits and reward-shaping constants
/// for one cellular/D2D pair evaluation.
struct QosConfig {
  double q_c = 5.0;     // bps/Hz, minimum cellular SE
  double q_d = 3.0;     // bps/Hz, minimum D2D SE
  double mu = 1.0;      // cellular EE weight
  double nu = 1.0;      // D2D EE weight
  double p_min_w = 0.0;
  double p_max_w = 0.0;
  double phi = 1.0;     // shaping weight for cellular QoS violations
  double phi2 = 1.0;    // shaping weight for D2D QoS violations
};

void validate(const QosConfig& q);

/// One joint allocation: the three transmit powers and the spectrum-sharing
/// factor theta (fraction of the resource block per relay phase).
struct ResourceDecision {
  double p_c_w = 0.0;
  double p_r_w = 0.0;
  double p_d_w = 0.0;
  double theta = 0.0;
};

/// Discrete joint action lattice. Power levels are geometric from p_min to
/// p_max with a fixed dB step; theta levels are the interior multiples of
/// dtheta in (0, 0.5). Joint indices run theta-fastest, then p_d, p_r, p_c.
struct ActionGrid {
  std::vector<double> power_levels_w;
  std::vector<double> power_levels_dbm;
  std::vector<double> theta_levels;

  std::uint32_t power_count() const { return static_cast<std::uint32_t>(power_levels_w.size()); }
  std::uint32_t theta_count() const { return static_cast<std::uint32_t>(theta_levels.size()); }
  std::uint32_t joint_size() const {
    const std::uint32_t i = power_count();
    return i * i * i * theta_count();
  }

  struct Indices {
    std::uint32_t pc, pr, pd, th;
  };

  std::uint32_t encode(Indices ix) const {
    const std::uint32_t i = power_count();
    return ((ix.pc * i + ix.pr) * i + ix.pd) * theta_count() + ix.th;
  }
  Indices decode(std::uint32_t a) const {
    const std::uint32_t i = power_count();
    const std::uint32_t l = theta_count();
    Indices ix;
    ix.th = a % l;
    a /= l;
    ix.pd = a % i;
    a /= i;
    ix.pr = a % i;
    ix.pc = a / i;
    return ix;
  }
  ResourceDecision decision(std::uint32_t a) const {
    const Indices ix = decode(a);
    return {power_levels_w[ix.pc], power_levels_w[ix.pr], power_levels_w[ix.pd],
            theta_levels[ix.th]};
  }
};

/// dp_db must divide the dB span exactly (within 1e-9) and 0.5/dtheta must be
/// an integer >= 2; anything else is a configuration error, never silently
/// rounded.
ActionGrid build_grid(double p_min_w, double p_max_w, double dp_db, double dtheta);

/// Per-pair outcome of one decision: spectral efficiencies, average powers,
/// energy efficiencies, the weighted utility and the QoS flags.
struct PairEvaluation {
  double se_c = 0.0;
  double se_d = 0.0;
  double pbar_c = 0.0;
  double pbar_d = 0.0;
  double ee_c = 0.0;
  double ee_d = 0.0;
  double u = 0.0;
  bool c1_ok = false;
  bool c2_ok = false;
};

PairEvaluation evaluate_pair(const PairGammas& g, const ResourceDecision& d, const QosConfig& q);

/// Shaped training reward: the utility scaled down (possibly below zero) in
/// proportion to any QoS shortfall. Equals the utility when both constraints
/// hold.
double reward(const PairEvaluation& ev, const QosConfig& q);

/// Closed-form theta interval at full power. Empty result means the pair is
/// infeasible for every decision and can be excluded outright.
std::optional<std::pair<double, double>> feasibility_interval(const PairGammas& g,
                                                              const QosConfig& q);

struct PairOpt {
  ResourceDecision decision;
  std::uint32_t index = 0;
  double u = 0.0;
};

/// Exhaustive sweep of the joint grid; returns the feasible utility maximizer
/// (ties broken toward the lowest joint index) or empty when no action is
/// feasible. Partitioned across OpenMP workers with a deterministic reduction.
std::optional<PairOpt> brute_force_pair_opt(const PairGammas& g, const QosConfig& q,
                                            const ActionGrid& grid);

namespace reference {
/// Single-threaded sweep kept as the reference implementation for testing.
std::optional<PairOpt> brute_force_pair_opt(const PairGammas& g, const QosConfig& q,
                                            const ActionGrid& grid);
}  // namespace reference

/// Analytic Hessian eigenvalues of the coupling term f(x, y) =
/// (2y - 1) log2(1 + beta x) at one point. lambda1 >= lambda2.
struct HessianEigen {
  double h11 = 0.0;
  double h12 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

HessianEigen coupling_hessian(double beta, double x, double y);

/// Eigenvalue pairs over the full x-major grid (for each x, all y).
std::vector<HessianEigen> nonconvexity_probe(double beta, std::span<const double> x_grid,
                                             std::span<const double> y_grid);

}  // namespace coopd2d
