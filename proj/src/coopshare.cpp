#include "coopd2d/coopshare.hpp"

#include <cmath>

namespace coopd2d {

void validate(const QosConfig& q) {
  if (!(q.q_c > 0.0)) throw ArgumentError("qos: q_c must be > 0");
  if (!(q.q_d > 0.0)) throw ArgumentError("qos: q_d must be > 0");
  if (!(q.mu > 0.0)) throw ArgumentError("qos: mu must be > 0");
  if (!(q.nu > 0.0)) throw ArgumentError("qos: nu must be > 0");
  if (!(q.p_min_w > 0.0)) throw ArgumentError("qos: p_min must be > 0");
  if (!(q.p_max_w >= q.p_min_w)) throw ArgumentError("qos: p_max must be >= p_min");
  if (q.phi < 0.0) throw ArgumentError("qos: phi must be >= 0");
  if (q.phi2 < 0.0) throw ArgumentError("qos: phi2 must be >= 0");
}

ActionGrid build_grid(double p_min_w, double p_max_w, double dp_db, double dtheta) {
  if (!(p_min_w > 0.0) || !(p_max_w >= p_min_w))
    throw ConfigError("grid: requires 0 < p_min <= p_max");
  if (!(dp_db > 0.0)) throw ConfigError("grid: dp_db must be > 0");
  if (!(dtheta > 0.0) || !(dtheta < 0.5)) throw ConfigError("grid: dtheta must be in (0, 0.5)");

  const double p_min_dbm = watts_to_dbm(p_min_w);
  const double p_max_dbm = watts_to_dbm(p_max_w);
  const double span_db = p_max_dbm - p_min_dbm;
  const double steps = span_db / dp_db;
  const long n_steps = std::lround(steps);
  if (std::abs(steps - static_cast<double>(n_steps)) > 1e-9)
    throw ConfigError("grid: dp_db does not divide the dB span exactly");

  const double k = 0.5 / dtheta;
  const long n_theta_cells = std::lround(k);
  if (std::abs(k - static_cast<double>(n_theta_cells)) > 1e-9 || n_theta_cells < 2)
    throw ConfigError("grid: 0.5/dtheta must be an integer >= 2");

  ActionGrid g;
  g.power_levels_dbm.reserve(n_steps + 1);
  g.power_levels_w.reserve(n_steps + 1);
  for (long i = 0; i <= n_steps; ++i) {
    const double dbm = i == n_steps ? p_max_dbm : p_min_dbm + static_cast<double>(i) * dp_db;
    g.power_levels_dbm.push_back(dbm);
    g.power_levels_w.push_back(i == 0 ? p_min_w : i == n_steps ? p_max_w : dbm_to_watts(dbm));
  }
  g.theta_levels.reserve(n_theta_cells - 1);
  for (long l = 1; l < n_theta_cells; ++l)
    g.theta_levels.push_back(static_cast<double>(l) * dtheta);
  return g;
}

PairEvaluation evaluate_pair(const PairGammas& g, const ResourceDecision& d, const QosConfig& q) {
  if (!(g.mn > 0.0 && g.mb > 0.0 && g.nb > 0.0 && g.nn > 0.0))
    throw ArgumentError("evaluate_pair: gamma coefficients must be > 0");
  if (!(d.theta > 0.0 && d.theta < 0.5))
    throw ArgumentError("evaluate_pair: theta must lie in (0, 0.5)");
  if (!(d.p_c_w >= q.p_min_w && d.p_c_w <= q.p_max_w && d.p_r_w >= q.p_min_w &&
        d.p_r_w <= q.p_max_w && d.p_d_w >= q.p_min_w && d.p_d_w <= q.p_max_w))
    throw ArgumentError("evaluate_pair: powers must lie in [p_min, p_max]");

  PairEvaluation ev;
  const double decode_snr = g.mn * d.p_c_w;
  const double relay_snr = g.mb * d.p_c_w + g.nb * d.p_r_w;
  ev.se_c = d.theta * std::log2(1.0 + std::min(decode_snr, relay_snr));
  ev.se_d = (1.0 - 2.0 * d.theta) * std::log2(1.0 + g.nn * d.p_d_w);
  ev.pbar_c = d.theta * d.p_c_w;
  ev.pbar_d = d.theta * d.p_r_w + (1.0 - 2.0 * d.theta) * d.p_d_w;
  ev.ee_c = ev.se_c / ev.pbar_c;
  ev.ee_d = ev.se_d / ev.pbar_d;
  ev.u = q.mu * ev.ee_c + q.nu * ev.ee_d;
  ev.c1_ok = ev.se_c >= q.q_c;
  ev.c2_ok = ev.se_d >= q.q_d;
  return ev;
}

double reward(const PairEvaluation& ev, const QosConfig& q) {
  const double short_c = std::min(ev.se_c - q.q_c, 0.0) / q.q_c;
  const double short_d = std::min(ev.se_d - q.q_d, 0.0) / q.q_d;
  return ev.u * (1.0 + q.phi * short_c + q.phi2 * short_d);
}

std::optional<std::pair<double, double>> feasibility_interval(const PairGammas& g,
                                                              const QosConfig& q) {
  const double cell_log = std::log2(1.0 + q.p_max_w * std::min(g.mn, g.mb + g.nb));
  const double d2d_log = std::log2(1.0 + q.p_max_w * g.nn);
  const double theta_lo = q.q_c / cell_log;
  const double theta_hi = 0.5 - q.q_d / (2.0 * d2d_log);
  if (theta_lo > theta_hi) return std::nullopt;
  if (theta_lo >= 0.5 || theta_hi <= 0.0) return std::nullopt;
  return std::make_pair(theta_lo, theta_hi);
}

namespace {

// Sweeps joint indices [begin, end); worker-local best with feasibility gate.
std::optional<PairOpt> sweep_range(const PairGammas& g, const QosConfig& q, const ActionGrid& grid,
                                   std::uint32_t begin, std::uint32_t end) {
  std::optional<PairOpt> best;
  for (std::uint32_t a = begin; a < end; ++a) {
    const ResourceDecision d = grid.decision(a);
    const PairEvaluation ev = evaluate_pair(g, d, q);
    if (!(ev.c1_ok && ev.c2_ok)) continue;
    if (!best || ev.u > best->u) best = PairOpt{d, a, ev.u};
  }
  return best;
}

}  // namespace

std::optional<PairOpt> brute_force_pair_opt(const PairGammas& g, const QosConfig& q,
                                            const ActionGrid& grid) {
  const std::uint32_t total = grid.joint_size();
  constexpr std::uint32_t kBlock = 4096;
  const std::uint32_t n_blocks = (total + kBlock - 1) / kBlock;
  std::vector<std::optional<PairOpt>> block_best(n_blocks);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(n_blocks); ++b) {
    const std::uint32_t begin = static_cast<std::uint32_t>(b) * kBlock;
    const std::uint32_t end = std::min(begin + kBlock, total);
    block_best[b] = sweep_range(g, q, grid, begin, end);
  }
  // Blocks are combined in index order, so the result is independent of the
  // worker count and ties resolve to the lowest joint index.
  std::optional<PairOpt> best;
  for (const auto& cand : block_best) {
    if (!cand) continue;
    if (!best || cand->u > best->u) best = cand;
  }
  return best;
}

namespace reference {

std::optional<PairOpt> brute_force_pair_opt(const PairGammas& g, const QosConfig& q,
                                            const ActionGrid& grid) {
  return sweep_range(g, q, grid, 0, grid.joint_size());
}

}  // namespace reference

HessianEigen coupling_hessian(double beta, double x, double y) {
  if (!(beta > 0.0)) throw ArgumentError("coupling_hessian: beta must be > 0");
  if (!(x > 0.0)) throw ArgumentError("coupling_hessian: x must be > 0");
  if (!(y > 0.0 && y < 0.5)) throw ArgumentError("coupling_hessian: y must lie in (0, 0.5)");
  constexpr double ln2 = 0.6931471805599453;
  const double bx1 = 1.0 + beta * x;
  HessianEigen e;
  e.h11 = beta * beta * (1.0 - 2.0 * y) / (bx1 * bx1 * ln2);
  e.h12 = 2.0 * beta / (bx1 * ln2);
  const double half = 0.5 * e.h11;
  const double root = std::sqrt(half * half + e.h12 * e.h12);
  e.lambda1 = half + root;
  e.lambda2 = half - root;
  return e;
}

std::vector<HessianEigen> nonconvexity_probe(double beta, std::span<const double> x_grid,
                                             std::span<const double> y_grid) {
  std::vector<HessianEigen> out;
  out.reserve(x_grid.size() * y_grid.size());
  for (double x : x_grid)
    for (double y : y_grid) out.push_back(coupling_hessian(beta, x, y));
  return out;
}

}  // namespace coopd2d
