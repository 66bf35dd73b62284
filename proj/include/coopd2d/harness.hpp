#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "coopd2d/config.hpp"
#include "coopd2d/coopset.hpp"
#include "coopd2d/dqn.hpp"
#include "coopd2d/matching.hpp"

namespace coopd2d {

struct RunResult {
  SchemeKind scheme = SchemeKind::Optimal;
  int m_links = 0;
  int n_links = 0;
  double wsee = 0.0;
  int nonzero_u = 0;
  double wallclock_ms = 0.0;
  std::uint64_t seed = 0;
  int qos_violations = 0;
};

struct SchemeDetail {
  RunResult result;
  WeightMatrix u;
  Matching match;
};

/// Everything a scheme needs for one scenario. The training config's seed is
/// a base: each agent reseeds from (run seed, m, n), so results never depend
/// on worker scheduling.
struct SchemeContext {
  const CellScenario& scenario;
  const ChannelGains& gains;
  const QosConfig& qos;
  const ActionGrid& grid;
  const TrainConfig& train;
  const CoopSetConfig& coopset;
};

SchemeDetail run_scheme_detailed(const SchemeContext& ctx, SchemeKind scheme, std::uint64_t seed,
                                 bool record_timing = true);
RunResult run_scheme(const SchemeContext& ctx, SchemeKind scheme, std::uint64_t seed,
                     bool record_timing = true);

struct SweepRow {
  SchemeKind scheme = SchemeKind::Optimal;
  int m_links = 0;
  int n_links = 0;
  double mean_wsee = 0.0;
  double std_wsee = 0.0;
  double mean_nonzero_u = 0.0;
  double mean_wallclock_ms = 0.0;
  int runs = 0;
};

struct MonteCarloResult {
  std::vector<RunResult> runs;
  std::vector<SweepRow> rows;
};

/// Sweeps the D2D link count: runs_per_point independently seeded scenarios
/// per sweep value, every configured scheme on each. Deterministic for a
/// given master seed, independent of the worker count.
MonteCarloResult monte_carlo(const RunConfig& cfg);

struct EpisodePoint {
  double distance_m = 0.0;
  int episode = 0;
  double wsee = 0.0;
  double epsilon = 0.0;
};

struct TimingRow {
  double distance_m = 0.0;
  double proposed_train_ms = 0.0;
  /// Report path: the trained agent emits its converged decision and
  /// utility (one pair evaluation); no action-grid sweep is involved.
  double proposed_deploy_ms = 0.0;
  /// Full greedy extraction including the grid argmax, for reference.
  double proposed_argmax_ms = 0.0;
  double optimal_ms = 0.0;
  double random_ms = 0.0;
  double proposed_u = 0.0;
  double optimal_u = 0.0;
};

struct SinglePairResult {
  std::vector<EpisodePoint> episodes;
  std::vector<TimingRow> timing;
};

/// Trains one agent per CU-DT distance on the fixed single-pair geometry
/// (CU-BS 1000 m, DT-BS 500 m, DT-DR 500 m), logging the per-episode greedy
/// WSEE. Later distances can warm-start from the previous network. Timing
/// compares the trained agent's deployment report (and, separately, a full
/// grid argmax) against the exhaustive sweep on the reporting grid.
SinglePairResult single_pair_study(const RunConfig& cfg);

void apply_worker_count(int workers);

void write_runs_csv(std::ostream& os, std::span<const RunResult> runs);
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);
void write_episodes_csv(std::ostream& os, std::span<const EpisodePoint> points);
void write_timing_csv(std::ostream& os, std::span<const TimingRow> rows);

}  // namespace coopd2d
