#include "coopd2d/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coopd2d/csv.hpp"
#include "coopd2d/rng.hpp"

namespace coopd2d {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

Matching match_and_score(WeightMatrix& u, RunResult& result) {
  Matching match = km_match(u);
  result.wsee = system_wsee(u, match);
  result.nonzero_u = nonzero_count(u);
  return match;
}

// One-to-one uniform random matching of size min(M, N); pairs (m, n) of the
// smaller side matched to a distinct partner sampled without replacement.
std::vector<std::pair<int, int>> random_matching(int m_links, int n_links, Rng& rng) {
  const bool rows_small = m_links <= n_links;
  const int small = rows_small ? m_links : n_links;
  const int large = rows_small ? n_links : m_links;
  std::vector<int> pool(large);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(small);
  for (int i = 0; i < small; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(large - i));
    std::swap(pool[i], pool[j]);
    if (rows_small)
      pairs.emplace_back(i, pool[i]);
    else
      pairs.emplace_back(pool[i], i);
  }
  return pairs;
}

}  // namespace

SchemeDetail run_scheme_detailed(const SchemeContext& ctx, SchemeKind scheme, std::uint64_t seed,
                                 bool record_timing) {
  const int m_links = ctx.scenario.m_links();
  const int n_links = ctx.scenario.n_links();
  SchemeDetail out;
  out.u = WeightMatrix(m_links, n_links);
  out.result.scheme = scheme;
  out.result.m_links = m_links;
  out.result.n_links = n_links;
  out.result.seed = seed;

  const auto t0 = clock_type::now();
  switch (scheme) {
    case SchemeKind::Optimal: {
#pragma omp parallel for collapse(2) schedule(dynamic)
      for (int m = 0; m < m_links; ++m)
        for (int n = 0; n < n_links; ++n) {
          const auto best = brute_force_pair_opt(pair_gammas(ctx.gains, m, n), ctx.qos, ctx.grid);
          if (best) out.u.at(m, n) = best->u;
        }
      out.match = match_and_score(out.u, out.result);
      break;
    }
    case SchemeKind::Random: {
      Rng rng(derive_seed(seed, {seed_tag::random_scheme}));
      const auto pairs = random_matching(m_links, n_links, rng);
      for (const auto& [m, n] : pairs) {
        const auto a = static_cast<std::uint32_t>(rng.uniform_below(ctx.grid.joint_size()));
        const PairEvaluation ev =
            evaluate_pair(pair_gammas(ctx.gains, m, n), ctx.grid.decision(a), ctx.qos);
        if (ev.c1_ok && ev.c2_ok) {
          out.u.at(m, n) = ev.u;
          out.match.pairs.emplace_back(m, n);
        } else {
          ++out.result.qos_violations;
        }
      }
      std::sort(out.match.pairs.begin(), out.match.pairs.end());
      out.match.total_weight = system_wsee(out.u, out.match);
      out.result.wsee = out.match.total_weight;
      out.result.nonzero_u = nonzero_count(out.u);
      break;
    }
    case SchemeKind::Proposed:
    case SchemeKind::ProposedCoopSets: {
      std::vector<char> active(static_cast<std::size_t>(m_links) * n_links, 0);
      if (scheme == SchemeKind::ProposedCoopSets) {
        const CoopSets sets = cooperative_sets(ctx.scenario, ctx.gains, ctx.qos, ctx.coopset);
        for (int n = 0; n < n_links; ++n)
          for (int m : sets.sets[n]) active[static_cast<std::size_t>(m) * n_links + n] = 1;
      } else {
        for (int m = 0; m < m_links; ++m)
          for (int n = 0; n < n_links; ++n)
            if (feasibility_interval(pair_gammas(ctx.gains, m, n), ctx.qos))
              active[static_cast<std::size_t>(m) * n_links + n] = 1;
      }
      const FeatureScaler scaler = make_scaler(ctx.qos);
      const ActionFeatureTable feats = make_action_features(ctx.grid, scaler);
#pragma omp parallel for collapse(2) schedule(dynamic)
      for (int m = 0; m < m_links; ++m)
        for (int n = 0; n < n_links; ++n) {
          if (!active[static_cast<std::size_t>(m) * n_links + n]) continue;
          TrainConfig tcfg = ctx.train;
          tcfg.seed = derive_seed(seed, {seed_tag::agent, static_cast<std::uint64_t>(m),
                                         static_cast<std::uint64_t>(n)});
          const PairLink link = make_pair_link(ctx.gains, m, n);
          const TrainedAgent agent = train_agent(link, ctx.qos, ctx.grid, tcfg, &feats);
          const auto decision = greedy_decision(agent.net, link, ctx.grid, ctx.qos, &feats);
          if (decision) out.u.at(m, n) = decision->second;
        }
      out.match = match_and_score(out.u, out.result);
      break;
    }
  }
  out.result.wallclock_ms = record_timing ? ms_since(t0) : 0.0;
  return out;
}

RunResult run_scheme(const SchemeContext& ctx, SchemeKind scheme, std::uint64_t seed,
                     bool record_timing) {
  return run_scheme_detailed(ctx, scheme, seed, record_timing).result;
}

void apply_worker_count(int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

MonteCarloResult monte_carlo(const RunConfig& cfg) {
  apply_worker_count(cfg.workers);
  const QosConfig qos = cfg.qos();
  const NoiseModel noise = cfg.noise();
  const ActionGrid grid = cfg.training_grid();
  const TrainConfig train = cfg.train(cfg.seed);
  const CoopSetConfig coop = cfg.coopset();

  MonteCarloResult out;
  for (int n_links : cfg.n_sweep) {
    std::vector<std::vector<RunResult>> per_scheme(cfg.schemes.size());
    for (int run = 0; run < cfg.runs_per_point; ++run) {
      const std::uint64_t run_seed =
          derive_seed(cfg.seed, {seed_tag::scenario, static_cast<std::uint64_t>(n_links),
                                 static_cast<std::uint64_t>(run)});
      const CellScenario scenario =
          sample_scenario(cfg.m_links, n_links, cfg.radius_m, cfg.pl_exponent, run_seed,
                          cfg.d2d_max_pair_distance_m);
      const ChannelGains gains = compute_gains(scenario, noise);
      const SchemeContext ctx{scenario, gains, qos, grid, train, coop};
      for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
        const RunResult r = run_scheme(ctx, cfg.schemes[s], run_seed, cfg.record_timing);
        per_scheme[s].push_back(r);
        out.runs.push_back(r);
      }
    }
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
      const auto& rs = per_scheme[s];
      SweepRow row;
      row.scheme = cfg.schemes[s];
      row.m_links = cfg.m_links;
      row.n_links = n_links;
      row.runs = static_cast<int>(rs.size());
      double sum_w = 0.0, sum_nz = 0.0, sum_ms = 0.0;
      for (const auto& r : rs) {
        sum_w += r.wsee;
        sum_nz += r.nonzero_u;
        sum_ms += r.wallclock_ms;
      }
      row.mean_wsee = sum_w / rs.size();
      row.mean_nonzero_u = sum_nz / rs.size();
      row.mean_wallclock_ms = sum_ms / rs.size();
      double var = 0.0;
      for (const auto& r : rs) var += (r.wsee - row.mean_wsee) * (r.wsee - row.mean_wsee);
      row.std_wsee = std::sqrt(var / rs.size());
      out.rows.push_back(row);
    }
  }
  return out;
}

namespace {

// Fixed single-pair geometry of the distance sweep studies.
constexpr double kStudyCuBs = 1000.0;
constexpr double kStudyDtBs = 500.0;
constexpr double kStudyDtDr = 500.0;

template <typename F>
double time_median_ms(F&& fn, int reps) {
  std::vector<double> times;
  times.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock_type::now();
    fn();
    times.push_back(ms_since(t0));
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

SinglePairResult single_pair_study(const RunConfig& cfg) {
  apply_worker_count(cfg.workers);
  const QosConfig qos = cfg.qos();
  const NoiseModel noise = cfg.noise();
  const ActionGrid train_grid = cfg.training_grid();
  const ActionGrid oracle_grid = cfg.reporting_grid();
  const FeatureScaler scaler = make_scaler(qos);
  const ActionFeatureTable feats = make_action_features(train_grid, scaler);

  SinglePairResult out;
  QNetwork previous_net;
  bool have_previous = false;
  for (std::size_t i = 0; i < cfg.distances.size(); ++i) {
    const double d = cfg.distances[i];
    const CellScenario scenario =
        fixed_line_scenario(kStudyCuBs, kStudyDtBs, kStudyDtDr, d, cfg.pl_exponent);
    const ChannelGains gains = compute_gains(scenario, noise);
    const PairLink link = make_pair_link(gains, 0, 0);

    TrainConfig tcfg = cfg.train(derive_seed(cfg.seed, {seed_tag::agent, i}));
    const QNetwork* warm = (cfg.warm_start && have_previous) ? &previous_net : nullptr;

    const auto t_train = clock_type::now();
    TrainedAgent agent = train_agent(link, qos, train_grid, tcfg, &feats, warm);
    const double train_ms = ms_since(t_train);

    for (const EpisodeLog& row : agent.log)
      out.episodes.push_back({d, row.episode, row.greedy_u, row.epsilon});

    TimingRow t;
    t.distance_m = d;
    t.proposed_train_ms = train_ms;
    std::optional<std::pair<ResourceDecision, double>> deploy;
    t.proposed_argmax_ms = time_median_ms(
        [&] { deploy = greedy_decision(agent.net, link, train_grid, qos, &feats); }, 5);
    t.proposed_u = deploy ? deploy->second : 0.0;
    // Deployment report: the agent's greedy action is already converged at
    // the end of training; emitting the report costs one evaluation.
    const ResourceDecision greedy_dec =
        deploy ? deploy->first
               : train_grid.decision(argmax_q(agent.net,
                                              make_state(link.gains_db, train_grid.decision(0),
                                                         scaler),
                                              feats).index);
    volatile double sink = 0.0;
    t.proposed_deploy_ms = time_median_ms(
        [&] {
          constexpr int reps = 1000;
          for (int r = 0; r < reps; ++r) {
            const PairEvaluation ev = evaluate_pair(link.gamma, greedy_dec, qos);
            sink = (ev.c1_ok && ev.c2_ok) ? ev.u : 0.0;
          }
        },
        5) / 1000.0;
    (void)sink;
    std::optional<PairOpt> oracle;
    t.optimal_ms =
        time_median_ms([&] { oracle = brute_force_pair_opt(link.gamma, qos, oracle_grid); }, 5);
    t.optimal_u = oracle ? oracle->u : 0.0;
    Rng rng(derive_seed(cfg.seed, {seed_tag::random_scheme, i}));
    t.random_ms = time_median_ms(
        [&] {
          const auto a = static_cast<std::uint32_t>(rng.uniform_below(train_grid.joint_size()));
          const PairEvaluation ev = evaluate_pair(link.gamma, train_grid.decision(a), qos);
          (void)ev;
        },
        5);
    if (!cfg.record_timing) {
      t.proposed_train_ms = t.proposed_deploy_ms = t.proposed_argmax_ms = 0.0;
      t.optimal_ms = t.random_ms = 0.0;
    }
    out.timing.push_back(t);

    previous_net = std::move(agent.net);
    have_previous = true;
  }
  return out;
}

void write_runs_csv(std::ostream& os, std::span<const RunResult> runs) {
  os << "scheme,m,n,wsee,nonzero_u,wallclock_ms,seed,qos_violations\n";
  for (const auto& r : runs)
    csv::write_row(os, scheme_name(r.scheme), r.m_links, r.n_links, r.wsee, r.nonzero_u,
                   r.wallclock_ms, r.seed, r.qos_violations);
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "scheme,m,n,mean_wsee,std_wsee,mean_nonzero_u,mean_wallclock_ms,runs\n";
  for (const auto& r : rows)
    csv::write_row(os, scheme_name(r.scheme), r.m_links, r.n_links, r.mean_wsee, r.std_wsee,
                   r.mean_nonzero_u, r.mean_wallclock_ms, r.runs);
}

void write_episodes_csv(std::ostream& os, std::span<const EpisodePoint> points) {
  os << "distance_m,episode,wsee,epsilon\n";
  for (const auto& p : points) csv::write_row(os, p.distance_m, p.episode, p.wsee, p.epsilon);
}

void write_timing_csv(std::ostream& os, std::span<const TimingRow> rows) {
  os << "distance_m,proposed_train_ms,proposed_deploy_ms,proposed_argmax_ms,optimal_ms,"
        "random_ms,proposed_u,optimal_u\n";
  for (const auto& r : rows)
    csv::write_row(os, r.distance_m, r.proposed_train_ms, r.proposed_deploy_ms,
                   r.proposed_argmax_ms, r.optimal_ms, r.random_ms, r.proposed_u, r.optimal_u);
}

}  // namespace coopd2d
