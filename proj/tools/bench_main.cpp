// Compares the OpenMP kernels against their serial reference implementations:
// the exhaustive per-pair action sweep and the full-grid Q argmax.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coopd2d/channel.hpp"
#include "coopd2d/coopshare.hpp"
#include "coopd2d/dqn.hpp"
#include "coopd2d/topology.hpp"

using namespace coopd2d;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main() {
  QosConfig q;
  q.p_min_w = dbm_to_watts(-40.0);
  q.p_max_w = dbm_to_watts(23.0);
  q.phi = q.phi2 = 8.0;

  const NoiseModel noise = make_noise_model(-174.0, 1.0);
  const CellScenario scenario = fixed_line_scenario(1000.0, 500.0, 500.0, 750.0);
  const ChannelGains gains = compute_gains(scenario, noise);
  const PairGammas gamma = pair_gammas(gains, 0, 0);
  const PairLink link = make_pair_link(gains, 0, 0);

  const ActionGrid oracle_grid = build_grid(q.p_min_w, q.p_max_w, 3.0, 0.05);
  const ActionGrid train_grid = build_grid(q.p_min_w, q.p_max_w, 9.0, 0.05);

  const FeatureScaler scaler = make_scaler(q);
  const ActionFeatureTable oracle_feats = make_action_features(oracle_grid, scaler);
  const ActionFeatureTable train_feats = make_action_features(train_grid, scaler);

  QNetwork net = QNetwork::make({12, 16, 16, 1});
  Rng rng(42);
  net.init_uniform(rng);
  const AgentState state = make_state(link.gains_db, oracle_grid.decision(0), scaler);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("threads: %d\n\n", threads);
  std::printf("%-42s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");

  auto report = [&](const char* name, const std::function<void()>& serial,
                    const std::function<void()>& parallel, int reps) {
    const double ts = time_ms(serial, reps);
    const double tp = time_ms(parallel, reps);
    std::printf("%-42s %10.3f %10.3f %8.2fx\n", name, ts, tp, ts / tp);
  };

  report(
      "brute_force_pair_opt, 95832 actions",
      [&] { (void)reference::brute_force_pair_opt(gamma, q, oracle_grid); },
      [&] { (void)brute_force_pair_opt(gamma, q, oracle_grid); }, 7);
  report(
      "brute_force_pair_opt, 4608 actions",
      [&] { (void)reference::brute_force_pair_opt(gamma, q, train_grid); },
      [&] { (void)brute_force_pair_opt(gamma, q, train_grid); }, 15);
  report(
      "argmax_q, 95832 actions",
      [&] { (void)reference::argmax_q(net, state, oracle_feats); },
      [&] { (void)argmax_q(net, state, oracle_feats); }, 7);
  report(
      "argmax_q, 4608 actions",
      [&] { (void)reference::argmax_q(net, state, train_feats); },
      [&] { (void)argmax_q(net, state, train_feats); }, 15);
  return 0;
}
