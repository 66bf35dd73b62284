#include <doctest.h>

#include <sstream>

#include "coopd2d/coopset.hpp"
#include "coopd2d/rng.hpp"

using namespace coopd2d;

namespace {

QosConfig table_qos() {
  QosConfig q;
  q.p_min_w = dbm_to_watts(-40.0);
  q.p_max_w = dbm_to_watts(23.0);
  return q;
}

struct Fixture {
  CellScenario scenario;
  ChannelGains gains;
  QosConfig qos = table_qos();
};

Fixture make_fixture(std::uint64_t seed, int m = 6, int n = 5) {
  Fixture f;
  f.scenario = sample_scenario(m, n, 500.0, 3.8, seed);
  f.gains = compute_gains(f.scenario, make_noise_model(-174.0, 1.0));
  return f;
}

}  // namespace

TEST_CASE("cooperative_sets: distance gates") {
  // Hand geometry: one CU inside both ranges, one outside the CU-DT range,
  // one outside the CU-BS range.
  CellScenario s;
  s.radius = 500.0;
  s.pl_exponent = 3.8;
  s.dt_positions = {{100.0, 0.0}};
  s.dr_positions = {{100.0, 50.0}};
  s.cu_positions = {{300.0, 0.0}, {480.0, 0.0}, {-350.0, 200.0}};
  const auto gains = compute_gains(s, make_noise_model(-174.0, 1.0));
  const auto sets = cooperative_sets(s, gains, table_qos(), {375.0, 375.0});
  REQUIRE(sets.sets.size() == 1);
  // CU0: dis_mn = 200, dis_mb = 300 -> in. CU1: dis_mn = 380 -> out.
  // CU2: dis_mn = 488 > 375 -> out (also dis_mb = 403 > 375).
  CHECK(sets.sets[0] == std::vector<int>{0});
}

TEST_CASE("cooperative_sets: infeasible interval excludes despite distances") {
  CellScenario s;
  s.radius = 500.0;
  s.pl_exponent = 3.8;
  s.dt_positions = {{100.0, 0.0}};
  s.dr_positions = {{100.0, 3000.0}};  // hopeless D2D link
  s.cu_positions = {{200.0, 0.0}};
  const auto gains = compute_gains(s, make_noise_model(-174.0, 1.0));
  QosConfig q = table_qos();
  q.q_d = 20.0;
  const auto sets = cooperative_sets(s, gains, q, {375.0, 375.0});
  CHECK(sets.sets[0].empty());
  CHECK_FALSE(feasibility_interval(pair_gammas(gains, 0, 0), q).has_value());
}

TEST_CASE("cooperative_sets: soundness of every admitted pair") {
  const Fixture f = make_fixture(31);
  const CoopSetConfig cfg{375.0, 375.0};
  const auto sets = cooperative_sets(f.scenario, f.gains, f.qos, cfg);
  for (int n = 0; n < f.scenario.n_links(); ++n)
    for (int m : sets.sets[n]) {
      CHECK(distance(f.scenario.cu_positions[m], f.scenario.dt_positions[n]) <= cfg.r_n1_m);
      CHECK(distance(f.scenario.cu_positions[m], f.scenario.bs_pos) <= cfg.r_n2_m);
      CHECK(feasibility_interval(pair_gammas(f.gains, m, n), f.qos).has_value());
    }
}

TEST_CASE("cooperative_sets: monotone in the ranges") {
  const Fixture f = make_fixture(77);
  const auto small = cooperative_sets(f.scenario, f.gains, f.qos, {200.0, 200.0});
  const auto large = cooperative_sets(f.scenario, f.gains, f.qos, {450.0, 450.0});
  for (std::size_t n = 0; n < small.sets.size(); ++n)
    for (int m : small.sets[n])
      CHECK(std::find(large.sets[n].begin(), large.sets[n].end(), m) != large.sets[n].end());
}

TEST_CASE("masked_weight_matrix: identity, annihilation, count monotone") {
  WeightMatrix u(3, 2);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 2; ++n) u.at(m, n) = 1.0 + m + n;

  CoopSets all;
  all.sets = {{0, 1, 2}, {0, 1, 2}};
  const auto same = masked_weight_matrix(u, all);
  CHECK(same.u == u.u);

  CoopSets none;
  none.sets = {{}, {}};
  const auto zero = masked_weight_matrix(u, none);
  CHECK(nonzero_count(zero) == 0);

  CoopSets partial;
  partial.sets = {{1}, {0, 2}};
  const auto masked = masked_weight_matrix(u, partial);
  CHECK(nonzero_count(masked) <= nonzero_count(u));
  CHECK(masked.at(1, 0) == u.at(1, 0));
  CHECK(masked.at(0, 0) == 0.0);
}

TEST_CASE("nonzero_count: trivial and duplicate-loop check") {
  WeightMatrix zero(3, 4);
  CHECK(nonzero_count(zero) == 0);
  WeightMatrix diag(3, 3);
  for (int i = 0; i < 3; ++i) diag.at(i, i) = 2.0;
  CHECK(nonzero_count(diag) == 3);

  Rng rng(4);
  WeightMatrix rnd(5, 7);
  for (double& v : rnd.u) v = rng.uniform01() < 0.5 ? 0.0 : rng.uniform01();
  int manual = 0;
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 7; ++n)
      if (rnd.at(m, n) > 0.0) ++manual;
  CHECK(nonzero_count(rnd) == manual);
}

TEST_CASE("masking never improves the matched total") {
  const Fixture f = make_fixture(12, 5, 4);
  const ActionGrid grid = build_grid(f.qos.p_min_w, f.qos.p_max_w, 9.0, 0.05);
  WeightMatrix u(5, 4);
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 4; ++n) {
      const auto best = brute_force_pair_opt(pair_gammas(f.gains, m, n), f.qos, grid);
      if (best) u.at(m, n) = best->u;
    }
  const auto sets = cooperative_sets(f.scenario, f.gains, f.qos, {375.0, 375.0});
  const auto masked = masked_weight_matrix(u, sets);
  CHECK(km_match(masked).total_weight <= km_match(u).total_weight);
}

TEST_CASE("coop sets csv export") {
  CoopSets sets;
  sets.sets = {{2, 4}, {}, {0}};
  std::stringstream ss;
  write_coop_sets_csv(ss, sets);
  CHECK(ss.str() == "n,m\n0,2\n0,4\n2,0\n");
}
