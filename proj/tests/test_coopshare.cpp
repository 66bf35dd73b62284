#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopd2d/coopshare.hpp"
#include "coopd2d/rng.hpp"

using namespace coopd2d;

namespace {

QosConfig wide_qos(double p_min = 1e-3, double p_max = 10.0) {
  QosConfig q;
  q.q_c = 5.0;
  q.q_d = 3.0;
  q.p_min_w = p_min;
  q.p_max_w = p_max;
  return q;
}

// Straight-line transcription of the SE/power/EE chain, kept independent of
// the implementation under test.
PairEvaluation transcribe(const PairGammas& g, const ResourceDecision& d, const QosConfig& q) {
  PairEvaluation ev;
  const double snr_direct = g.mn * d.p_c_w;
  const double snr_relay = g.mb * d.p_c_w + g.nb * d.p_r_w;
  const double bottleneck = snr_direct < snr_relay ? snr_direct : snr_relay;
  ev.se_c = d.theta * (std::log(1.0 + bottleneck) / std::log(2.0));
  ev.se_d = (1.0 - 2.0 * d.theta) * (std::log(1.0 + g.nn * d.p_d_w) / std::log(2.0));
  ev.pbar_c = d.theta * d.p_c_w;
  ev.pbar_d = d.theta * d.p_r_w + (1.0 - 2.0 * d.theta) * d.p_d_w;
  ev.ee_c = ev.se_c / ev.pbar_c;
  ev.ee_d = ev.se_d / ev.pbar_d;
  ev.u = q.mu * ev.ee_c + q.nu * ev.ee_d;
  ev.c1_ok = ev.se_c >= q.q_c;
  ev.c2_ok = ev.se_d >= q.q_d;
  return ev;
}

}  // namespace

TEST_CASE("evaluate_pair: relayed path bottleneck via the min") {
  const QosConfig q = wide_qos();
  const PairGammas g{15.0, 3.0, 4.0, 15.0};
  const ResourceDecision d{1.0, 1.0, 0.2, 0.25};
  const auto ev = evaluate_pair(g, d, q);
  // min(15, 3 + 4) = 7 -> se_c = 0.25 * log2(8)
  CHECK(ev.se_c == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("evaluate_pair: D2D side powers-of-two case") {
  const QosConfig q = wide_qos();
  const PairGammas g{15.0, 3.0, 4.0, 15.0};
  const ResourceDecision d{1.0, 0.2, 0.2, 0.25};
  const auto ev = evaluate_pair(g, d, q);
  // gamma_nn * p_d = 3 -> se_d = 0.5 * log2(4) = 1
  CHECK(ev.se_d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev.pbar_d == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(ev.ee_d == doctest::Approx(6.6667).epsilon(1e-4));
}

TEST_CASE("evaluate_pair: random triples match an independent transcription") {
  const QosConfig q = wide_qos(1e-7, 0.2);
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    PairGammas g;
    g.mn = std::pow(10.0, rng.uniform(3.0, 11.0));
    g.mb = std::pow(10.0, rng.uniform(3.0, 11.0));
    g.nb = std::pow(10.0, rng.uniform(3.0, 11.0));
    g.nn = std::pow(10.0, rng.uniform(3.0, 11.0));
    ResourceDecision d;
    d.p_c_w = std::pow(10.0, rng.uniform(-7.0, std::log10(0.2)));
    d.p_r_w = std::pow(10.0, rng.uniform(-7.0, std::log10(0.2)));
    d.p_d_w = std::pow(10.0, rng.uniform(-7.0, std::log10(0.2)));
    d.theta = rng.uniform(0.01, 0.49);
    const auto got = evaluate_pair(g, d, q);
    const auto want = transcribe(g, d, q);
    CHECK(got.se_c == doctest::Approx(want.se_c).epsilon(1e-12));
    CHECK(got.se_d == doctest::Approx(want.se_d).epsilon(1e-12));
    CHECK(got.pbar_c == doctest::Approx(want.pbar_c).epsilon(1e-12));
    CHECK(got.pbar_d == doctest::Approx(want.pbar_d).epsilon(1e-12));
    CHECK(got.u == doctest::Approx(want.u).epsilon(1e-12));
    CHECK(got.c1_ok == want.c1_ok);
    CHECK(got.c2_ok == want.c2_ok);
  }
}

TEST_CASE("evaluate_pair: precondition violations raise") {
  const QosConfig q = wide_qos();
  const PairGammas g{1, 1, 1, 1};
  CHECK_THROWS_AS(evaluate_pair(g, {1, 1, 1, 0.5}, q), ArgumentError);
  CHECK_THROWS_AS(evaluate_pair(g, {1, 1, 1, 0.0}, q), ArgumentError);
  CHECK_THROWS_AS(evaluate_pair(g, {100.0, 1, 1, 0.25}, q), ArgumentError);
  CHECK_THROWS_AS(evaluate_pair({0, 1, 1, 1}, {1, 1, 1, 0.25}, q), ArgumentError);
}

TEST_CASE("reward: shaping cases") {
  QosConfig q = wide_qos();
  q.phi = 1.0;
  q.phi2 = 1.0;
  PairEvaluation ev;
  ev.u = 10.0;
  ev.se_c = q.q_c;
  ev.se_d = q.q_d;
  CHECK(reward(ev, q) == doctest::Approx(10.0));

  ev.se_c = 0.5 * q.q_c;
  ev.se_d = q.q_d + 1.0;
  CHECK(reward(ev, q) == doctest::Approx(5.0));

  ev.u = 4.0;
  ev.se_c = 0.75 * q.q_c;
  ev.se_d = 0.5 * q.q_d;
  CHECK(reward(ev, q) == doctest::Approx(1.0));
}

TEST_CASE("reward: equals u exactly when both constraints hold") {
  QosConfig q = wide_qos(1e-7, 0.2);
  q.phi = 4.0;
  q.phi2 = 4.0;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    PairGammas g{std::pow(10.0, rng.uniform(5.0, 11.0)), std::pow(10.0, rng.uniform(5.0, 11.0)),
                 std::pow(10.0, rng.uniform(5.0, 11.0)), std::pow(10.0, rng.uniform(5.0, 11.0))};
    ResourceDecision d{0.1, 0.1, 0.1, rng.uniform(0.05, 0.45)};
    const auto ev = evaluate_pair(g, d, q);
    if (ev.c1_ok && ev.c2_ok) CHECK(reward(ev, q) == ev.u);
    if (!ev.c1_ok || !ev.c2_ok) CHECK(reward(ev, q) < ev.u);
  }
}

TEST_CASE("build_grid: table values") {
  const double p_min = dbm_to_watts(-40.0), p_max = dbm_to_watts(23.0);
  const ActionGrid fine = build_grid(p_min, p_max, 3.0, 0.05);
  CHECK(fine.power_count() == 22);
  CHECK(fine.theta_count() == 9);
  CHECK(fine.joint_size() == 95832);
  CHECK(fine.power_levels_w.front() == p_min);
  CHECK(fine.power_levels_w.back() == p_max);
  CHECK(fine.theta_levels.front() == doctest::Approx(0.05));
  CHECK(fine.theta_levels.back() == doctest::Approx(0.45));

  const ActionGrid coarse = build_grid(p_min, p_max, 9.0, 0.05);
  CHECK(coarse.power_count() == 8);
  CHECK(coarse.joint_size() == 4608);
}

TEST_CASE("build_grid: consecutive levels differ by exactly dp in dB") {
  const ActionGrid g = build_grid(dbm_to_watts(-40.0), dbm_to_watts(23.0), 3.0, 0.05);
  for (std::size_t i = 1; i < g.power_levels_dbm.size(); ++i)
    CHECK(g.power_levels_dbm[i] - g.power_levels_dbm[i - 1] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("build_grid: non-divisible spans are configuration errors") {
  const double p_min = dbm_to_watts(-40.0), p_max = dbm_to_watts(23.0);
  CHECK_THROWS_AS(build_grid(p_min, p_max, 5.0, 0.05), ConfigError);
  CHECK_THROWS_AS(build_grid(p_min, p_max, 3.0, 0.3), ConfigError);
  CHECK_THROWS_AS(build_grid(p_min, p_max, 3.0, 0.5), ConfigError);
  CHECK_NOTHROW(build_grid(p_min, p_max, 3.0, 0.25));
}

TEST_CASE("grid codec: encode/decode are inverse bijections") {
  const ActionGrid g = build_grid(dbm_to_watts(-40.0), dbm_to_watts(23.0), 21.0, 0.1);
  CHECK(g.power_count() == 4);
  CHECK(g.theta_count() == 4);
  for (std::uint32_t a = 0; a < g.joint_size(); ++a) {
    const auto ix = g.decode(a);
    CHECK(g.encode(ix) == a);
    CHECK(ix.pc < g.power_count());
    CHECK(ix.th < g.theta_count());
  }
}

TEST_CASE("feasibility_interval: direct substitution") {
  QosConfig q = wide_qos(1e-3, 1.0);
  PairGammas g;
  g.mn = std::pow(2.0, 20.0) - 1.0;  // log2 term = 20 at p_max = 1
  g.mb = g.mn;
  g.nb = g.mn;
  g.nn = std::pow(2.0, 12.0) - 1.0;  // log2 term = 12
  const auto iv = feasibility_interval(g, q);
  REQUIRE(iv.has_value());
  CHECK(iv->first == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(iv->second == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("feasibility_interval: theta_lo at the C7 boundary is excluded") {
  QosConfig q = wide_qos(1e-3, 1.0);
  PairGammas g;
  g.mn = std::pow(2.0, 10.0) - 1.0;  // theta_lo = 5/10 = 0.5
  g.mb = g.mn;
  g.nb = g.mn;
  g.nn = std::pow(2.0, 40.0);
  CHECK_FALSE(feasibility_interval(g, q).has_value());
}

TEST_CASE("feasibility_interval: grid intersection iff brute force feasible") {
  const QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 9.0, 0.05);
  Rng rng(555);
  int nonempty = 0, empty = 0;
  for (int i = 0; i < 200; ++i) {
    PairGammas g{std::pow(10.0, rng.uniform(3.0, 9.0)), std::pow(10.0, rng.uniform(3.0, 9.0)),
                 std::pow(10.0, rng.uniform(3.0, 9.0)), std::pow(10.0, rng.uniform(3.0, 9.0))};
    const auto iv = feasibility_interval(g, q);
    bool grid_hit = false;
    if (iv)
      for (double th : grid.theta_levels)
        if (th >= iv->first && th <= iv->second) grid_hit = true;
    const auto best = brute_force_pair_opt(g, q, grid);
    CHECK(grid_hit == best.has_value());
    grid_hit ? ++nonempty : ++empty;
  }
  // the draw ranges must exercise both outcomes for the check to mean much
  CHECK(nonempty > 20);
  CHECK(empty > 20);
}

TEST_CASE("brute_force_pair_opt: singleton grid returns its only action") {
  const QosConfig q = wide_qos(0.5, 0.5);
  const ActionGrid g1 = build_grid(0.5, 0.5, 3.0, 0.25);
  REQUIRE(g1.joint_size() == 1);
  PairGammas g{1e8, 1e8, 1e8, 1e8};
  const auto best = brute_force_pair_opt(g, q, g1);
  REQUIRE(best.has_value());
  CHECK(best->index == 0);
  CHECK(best->decision.theta == doctest::Approx(0.25));
}

TEST_CASE("brute_force_pair_opt: all-infeasible is empty and matches the interval") {
  const QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 9.0, 0.05);
  PairGammas g{1e8, 1e8, 1e8, 1e-3};  // gamma_nn too small for C2
  CHECK_FALSE(brute_force_pair_opt(g, q, grid).has_value());
  const auto iv = feasibility_interval(g, q);
  if (iv) CHECK(iv->second < grid.theta_levels.front());
}

TEST_CASE("brute_force_pair_opt: equals a hand enumeration on a toy grid") {
  const double p_lo = 0.1, p_hi = 0.2;
  const double dp = 10.0 * std::log10(p_hi / p_lo);
  const ActionGrid grid = build_grid(p_lo, p_hi, dp, 1.0 / 6.0);
  REQUIRE(grid.power_count() == 2);
  REQUIRE(grid.theta_count() == 2);
  QosConfig q = wide_qos(p_lo, p_hi);
  q.q_c = 0.2;
  q.q_d = 0.5;
  const PairGammas g{200.0, 60.0, 80.0, 300.0};
  double best_u = -1.0;
  for (double pc : grid.power_levels_w)
    for (double pr : grid.power_levels_w)
      for (double pd : grid.power_levels_w)
        for (double th : grid.theta_levels) {
          const auto ev = evaluate_pair(g, {pc, pr, pd, th}, q);
          if (ev.c1_ok && ev.c2_ok && ev.u > best_u) best_u = ev.u;
        }
  const auto best = brute_force_pair_opt(g, q, grid);
  REQUIRE(best.has_value());
  CHECK(best->u == best_u);
}

TEST_CASE("brute_force_pair_opt: omp result equals the serial reference exactly") {
  const QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 9.0, 0.05);
  Rng rng(808);
  for (int i = 0; i < 20; ++i) {
    PairGammas g{std::pow(10.0, rng.uniform(4.0, 10.0)), std::pow(10.0, rng.uniform(4.0, 10.0)),
                 std::pow(10.0, rng.uniform(4.0, 10.0)), std::pow(10.0, rng.uniform(4.0, 10.0))};
    const auto par = brute_force_pair_opt(g, q, grid);
    const auto ser = reference::brute_force_pair_opt(g, q, grid);
    REQUIRE(par.has_value() == ser.has_value());
    if (par) {
      CHECK(par->index == ser->index);
      CHECK(par->u == ser->u);
    }
  }
}

TEST_CASE("brute_force_pair_opt: dominance over every feasible grid decision") {
  const QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 21.0, 0.125);
  const PairGammas g{5e8, 2e7, 3e8, 4e8};
  const auto best = brute_force_pair_opt(g, q, grid);
  REQUIRE(best.has_value());
  for (std::uint32_t a = 0; a < grid.joint_size(); ++a) {
    const auto ev = evaluate_pair(g, grid.decision(a), q);
    if (ev.c1_ok && ev.c2_ok) CHECK(ev.u <= best->u);
  }
}

TEST_CASE("se monotonicity over the decision variables") {
  const QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const PairGammas g{3e8, 1e7, 2e8, 5e8};
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 9.0, 0.05);
  for (std::size_t i = 1; i < grid.power_levels_w.size(); ++i) {
    const double lo = grid.power_levels_w[i - 1], hi = grid.power_levels_w[i];
    CHECK(evaluate_pair(g, {hi, 0.1, 0.1, 0.25}, q).se_c >=
          evaluate_pair(g, {lo, 0.1, 0.1, 0.25}, q).se_c);
    CHECK(evaluate_pair(g, {0.1, hi, 0.1, 0.25}, q).se_c >=
          evaluate_pair(g, {0.1, lo, 0.1, 0.25}, q).se_c);
    CHECK(evaluate_pair(g, {0.1, 0.1, hi, 0.25}, q).se_d >=
          evaluate_pair(g, {0.1, 0.1, lo, 0.25}, q).se_d);
  }
  for (std::size_t i = 1; i < grid.theta_levels.size(); ++i) {
    const double lo = grid.theta_levels[i - 1], hi = grid.theta_levels[i];
    CHECK(evaluate_pair(g, {0.1, 0.1, 0.1, hi}, q).se_c >
          evaluate_pair(g, {0.1, 0.1, 0.1, lo}, q).se_c);
    CHECK(evaluate_pair(g, {0.1, 0.1, 0.1, hi}, q).se_d <
          evaluate_pair(g, {0.1, 0.1, 0.1, lo}, q).se_d);
  }
}

TEST_CASE("weight linearity: scaling (mu, nu) scales u and keeps the argmax") {
  QosConfig q = wide_qos(dbm_to_watts(-40.0), dbm_to_watts(23.0));
  const ActionGrid grid = build_grid(q.p_min_w, q.p_max_w, 21.0, 0.125);
  const PairGammas g{5e8, 2e7, 3e8, 4e8};
  QosConfig scaled = q;
  scaled.mu *= 3.0;
  scaled.nu *= 3.0;
  for (std::uint32_t a = 0; a < grid.joint_size(); a += 7) {
    const auto d = grid.decision(a);
    CHECK(evaluate_pair(g, d, scaled).u ==
          doctest::Approx(3.0 * evaluate_pair(g, d, q).u).epsilon(1e-12));
  }
  const auto base = brute_force_pair_opt(g, q, grid);
  REQUIRE(base.has_value());
  const auto big = brute_force_pair_opt(g, scaled, grid);
  REQUIRE(big.has_value());
  CHECK(big->index == base->index);
  CHECK(big->u == doctest::Approx(3.0 * base->u).epsilon(1e-12));
}

TEST_CASE("coupling_hessian: worked example") {
  const auto e = coupling_hessian(1.0, 1.0, 0.25);
  CHECK(e.h11 == doctest::Approx(0.18034).epsilon(1e-4));
  CHECK(e.h12 == doctest::Approx(1.44270).epsilon(1e-4));
  CHECK(e.lambda1 == doctest::Approx(1.5356).epsilon(1e-4));
  CHECK(e.lambda2 == doctest::Approx(-1.3553).epsilon(1e-4));
}

namespace {

double coupling_f(double beta, double x, double y) {
  return (2.0 * y - 1.0) * std::log2(1.0 + beta * x);
}

// Central-difference Hessian eigenvalues of the coupling function.
std::pair<double, double> fd_hessian_eigen(double beta, double x, double y) {
  const double hx = 1e-4 * (x + 1.0 / beta);
  const double hy = 1e-4;
  const double f0 = coupling_f(beta, x, y);
  const double a = (coupling_f(beta, x + hx, y) - 2.0 * f0 + coupling_f(beta, x - hx, y)) / (hx * hx);
  const double c = (coupling_f(beta, x, y + hy) - 2.0 * f0 + coupling_f(beta, x, y - hy)) / (hy * hy);
  const double b = (coupling_f(beta, x + hx, y + hy) - coupling_f(beta, x + hx, y - hy) -
                    coupling_f(beta, x - hx, y + hy) + coupling_f(beta, x - hx, y - hy)) /
                   (4.0 * hx * hy);
  const double mean = 0.5 * (a + c);
  const double root = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mean + root, mean - root};
}

}  // namespace

TEST_CASE("nonconvexity probe: eigenvalue signs and finite-difference agreement") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 12; ++i) xs.push_back(std::pow(10.0, -3.0 + 5.0 * (i + 1) / 12.0));
  for (int i = 0; i < 12; ++i) ys.push_back(0.01 + 0.48 * (i + 1) / 13.0);
  for (double beta : {0.1, 1.0, 10.0, 1000.0}) {
    const auto eig = nonconvexity_probe(beta, xs, ys);
    std::size_t k = 0;
    for (double x : xs)
      for (double y : ys) {
        CHECK(eig[k].lambda1 > 0.0);
        CHECK(eig[k].lambda2 < 0.0);
        const auto [l1, l2] = fd_hessian_eigen(beta, x, y);
        CHECK(eig[k].lambda1 == doctest::Approx(l1).epsilon(1e-4));
        CHECK(eig[k].lambda2 == doctest::Approx(l2).epsilon(1e-4));
        ++k;
      }
  }
}

TEST_CASE("qos validation") {
  QosConfig q = wide_qos();
  CHECK_NOTHROW(validate(q));
  q.p_min_w = 0.0;
  CHECK_THROWS_AS(validate(q), ArgumentError);
  q = wide_qos();
  q.q_c = 0.0;
  CHECK_THROWS_AS(validate(q), ArgumentError);
}
