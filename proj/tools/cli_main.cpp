#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coopd2d/config.hpp"
#include "coopd2d/csv.hpp"
#include "coopd2d/harness.hpp"

namespace {

using namespace coopd2d;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string seed;
  std::string workers;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Config file (TOML-style sections)");
  cmd->add_option("--set", o.sets, "Override a config value, section.key=value")
      ->take_all();
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--seed", o.seed, "Master seed override");
  cmd->add_option("--workers", o.workers, "Worker count override (0 = all cores)");
  cmd->add_flag("--no-timing", o.no_timing, "Write zeros to all wallclock columns");
}

RunConfig load_config(const CommonOpts& o, std::vector<ConfigOverride> extra = {}) {
  std::vector<ConfigOverride> overrides;
  if (const char* env = std::getenv("COOPD2D_WORKERS"))
    overrides.emplace_back("run.workers", env);
  for (const std::string& s : o.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got " + s);
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  for (auto& e : extra) overrides.push_back(std::move(e));
  if (!o.seed.empty()) overrides.emplace_back("train.seed", o.seed);
  if (!o.workers.empty()) overrides.emplace_back("run.workers", o.workers);
  if (!o.out_dir.empty()) overrides.emplace_back("run.out_dir", o.out_dir);
  if (o.no_timing) overrides.emplace_back("run.record_timing", "false");
  return parse_config(o.config_path, overrides);
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + path.string());
  return f;
}

int cmd_sweep(const CommonOpts& o, const std::string& runs_flag, const std::string& n_sweep_flag,
              const std::string& m_flag) {
  std::vector<ConfigOverride> extra;
  if (!runs_flag.empty()) extra.emplace_back("run.runs_per_point", runs_flag);
  if (!n_sweep_flag.empty()) extra.emplace_back("run.n_sweep", n_sweep_flag);
  if (!m_flag.empty()) extra.emplace_back("scenario.m", m_flag);
  const RunConfig cfg = load_config(o, std::move(extra));
  const MonteCarloResult result = monte_carlo(cfg);
  {
    auto f = open_output(cfg, "sweep.csv");
    write_sweep_csv(f, result.rows);
  }
  {
    auto f = open_output(cfg, "runs.csv");
    write_runs_csv(f, result.runs);
  }
  return 0;
}

int cmd_single_pair(const CommonOpts& o, const std::string& distances_flag, bool no_warm,
                    const std::string& episodes_flag) {
  std::vector<ConfigOverride> extra;
  if (!distances_flag.empty()) extra.emplace_back("run.distances", distances_flag);
  if (no_warm) extra.emplace_back("run.warm_start", "false");
  if (!episodes_flag.empty()) extra.emplace_back("train.episodes", episodes_flag);
  const RunConfig cfg = load_config(o, std::move(extra));
  const SinglePairResult result = single_pair_study(cfg);
  {
    auto f = open_output(cfg, "episodes.csv");
    write_episodes_csv(f, result.episodes);
  }
  {
    auto f = open_output(cfg, "timing.csv");
    write_timing_csv(f, result.timing);
  }
  return 0;
}

int cmd_oracle(const CommonOpts& o) {
  const RunConfig cfg = load_config(o);
  apply_worker_count(cfg.workers);
  const std::uint64_t run_seed = derive_seed(
      cfg.seed, {seed_tag::scenario, static_cast<std::uint64_t>(cfg.n_links), 0});
  const CellScenario scenario = sample_scenario(cfg.m_links, cfg.n_links, cfg.radius_m,
                                                cfg.pl_exponent, run_seed,
                                                cfg.d2d_max_pair_distance_m);
  const ChannelGains gains = compute_gains(scenario, cfg.noise());
  const QosConfig qos = cfg.qos();
  const ActionGrid grid = cfg.reporting_grid();
  const TrainConfig train = cfg.train(cfg.seed);
  const CoopSetConfig coop = cfg.coopset();
  const SchemeContext ctx{scenario, gains, qos, grid, train, coop};
  const RunResult result = run_scheme(ctx, SchemeKind::Optimal, run_seed, cfg.record_timing);
  auto f = open_output(cfg, "runs.csv");
  write_runs_csv(f, std::span<const RunResult>(&result, 1));
  return 0;
}

int cmd_probe(const CommonOpts& o, const std::string& betas_flag) {
  const RunConfig cfg = load_config(o);
  std::vector<double> betas = {0.1, 1.0, 10.0, 1000.0};
  if (!betas_flag.empty()) betas = parse_number_list(betas_flag, "--betas");
  std::vector<double> xs(50), ys(50);
  for (int i = 0; i < 50; ++i) {
    xs[i] = std::pow(10.0, -3.0 + 5.0 * (i + 1) / 50.0);  // log grid in (1e-3, 1e2]
    ys[i] = 0.01 + 0.48 * (i + 1) / 51.0;                 // interior of (0.01, 0.49)
  }
  auto f = open_output(cfg, "probe.csv");
  f << "beta,x,y,lambda1,lambda2\n";
  for (double beta : betas) {
    const auto eig = nonconvexity_probe(beta, xs, ys);
    std::size_t k = 0;
    for (double x : xs)
      for (double y : ys) {
        csv::write_row(f, beta, x, y, eig[k].lambda1, eig[k].lambda2);
        ++k;
      }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative D2D resource allocation laboratory"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, sp_opts, oracle_opts, probe_opts, validate_opts;
  std::string runs_flag, n_sweep_flag, m_flag, distances_flag, episodes_flag, betas_flag;
  bool no_warm = false;

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over the D2D link count");
  add_common(sweep, sweep_opts);
  sweep->add_option("--runs", runs_flag, "Scenarios per sweep point");
  sweep->add_option("--n-sweep", n_sweep_flag, "D2D link counts, list or lo:hi[:step]");
  sweep->add_option("--m", m_flag, "Cellular link count");

  auto* sp = app.add_subcommand("single-pair", "Single-pair convergence and timing study");
  add_common(sp, sp_opts);
  sp->add_option("--distances", distances_flag, "CU-DT distances, list or lo:hi[:step]");
  sp->add_option("--episodes", episodes_flag, "Training episodes per distance");
  sp->add_flag("--no-warm-start", no_warm, "Retrain from scratch at every distance");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimal scheme on one scenario");
  add_common(oracle, oracle_opts);

  auto* probe = app.add_subcommand("probe-nonconvexity",
                                   "Hessian eigenvalues of the coupling term over a grid");
  add_common(probe, probe_opts);
  probe->add_option("--betas", betas_flag, "Beta values, list or lo:hi[:step]");

  auto* validate_cmd = app.add_subcommand("validate-config", "Parse and validate a config file");
  add_common(validate_cmd, validate_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(sweep_opts, runs_flag, n_sweep_flag, m_flag);
    if (sp->parsed()) return cmd_single_pair(sp_opts, distances_flag, no_warm, episodes_flag);
    if (oracle->parsed()) return cmd_oracle(oracle_opts);
    if (probe->parsed()) return cmd_probe(probe_opts, betas_flag);
    if (validate_cmd->parsed()) {
      load_config(validate_opts);
      std::cout << "config ok\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
