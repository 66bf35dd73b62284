#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coopd2d/channel.hpp"
#include "coopd2d/coopset.hpp"
#include "coopd2d/coopshare.hpp"
#include "coopd2d/dqn.hpp"

namespace coopd2d {

/// Which schemes a run executes, in report order.
enum class SchemeKind { Optimal, Random, Proposed, ProposedCoopSets };

const char* scheme_name(SchemeKind s);
SchemeKind scheme_from_name(const std::string& name);

/// Full experiment configuration. Field names match the config file keys;
/// units are the config-file units (dBm at this boundary, watts internally).
struct RunConfig {
  // [scenario]
  int m_links = 6;
  int n_links = 6;
  double radius_m = 500.0;
  double pl_exponent = 3.8;
  double d2d_max_pair_distance_m = 0.0;  // 0 = no cap

  // [qos]
  double q_c = 5.0;
  double q_d = 3.0;
  double mu = 1.0;
  double nu = 1.0;
  double p_min_dbm = -40.0;
  double p_max_dbm = 23.0;
  double phi = 8.0;
  double phi2 = 8.0;

  // [grid]
  double dp_db = 3.0;           // reporting/oracle grid step
  double dtheta = 0.05;
  double training_dp_db = 9.0;  // learner grid step

  // [train]
  int episodes = 200;
  int steps = 50;
  int minibatch = 64;
  double lr = 3e-3;
  double discount = 0.0;
  int replay = 4000;
  std::uint64_t seed = 1;
  std::vector<int> hidden = {32, 16};
  int td_candidates = 256;
  bool scale_lr_by_reward = true;
  bool adam_optimizer = true;

  // [coopset]
  double r1_m = 375.0;
  double r2_m = 375.0;

  // [noise]
  double n0_dbm_per_hz = -174.0;
  double bandwidth_hz = 1.0;

  // [run]
  std::vector<SchemeKind> schemes = {SchemeKind::Optimal, SchemeKind::Random,
                                     SchemeKind::Proposed, SchemeKind::ProposedCoopSets};
  int runs_per_point = 20;
  std::vector<int> n_sweep = {3, 4, 5, 6, 7, 8};
  int workers = 0;  // 0 = all cores
  std::string out_dir = "out";
  bool record_timing = true;
  std::vector<double> distances = {500, 750, 1000, 1250, 1500};
  bool warm_start = true;

  QosConfig qos() const;
  NoiseModel noise() const;
  ActionGrid reporting_grid() const;
  ActionGrid training_grid() const;
  TrainConfig train(std::uint64_t agent_seed) const;
  CoopSetConfig coopset() const;
};

/// Key/value override in "section.key=value" form; applied after file values.
using ConfigOverride = std::pair<std::string, std::string>;

/// Parses the TOML-style sectioned key-value file (comments with '#').
/// Unknown sections or keys are rejected; every invariant is checked at load
/// time and errors carry the offending field path. Empty path loads pure
/// defaults.
RunConfig parse_config(const std::string& path, const std::vector<ConfigOverride>& overrides = {});

/// Parses from an already-read buffer (used by tests and inline overrides).
RunConfig parse_config_text(const std::string& text,
                            const std::vector<ConfigOverride>& overrides = {});

/// Comma lists ("3,5,8") and ranges ("3:8" step 1, "500:1500:250").
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

void validate(const RunConfig& cfg);

}  // namespace coopd2d
