#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coopd2d/channel.hpp"
#include "coopd2d/coopshare.hpp"
#include "coopd2d/rng.hpp"

namespace coopd2d {

/// Affine feature maps into [-1, 1]; out-of-range inputs clamp. Gains use a
/// fixed dB window, powers the configured dBm range, theta its (0, 0.5)
/// domain.
struct FeatureScaler {
  double gain_db_lo = -160.0;
  double gain_db_hi = 0.0;
  double p_min_dbm = -40.0;
  double p_max_dbm = 23.0;

  double norm_gain_db(double g_db) const;
  double norm_power_w(double p_w) const;
  double norm_theta(double theta) const;
};

FeatureScaler make_scaler(const QosConfig& q);

/// Normalized observation: 4 gain features plus the current decision's 3
/// power features and theta feature.
struct AgentState {
  std::array<double, 8> f{};
};

AgentState make_state(const std::array<double, 4>& gains_db, const ResourceDecision& d,
                      const FeatureScaler& scaler);

struct Experience {
  AgentState s;
  std::uint32_t a_index = 0;
  double r = 0.0;
  AgentState s_next;
};

/// Fixed-capacity ring buffer; overwrites the oldest entry when full.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);
  void push(const Experience& e);
  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& operator[](std::size_t i) const { return buf_[i]; }
  /// k distinct storage indices, uniform without replacement.
  std::vector<std::uint32_t> sample_indices(Rng& rng, std::size_t k) const;

 private:
  std::size_t capacity_;
  std::vector<Experience> buf_;
  std::size_t cursor_ = 0;
};

/// Fully connected scalar-output network: affine layers with rectified-linear
/// hidden activations and a linear output. layer_sizes runs input first,
/// output (always 1) last. output_scale is a fixed gain on the output,
/// calibrated once per agent to the observed reward magnitude so the
/// trainable part always regresses O(1) values.
struct QNetwork {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;  // [layer][out * in], out-major
  std::vector<std::vector<double>> biases;   // [layer][out]
  double output_scale = 1.0;

  static QNetwork make(const std::vector<int>& sizes);
  /// Uniform init in +-sqrt(6 / fan_in) per layer, drawn from rng.
  void init_uniform(Rng& rng);
  double forward(std::span<const double> x) const;
  std::size_t param_count() const;
  double get_param(std::size_t i) const;
  void add_to_param(std::size_t i, double delta);
};

/// Binary checkpoint: magic, version, layer sizes, little-endian f64 params.
void save_checkpoint(const QNetwork& net, std::ostream& os);
QNetwork load_checkpoint(std::istream& is);

double forward_q(const QNetwork& net, const AgentState& s, const std::array<double, 4>& a_feat);

/// Normalized action features of every joint grid action, structure-of-arrays.
struct ActionFeatureTable {
  std::uint32_t count = 0;
  std::vector<double> pc, pr, pd, th;
  std::array<double, 4> at(std::uint32_t a) const { return {pc[a], pr[a], pd[a], th[a]}; }
};

ActionFeatureTable make_action_features(const ActionGrid& grid, const FeatureScaler& scaler);

struct ArgmaxResult {
  std::uint32_t index = 0;
  double q = 0.0;
};

/// Q argmax over the whole action lattice (ties resolve to the lowest joint
/// index). Evaluates actions in fixed-size blocks so the result is identical
/// for every OpenMP worker count.
ArgmaxResult argmax_q(const QNetwork& net, const AgentState& s, const ActionFeatureTable& feats);

namespace reference {
/// Plain per-action loop kept as the reference implementation for testing.
ArgmaxResult argmax_q(const QNetwork& net, const AgentState& s, const ActionFeatureTable& feats);
}  // namespace reference

/// Epsilon-greedy: uniform over the lattice with probability epsilon, else
/// the full-grid Q argmax.
std::uint32_t select_action(const QNetwork& net, const AgentState& s,
                            const ActionFeatureTable& feats, double epsilon, Rng& rng);

/// r + discount * max_a' Q(s', a'; target). With discount 0 this is exactly
/// the stored reward. candidates restricts the max to a subset of actions
/// (null means the full lattice).
double td_target(const QNetwork& target_net, const Experience& e, const ActionFeatureTable& feats,
                 double discount, const std::vector<std::uint32_t>* candidates = nullptr);

/// Loss/gradient of the plain regression 1/B * sum (net(x_i) - t_i)^2 over a
/// flat row-major input batch. Exposed for the finite-difference checks.
struct GradBuffers {
  std::vector<std::vector<double>> w, b;
};
GradBuffers make_grad_buffers(const QNetwork& net);

/// Adam moment estimates; one instance per trained network.
struct AdamState {
  GradBuffers m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};
AdamState make_adam_state(const QNetwork& net);

double batch_loss(const QNetwork& net, std::span<const double> inputs,
                  std::span<const double> targets);
double batch_loss_grad(const QNetwork& net, std::span<const double> inputs,
                       std::span<const double> targets, GradBuffers& grad);

/// One full-batch gradient descent step on the squared TD error; returns the
/// pre-step mean squared loss. Throws TrainingError on non-finite loss.
/// With adam == nullptr the step is plain SGD; otherwise the gradient is
/// preconditioned by Adam moment estimates.
double train_step(QNetwork& net, const QNetwork& target_net, std::span<const Experience> batch,
                  const ActionFeatureTable& feats, double discount, double learning_rate,
                  const std::vector<std::uint32_t>* candidates = nullptr,
                  AdamState* adam = nullptr);

struct TrainConfig {
  int episodes = 500;
  int steps_per_episode = 100;
  int minibatch = 64;
  double learning_rate = 3e-3;
  double discount = 0.0;
  std::size_t replay_capacity = 4000;
  std::uint64_t seed = 1;
  std::vector<int> hidden_sizes = {32, 16};
  int td_candidates = 256;
  /// Adam preconditioning (default); false falls back to plain SGD with the
  /// step size scaled by the observed reward magnitude.
  bool adam = true;
  /// Calibrates the network output gain to the largest |reward| seen, so the
  /// trainable part always regresses O(1) values.
  bool scale_lr_by_reward = true;
  /// Calibrate the gain to the largest positive reward instead (the utility
  /// ridge maps to O(1) no matter how deep the shaped penalties go).
  bool scale_by_positive_reward = false;
  double eps_drop = 0.8;
  double eps_ref_episodes = 500.0;
  double eps_floor = 0.2;
};

void validate(const TrainConfig& cfg);

/// max(1 - eps_drop * episode / eps_ref_episodes, eps_floor)
double epsilon_at(const TrainConfig& cfg, int episode);

struct EpisodeLog {
  int episode = 0;
  double mean_reward = 0.0;
  double greedy_u = 0.0;
  double epsilon = 0.0;
  double loss = 0.0;
};

/// episode,mean_reward,greedy_u,epsilon,loss
void write_episode_log_csv(std::ostream& os, std::span<const EpisodeLog> log);

/// Everything one agent needs to know about its pair.
struct PairLink {
  PairGammas gamma;
  std::array<double, 4> gains_db{};
};

PairLink make_pair_link(const ChannelGains& gains, int m, int n);

struct TrainedAgent {
  QNetwork net;
  std::vector<EpisodeLog> log;
};

/// Full training loop: per-episode reset to the midpoint decision, epsilon-
/// greedy interaction, replay sampling, one gradient step per interaction,
/// target sync at each episode end. Bitwise deterministic given cfg.seed.
/// feats may share a prebuilt table; warm_start seeds the network instead of
/// fresh initialization.
TrainedAgent train_agent(const PairLink& link, const QosConfig& q, const ActionGrid& grid,
                         const TrainConfig& cfg, const ActionFeatureTable* feats = nullptr,
                         const QNetwork* warm_start = nullptr);

/// Greedy policy extraction: full-grid argmax, evaluated and gated on both
/// QoS constraints. Empty when the greedy action violates QoS; upstream
/// treats that as utility 0. Uses the canonical midpoint decision state.
std::optional<std::pair<ResourceDecision, double>> greedy_decision(
    const QNetwork& net, const PairLink& link, const ActionGrid& grid, const QosConfig& q,
    const ActionFeatureTable* feats = nullptr);

}  // namespace coopd2d
