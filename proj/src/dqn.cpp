#include "coopd2d/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "coopd2d/csv.hpp"

namespace coopd2d {

namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

double FeatureScaler::norm_gain_db(double g_db) const {
  return clamp_unit(2.0 * (g_db - gain_db_lo) / (gain_db_hi - gain_db_lo) - 1.0);
}

double FeatureScaler::norm_power_w(double p_w) const {
  const double dbm = watts_to_dbm(p_w);
  if (p_max_dbm == p_min_dbm) return 0.0;
  return clamp_unit(2.0 * (dbm - p_min_dbm) / (p_max_dbm - p_min_dbm) - 1.0);
}

double FeatureScaler::norm_theta(double theta) const { return clamp_unit(4.0 * theta - 1.0); }

FeatureScaler make_scaler(const QosConfig& q) {
  FeatureScaler s;
  s.p_min_dbm = watts_to_dbm(q.p_min_w);
  s.p_max_dbm = watts_to_dbm(q.p_max_w);
  return s;
}

AgentState make_state(const std::array<double, 4>& gains_db, const ResourceDecision& d,
                      const FeatureScaler& scaler) {
  AgentState s;
  for (int i = 0; i < 4; ++i) s.f[i] = scaler.norm_gain_db(gains_db[i]);
  s.f[4] = scaler.norm_power_w(d.p_c_w);
  s.f[5] = scaler.norm_power_w(d.p_r_w);
  s.f[6] = scaler.norm_power_w(d.p_d_w);
  s.f[7] = scaler.norm_theta(d.theta);
  return s;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ArgumentError("replay memory: capacity must be > 0");
  buf_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(const Experience& e) {
  if (buf_.size() < capacity_) {
    buf_.push_back(e);
  } else {
    buf_[cursor_] = e;
    cursor_ = (cursor_ + 1) % capacity_;
  }
}

std::vector<std::uint32_t> ReplayMemory::sample_indices(Rng& rng, std::size_t k) const {
  if (k > buf_.size()) throw ArgumentError("replay memory: sample larger than stored size");
  // Floyd's algorithm: k distinct indices, uniform over all k-subsets.
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (std::size_t j = buf_.size() - k; j < buf_.size(); ++j) {
    const auto t = static_cast<std::uint32_t>(rng.uniform_below(j + 1));
    if (std::find(out.begin(), out.end(), t) != out.end())
      out.push_back(static_cast<std::uint32_t>(j));
    else
      out.push_back(t);
  }
  return out;
}

QNetwork QNetwork::make(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ArgumentError("qnetwork: need at least input and output sizes");
  if (sizes.back() != 1) throw ArgumentError("qnetwork: output size must be 1");
  for (int s : sizes)
    if (s < 1) throw ArgumentError("qnetwork: layer sizes must be >= 1");
  QNetwork net;
  net.layer_sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    net.weights.emplace_back(static_cast<std::size_t>(sizes[l + 1]) * sizes[l], 0.0);
    net.biases.emplace_back(sizes[l + 1], 0.0);
  }
  return net;
}

void QNetwork::init_uniform(Rng& rng) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const double bound = std::sqrt(6.0 / layer_sizes[l]);
    for (double& w : weights[l]) w = rng.uniform(-bound, bound);
    for (double& b : biases[l]) b = 0.0;
  }
}

double QNetwork::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != layer_sizes[0])
    throw ArgumentError("qnetwork forward: input dimension mismatch");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> nxt;
  const std::size_t n_layers = weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int n_out = layer_sizes[l + 1];
    const int n_in = layer_sizes[l];
    nxt.assign(n_out, 0.0);
    for (int h = 0; h < n_out; ++h) {
      double acc = biases[l][h];
      const double* w = &weights[l][static_cast<std::size_t>(h) * n_in];
      for (int j = 0; j < n_in; ++j) acc += w[j] * cur[j];
      nxt[h] = (l + 1 < n_layers && acc < 0.0) ? 0.0 : acc;
    }
    cur.swap(nxt);
  }
  return output_scale * cur[0];
}

std::size_t QNetwork::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

double QNetwork::get_param(std::size_t i) const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (i < weights[l].size()) return weights[l][i];
    i -= weights[l].size();
    if (i < biases[l].size()) return biases[l][i];
    i -= biases[l].size();
  }
  throw ArgumentError("qnetwork: parameter index out of range");
}

void QNetwork::add_to_param(std::size_t i, double delta) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (i < weights[l].size()) {
      weights[l][i] += delta;
      return;
    }
    i -= weights[l].size();
    if (i < biases[l].size()) {
      biases[l][i] += delta;
      return;
    }
    i -= biases[l].size();
  }
  throw ArgumentError("qnetwork: parameter index out of range");
}

namespace {

constexpr char kCheckpointMagic[4] = {'C', 'D', '2', 'Q'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32le(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
               static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}

std::uint32_t read_u32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ArgumentError("checkpoint: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

double read_f64le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw ArgumentError("checkpoint: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const QNetwork& net, std::ostream& os) {
  os.write(kCheckpointMagic, 4);
  write_u32le(os, kCheckpointVersion);
  write_u32le(os, static_cast<std::uint32_t>(net.layer_sizes.size()));
  for (int s : net.layer_sizes) write_u32le(os, static_cast<std::uint32_t>(s));
  write_f64le(os, net.output_scale);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (double w : net.weights[l]) write_f64le(os, w);
    for (double b : net.biases[l]) write_f64le(os, b);
  }
}

QNetwork load_checkpoint(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw ArgumentError("checkpoint: bad magic");
  const std::uint32_t version = read_u32le(is);
  if (version != kCheckpointVersion) throw ArgumentError("checkpoint: unsupported version");
  const std::uint32_t n_sizes = read_u32le(is);
  if (n_sizes < 2 || n_sizes > 64) throw ArgumentError("checkpoint: bad layer count");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<int>(read_u32le(is));
  QNetwork net = QNetwork::make(sizes);
  net.output_scale = read_f64le(is);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (double& w : net.weights[l]) w = read_f64le(is);
    for (double& b : net.biases[l]) b = read_f64le(is);
  }
  return net;
}

double forward_q(const QNetwork& net, const AgentState& s, const std::array<double, 4>& a_feat) {
  double x[12];
  std::copy(s.f.begin(), s.f.end(), x);
  std::copy(a_feat.begin(), a_feat.end(), x + 8);
  return net.forward(std::span<const double>(x, 12));
}

ActionFeatureTable make_action_features(const ActionGrid& grid, const FeatureScaler& scaler) {
  ActionFeatureTable t;
  t.count = grid.joint_size();
  t.pc.resize(t.count);
  t.pr.resize(t.count);
  t.pd.resize(t.count);
  t.th.resize(t.count);
  std::vector<double> pw(grid.power_count()), tw(grid.theta_count());
  for (std::uint32_t i = 0; i < grid.power_count(); ++i)
    pw[i] = scaler.norm_power_w(grid.power_levels_w[i]);
  for (std::uint32_t i = 0; i < grid.theta_count(); ++i)
    tw[i] = scaler.norm_theta(grid.theta_levels[i]);
  for (std::uint32_t a = 0; a < t.count; ++a) {
    const auto ix = grid.decode(a);
    t.pc[a] = pw[ix.pc];
    t.pr[a] = pw[ix.pr];
    t.pd[a] = pw[ix.pd];
    t.th[a] = tw[ix.th];
  }
  return t;
}

namespace {

constexpr std::uint32_t kArgmaxBlock = 128;

struct ArgmaxScratch {
  std::vector<double> buf_a, buf_b, base, q;
};

// Evaluates Q for actions [a0, a0+bs) of the block into sc.q. The state
// contribution to the first layer is precomputed in base (bias first, then
// state inputs in order), matching QNetwork::forward's accumulation order.
void eval_block(const QNetwork& net, const ActionFeatureTable& feats, std::uint32_t a0,
                std::uint32_t bs, ArgmaxScratch& sc) {
  const std::size_t n_layers = net.weights.size();
  const int h0 = net.layer_sizes[1];
  double* cur = sc.buf_a.data();
  for (int h = 0; h < h0; ++h) {
    const double* w = &net.weights[0][static_cast<std::size_t>(h) * 12];
    const double base = sc.base[h];
    double* z = cur + static_cast<std::size_t>(h) * kArgmaxBlock;
    const double w8 = w[8], w9 = w[9], w10 = w[10], w11 = w[11];
    for (std::uint32_t i = 0; i < bs; ++i)
      z[i] = base + w8 * feats.pc[a0 + i] + w9 * feats.pr[a0 + i] + w10 * feats.pd[a0 + i] +
             w11 * feats.th[a0 + i];
  }
  if (n_layers == 1) {
    for (std::uint32_t i = 0; i < bs; ++i) sc.q[i] = net.output_scale * cur[i];
    return;
  }
  for (int h = 0; h < h0; ++h) {
    double* z = cur + static_cast<std::size_t>(h) * kArgmaxBlock;
    for (std::uint32_t i = 0; i < bs; ++i) z[i] = z[i] < 0.0 ? 0.0 : z[i];
  }
  double* nxt = sc.buf_b.data();
  for (std::size_t l = 1; l < n_layers; ++l) {
    const int n_out = net.layer_sizes[l + 1];
    const int n_in = net.layer_sizes[l];
    const bool last = l + 1 == n_layers;
    for (int h = 0; h < n_out; ++h) {
      double* z = nxt + static_cast<std::size_t>(h) * kArgmaxBlock;
      const double bias = net.biases[l][h];
      for (std::uint32_t i = 0; i < bs; ++i) z[i] = bias;
      const double* w = &net.weights[l][static_cast<std::size_t>(h) * n_in];
      for (int k = 0; k < n_in; ++k) {
        const double wk = w[k];
        const double* in = cur + static_cast<std::size_t>(k) * kArgmaxBlock;
        for (std::uint32_t i = 0; i < bs; ++i) z[i] += wk * in[i];
      }
      if (!last)
        for (std::uint32_t i = 0; i < bs; ++i) z[i] = z[i] < 0.0 ? 0.0 : z[i];
    }
    std::swap(cur, nxt);
  }
  for (std::uint32_t i = 0; i < bs; ++i) sc.q[i] = net.output_scale * cur[i];
}

void prepare_scratch(const QNetwork& net, const AgentState& s, ArgmaxScratch& sc) {
  int maxw = 1;
  for (std::size_t l = 1; l < net.layer_sizes.size(); ++l)
    maxw = std::max(maxw, net.layer_sizes[l]);
  sc.buf_a.resize(static_cast<std::size_t>(maxw) * kArgmaxBlock);
  sc.buf_b.resize(static_cast<std::size_t>(maxw) * kArgmaxBlock);
  sc.q.resize(kArgmaxBlock);
  const int h0 = net.layer_sizes[1];
  sc.base.resize(h0);
  for (int h = 0; h < h0; ++h) {
    const double* w = &net.weights[0][static_cast<std::size_t>(h) * 12];
    double acc = net.biases[0][h];
    for (int j = 0; j < 8; ++j) acc += w[j] * s.f[j];
    sc.base[h] = acc;
  }
}

}  // namespace

ArgmaxResult argmax_q(const QNetwork& net, const AgentState& s, const ActionFeatureTable& feats) {
  if (net.layer_sizes[0] != 12)
    throw ArgumentError("argmax_q: network input must be the 12 state+action features");
  if (feats.count == 0) throw ArgumentError("argmax_q: empty action table");
  const std::uint32_t total = feats.count;
  const std::uint32_t n_blocks = (total + kArgmaxBlock - 1) / kArgmaxBlock;
  std::vector<double> block_q(n_blocks);
  std::vector<std::uint32_t> block_ix(n_blocks);
#pragma omp parallel
  {
    ArgmaxScratch sc;
    prepare_scratch(net, s, sc);
#pragma omp for schedule(static)
    for (long b = 0; b < static_cast<long>(n_blocks); ++b) {
      const std::uint32_t a0 = static_cast<std::uint32_t>(b) * kArgmaxBlock;
      const std::uint32_t bs = std::min(kArgmaxBlock, total - a0);
      eval_block(net, feats, a0, bs, sc);
      double best = sc.q[0];
      std::uint32_t best_i = 0;
      for (std::uint32_t i = 1; i < bs; ++i) {
        if (sc.q[i] > best) {
          best = sc.q[i];
          best_i = i;
        }
      }
      block_q[b] = best;
      block_ix[b] = a0 + best_i;
    }
  }
  // Blocks merged in index order: lowest-index tie-breaking, any worker count.
  ArgmaxResult r{block_ix[0], block_q[0]};
  for (std::uint32_t b = 1; b < n_blocks; ++b) {
    if (block_q[b] > r.q) {
      r.q = block_q[b];
      r.index = block_ix[b];
    }
  }
  return r;
}

namespace reference {

ArgmaxResult argmax_q(const QNetwork& net, const AgentState& s, const ActionFeatureTable& feats) {
  ArgmaxResult r{0, forward_q(net, s, feats.at(0))};
  for (std::uint32_t a = 1; a < feats.count; ++a) {
    const double q = forward_q(net, s, feats.at(a));
    if (q > r.q) {
      r.q = q;
      r.index = a;
    }
  }
  return r;
}

}  // namespace reference

std::uint32_t select_action(const QNetwork& net, const AgentState& s,
                            const ActionFeatureTable& feats, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw ArgumentError("select_action: epsilon outside [0, 1]");
  if (rng.uniform01() < epsilon) return static_cast<std::uint32_t>(rng.uniform_below(feats.count));
  return argmax_q(net, s, feats).index;
}

double td_target(const QNetwork& target_net, const Experience& e, const ActionFeatureTable& feats,
                 double discount, const std::vector<std::uint32_t>* candidates) {
  if (discount == 0.0) return e.r;
  double best;
  if (candidates == nullptr) {
    best = argmax_q(target_net, e.s_next, feats).q;
  } else {
    if (candidates->empty()) throw ArgumentError("td_target: empty candidate set");
    best = forward_q(target_net, e.s_next, feats.at((*candidates)[0]));
    for (std::size_t i = 1; i < candidates->size(); ++i)
      best = std::max(best, forward_q(target_net, e.s_next, feats.at((*candidates)[i])));
  }
  return e.r + discount * best;
}

AdamState make_adam_state(const QNetwork& net) {
  AdamState a;
  a.m = make_grad_buffers(net);
  a.v = make_grad_buffers(net);
  return a;
}

GradBuffers make_grad_buffers(const QNetwork& net) {
  GradBuffers g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.w.emplace_back(net.weights[l].size(), 0.0);
    g.b.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

namespace {

struct ForwardCache {
  std::vector<std::vector<double>> acts;  // acts[0] = input, acts[L] = output
};

double forward_cached(const QNetwork& net, std::span<const double> x, ForwardCache& fc) {
  const std::size_t n_layers = net.weights.size();
  fc.acts.resize(n_layers + 1);
  fc.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int n_out = net.layer_sizes[l + 1];
    const int n_in = net.layer_sizes[l];
    fc.acts[l + 1].assign(n_out, 0.0);
    for (int h = 0; h < n_out; ++h) {
      double acc = net.biases[l][h];
      const double* w = &net.weights[l][static_cast<std::size_t>(h) * n_in];
      for (int j = 0; j < n_in; ++j) acc += w[j] * fc.acts[l][j];
      fc.acts[l + 1][h] = (l + 1 < n_layers && acc < 0.0) ? 0.0 : acc;
    }
  }
  return net.output_scale * fc.acts[n_layers][0];
}

}  // namespace

double batch_loss(const QNetwork& net, std::span<const double> inputs,
                  std::span<const double> targets) {
  const std::size_t in_dim = net.layer_sizes[0];
  const std::size_t batch = targets.size();
  if (inputs.size() != batch * in_dim) throw ArgumentError("batch_loss: input size mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double q = net.forward(inputs.subspan(i * in_dim, in_dim));
    const double d = q - targets[i];
    loss += d * d;
  }
  return loss / static_cast<double>(batch);
}

double batch_loss_grad(const QNetwork& net, std::span<const double> inputs,
                       std::span<const double> targets, GradBuffers& grad) {
  const std::size_t in_dim = net.layer_sizes[0];
  const std::size_t batch = targets.size();
  if (inputs.size() != batch * in_dim) throw ArgumentError("batch_loss_grad: input size mismatch");
  const std::size_t n_layers = net.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::fill(grad.w[l].begin(), grad.w[l].end(), 0.0);
    std::fill(grad.b[l].begin(), grad.b[l].end(), 0.0);
  }
  ForwardCache fc;
  std::vector<double> delta, delta_prev;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double q = forward_cached(net, inputs.subspan(i * in_dim, in_dim), fc);
    const double resid = q - targets[i];
    loss += resid * resid;
    delta.assign(1, 2.0 * resid * net.output_scale / static_cast<double>(batch));
    for (std::size_t l = n_layers; l-- > 0;) {
      const int n_out = net.layer_sizes[l + 1];
      const int n_in = net.layer_sizes[l];
      for (int h = 0; h < n_out; ++h) {
        const double d = delta[h];
        if (d == 0.0) continue;
        grad.b[l][h] += d;
        double* gw = &grad.w[l][static_cast<std::size_t>(h) * n_in];
        const double* a = fc.acts[l].data();
        for (int j = 0; j < n_in; ++j) gw[j] += d * a[j];
      }
      if (l == 0) break;
      delta_prev.assign(n_in, 0.0);
      for (int h = 0; h < n_out; ++h) {
        const double d = delta[h];
        if (d == 0.0) continue;
        const double* w = &net.weights[l][static_cast<std::size_t>(h) * n_in];
        for (int j = 0; j < n_in; ++j) delta_prev[j] += d * w[j];
      }
      // Rectifier gate: activations are zero exactly where the unit was off.
      for (int j = 0; j < n_in; ++j)
        if (fc.acts[l][j] <= 0.0) delta_prev[j] = 0.0;
      delta.swap(delta_prev);
    }
  }
  return loss / static_cast<double>(batch);
}

double train_step(QNetwork& net, const QNetwork& target_net, std::span<const Experience> batch,
                  const ActionFeatureTable& feats, double discount, double learning_rate,
                  const std::vector<std::uint32_t>* candidates, AdamState* adam) {
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  const std::size_t in_dim = net.layer_sizes[0];
  std::vector<double> inputs(batch.size() * in_dim);
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Experience& e = batch[i];
    double* x = &inputs[i * in_dim];
    std::copy(e.s.f.begin(), e.s.f.end(), x);
    const auto af = feats.at(e.a_index);
    std::copy(af.begin(), af.end(), x + 8);
    targets[i] = td_target(target_net, e, feats, discount, candidates);
  }
  GradBuffers grad = make_grad_buffers(net);
  const double loss = batch_loss_grad(net, inputs, targets, grad);
  if (!std::isfinite(loss))
    throw TrainingError("train_step: non-finite loss (diverged); check learning rate and reward scale");
  if (adam == nullptr) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      for (std::size_t i = 0; i < net.weights[l].size(); ++i)
        net.weights[l][i] -= learning_rate * grad.w[l][i];
      for (std::size_t i = 0; i < net.biases[l].size(); ++i)
        net.biases[l][i] -= learning_rate * grad.b[l][i];
    }
    return loss;
  }
  ++adam->t;
  const double c1 = 1.0 - std::pow(adam->beta1, adam->t);
  const double c2 = 1.0 - std::pow(adam->beta2, adam->t);
  auto update = [&](std::vector<double>& w, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = adam->beta1 * m[i] + (1.0 - adam->beta1) * g[i];
      v[i] = adam->beta2 * v[i] + (1.0 - adam->beta2) * g[i] * g[i];
      w[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam->eps);
    }
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    update(net.weights[l], grad.w[l], adam->m.w[l], adam->v.w[l]);
    update(net.biases[l], grad.b[l], adam->m.b[l], adam->v.b[l]);
  }
  return loss;
}

void validate(const TrainConfig& cfg) {
  if (cfg.episodes < 1) throw ArgumentError("train: episodes must be >= 1");
  if (cfg.steps_per_episode < 1) throw ArgumentError("train: steps_per_episode must be >= 1");
  if (cfg.minibatch < 1) throw ArgumentError("train: minibatch must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ArgumentError("train: learning_rate must be > 0");
  if (cfg.discount < 0.0 || cfg.discount >= 1.0)
    throw ArgumentError("train: discount must lie in [0, 1)");
  if (cfg.replay_capacity == 0) throw ArgumentError("train: replay capacity must be > 0");
  if (cfg.td_candidates < 1) throw ArgumentError("train: td_candidates must be >= 1");
  for (int h : cfg.hidden_sizes)
    if (h < 1) throw ArgumentError("train: hidden sizes must be >= 1");
}

double epsilon_at(const TrainConfig& cfg, int episode) {
  return std::max(1.0 - cfg.eps_drop * static_cast<double>(episode) / cfg.eps_ref_episodes,
                  cfg.eps_floor);
}

void write_episode_log_csv(std::ostream& os, std::span<const EpisodeLog> log) {
  os << "episode,mean_reward,greedy_u,epsilon,loss\n";
  for (const auto& row : log)
    csv::write_row(os, row.episode, row.mean_reward, row.greedy_u, row.epsilon, row.loss);
}

PairLink make_pair_link(const ChannelGains& gains, int m, int n) {
  return {pair_gammas(gains, m, n), pair_gains_db(gains, m, n)};
}

namespace {

ResourceDecision midpoint_decision(const ActionGrid& grid) {
  ActionGrid::Indices ix;
  ix.pc = ix.pr = ix.pd = grid.power_count() / 2;
  ix.th = grid.theta_count() / 2;
  return grid.decision(grid.encode(ix));
}

}  // namespace

TrainedAgent train_agent(const PairLink& link, const QosConfig& q, const ActionGrid& grid,
                         const TrainConfig& cfg, const ActionFeatureTable* feats,
                         const QNetwork* warm_start) {
  validate(cfg);
  const FeatureScaler scaler = make_scaler(q);
  ActionFeatureTable local_feats;
  if (feats == nullptr) {
    local_feats = make_action_features(grid, scaler);
    feats = &local_feats;
  }
  std::vector<int> sizes;
  sizes.push_back(12);
  for (int h : cfg.hidden_sizes) sizes.push_back(h);
  sizes.push_back(1);

  Rng init_rng(derive_seed(cfg.seed, {seed_tag::agent_init}));
  Rng act_rng(derive_seed(cfg.seed, {seed_tag::agent_act}));

  QNetwork net;
  if (warm_start != nullptr) {
    net = *warm_start;
  } else {
    net = QNetwork::make(sizes);
    net.init_uniform(init_rng);
  }
  QNetwork target = net;

  ReplayMemory replay(cfg.replay_capacity);
  const ResourceDecision start = midpoint_decision(grid);
  double reward_scale = 1.0;
  std::uint32_t last_greedy = grid.encode({grid.power_count() / 2, grid.power_count() / 2,
                                           grid.power_count() / 2, grid.theta_count() / 2});
  std::vector<Experience> batch(cfg.minibatch);
  std::vector<std::uint32_t> candidates;
  AdamState adam = make_adam_state(net);

  TrainedAgent out;
  out.log.reserve(cfg.episodes);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = epsilon_at(cfg, ep);
    AgentState state = make_state(link.gains_db, start, scaler);
    double reward_sum = 0.0;
    double loss_sum = 0.0;
    int loss_count = 0;
    for (int step = 0; step < cfg.steps_per_episode; ++step) {
      const bool explore = act_rng.uniform01() < eps;
      std::uint32_t a;
      if (explore) {
        a = static_cast<std::uint32_t>(act_rng.uniform_below(feats->count));
      } else {
        a = argmax_q(net, state, *feats).index;
        last_greedy = a;
      }
      const ResourceDecision d = grid.decision(a);
      const PairEvaluation ev = evaluate_pair(link.gamma, d, q);
      const double r = reward(ev, q);
      const AgentState s_next = make_state(link.gains_db, d, scaler);
      replay.push({state, a, r, s_next});
      reward_scale = cfg.scale_by_positive_reward ? std::max(reward_scale, r)
                                                  : std::max(reward_scale, std::abs(r));
      state = s_next;
      reward_sum += r;

      if (replay.size() >= static_cast<std::size_t>(cfg.minibatch)) {
        const auto idxs = replay.sample_indices(act_rng, cfg.minibatch);
        for (std::size_t i = 0; i < idxs.size(); ++i) batch[i] = replay[idxs[i]];
        const std::vector<std::uint32_t>* cand_ptr = nullptr;
        if (cfg.discount > 0.0 &&
            static_cast<std::uint32_t>(cfg.td_candidates) < feats->count) {
          candidates.clear();
          for (int i = 0; i < cfg.td_candidates; ++i)
            candidates.push_back(static_cast<std::uint32_t>(act_rng.uniform_below(feats->count)));
          candidates.push_back(last_greedy);
          cand_ptr = &candidates;
        }
        double lr = cfg.learning_rate;
        if (cfg.scale_lr_by_reward) {
          // Calibrated output gain: the trainable part regresses rewards
          // normalized by the largest magnitude seen so far.
          net.output_scale = reward_scale;
          target.output_scale = reward_scale;
          if (!cfg.adam) lr = cfg.learning_rate / (reward_scale * reward_scale);
        }
        loss_sum += train_step(net, target, batch, *feats, cfg.discount, lr, cand_ptr,
                               cfg.adam ? &adam : nullptr);
        ++loss_count;
      }
    }
    target = net;
    const auto greedy = greedy_decision(net, link, grid, q, feats);
    EpisodeLog row;
    row.episode = ep;
    row.mean_reward = reward_sum / cfg.steps_per_episode;
    row.greedy_u = greedy ? greedy->second : 0.0;
    row.epsilon = eps;
    row.loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    out.log.push_back(row);
  }
  out.net = std::move(net);
  return out;
}

std::optional<std::pair<ResourceDecision, double>> greedy_decision(
    const QNetwork& net, const PairLink& link, const ActionGrid& grid, const QosConfig& q,
    const ActionFeatureTable* feats) {
  const FeatureScaler scaler = make_scaler(q);
  ActionFeatureTable local_feats;
  if (feats == nullptr) {
    local_feats = make_action_features(grid, scaler);
    feats = &local_feats;
  }
  const AgentState state = make_state(link.gains_db, midpoint_decision(grid), scaler);
  const ArgmaxResult best = argmax_q(net, state, *feats);
  const ResourceDecision d = grid.decision(best.index);
  const PairEvaluation ev = evaluate_pair(link.gamma, d, q);
  if (!(ev.c1_ok && ev.c2_ok)) return std::nullopt;
  return std::make_pair(d, ev.u);
}

}  // namespace coopd2d
