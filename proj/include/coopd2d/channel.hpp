#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "coopd2d/common.hpp"
#include "coopd2d/topology.hpp"

namespace coopd2d {

/// Additive white Gaussian noise floor. noise_power_w is derived from the
/// spectral density and the bandwidth over which SNRs are normalized.
struct NoiseModel {
  double n0_dbm_per_hz = -174.0;
  double bandwidth_hz = 1.0;
  double noise_power_w = 0.0;
};

NoiseModel make_noise_model(double n0_dbm_per_hz, double bandwidth_hz);

/// Simplified path loss: gain = max(d, 1 m)^(-pl_exponent). Unit gain at the
/// 1 m reference distance; distances below it clamp so gains never exceed 1.
double path_gain(double d_m, double pl_exponent);

/// Large-scale channel gains for every link of a scenario.
struct ChannelGains {
  int m_links = 0;
  int n_links = 0;
  std::vector<double> g_mn;  // M x N, row-major: CU m -> DT n
  std::vector<double> g_mb;  // CU m -> BS
  std::vector<double> g_nb;  // DT n -> BS
  std::vector<double> g_nn;  // DT n -> DR n
  NoiseModel noise;

  double mn(int m, int n) const { return g_mn[static_cast<std::size_t>(m) * n_links + n]; }
};

/// Optional log-normal shadowing applied on top of the path loss, in dB
/// standard deviation. Defaults off; gains stay clamped at the 1 m reference.
struct ShadowingConfig {
  double sigma_db = 0.0;
  std::uint64_t seed = 0;
};

ChannelGains compute_gains(const CellScenario& scenario, const NoiseModel& noise,
                           const ShadowingConfig& shadowing = {});

/// gain / noise power: SNR = p * snr_coeff(gain) with p in watts.
double snr_coeff(double gain, const NoiseModel& noise);

/// The four per-watt SNR coefficients of one cellular/D2D pair.
struct PairGammas {
  double mn = 0.0;
  double mb = 0.0;
  double nb = 0.0;
  double nn = 0.0;
};

PairGammas pair_gammas(const ChannelGains& g, int m, int n);

/// The pair's raw gains in dB, as the learning agents observe them.
std::array<double, 4> pair_gains_db(const ChannelGains& g, int m, int n);

/// Debug export: link_kind,m,n,gain (n empty for mb rows, m empty for nb/nn).
void write_gains_csv(std::ostream& os, const ChannelGains& g);

}  // namespace coopd2d
