#include "coopd2d/channel.hpp"

#include <cmath>
#include <ostream>

#include "coopd2d/csv.hpp"
#include "coopd2d/rng.hpp"

namespace coopd2d {

NoiseModel make_noise_model(double n0_dbm_per_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw ArgumentError("noise model: bandwidth_hz must be > 0");
  NoiseModel n;
  n.n0_dbm_per_hz = n0_dbm_per_hz;
  n.bandwidth_hz = bandwidth_hz;
  n.noise_power_w = dbm_to_watts(n0_dbm_per_hz) * bandwidth_hz;
  return n;
}

double path_gain(double d_m, double pl_exponent) {
  return std::pow(std::max(d_m, 1.0), -pl_exponent);
}

ChannelGains compute_gains(const CellScenario& s, const NoiseModel& noise,
                           const ShadowingConfig& shadowing) {
  const int m_links = s.m_links();
  const int n_links = s.n_links();
  ChannelGains g;
  g.m_links = m_links;
  g.n_links = n_links;
  g.noise = noise;
  g.g_mn.resize(static_cast<std::size_t>(m_links) * n_links);
  g.g_mb.resize(m_links);
  g.g_nb.resize(n_links);
  g.g_nn.resize(n_links);
  const double a = s.pl_exponent;
  for (int m = 0; m < m_links; ++m) {
    g.g_mb[m] = path_gain(distance(s.cu_positions[m], s.bs_pos), a);
    for (int n = 0; n < n_links; ++n)
      g.g_mn[static_cast<std::size_t>(m) * n_links + n] =
          path_gain(distance(s.cu_positions[m], s.dt_positions[n]), a);
  }
  for (int n = 0; n < n_links; ++n) {
    g.g_nb[n] = path_gain(distance(s.dt_positions[n], s.bs_pos), a);
    g.g_nn[n] = path_gain(distance(s.dt_positions[n], s.dr_positions[n]), a);
  }
  if (shadowing.sigma_db > 0.0) {
    Rng rng(derive_seed(shadowing.seed, {0x5AAD}));
    auto shadow = [&](double gain) {
      // Box-Muller; gains stay clamped at the 1 m reference.
      const double u1 = rng.uniform01();
      const double u2 = rng.uniform01();
      const double z = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
      return std::min(1.0, gain * db_to_lin(shadowing.sigma_db * z));
    };
    for (auto& v : g.g_mn) v = shadow(v);
    for (auto& v : g.g_mb) v = shadow(v);
    for (auto& v : g.g_nb) v = shadow(v);
    for (auto& v : g.g_nn) v = shadow(v);
  }
  return g;
}

double snr_coeff(double gain, const NoiseModel& noise) {
  if (!(gain > 0.0)) throw ArgumentError("snr_coeff: gain must be > 0");
  return gain / noise.noise_power_w;
}

PairGammas pair_gammas(const ChannelGains& g, int m, int n) {
  return {snr_coeff(g.mn(m, n), g.noise), snr_coeff(g.g_mb[m], g.noise),
          snr_coeff(g.g_nb[n], g.noise), snr_coeff(g.g_nn[n], g.noise)};
}

std::array<double, 4> pair_gains_db(const ChannelGains& g, int m, int n) {
  return {lin_to_db(g.mn(m, n)), lin_to_db(g.g_mb[m]), lin_to_db(g.g_nb[n]),
          lin_to_db(g.g_nn[n])};
}

void write_gains_csv(std::ostream& os, const ChannelGains& g) {
  os << "link_kind,m,n,gain\n";
  for (int m = 0; m < g.m_links; ++m)
    for (int n = 0; n < g.n_links; ++n) csv::write_row(os, "mn", m, n, g.mn(m, n));
  for (int m = 0; m < g.m_links; ++m) csv::write_row(os, "mb", m, "", g.g_mb[m]);
  for (int n = 0; n < g.n_links; ++n) csv::write_row(os, "nb", "", n, g.g_nb[n]);
  for (int n = 0; n < g.n_links; ++n) csv::write_row(os, "nn", "", n, g.g_nn[n]);
}

}  // namespace coopd2d
