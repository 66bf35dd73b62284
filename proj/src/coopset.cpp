#include "coopd2d/coopset.hpp"

#include <ostream>

#include "coopd2d/csv.hpp"

namespace coopd2d {

CoopSets cooperative_sets(const CellScenario& scenario, const ChannelGains& gains,
                          const QosConfig& q, const CoopSetConfig& cfg) {
  if (!(cfg.r_n1_m > 0.0) || !(cfg.r_n2_m > 0.0))
    throw ArgumentError("coopset: cooperative ranges must be > 0");
  if (scenario.m_links() != gains.m_links || scenario.n_links() != gains.n_links)
    throw ArgumentError("coopset: scenario and gains dimensions differ");
  CoopSets out;
  out.sets.resize(scenario.n_links());
  for (int n = 0; n < scenario.n_links(); ++n) {
    for (int m = 0; m < scenario.m_links(); ++m) {
      if (distance(scenario.cu_positions[m], scenario.dt_positions[n]) > cfg.r_n1_m) continue;
      if (distance(scenario.cu_positions[m], scenario.bs_pos) > cfg.r_n2_m) continue;
      if (!feasibility_interval(pair_gammas(gains, m, n), q)) continue;
      out.sets[n].push_back(m);
    }
  }
  return out;
}

WeightMatrix masked_weight_matrix(const WeightMatrix& u, const CoopSets& sets) {
  if (static_cast<int>(sets.sets.size()) != u.cols)
    throw ArgumentError("masked_weight_matrix: set count must equal column count");
  WeightMatrix out(u.rows, u.cols);
  for (int n = 0; n < u.cols; ++n)
    for (int m : sets.sets[n]) out.at(m, n) = u.at(m, n);
  return out;
}

int nonzero_count(const WeightMatrix& u) {
  int count = 0;
  for (double v : u.u)
    if (v > 0.0) ++count;
  return count;
}

void write_coop_sets_csv(std::ostream& os, const CoopSets& sets) {
  os << "n,m\n";
  for (std::size_t n = 0; n < sets.sets.size(); ++n)
    for (int m : sets.sets[n]) csv::write_row(os, static_cast<int>(n), m);
}

}  // namespace coopd2d
