#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "coopd2d/common.hpp"

namespace coopd2d {

/// Node layout of one single-cell snapshot. Immutable after construction and
/// freely shareable across threads.
struct CellScenario {
  double radius = 0.0;  // meters
  Point bs_pos{0.0, 0.0};
  std::vector<Point> cu_positions;  // M cellular users
  std::vector<Point> dt_positions;  // N D2D transmitters
  std::vector<Point> dr_positions;  // N D2D receivers
  double pl_exponent = 3.8;

  int m_links() const { return static_cast<int>(cu_positions.size()); }
  int n_links() const { return static_cast<int>(dt_positions.size()); }
};

/// Draws M CUs, N DTs and N DRs independently and uniformly over the disk of
/// the given radius (inverse-CDF radius R*sqrt(u), uniform angle). Identical
/// seed gives a bitwise identical scenario. If d2d_max_pair_distance > 0 each
/// DR is resampled until it lies within that distance of its DT.
CellScenario sample_scenario(int m_links, int n_links, double radius, double pl_exponent,
                             std::uint64_t seed, double d2d_max_pair_distance = 0.0);

/// Single-pair geometry used by the distance-sweep studies. BS at the origin,
/// DT on the positive x axis, CU placed by two-circle intersection (the
/// non-negative-y solution), DR perpendicular to the BS-DT axis.
CellScenario fixed_line_scenario(double d_cu_bs, double d_dt_bs, double d_dt_dr, double d_cu_dt,
                                 double pl_exponent = 3.8);

/// One row per node: kind{BS,CU,DT,DR},index,x_m,y_m.
void write_scenario_csv(std::ostream& os, const CellScenario& s);
CellScenario read_scenario_csv(std::istream& is);

}  // namespace coopd2d
