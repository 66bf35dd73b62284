#pragma once

#include <iosfwd>
#include <vector>

#include "coopd2d/channel.hpp"
#include "coopd2d/coopshare.hpp"
#include "coopd2d/matching.hpp"
#include "coopd2d/topology.hpp"

namespace coopd2d {

/// Distance gates for admitting a cellular link into a D2D link's
/// cooperative set: CU-to-DT range and CU-to-BS range, in meters.
struct CoopSetConfig {
  double r_n1_m = 375.0;
  double r_n2_m = 375.0;
};

/// Per D2D link n, the admitted cellular link indices (ascending).
struct CoopSets {
  std::vector<std::vector<int>> sets;
};

/// E_n = { m : dis(CU_m, DT_n) <= r_n1 and dis(CU_m, BS) <= r_n2 and the
/// closed-form feasibility interval of the pair is nonempty }.
CoopSets cooperative_sets(const CellScenario& scenario, const ChannelGains& gains,
                          const QosConfig& q, const CoopSetConfig& cfg);

/// Keeps entry (m, n) iff m is in E_n, zeroes everything else.
WeightMatrix masked_weight_matrix(const WeightMatrix& u, const CoopSets& sets);

/// Number of strictly positive entries.
int nonzero_count(const WeightMatrix& u);

/// One `n,m` row per admitted pair.
void write_coop_sets_csv(std::ostream& os, const CoopSets& sets);

}  // namespace coopd2d
