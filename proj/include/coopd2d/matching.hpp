#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "coopd2d/common.hpp"

namespace coopd2d {

/// BS-side utility matrix. An entry of 0 means "no edge": the pair is
/// infeasible or was masked out and can never appear in a matching.
struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> u;  // row-major

  WeightMatrix() = default;
  WeightMatrix(int m, int n) : rows(m), cols(n), u(static_cast<std::size_t>(m) * n, 0.0) {}

  double& at(int m, int n) { return u[static_cast<std::size_t>(m) * cols + n]; }
  double at(int m, int n) const { return u[static_cast<std::size_t>(m) * cols + n]; }
};

/// One-to-one assignment between rows (cellular links) and columns (D2D
/// links). Pairs are kept sorted by row index; total_weight is always the
/// canonical ascending-row sum of the matched entries.
struct Matching {
  std::vector<std::pair<int, int>> pairs;
  double total_weight = 0.0;
};

/// Maximum-weight bipartite matching via the Kuhn-Munkres (Hungarian)
/// algorithm, O(max(M,N)^3). Rectangular inputs are padded internally with
/// zero weights; zero-weight edges never appear in the result. Deterministic:
/// among equal-weight alternatives a final scan canonicalizes toward the
/// lexicographically smallest pair set.
Matching km_match(const WeightMatrix& u);

/// Enumeration oracle over all injective partial assignments; requires
/// min(M, N) <= 8. Same zero-edge and tie rules as km_match.
Matching brute_force_match(const WeightMatrix& u);

/// Canonical score of a matching: the ascending-row sum of its entries.
double system_wsee(const WeightMatrix& u, const Matching& match);

/// Plain numeric grid, one row per matrix row.
void write_weight_matrix_csv(std::ostream& os, const WeightMatrix& u);
WeightMatrix read_weight_matrix_csv(std::istream& is);

}  // namespace coopd2d
