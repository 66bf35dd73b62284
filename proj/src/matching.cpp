#include "coopd2d/matching.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "coopd2d/csv.hpp"

namespace coopd2d {

namespace {

void check_matrix(const WeightMatrix& u) {
  if (u.rows < 1 || u.cols < 1) throw ArgumentError("weight matrix: empty");
  for (double v : u.u)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ArgumentError("weight matrix: entries must be finite and >= 0");
}

double canonical_total(const WeightMatrix& u, const std::vector<std::pair<int, int>>& pairs) {
  double total = 0.0;
  for (const auto& [m, n] : pairs) total += u.at(m, n);
  return total;
}

// Classic O(n^3) Hungarian algorithm with potentials, minimizing over a
// square cost matrix. Returns row_of_col (1-based internals folded away).
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n, -1);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

// Equal-total pairwise swaps toward the lexicographically smallest pair set.
// Also retargets single pairs to equal-weight smaller row/column slots.
void canonicalize(const WeightMatrix& u, std::vector<std::pair<int, int>>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<char> row_used(u.rows, 0), col_used(u.cols, 0);
    for (const auto& [m, n] : pairs) {
      row_used[m] = 1;
      col_used[n] = 1;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto& [mi, ni] = pairs[i];
      // Move to an equal-weight free slot with a smaller index.
      for (int m2 = 0; m2 < mi; ++m2) {
        if (!row_used[m2] && u.at(m2, ni) == u.at(mi, ni) && u.at(m2, ni) > 0.0) {
          row_used[mi] = 0;
          row_used[m2] = 1;
          mi = m2;
          changed = true;
          break;
        }
      }
      for (int n2 = 0; n2 < ni; ++n2) {
        if (!col_used[n2] && u.at(mi, n2) == u.at(mi, ni) && u.at(mi, n2) > 0.0) {
          col_used[ni] = 0;
          col_used[n2] = 1;
          ni = n2;
          changed = true;
          break;
        }
      }
      // Two-pair exchanges that keep the exact total. Rows stay sorted, so
      // the set gets lexicographically smaller iff pair i's column shrinks.
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        auto& [mj, nj] = pairs[j];
        if (nj >= ni) continue;
        const double cur = u.at(mi, ni) + u.at(mj, nj);
        const double swapped = u.at(mi, nj) + u.at(mj, ni);
        if (cur == swapped && u.at(mi, nj) > 0.0 && u.at(mj, ni) > 0.0) {
          std::swap(ni, nj);
          changed = true;
        }
      }
    }
    std::sort(pairs.begin(), pairs.end());
  }
}

}  // namespace

Matching km_match(const WeightMatrix& w) {
  check_matrix(w);
  const int n = std::max(w.rows, w.cols);
  // Pad to square and negate: minimum cost == maximum weight.
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (int m = 0; m < w.rows; ++m)
    for (int c = 0; c < w.cols; ++c) cost[m][c] = -w.at(m, c);
  const std::vector<int> row_of_col = hungarian_min(cost);
  Matching match;
  for (int c = 0; c < w.cols; ++c) {
    const int m = row_of_col[c];
    if (m < 0 || m >= w.rows) continue;
    if (w.at(m, c) > 0.0) match.pairs.emplace_back(m, c);
  }
  canonicalize(w, match.pairs);
  match.total_weight = canonical_total(w, match.pairs);
  return match;
}

namespace {

struct BruteState {
  const WeightMatrix* u = nullptr;
  bool transposed = false;  // true: enumerate over columns
  std::vector<char> used;
  std::vector<std::pair<int, int>> current;
  std::vector<std::pair<int, int>> best;
  double current_total = 0.0;
  double best_total = -1.0;

  double entry(int small_ix, int large_ix) const {
    return transposed ? u->at(large_ix, small_ix) : u->at(small_ix, large_ix);
  }
  void push(int small_ix, int large_ix) {
    if (transposed)
      current.emplace_back(large_ix, small_ix);
    else
      current.emplace_back(small_ix, large_ix);
  }

  void consider_leaf() {
    if (current_total > best_total) {
      best_total = current_total;
      best = current;
      std::sort(best.begin(), best.end());
    } else if (current_total == best_total && best_total >= 0.0) {
      auto sorted = current;
      std::sort(sorted.begin(), sorted.end());
      if (sorted < best) best = sorted;
    }
  }

  void recurse(int small_ix, int small_count, int large_count) {
    if (small_ix == small_count) {
      consider_leaf();
      return;
    }
    // Option: leave this row/column unmatched.
    recurse(small_ix + 1, small_count, large_count);
    for (int j = 0; j < large_count; ++j) {
      if (used[j]) continue;
      const double w = entry(small_ix, j);
      if (!(w > 0.0)) continue;
      used[j] = 1;
      push(small_ix, j);
      current_total += w;
      recurse(small_ix + 1, small_count, large_count);
      current_total -= w;
      current.pop_back();
      used[j] = 0;
    }
  }
};

}  // namespace

Matching brute_force_match(const WeightMatrix& w) {
  check_matrix(w);
  if (std::min(w.rows, w.cols) > 8)
    throw ArgumentError("brute_force_match: min(M, N) must be <= 8");
  BruteState st;
  st.u = &w;
  st.transposed = w.cols < w.rows;
  const int small_count = st.transposed ? w.cols : w.rows;
  const int large_count = st.transposed ? w.rows : w.cols;
  st.used.assign(large_count, 0);
  st.best_total = -1.0;
  st.recurse(0, small_count, large_count);
  Matching match;
  match.pairs = std::move(st.best);
  canonicalize(w, match.pairs);
  match.total_weight = canonical_total(w, match.pairs);
  return match;
}

double system_wsee(const WeightMatrix& u, const Matching& match) {
  std::vector<char> row_used(u.rows, 0), col_used(u.cols, 0);
  auto pairs = match.pairs;
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [m, n] : pairs) {
    if (m < 0 || m >= u.rows || n < 0 || n >= u.cols)
      throw ArgumentError("system_wsee: pair index out of range");
    if (row_used[m] || col_used[n]) throw ArgumentError("system_wsee: matching is not one-to-one");
    row_used[m] = 1;
    col_used[n] = 1;
  }
  return canonical_total(u, pairs);
}

void write_weight_matrix_csv(std::ostream& os, const WeightMatrix& u) {
  for (int m = 0; m < u.rows; ++m) {
    for (int n = 0; n < u.cols; ++n) {
      if (n) os << ',';
      os << csv::format_double(u.at(m, n));
    }
    os << '\n';
  }
}

WeightMatrix read_weight_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ArgumentError("weight matrix csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError("weight matrix csv: empty input");
  WeightMatrix u(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int m = 0; m < u.rows; ++m)
    for (int n = 0; n < u.cols; ++n) u.at(m, n) = rows[m][n];
  check_matrix(u);
  return u;
}

}  // namespace coopd2d
