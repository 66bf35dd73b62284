#include "coopd2d/topology.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "coopd2d/csv.hpp"
#include "coopd2d/rng.hpp"

namespace coopd2d {

namespace {

Point sample_disk_point(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform01());
  const double phi = 2.0 * std::numbers::pi * rng.uniform01();
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace

CellScenario sample_scenario(int m_links, int n_links, double radius, double pl_exponent,
                             std::uint64_t seed, double d2d_max_pair_distance) {
  if (m_links < 1) throw ArgumentError("sample_scenario: m_links must be >= 1");
  if (n_links < 1) throw ArgumentError("sample_scenario: n_links must be >= 1");
  if (!(radius > 0.0)) throw ArgumentError("sample_scenario: radius must be > 0");
  if (!(pl_exponent > 0.0)) throw ArgumentError("sample_scenario: pl_exponent must be > 0");

  Rng rng(derive_seed(seed, {seed_tag::scenario}));
  CellScenario s;
  s.radius = radius;
  s.pl_exponent = pl_exponent;
  s.cu_positions.reserve(m_links);
  s.dt_positions.reserve(n_links);
  s.dr_positions.reserve(n_links);
  for (int i = 0; i < m_links; ++i) s.cu_positions.push_back(sample_disk_point(rng, radius));
  for (int i = 0; i < n_links; ++i) s.dt_positions.push_back(sample_disk_point(rng, radius));
  for (int i = 0; i < n_links; ++i) {
    Point p = sample_disk_point(rng, radius);
    if (d2d_max_pair_distance > 0.0) {
      while (distance(p, s.dt_positions[i]) > d2d_max_pair_distance)
        p = sample_disk_point(rng, radius);
    }
    s.dr_positions.push_back(p);
  }
  return s;
}

CellScenario fixed_line_scenario(double d_cu_bs, double d_dt_bs, double d_dt_dr, double d_cu_dt,
                                 double pl_exponent) {
  if (!(d_cu_bs > 0.0 && d_dt_bs > 0.0 && d_dt_dr > 0.0 && d_cu_dt > 0.0))
    throw ArgumentError("fixed_line_scenario: all distances must be > 0");
  const double lo = std::abs(d_cu_bs - d_dt_bs);
  const double hi = d_cu_bs + d_dt_bs;
  const double tol = 1e-9 * hi;
  if (d_cu_dt < lo - tol || d_cu_dt > hi + tol)
    throw GeometryError("fixed_line_scenario: triangle inequality violated for (d_cu_bs, d_dt_bs, d_cu_dt)");

  // CU on the intersection of circles |CU-BS| = d_cu_bs and |CU-DT| = d_cu_dt.
  const double x = (d_cu_bs * d_cu_bs + d_dt_bs * d_dt_bs - d_cu_dt * d_cu_dt) / (2.0 * d_dt_bs);
  const double y2 = d_cu_bs * d_cu_bs - x * x;
  const double y = y2 > 0.0 ? std::sqrt(y2) : 0.0;

  CellScenario s;
  s.pl_exponent = pl_exponent;
  s.cu_positions = {{x, y}};
  s.dt_positions = {{d_dt_bs, 0.0}};
  s.dr_positions = {{d_dt_bs, d_dt_dr}};
  s.radius = std::max({d_cu_bs, d_dt_bs, distance(s.dr_positions[0], s.bs_pos)});
  return s;
}

void write_scenario_csv(std::ostream& os, const CellScenario& s) {
  os << "kind,index,x_m,y_m\n";
  csv::write_row(os, "BS", 0, s.bs_pos.x, s.bs_pos.y);
  for (int i = 0; i < s.m_links(); ++i)
    csv::write_row(os, "CU", i, s.cu_positions[i].x, s.cu_positions[i].y);
  for (int i = 0; i < s.n_links(); ++i)
    csv::write_row(os, "DT", i, s.dt_positions[i].x, s.dt_positions[i].y);
  for (int i = 0; i < s.n_links(); ++i)
    csv::write_row(os, "DR", i, s.dr_positions[i].x, s.dr_positions[i].y);
}

CellScenario read_scenario_csv(std::istream& is) {
  CellScenario s;
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("scenario csv: empty input");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string kind, idx, xs, ys;
    if (!std::getline(ss, kind, ',') || !std::getline(ss, idx, ',') ||
        !std::getline(ss, xs, ',') || !std::getline(ss, ys))
      throw ArgumentError("scenario csv: malformed row: " + line);
    Point p{std::stod(xs), std::stod(ys)};
    if (kind == "BS")
      s.bs_pos = p;
    else if (kind == "CU")
      s.cu_positions.push_back(p);
    else if (kind == "DT")
      s.dt_positions.push_back(p);
    else if (kind == "DR")
      s.dr_positions.push_back(p);
    else
      throw ArgumentError("scenario csv: unknown node kind: " + kind);
    s.radius = std::max(s.radius, distance(p, Point{0.0, 0.0}));
  }
  if (s.dt_positions.size() != s.dr_positions.size())
    throw ArgumentError("scenario csv: DT/DR counts differ");
  if (s.cu_positions.empty() || s.dt_positions.empty())
    throw ArgumentError("scenario csv: scenario needs at least one CU and one D2D pair");
  return s;
}

}  // namespace coopd2d
