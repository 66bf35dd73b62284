#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace coopd2d {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument to an operation (precondition violation).
struct ArgumentError : Error {
  using Error::Error;
};

/// Geometrically impossible construction request.
struct GeometryError : Error {
  using Error::Error;
};

/// Bad configuration value; message carries the field path.
struct ConfigError : Error {
  using Error::Error;
};

/// Training diverged or produced non-finite values.
struct TrainingError : Error {
  using Error::Error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double lin_to_db(double x) { return 10.0 * std::log10(x); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace coopd2d
