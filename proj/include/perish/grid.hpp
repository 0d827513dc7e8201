#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace perish {

// Inventory quantities live on a uniform grid. Index arithmetic is exact;
// conversions validate instead of silently snapping.

inline bool on_grid(double value, double step, double tol = 1e-6) {
  const double ratio = value / step;
  return std::fabs(ratio - static_cast<double>(std::llround(ratio))) <= tol;
}

inline long long grid_index_checked(double value, double step, const char* what) {
  if (value < 0.0)
    throw std::invalid_argument(std::string(what) + " must be nonnegative, got " +
                                std::to_string(value));
  if (!on_grid(value, step))
    throw std::invalid_argument(std::string(what) + " value " + std::to_string(value) +
                                " is off the grid with step " + std::to_string(step));
  return std::llround(value / step);
}

// Nearest grid index at or below value (used for policy lookups on
// full-precision simulator states).
inline long long grid_floor_index(double value, double step) {
  const long long idx = static_cast<long long>(std::floor(value / step + 1e-9));
  return idx < 0 ? 0 : idx;
}

inline double grid_value(long long index, double step) {
  return static_cast<double>(index) * step;
}

inline double grid_ceil_value(double value, double step) {
  long long idx = static_cast<long long>(std::ceil(value / step - 1e-9));
  if (idx < 0) idx = 0;
  return grid_value(idx, step);
}

}  // namespace perish
