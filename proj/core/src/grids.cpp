#include "isaacs/grids.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace isaacs {

TimeGrid::TimeGrid(double t0_, double T_, int n_steps_) : t0(t0_), T(T_), n_steps(n_steps_) {
  if (!(t0 < T))
    throw ConfigError("time grid requires t0 < T (got t0=" + std::to_string(t0) +
                      ", T=" + std::to_string(T) + ")");
  if (n_steps < 1) throw ConfigError("time grid requires at least one step");
}

TimeGrid TimeGrid::window(int first, int last) const {
  if (first < 0 || last > n_steps || first >= last)
    throw ConfigError("invalid time window [" + std::to_string(first) + ", " +
                      std::to_string(last) + "]");
  TimeGrid w;
  w.t0 = time(first);
  w.T = time(last);
  w.n_steps = last - first;
  return w;
}

SpaceGrid::SpaceGrid(double x_min_, double x_max_, int n_nodes_)
    : x_min(x_min_), x_max(x_max_), n_nodes(n_nodes_) {
  if (!(x_min < x_max))
    throw ConfigError("space grid requires x_min < x_max (got x_min=" + std::to_string(x_min) +
                      ", x_max=" + std::to_string(x_max) + ")");
  if (n_nodes < 3) throw ConfigError("space grid requires at least 3 nodes");
}

int SpaceGrid::nearest(double x) const {
  double j = std::round((x - x_min) / dx());
  return static_cast<int>(std::clamp(j, 0.0, static_cast<double>(n_nodes - 1)));
}

GridSplit split_position(const SpaceGrid& grid, double x) {
  GridSplit s;
  if (x <= grid.x_min) {
    s.lo = 0;
    s.frac = 0;
    s.clamped = x < grid.x_min;
    return s;
  }
  if (x >= grid.x_max) {
    s.lo = grid.n_nodes - 2;
    s.frac = 1;
    s.clamped = x > grid.x_max;
    return s;
  }
  double pos = (x - grid.x_min) / grid.dx();
  s.lo = std::min(static_cast<int>(pos), grid.n_nodes - 2);
  s.frac = pos - s.lo;
  return s;
}

double interpolate(const SpaceGrid& grid, const std::vector<double>& values, double x) {
  GridSplit s = split_position(grid, x);
  return values[s.lo] * (1.0 - s.frac) + values[s.lo + 1] * s.frac;
}

}  // namespace isaacs
