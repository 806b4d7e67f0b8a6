#pragma once

#include <cstddef>
#include <vector>

#include "isaacs/errors.hpp"

namespace isaacs {

/// Uniform partition of [t0, T] into n_steps steps; slice k sits at t0 + k*dt.
struct TimeGrid {
  double t0 = 0;
  double T = 1;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0_, double T_, int n_steps_);

  double dt() const { return (T - t0) / n_steps; }
  double time(int slice) const { return t0 + dt() * slice; }
  int n_slices() const { return n_steps + 1; }

  /// Sub-grid covering slices [first, last] of this grid.
  TimeGrid window(int first, int last) const;
};

/// Uniform node layout on [x_min, x_max]; node j sits at x_min + j*dx.
struct SpaceGrid {
  double x_min = -1;
  double x_max = 1;
  int n_nodes = 3;

  SpaceGrid() = default;
  SpaceGrid(double x_min_, double x_max_, int n_nodes_);

  double dx() const { return (x_max - x_min) / (n_nodes - 1); }
  double node(int j) const { return x_min + dx() * j; }

  /// Nearest node index to position x (clamped to the grid).
  int nearest(double x) const;
};

/// Two-point split of a position onto bracketing nodes: value lands at
/// nodes lo and lo+1 with weights (1-frac, frac). Positions outside the
/// grid clamp to the end node; `clamped` then reports by how much mass
/// would have left the grid (the full weight of the split).
struct GridSplit {
  int lo = 0;
  double frac = 0;
  bool clamped = false;
};

GridSplit split_position(const SpaceGrid& grid, double x);

/// Clamped linear interpolation of nodal values at position x.
double interpolate(const SpaceGrid& grid, const std::vector<double>& values, double x);

}  // namespace isaacs
