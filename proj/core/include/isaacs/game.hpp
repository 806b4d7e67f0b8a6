#pragma once

#include <vector>

#include "isaacs/coefficients.hpp"
#include "isaacs/config.hpp"
#include "isaacs/fbsde.hpp"
#include "isaacs/grids.hpp"
#include "isaacs/levy.hpp"

namespace isaacs {

/// Which optimization order a value field realizes.
enum class ValueKind { Lower, Upper };

/// Value function on the full time-space grid, produced by backward
/// induction. Slice-major storage; slice 0 is t0, the last slice is the
/// terminal condition evaluated exactly on the grid.
struct ValueField {
  ValueKind kind = ValueKind::Lower;
  TimeGrid time{0, 1, 1};
  SpaceGrid space{-1, 1, 3};
  std::vector<double> values;  ///< [slice * n_nodes + node]
  std::vector<int> argmax_u;   ///< maximizing U index per decision (slice, node)
  std::vector<int> argmin_v;   ///< minimizing V index per decision (slice, node)

  double at(int slice, int node) const {
    return values[static_cast<std::size_t>(slice) * space.n_nodes + node];
  }
  std::vector<double> slice(int s) const {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(s) * space.n_nodes;
    return std::vector<double>(first, first + space.n_nodes);
  }
};

/// One fully validated game instance: dynamics, payoff, control grids,
/// options, and the dissipativity certificate obtained while loading.
struct GameProblem {
  CoefficientSet cs;
  LevyModel levy;
  TimeGrid time{0, 1, 1};
  SpaceGrid space{-1, 1, 3};
  ControlGrid controls;
  FbsdeOptions options;
  MonotonicityCert cert;
  double value_lip = 1.0;      ///< declared Lipschitz bound for the value in x
  double isaacs_factor = 4.0;  ///< scheme tolerance for "the game has a value", in dt units
};

TimeGrid load_time_grid(const ConfigDoc& doc);
SpaceGrid load_space_grid(const ConfigDoc& doc);
FbsdeOptions load_solver_options(const ConfigDoc& doc);
ControlGrid load_controls(const ConfigDoc& doc);

/// Parses every section, runs the dissipativity check over the declared
/// probe box, and refuses (ConfigError) any instance whose certificate does
/// not verify.
GameProblem load_problem(const ConfigDoc& doc);

/// Backward induction from an explicit terminal slice. Each step evaluates
/// the one-step backward flow for every control pair and takes, per node,
/// max over U of min over V (Lower) or min over V of max over U (Upper).
/// Ties resolve to the first index in the declared control list.
ValueField solve_value(const GameProblem& p, ValueKind kind, std::vector<double> terminal);

/// solve_value from the terminal payoff phi evaluated on the grid.
ValueField lower_value(const GameProblem& p);
ValueField upper_value(const GameProblem& p);

/// Gap at the initial slice between a direct solve and a two-stage solve
/// chained through `split_slice`.
struct DppReport {
  int split_slice = 0;
  double sup_gap = 0;
};
DppReport dpp_consistency(const GameProblem& p, int split_slice);

/// Pointwise distance between upper and lower values; the game has a value
/// when the distance stays within the scheme tolerance.
struct IsaacsReport {
  double max_gap = 0;            ///< over every slice and node
  double tolerance = 0;          ///< isaacs_factor * dt
  bool value_exists = false;
  std::vector<double> gap_field;  ///< upper - lower at slice 0
};
IsaacsReport isaacs_gap(const GameProblem& p, const ValueField& lower, const ValueField& upper);

}  // namespace isaacs
