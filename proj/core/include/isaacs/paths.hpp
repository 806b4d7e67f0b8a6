#pragma once

#include <cstdint>
#include <vector>

#include "isaacs/grids.hpp"
#include "isaacs/levy.hpp"

namespace isaacs {

/// Simulated driving noise: Brownian increments and per-atom Poisson jump
/// counts for every (path, step). Layout is path-major, then step, then atom.
/// Regeneration from (seed, grids) is bit-identical.
struct PathBundle {
  int n_paths = 0;
  int n_steps = 0;
  int n_atoms = 0;
  std::uint64_t seed = 0;
  std::vector<double> brownian;  // [path * n_steps + step]
  std::vector<int> jumps;        // [(path * n_steps + step) * n_atoms + atom]

  double dB(int path, int step) const { return brownian[path * n_steps + step]; }
  int jump_count(int path, int step, int atom) const {
    return jumps[(path * n_steps + step) * n_atoms + atom];
  }
};

/// Draws Brownian increments ~ N(0, dt) and jump counts ~ Poisson(lambda_i*dt)
/// for n_paths paths over the time grid. Deterministic in (seed, grids);
/// every (path, step[, atom]) coordinate owns a dedicated substream.
PathBundle sample_paths(const TimeGrid& grid, const LevyModel& levy, int n_paths,
                        std::uint64_t seed);

}  // namespace isaacs
