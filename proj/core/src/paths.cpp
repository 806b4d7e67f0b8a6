#include "isaacs/paths.hpp"

#include <cmath>

#include "isaacs/rng.hpp"

namespace isaacs {

namespace {
// Purpose tags keep the Brownian and Poisson substreams disjoint.
constexpr std::uint64_t kPurposeBrownian = 0xb1;
constexpr std::uint64_t kPurposeJumps = 0x90;
}  // namespace

PathBundle sample_paths(const TimeGrid& grid, const LevyModel& levy, int n_paths,
                        std::uint64_t seed) {
  if (n_paths < 1) throw ConfigError("path sampling requires n_paths >= 1");

  PathBundle b;
  b.n_paths = n_paths;
  b.n_steps = grid.n_steps;
  b.n_atoms = levy.n_atoms();
  b.seed = seed;
  b.brownian.resize(static_cast<std::size_t>(n_paths) * grid.n_steps);
  b.jumps.resize(static_cast<std::size_t>(n_paths) * grid.n_steps * levy.n_atoms());

  const double sqrt_dt = std::sqrt(grid.dt());
  for (int p = 0; p < n_paths; ++p) {
    for (int s = 0; s < grid.n_steps; ++s) {
      const auto stream = rng::stream_id(kPurposeBrownian, p, s);
      b.brownian[static_cast<std::size_t>(p) * grid.n_steps + s] =
          sqrt_dt * rng::normal(seed, stream, 0);
      for (int a = 0; a < levy.n_atoms(); ++a) {
        const auto jstream = rng::stream_id(kPurposeJumps, p, s, a);
        b.jumps[(static_cast<std::size_t>(p) * grid.n_steps + s) * levy.n_atoms() + a] =
            rng::poisson(levy.intensities[a] * grid.dt(), seed, jstream);
      }
    }
  }
  return b;
}

}  // namespace isaacs
