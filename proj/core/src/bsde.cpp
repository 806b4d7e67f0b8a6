#include "isaacs/bsde.hpp"

#include <cmath>
#include <string>

namespace isaacs {

std::vector<double> BackwardSolution::slice_y(int slice) const {
  auto first = Y.begin() + static_cast<std::ptrdiff_t>(idx(slice, 0));
  return std::vector<double>(first, first + space.n_nodes);
}

BackwardSolution solve_bsde(const TimeGrid& time, const SpaceGrid& space, const LevyModel& levy,
                            const std::vector<double>& terminal, const Driver& driver,
                            const StencilProvider& stencils) {
  if (static_cast<int>(terminal.size()) != space.n_nodes)
    throw ConfigError("terminal data size does not match the space grid");

  const int n = space.n_nodes;
  const int na = levy.n_atoms();
  const double dt = time.dt();
  const double dx = space.dx();

  BackwardSolution sol;
  sol.time = time;
  sol.space = space;
  sol.n_atoms = na;
  sol.Y.assign(static_cast<std::size_t>(time.n_slices()) * n, 0.0);
  sol.Z.assign(sol.Y.size(), 0.0);
  sol.K.assign(sol.Y.size() * std::max(na, 1), 0.0);
  if (na == 0) sol.K.clear();

  // Terminal slice is the supplied data verbatim.
  for (int j = 0; j < n; ++j) sol.Y[sol.idx(time.n_steps, j)] = terminal[j];

  std::vector<double> next(terminal);

  for (int k = time.n_steps - 1; k >= 0; --k) {
    const SliceStencil& st = stencils(k);
    sol.leakage += st.leakage;

    for (int j = 0; j < n; ++j) {
      const NodeStencil& ns = st.local[j];
      const double yhat = st.expectation(j, next);

      // Martingale integrand. On moment-exact stencils the first-moment
      // regression against the local offset is exact for affine data; on
      // upwind stencils the numerical diffusion |m|*dx would swamp a small
      // vol^2*dt, so the slope form vol * DY is used instead.
      // A frozen edge node realises no local increment, so its martingale
      // integrand vanishes with the quadratic variation.
      const bool frozen = ns.n_local == 1 && ns.node[0] == j;
      double z = 0;
      if (ns.vol != 0.0 && !frozen) {
        if (ns.moment_exact) {
          const double mean = ns.local_mean / ns.local_mass;
          double acc = 0;
          for (int i = 0; i < ns.n_local; ++i)
            acc += ns.weight[i] * next[ns.node[i]] * ((ns.node[i] - j) * dx - mean);
          z = acc / (ns.vol * dt);
        } else {
          double slope;
          if (j == 0)
            slope = (next[1] - next[0]) / dx;
          else if (j == n - 1)
            slope = (next[n - 1] - next[n - 2]) / dx;
          else
            slope = (next[j + 1] - next[j - 1]) / (2 * dx);
          z = ns.vol * slope;
        }
      }

      // Jump differences and their weighted pairing.
      double kbar = 0;
      for (int a = 0; a < na; ++a) {
        const JumpSplit& js = st.jump_at(j, a);
        const double shifted = (1.0 - js.frac) * next[js.lo] + js.frac * next[js.lo + 1];
        const double kv = shifted - yhat;
        sol.K[sol.idx(k, j) * na + a] = kv;
        kbar += kv * levy.l_values[a] * levy.intensities[a];
      }

      // Implicit step in y only.
      double y = yhat;
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const double y_new = yhat + dt * driver(k, j, y, z, kbar);
        if (std::fabs(y_new - y) <= 1e-12) {
          y = y_new;
          converged = true;
          break;
        }
        y = y_new;
      }
      if (!converged)
        throw SolverError("backward step fixed point failed to converge at slice " +
                          std::to_string(k) + ", node " + std::to_string(j) +
                          " (driver too stiff for dt = " + std::to_string(dt) + ")");

      sol.Y[sol.idx(k, j)] = y;
      sol.Z[sol.idx(k, j)] = z;
    }

    for (int j = 0; j < n; ++j) next[j] = sol.Y[sol.idx(k, j)];
  }
  return sol;
}

Comparison compare_bsde(const BackwardSolution& a, const BackwardSolution& b) {
  if (a.Y.size() != b.Y.size())
    throw ConfigError("comparing backward solutions on different grids");
  Comparison c;
  c.worst_margin = 1e300;
  for (std::size_t i = 0; i < a.Y.size(); ++i)
    c.worst_margin = std::fmin(c.worst_margin, a.Y[i] - b.Y[i]);
  c.holds = c.worst_margin >= -1e-10;
  return c;
}

StabilityGap stability_gap(const BackwardSolution& a, const BackwardSolution& b,
                           const LevyModel& levy,
                           const std::function<double(int, int)>& driver_diff_at_b,
                           double driver_lip) {
  if (a.Y.size() != b.Y.size() || a.n_atoms != b.n_atoms)
    throw ConfigError("stability gap requires a shared grid");

  const double C = driver_lip;
  StabilityGap g;
  g.beta = 2.0 + 2.0 * C + 4.0 * C * C;

  const int n = a.space.n_nodes;
  const int na = a.n_atoms;
  const double dt = a.time.dt();

  auto avg_sq = [&](const std::vector<double>& pa, const std::vector<double>& pb, int slice) {
    double acc = 0;
    for (int j = 0; j < n; ++j) {
      const std::size_t i = static_cast<std::size_t>(slice) * n + j;
      const double d = pa[i] - pb[i];
      acc += d * d;
    }
    return acc / n;
  };

  // Grid averages stand in for the expectations; weights are taken
  // relative to the evaluation time t0 (slice 0).
  double integrals = 0;
  double source = 0;
  for (int k = 0; k < a.time.n_steps; ++k) {
    const double w = std::exp(g.beta * (a.time.time(k) - a.time.t0));
    double kgap = 0;
    double fgap = 0;
    for (int j = 0; j < n; ++j) {
      for (int at = 0; at < na; ++at) {
        const double d = a.K[a.idx(k, j) * na + at] - b.K[b.idx(k, j) * na + at];
        kgap += levy.intensities[at] * d * d;
      }
      const double df = driver_diff_at_b(k, j);
      fgap += df * df;
    }
    integrals += dt * w * (avg_sq(a.Y, b.Y, k) + avg_sq(a.Z, b.Z, k) + kgap / n);
    source += dt * w * fgap / n;
  }

  g.lhs = avg_sq(a.Y, b.Y, 0) + 0.5 * integrals;
  g.rhs = std::exp(g.beta * (a.time.T - a.time.t0)) * avg_sq(a.Y, b.Y, a.time.n_steps) + source;
  g.satisfied = g.lhs <= g.rhs * (1.0 + 1e-6);
  return g;
}

}  // namespace isaacs
