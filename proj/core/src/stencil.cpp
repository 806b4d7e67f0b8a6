#include "isaacs/stencil.hpp"

#include <cmath>
#include <string>

namespace isaacs {

double SliceStencil::expectation(int node, const std::vector<double>& next) const {
  const NodeStencil& ns = local[node];
  double acc = 0;
  for (int i = 0; i < ns.n_local; ++i) acc += ns.weight[i] * next[ns.node[i]];
  for (int a = 0; a < n_atoms; ++a) {
    const JumpSplit& js = jump_at(node, a);
    acc += js.weight * ((1.0 - js.frac) * next[js.lo] + js.frac * next[js.lo + 1]);
  }
  return acc;
}

double cfl_dt_bound(const SpaceGrid& space, const LevyModel& levy, double max_vol,
                    double max_compensated_drift, double safety) {
  const double dx = space.dx();
  const double rate =
      max_vol * max_vol / (dx * dx) + std::fabs(max_compensated_drift) / dx +
      levy.total_intensity;
  if (rate <= 0) return 1e18;
  return safety / rate;
}

namespace {

// Distributes the local trinomial around node j; every branch is in range
// by construction, edge nodes with an escaping branch are frozen before
// this runs.
void place_local(const SpaceGrid& space, NodeStencil& ns, int j, double w_minus, double w_center,
                 double w_plus) {
  const double dx = space.dx();
  ns.n_local = 0;
  ns.local_mean = 0;
  auto emit = [&](int node, double w) {
    if (w == 0) return;
    ns.node[ns.n_local] = node;
    ns.weight[ns.n_local] = w;
    ns.local_mean += w * (node - j) * dx;
    ++ns.n_local;
  };
  emit(j - 1, w_minus);
  emit(j, w_center);
  emit(j + 1, w_plus);
}

}  // namespace

SliceStencil build_slice_stencil(const SpaceGrid& space, const LevyModel& levy, double dt,
                                 const std::vector<double>& drift, const std::vector<double>& vol,
                                 const std::vector<double>& shifts) {
  const int n = space.n_nodes;
  const int na = levy.n_atoms();
  const double dx = space.dx();
  const double jump_mass = levy.total_intensity * dt;

  if (jump_mass >= 1.0)
    throw SolverError("step too large for jump intensity: total_intensity*dt = " +
                      std::to_string(jump_mass) + " >= 1; reduce dt below " +
                      std::to_string(1.0 / levy.total_intensity));

  SliceStencil s;
  s.n_nodes = n;
  s.n_atoms = na;
  s.dt = dt;
  s.local.resize(n);
  s.jump.resize(static_cast<std::size_t>(n) * na);

  const double M = 1.0 - jump_mass;

  for (int j = 0; j < n; ++j) {
    // Compensated local mean: atom masses carry lambda_i*dt*shift_i of the
    // first moment, the local part carries the rest so the total is
    // drift*dt exactly.
    double jump_mean = 0;
    for (int a = 0; a < na; ++a) jump_mean += levy.intensities[a] * dt * shifts[j * na + a];
    const double m = drift[j] * dt - jump_mean;
    const double s2 = vol[j] * vol[j] * dt;

    NodeStencil& ns = s.local[j];
    ns.vol = vol[j];
    ns.target_mean = m;
    ns.local_mass = M;

    const double q = (s2 + m * m) / (dx * dx);
    const double a_ = m / dx;

    double w_minus, w_center, w_plus;
    if (q >= std::fabs(a_) && q <= M) {
      w_plus = 0.5 * (q + a_);
      w_minus = 0.5 * (q - a_);
      w_center = M - q;
      ns.moment_exact = true;
    } else {
      const double half = 0.5 * s2 / (dx * dx);
      w_plus = half + std::fmax(a_, 0.0);
      w_minus = half + std::fmax(-a_, 0.0);
      w_center = M - w_plus - w_minus;
      ns.moment_exact = false;
      if (w_center < -1e-15) {
        const double suggested =
            0.9 / (vol[j] * vol[j] / (dx * dx) + std::fabs(m / dt) / dx + levy.total_intensity);
        throw SolverError("stability bound violated at node " + std::to_string(j) +
                          " (x = " + std::to_string(space.node(j)) + "): vol = " +
                          std::to_string(vol[j]) + ", drift = " + std::to_string(drift[j]) +
                          ", dt = " + std::to_string(dt) + "; reduce dt to about " +
                          std::to_string(suggested));
      }
      if (w_center < 0) w_center = 0;
    }

    // Frozen-edge closure: a branch pointing off the grid collapses the
    // whole local part onto the node itself, the same boundary treatment
    // the finite-difference scheme applies, so both solution paths carry
    // one and the same boundary layer.  The escaping weight is recorded
    // as leakage.
    const bool escapes = (j == 0 && w_minus > 0) || (j == n - 1 && w_plus > 0);
    if (escapes) {
      s.leakage += j == 0 ? w_minus : w_plus;
      ns.n_local = 1;
      ns.node[0] = j;
      ns.weight[0] = M;
      ns.local_mean = 0;
      ns.moment_exact = false;
    } else {
      place_local(space, ns, j, w_minus, w_center, w_plus);
    }

    for (int a = 0; a < na; ++a) {
      JumpSplit& js = s.jump[static_cast<std::size_t>(j) * na + a];
      js.weight = levy.intensities[a] * dt;
      js.shift = shifts[j * na + a];
      GridSplit g = split_position(space, space.node(j) + js.shift);
      js.lo = g.lo;
      js.frac = g.frac;
      js.clamped = g.clamped;
      if (g.clamped) s.leakage += js.weight;
    }
  }
  return s;
}

std::vector<double> dense_row(const SpaceGrid& space, const SliceStencil& s, int node) {
  std::vector<double> row(space.n_nodes, 0.0);
  const NodeStencil& ns = s.local[node];
  for (int i = 0; i < ns.n_local; ++i) row[ns.node[i]] += ns.weight[i];
  for (int a = 0; a < s.n_atoms; ++a) {
    const JumpSplit& js = s.jump_at(node, a);
    row[js.lo] += js.weight * (1.0 - js.frac);
    row[js.lo + 1] += js.weight * js.frac;
  }
  return row;
}

}  // namespace isaacs
