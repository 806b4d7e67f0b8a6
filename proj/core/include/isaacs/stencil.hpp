#pragma once

#include <array>
#include <vector>

#include "isaacs/grids.hpp"
#include "isaacs/levy.hpp"

namespace isaacs {

/// Interpolation split of one jump displacement. The atom's mass
/// lambda_i*dt lands on nodes lo and lo+1 with fractions (1-frac, frac),
/// preserving mass exactly and the first moment whenever no clamping at
/// the boundary occurred.
struct JumpSplit {
  int lo = 0;
  double frac = 0;
  double weight = 0;  // lambda_i * dt
  double shift = 0;   // displacement used (h at this atom)
  bool clamped = false;
};

/// Local (drift + diffusion) part of a one-step transition at one node:
/// at most three neighbouring nodes carrying absolute masses that sum to
/// 1 - total_intensity*dt.
///
/// Construction: with m = (drift - sum_i lambda_i*shift_i)*dt the
/// compensated local mean, the moment-exact form places
///   w_{j+-1} = (q +- m/dx)/2,  q = (vol^2*dt + m^2)/dx^2
/// which matches mass, first moment drift*dt (jointly with the atom
/// masses) and raw second moment vol^2*dt + m^2 exactly. When q < |m|/dx
/// (drift-dominated or degenerate diffusion) the upwind form is used
/// instead: first moment still exact, second moment inflated by |m|*dx.
/// Either way all weights are nonnegative, so the chain is a bona fide
/// Markov transition.
struct NodeStencil {
  int n_local = 0;
  std::array<int, 3> node{};
  std::array<double, 3> weight{};
  double local_mass = 1;   // sum of local weights
  double local_mean = 0;   // sum w*(x_node - x_j) actually realised
  double target_mean = 0;  // compensated drift * dt the construction aimed for
  double vol = 0;          // diffusion coefficient (for martingale regression)
  bool moment_exact = true;  // moment-exact trinomial vs upwind fallback
};

/// One-step transition for every node of a slice, jumps included.
struct SliceStencil {
  int n_nodes = 0;
  int n_atoms = 0;
  double dt = 0;
  std::vector<NodeStencil> local;  // [node]
  std::vector<JumpSplit> jump;     // [node * n_atoms + atom]
  double leakage = 0;              // total mass clamped at the boundary

  const JumpSplit& jump_at(int node, int atom) const { return jump[node * n_atoms + atom]; }

  /// Conditional expectation of next-slice nodal values seen from `node`.
  double expectation(int node, const std::vector<double>& next) const;
};

/// Largest dt admissible for the explicit chain at the given extremes,
/// with a safety factor already applied.
double cfl_dt_bound(const SpaceGrid& space, const LevyModel& levy, double max_vol,
                    double max_compensated_drift, double safety = 1.0);

/// Builds the transition for one slice. drift[j] and vol[j] give the local
/// coefficients at node j; shifts[j*n_atoms+i] gives the jump displacement
/// of atom i at node j (pass the atom sizes themselves for pure size
/// jumps). Raises SolverError with a suggested dt when the step violates
/// the stability bound.
SliceStencil build_slice_stencil(const SpaceGrid& space, const LevyModel& levy, double dt,
                                 const std::vector<double>& drift, const std::vector<double>& vol,
                                 const std::vector<double>& shifts);

/// Dense transition row of `s` for one node (length n_nodes, sums to 1).
std::vector<double> dense_row(const SpaceGrid& space, const SliceStencil& s, int node);

}  // namespace isaacs
