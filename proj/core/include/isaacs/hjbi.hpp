#pragma once

#include <vector>

#include "isaacs/coefficients.hpp"
#include "isaacs/config.hpp"
#include "isaacs/game.hpp"

namespace isaacs {

/// PDE-side problem instance. Differs from GameProblem in what loading
/// demands: no dissipativity certificate, controls default to singletons.
struct PdeProblem {
  CoefficientSet cs;
  LevyModel levy;
  TimeGrid time{0, 1, 1};
  SpaceGrid space{-1, 1, 3};
  ControlGrid controls;
  FbsdeOptions options;
};

PdeProblem load_pde_problem(const ConfigDoc& doc);

/// Nonlocal terms at one node against a frozen slice.
///   B = sum_i [W(x + h(e_i)) - W(x) - p*h(e_i)] * lambda_i
///   C = sum_i [W(x + h(e_i)) - W(x)] * l(e_i) * lambda_i
/// Off-grid displacements interpolate linearly and clamp at the boundary.
struct NonlocalTerms {
  double B = 0;
  double C = 0;
};
NonlocalTerms evaluate_nonlocal(const std::vector<double>& slice_w, int node,
                                const CoefficientSet& cs, const LevyModel& levy,
                                const SpaceGrid& space, double t, double u, double v, double p);

/// Explicit monotone backward sweep for coefficient sets whose sigma and h
/// are free of (y, z, k). The drift and the jump compensator share one
/// upwinded first-difference term, keeping every stencil coefficient
/// nonnegative under the CFL bound (checked every slice). f receives the
/// z-argument DW*sigma and the nonlocal C term in its jump slot.
ValueField solve_hjbi_special(const PdeProblem& p, ValueKind kind);

/// Same sweep, but when sigma depends on z the z-argument at each
/// (node, control pair) solves z = p*sigma(..., z, ...) through the
/// representation solver, with p clamped to >= 0 (clamp events counted;
/// more than 20% of interior evaluations clamped aborts). For z-free sigma
/// the output is bit-identical to solve_hjbi_special.
ValueField solve_hjbi_general(const PdeProblem& p, ValueKind kind);

/// Scheme-consistency diagnostic: re-evaluates the forward time quotient
/// plus the optimized Hamiltonian on the field itself. Interior nodes only
/// (10% margin each side); boundary entries and the terminal slice are 0.
std::vector<double> viscosity_residual(const ValueField& field, const PdeProblem& p,
                                       ValueKind kind);

/// Interior node margin used by the residual and the acceptance checks.
int interior_margin(int n_nodes);

}  // namespace isaacs
