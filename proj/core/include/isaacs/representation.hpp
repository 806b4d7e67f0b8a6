#pragma once

#include <span>
#include <string>

#include "isaacs/expr.hpp"

namespace isaacs {

/// Point data for one scalar fixed-point equation
///   z = xi + p * sigma(s, x, y, z, u, v).
/// p must be nonnegative whenever sigma actually depends on z (the
/// monotone regime in which the root is unique).
struct AlgebraicQuery {
  double s = 0, x = 0, y = 0;
  double xi = 0;
  double p = 0;
  double u = 0, v = 0;
};

struct AlgebraicResult {
  double z = 0;
  double residual = 0;  // z - xi - p*sigma(..., z, ...)
  int iterations = 0;
  std::string method;  // "direct", "fixed-point", or "bisection"
};

/// Solves the representation equation to |residual| <= 1e-12.
///
/// z-independent sigma short-circuits to one evaluation. Otherwise a
/// relaxed Picard iteration with damping 1/(1 + p*L_sigma) runs first
/// (L_sigma estimated locally when no hint is given), and a safeguarded
/// bisection on the strictly increasing map z -> z - xi - p*sigma(z)
/// finishes the job if Picard stalls. The initial bracket
/// [xi - p*M, xi + p*M] with M = 1 + local sigma bound is widened at most
/// 60 times; 200 total iterations are allowed before SolverError.
AlgebraicResult solve_representation(const Expression& sigma, const AlgebraicQuery& q,
                                     double lip_sigma_hint = -1.0);

/// Empirical constants over a batch of queries: growth measured as
/// max |z| / (1 + |x| + |y| + |xi|), and the Lipschitz slope of the root
/// in xi by finite differences.
struct RepresentationBounds {
  double growth = 0;
  double lip_xi = 0;
};

RepresentationBounds representation_bounds(const Expression& sigma,
                                           std::span<const AlgebraicQuery> queries,
                                           double lip_sigma_hint = -1.0);

}  // namespace isaacs
