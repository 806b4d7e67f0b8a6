#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "isaacs/config.hpp"
#include "isaacs/expr.hpp"
#include "isaacs/levy.hpp"

namespace isaacs {

/// The model's scalar coefficient functions with their admissible slots:
///   b, sigma  : (t,x,y,z,u,v)     forward drift / diffusion
///   h         : (t,x,y,z,u,v,e)   jump amplitude
///   f         : (t,x,y,z,k,u,v)   backward driver (k is the nonlocal pairing)
///   phi       : (x)               terminal condition
///   l         : (e)               nonlocal weight
struct CoefficientSet {
  Expression b, sigma, h, f, phi, l;

  /// Recorded Lipschitz bounds ("b", "sigma", "h", "f", "phi") used by
  /// a-priori estimates; empty when the config does not state them.
  std::map<std::string, double> lip_constants;

  /// C in the jump envelope |h| <= C*min(1,|e|)*(1+|x|+|y|).
  double rho_bound = 1.0;
};

/// Reads [model] (and the weight from [levy]) out of a parsed config.
/// Slot violations and malformed expressions raise ConfigError with
/// line/column positions.
CoefficientSet parse_coefficients(const ConfigDoc& doc);

/// Probe box for sampling-based checks.
struct ProbeBox {
  double state_radius = 5.0;    // x,y,z,k sampled uniformly in [-r, r]
  double t0 = 0.0, t1 = 1.0;    // time slot
  std::vector<double> u_values = {-1.0, 1.0};
  std::vector<double> v_values = {-1.0, 1.0};
};

/// Empirical Lipschitz / growth certificate for the regularity assumptions.
struct H22Report {
  struct PerCoefficient {
    double growth = 0;              // sup |c| / (1 + sum of referenced state slots)
    std::map<Var, double> lip;      // directional slope per referenced state slot
    double lip_overall = 0;         // max over slots
  };
  std::map<std::string, PerCoefficient> coefficients;
  int probes = 0;
  double cap = 0;
  bool pass = false;
};

/// Samples `probes` points (>= 100 enforced) and reports empirical
/// Lipschitz ratios per state slot and growth ratios per coefficient.
/// `pass` holds iff every ratio is finite and at most `cap`.
H22Report check_h22(const CoefficientSet& cs, const LevyModel& levy, int probes,
                    std::uint64_t seed, const ProbeBox& box = {}, double cap = 10.0);

/// Monotonicity certificate for the coupled system. G is a nonzero scalar;
/// the betas and mu are nonnegative with beta1+beta2 > 0, beta1+beta3 > 0,
/// beta2+mu1 > 0, beta3+mu1 > 0. `verified` holds iff the sampled
/// inequalities violate by at most 1e-10.
struct MonotonicityCert {
  double G = 1.0;
  double beta1 = 0, beta2 = 0, beta3 = 0, mu1 = 0;
  bool verified = false;
  double worst_violation = 0;
  int probes = 0;
};

/// Reads G/beta/mu parameters from [monotonicity]; raises ConfigError when
/// the structural constraints on the parameters fail. The `verified` and
/// `worst_violation` fields are left for check_h23 to fill.
MonotonicityCert monotonicity_params(const ConfigDoc& doc);

/// Samples probe pairs and all control pairs, evaluating both coupling
/// inequalities: the dissipativity of (-G*g, G*b, G*sigma) against the
/// quadratic forms with beta1..beta3 (jump term included) and the terminal
/// monotonicity against mu1. Fills worst_violation and verified.
MonotonicityCert check_h23(const CoefficientSet& cs, const LevyModel& levy,
                           MonotonicityCert params, int probes, std::uint64_t seed,
                           const ProbeBox& box = {});

/// Smallness certificate: empirical Lipschitz constant of sigma in z and
/// the jump-coupling constant max(sup_i Lh_i^2, sum_i Lh_i^2 * lambda_i),
/// both required to stay at or below the threshold.
struct SmallnessCert {
  double L_sigma = 0;
  double C_tilde_h = 0;
  double threshold = 0.25;
  bool holds = false;
};

SmallnessCert check_h31(const CoefficientSet& cs, const LevyModel& levy,
                        double threshold = 0.25, int probes = 400, std::uint64_t seed = 1,
                        const ProbeBox& box = {});

/// Max directional difference quotient of `expr` in `slot` over sampled
/// probe points (several displacement scales per probe).
double directional_lipschitz(const Expression& expr, Var slot, const LevyModel& levy,
                             int probes, std::uint64_t seed, const ProbeBox& box = {});

}  // namespace isaacs
