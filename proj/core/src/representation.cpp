#include "isaacs/representation.hpp"

#include <cmath>

namespace isaacs {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr int kMaxIterations = 200;
constexpr int kMaxWidenings = 60;

double sigma_at(const Expression& sigma, const AlgebraicQuery& q, double z) {
  Env env;
  env.t = q.s;
  env.x = q.x;
  env.y = q.y;
  env.z = z;
  env.u = q.u;
  env.v = q.v;
  return sigma.eval(env);
}

// Local slope estimate around the query when no certificate value is given.
double estimate_lip(const Expression& sigma, const AlgebraicQuery& q) {
  double worst = 0;
  for (double z0 : {0.0, q.xi, -q.xi}) {
    for (double d : {1e-3, 1.0}) {
      const double a = sigma_at(sigma, q, z0);
      const double b = sigma_at(sigma, q, z0 + d);
      worst = std::fmax(worst, std::fabs(b - a) / d);
    }
  }
  return worst;
}

}  // namespace

AlgebraicResult solve_representation(const Expression& sigma, const AlgebraicQuery& q,
                                     double lip_sigma_hint) {
  AlgebraicResult res;

  if (!sigma.references(Var::z) || q.p == 0.0) {
    res.z = q.xi + q.p * sigma_at(sigma, q, 0.0);
    res.residual = 0.0;
    res.method = "direct";
    return res;
  }

  if (q.p < 0)
    throw SolverError("representation query has p < 0 with z-dependent sigma (p = " +
                      std::to_string(q.p) + ")");

  auto F = [&](double z) { return z - q.xi - q.p * sigma_at(sigma, q, z); };

  const double L = lip_sigma_hint >= 0 ? lip_sigma_hint : estimate_lip(sigma, q);
  const double damping = 1.0 / (1.0 + q.p * L);

  int iterations = 0;

  // Relaxed Picard phase.
  if (q.p * L < 1.0) {
    double z = q.xi;
    double prev_gap = 1e300;
    while (iterations < kMaxIterations / 2) {
      const double target = q.xi + q.p * sigma_at(sigma, q, z);
      const double gap = std::fabs(target - z);
      ++iterations;
      z += damping * (target - z);
      if (gap <= kResidualTol * 0.5) {
        res.z = z;
        res.residual = F(z);
        if (std::fabs(res.residual) <= kResidualTol) {
          res.iterations = iterations;
          res.method = "fixed-point";
          return res;
        }
      }
      if (gap > prev_gap * 1.5) break;  // diverging, hand over to bisection
      prev_gap = gap;
    }
  }

  // Safeguarded bisection on the strictly increasing residual map.
  const double bound =
      1.0 + std::fmax(std::fabs(sigma_at(sigma, q, 0.0)),
                      std::fmax(std::fabs(sigma_at(sigma, q, q.xi)),
                                std::fabs(sigma_at(sigma, q, -q.xi))));
  double lo = q.xi - q.p * bound;
  double hi = q.xi + q.p * bound;
  double flo = F(lo);
  double fhi = F(hi);
  int widenings = 0;
  while ((flo > 0 || fhi < 0) && widenings < kMaxWidenings) {
    const double width = hi - lo;
    lo -= width;
    hi += width;
    flo = F(lo);
    fhi = F(hi);
    ++widenings;
  }
  if (flo > 0 || fhi < 0)
    throw SolverError("representation root not bracketed after widening (xi = " +
                      std::to_string(q.xi) + ", p = " + std::to_string(q.p) + ")");

  double mid = 0.5 * (lo + hi);
  while (iterations < kMaxIterations) {
    mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    ++iterations;
    if (std::fabs(fm) <= kResidualTol) {
      res.z = mid;
      res.residual = fm;
      res.iterations = iterations;
      res.method = "bisection";
      return res;
    }
    if (fm > 0)
      hi = mid;
    else
      lo = mid;
  }
  throw SolverError("representation solve exceeded " + std::to_string(kMaxIterations) +
                    " iterations without reaching |residual| <= 1e-12");
}

RepresentationBounds representation_bounds(const Expression& sigma,
                                           std::span<const AlgebraicQuery> queries,
                                           double lip_sigma_hint) {
  RepresentationBounds out;
  for (const AlgebraicQuery& q : queries) {
    const AlgebraicResult r = solve_representation(sigma, q, lip_sigma_hint);
    out.growth = std::fmax(out.growth,
                           std::fabs(r.z) / (1.0 + std::fabs(q.x) + std::fabs(q.y) +
                                             std::fabs(q.xi)));
    const double dxi = 1e-4 * (1.0 + std::fabs(q.xi));
    AlgebraicQuery shifted = q;
    shifted.xi += dxi;
    const AlgebraicResult r2 = solve_representation(sigma, shifted, lip_sigma_hint);
    out.lip_xi = std::fmax(out.lip_xi, std::fabs(r2.z - r.z) / dxi);
  }
  return out;
}

}  // namespace isaacs
