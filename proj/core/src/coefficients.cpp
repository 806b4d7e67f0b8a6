#include "isaacs/coefficients.hpp"

#include <cmath>
#include <string>

#include "isaacs/rng.hpp"

namespace isaacs {

namespace {

constexpr std::uint64_t kProbeTag = 0xa7;

constexpr VarMask kForwardSlots = mask::t | mask::x | mask::y | mask::z | mask::u | mask::v;
constexpr VarMask kJumpSlots = kForwardSlots | mask::e;
constexpr VarMask kDriverSlots = mask::t | mask::x | mask::y | mask::z | mask::k | mask::u | mask::v;

const Var kStateSlots[] = {Var::x, Var::y, Var::z, Var::k};

double pick(const std::vector<double>& values, double uniform) {
  if (values.empty()) return 0.0;
  auto idx = static_cast<std::size_t>(uniform * values.size());
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

Env sample_env(const ProbeBox& box, const LevyModel& levy, std::uint64_t seed,
               std::uint64_t stream) {
  auto u = [&](std::uint64_t c) { return rng::u01(seed, stream, c); };
  Env env;
  const double r = box.state_radius;
  env.t = box.t0 + (box.t1 - box.t0) * u(0);
  env.x = r * (2 * u(1) - 1);
  env.y = r * (2 * u(2) - 1);
  env.z = r * (2 * u(3) - 1);
  env.k = r * (2 * u(4) - 1);
  env.u = pick(box.u_values, u(5));
  env.v = pick(box.v_values, u(6));
  env.e = levy.empty() ? 0.0 : levy.atoms[static_cast<std::size_t>(u(7) * levy.n_atoms()) %
                                          levy.atoms.size()];
  return env;
}

std::string describe(const Env& env) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(t=%g, x=%g, y=%g, z=%g, k=%g, u=%g, v=%g, e=%g)", env.t, env.x,
                env.y, env.z, env.k, env.u, env.v, env.e);
  return buf;
}

double eval_at(const Expression& expr, const Env& env, const char* name) {
  try {
    return expr.eval(env);
  } catch (const EvalError& err) {
    throw EvalError(std::string(name) + " is non-finite at probe " + describe(env) + ": " +
                    err.what());
  }
}

}  // namespace

CoefficientSet parse_coefficients(const ConfigDoc& doc) {
  if (!doc.has_section("model")) throw ConfigError(doc.origin() + ": missing [model] section");

  CoefficientSet cs;
  cs.b = parse_expression(doc.str("model", "b"), kForwardSlots, "model.b");
  cs.sigma = parse_expression(doc.str("model", "sigma"), kForwardSlots, "model.sigma");
  cs.f = parse_expression(doc.str("model", "f"), kDriverSlots, "model.f");
  cs.phi = parse_expression(doc.str("model", "phi"), mask::x, "model.phi");

  const bool has_atoms = doc.has("levy", "atoms");
  if (doc.has("model", "h")) {
    cs.h = parse_expression(doc.str("model", "h"), kJumpSlots, "model.h");
  } else if (has_atoms) {
    throw ConfigError(doc.origin() + ": [levy] atoms present but model.h missing");
  } else {
    cs.h = parse_expression("0", kJumpSlots, "model.h");
  }
  if (doc.has("levy", "l")) {
    cs.l = parse_expression(doc.str("levy", "l"), mask::e, "levy.l");
  } else {
    cs.l = parse_expression("0", mask::e, "levy.l");
  }

  cs.rho_bound = doc.num_or("levy", "C", 1.0);
  for (const char* name : {"b", "sigma", "h", "f", "phi"}) {
    std::string key = std::string("lip_") + name;
    if (doc.has("model", key)) cs.lip_constants[name] = doc.num("model", key);
  }
  return cs;
}

double directional_lipschitz(const Expression& expr, Var slot, const LevyModel& levy, int probes,
                             std::uint64_t seed, const ProbeBox& box) {
  if (!expr.references(slot)) return 0.0;
  static const double deltas[] = {1e-3, 1e-1, 1.0};
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Env env = sample_env(box, levy, seed, rng::stream_id(kProbeTag, 11, p));
    const double base = eval_at(expr, env, "coefficient");
    const double origin = env.get(slot);
    for (double delta : deltas) {
      Env moved = env;
      // Reflect so the displaced point stays inside the probe box.
      const double stepped =
          (origin + delta > box.state_radius) ? origin - delta : origin + delta;
      moved.set(slot, stepped);
      const double quotient =
          std::fabs(eval_at(expr, moved, "coefficient") - base) / std::fabs(stepped - origin);
      worst = std::fmax(worst, quotient);
    }
  }
  return worst;
}

H22Report check_h22(const CoefficientSet& cs, const LevyModel& levy, int probes,
                    std::uint64_t seed, const ProbeBox& box, double cap) {
  if (probes < 100)
    throw ConfigError("regularity check requires at least 100 probes, got " +
                      std::to_string(probes));

  H22Report report;
  report.probes = probes;
  report.cap = cap;

  const std::pair<const char*, const Expression*> coeffs[] = {
      {"b", &cs.b}, {"sigma", &cs.sigma}, {"h", &cs.h}, {"f", &cs.f}, {"phi", &cs.phi}};

  for (const auto& [name, expr] : coeffs) {
    H22Report::PerCoefficient pc;
    for (int p = 0; p < probes; ++p) {
      Env env = sample_env(box, levy, seed, rng::stream_id(kProbeTag, 7, p));
      double denom = 1.0;
      for (Var s : kStateSlots)
        if (expr->references(s)) denom += std::fabs(env.get(s));
      pc.growth = std::fmax(pc.growth, std::fabs(eval_at(*expr, env, name)) / denom);
    }
    for (Var s : kStateSlots) {
      if (!expr->references(s)) continue;
      pc.lip[s] = directional_lipschitz(*expr, s, levy, probes, seed, box);
      pc.lip_overall = std::fmax(pc.lip_overall, pc.lip[s]);
    }
    report.coefficients.emplace(name, std::move(pc));
  }

  report.pass = true;
  for (const auto& [name, pc] : report.coefficients)
    if (!(pc.growth <= cap) || !(pc.lip_overall <= cap)) report.pass = false;
  return report;
}

MonotonicityCert monotonicity_params(const ConfigDoc& doc) {
  MonotonicityCert cert;
  cert.G = doc.num_or("monotonicity", "G", 1.0);
  cert.beta1 = doc.num_or("monotonicity", "beta1", 0.0);
  cert.beta2 = doc.num_or("monotonicity", "beta2", 0.0);
  cert.beta3 = doc.num_or("monotonicity", "beta3", 0.0);
  cert.mu1 = doc.num_or("monotonicity", "mu1", 0.0);

  if (cert.G == 0.0) throw ConfigError("monotonicity.G must be nonzero");
  if (cert.beta1 < 0 || cert.beta2 < 0 || cert.beta3 < 0 || cert.mu1 < 0)
    throw ConfigError("monotonicity parameters beta1..beta3, mu1 must be nonnegative");
  if (!(cert.beta1 + cert.beta2 > 0) || !(cert.beta1 + cert.beta3 > 0) ||
      !(cert.beta2 + cert.mu1 > 0) || !(cert.beta3 + cert.mu1 > 0))
    throw ConfigError(
        "monotonicity parameters must satisfy beta1+beta2 > 0, beta1+beta3 > 0, "
        "beta2+mu1 > 0, beta3+mu1 > 0");
  return cert;
}

MonotonicityCert check_h23(const CoefficientSet& cs, const LevyModel& levy,
                           MonotonicityCert params, int probes, std::uint64_t seed,
                           const ProbeBox& box) {
  MonotonicityCert cert = params;
  cert.probes = probes;
  const double G = cert.G;
  const int na = levy.n_atoms();

  // Probe pairs differ only in the directions the coefficient system couples:
  // an uncoupled direction contributes nothing to the inner product on the
  // left, so it is held common and the quadratic budget on the right ranges
  // over active directions only.  x is always active through the terminal.
  const bool vary_y = cs.b.references(Var::y) || cs.sigma.references(Var::y) ||
                      cs.h.references(Var::y) || cs.f.references(Var::y);
  const bool vary_z = cs.b.references(Var::z) || cs.sigma.references(Var::z) ||
                      cs.h.references(Var::z) || cs.f.references(Var::z);
  const bool vary_k = cs.f.references(Var::k) || cs.h.references(Var::x) ||
                      cs.h.references(Var::y) || cs.h.references(Var::z);

  double worst = -1e300;

  std::vector<double> k1(na), k2(na);
  for (int p = 0; p < probes; ++p) {
    Env e1 = sample_env(box, levy, seed, rng::stream_id(kProbeTag, 23, 2 * p));
    Env e2 = sample_env(box, levy, seed, rng::stream_id(kProbeTag, 23, 2 * p + 1));
    e2.t = e1.t;  // the inequality quantifies over states at a common time
    if (!vary_y) e2.y = e1.y;
    if (!vary_z) e2.z = e1.z;

    // Per-atom values of the backward jump argument for both probes.
    double pair1 = 0, pair2 = 0;
    for (int a = 0; a < na; ++a) {
      auto st = rng::stream_id(kProbeTag, 29, p, a);
      k1[a] = box.state_radius * (2 * rng::u01(seed, st, 0) - 1);
      k2[a] = vary_k ? box.state_radius * (2 * rng::u01(seed, st, 1) - 1) : k1[a];
      pair1 += k1[a] * levy.l_values[a] * levy.intensities[a];
      pair2 += k2[a] * levy.l_values[a] * levy.intensities[a];
    }

    const double dx_ = e1.x - e2.x, dy_ = e1.y - e2.y, dz_ = e1.z - e2.z;

    // Quadratic dissipation bound, shared by every control pair.
    double jump_quad = 0;
    for (int a = 0; a < na; ++a) {
      const double dk = k1[a] - k2[a];
      jump_quad += G * G * dk * dk * levy.intensities[a];
    }
    const double rhs = -cert.beta1 * G * G * dx_ * dx_ -
                       cert.beta2 * G * G * (dy_ * dy_ + dz_ * dz_) - cert.beta3 * jump_quad;

    for (double uu : box.u_values.empty() ? std::vector<double>{0.0} : box.u_values) {
      for (double vv : box.v_values.empty() ? std::vector<double>{0.0} : box.v_values) {
        Env a1 = e1, a2 = e2;
        a1.u = a2.u = uu;
        a1.v = a2.v = vv;
        a1.k = pair1;
        a2.k = pair2;

        const double dg = eval_at(cs.f, a1, "f") - eval_at(cs.f, a2, "f");
        const double db = eval_at(cs.b, a1, "b") - eval_at(cs.b, a2, "b");
        const double ds = eval_at(cs.sigma, a1, "sigma") - eval_at(cs.sigma, a2, "sigma");

        double lhs = -G * dg * dx_ + G * db * dy_ + G * ds * dz_;
        for (int a = 0; a < na; ++a) {
          Env j1 = a1, j2 = a2;
          j1.e = j2.e = levy.atoms[a];
          lhs += G * (eval_at(cs.h, j1, "h") - eval_at(cs.h, j2, "h")) * (k1[a] - k2[a]) *
                 levy.intensities[a];
        }
        worst = std::fmax(worst, lhs - rhs);
      }
    }

    Env p1, p2;
    p1.x = e1.x;
    p2.x = e2.x;
    const double dphi = eval_at(cs.phi, p1, "phi") - eval_at(cs.phi, p2, "phi");
    worst = std::fmax(worst, cert.mu1 * G * G * dx_ * dx_ - dphi * G * dx_);
  }

  cert.worst_violation = worst;
  cert.verified = worst <= 1e-10;
  return cert;
}

SmallnessCert check_h31(const CoefficientSet& cs, const LevyModel& levy, double threshold,
                        int probes, std::uint64_t seed, const ProbeBox& box) {
  SmallnessCert cert;
  cert.threshold = threshold;
  cert.L_sigma = directional_lipschitz(cs.sigma, Var::z, levy, probes, seed, box);

  double sup_sq = 0, int_sq = 0;
  for (int a = 0; a < levy.n_atoms(); ++a) {
    // Lipschitz of the jump amplitude in the state slots at this atom.
    LevyModel pinned = levy;
    pinned.atoms = {levy.atoms[a]};
    pinned.intensities = {levy.intensities[a]};
    pinned.l_values = {levy.l_values[a]};
    double lh = 0;
    for (Var s : {Var::x, Var::y, Var::z})
      lh = std::fmax(lh, directional_lipschitz(cs.h, s, pinned, probes, seed, box));
    sup_sq = std::fmax(sup_sq, lh * lh);
    int_sq += lh * lh * levy.intensities[a];
  }
  cert.C_tilde_h = std::fmax(sup_sq, int_sq);
  cert.holds = cert.L_sigma <= threshold && cert.C_tilde_h <= threshold;
  return cert;
}

}  // namespace isaacs
