#include "isaacs/hjbi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isaacs/representation.hpp"

namespace isaacs {

namespace {

constexpr std::uint64_t kPdeSeed = 12;

void require_slots(const Expression& expr, VarMask allowed, const char* name) {
  static const Var kStates[] = {Var::y, Var::z, Var::k};
  for (Var s : kStates) {
    if ((allowed & var_bit(s)) == 0 && expr.references(s))
      throw ConfigError(std::string("coefficient ") + name + " may not depend on " + var_name(s) +
                        " in this scheme");
  }
}

struct ClampCount {
  long events = 0;
  long total = 0;
};

/// One optimized Hamiltonian evaluation at (t, node j) against slice w.
/// dt > 0 additionally enforces the nonnegative-center stencil budget.
double hamiltonian_at(const PdeProblem& p, ValueKind kind, bool sigma_z, double lip_hint,
                      const std::vector<double>& w, int j, double t, double dt, int* arg_u,
                      int* arg_v, ClampCount* clamps) {
  const SpaceGrid& space = p.space;
  const int n = space.n_nodes;
  const double dx = space.dx();
  const double x = space.node(j);
  const double lambda_total = p.levy.total_intensity;

  // Boundary closure: the gradient fed to f and the representation solver is
  // the available one-sided difference, but the update itself keeps only the
  // terms whose neighbor weights are nonnegative.  Any curvature estimate at
  // an edge node carries weight -2*dt*sigma^2/dx^2 on the first interior
  // node, so the curvature term vanishes there; the advection term is kept
  // only when the upwind neighbor exists.
  const bool has_up = j + 1 < n;
  const bool has_down = j > 0;
  const double d_up = has_up ? (w[j + 1] - w[j]) / dx : (w[j] - w[j - 1]) / dx;
  const double d_down = has_down ? (w[j] - w[j - 1]) / dx : d_up;
  double p_c, second;
  if (!has_down) {
    p_c = d_up;
    second = 0;
  } else if (!has_up) {
    p_c = d_down;
    second = 0;
  } else {
    p_c = (w[j + 1] - w[j - 1]) / (2 * dx);
    second = (w[j + 1] - 2 * w[j] + w[j - 1]) / (dx * dx);
  }

  double p_grad = p_c;
  if (sigma_z) {
    if (clamps) ++clamps->total;
    if (p_grad < 0) {
      p_grad = 0;
      if (clamps) ++clamps->events;
    }
  }

  const int nu = static_cast<int>(p.controls.U.size());
  const int nv = static_cast<int>(p.controls.V.size());

  auto pair_h = [&](int iu, int iv) {
    Env env;
    env.t = t;
    env.x = x;
    env.y = w[j];
    env.u = p.controls.U[iu];
    env.v = p.controls.V[iv];

    double z_arg;
    double sigma_val;
    if (sigma_z) {
      AlgebraicQuery q;
      q.s = t;
      q.x = x;
      q.y = w[j];
      q.xi = 0;
      q.p = p_grad;
      q.u = env.u;
      q.v = env.v;
      z_arg = solve_representation(p.cs.sigma, q, lip_hint).z;
      env.z = z_arg;
      sigma_val = p.cs.sigma.eval(env);
    } else {
      sigma_val = p.cs.sigma.eval(env);
      z_arg = p_grad * sigma_val;
      env.z = z_arg;
    }

    // Jump compensator folds into the upwinded drift so every neighbor
    // coefficient stays nonnegative; the nonlocal sum is taken raw (p = 0).
    double comp = 0;
    for (int a = 0; a < p.levy.n_atoms(); ++a) {
      Env je = env;
      je.e = p.levy.atoms[a];
      comp += p.cs.h.eval(je) * p.levy.intensities[a];
    }
    const NonlocalTerms nl =
        evaluate_nonlocal(w, j, p.cs, p.levy, space, t, env.u, env.v, 0.0);

    const double b_eff = p.cs.b.eval(env) - comp;
    const double drift = b_eff >= 0 ? (has_up ? b_eff * d_up : 0.0)
                                    : (has_down ? b_eff * d_down : 0.0);

    env.k = nl.C;
    const double f_val = p.cs.f.eval(env);

    if (dt > 0) {
      const double rate = sigma_val * sigma_val / (dx * dx) + std::fabs(b_eff) / dx + lambda_total;
      if (dt * rate > 1 + 1e-12)
        throw SolverError("stencil center coefficient negative at t=" + std::to_string(t) +
                          ", x=" + std::to_string(x) + "; need dt <= " +
                          std::to_string(0.9 / rate));
    }
    return drift + 0.5 * sigma_val * sigma_val * second + nl.B + f_val;
  };

  int best_u = 0, best_v = 0;
  double best = 0;
  if (kind == ValueKind::Lower) {
    for (int iu = 0; iu < nu; ++iu) {
      int av = 0;
      double inner = pair_h(iu, 0);
      for (int iv = 1; iv < nv; ++iv) {
        const double h = pair_h(iu, iv);
        if (h < inner) inner = h, av = iv;
      }
      if (iu == 0 || inner > best) best = inner, best_u = iu, best_v = av;
    }
  } else {
    for (int iv = 0; iv < nv; ++iv) {
      int au = 0;
      double inner = pair_h(0, iv);
      for (int iu = 1; iu < nu; ++iu) {
        const double h = pair_h(iu, iv);
        if (h > inner) inner = h, au = iu;
      }
      if (iv == 0 || inner < best) best = inner, best_v = iv, best_u = au;
    }
  }
  if (arg_u) *arg_u = best_u;
  if (arg_v) *arg_v = best_v;
  return best;
}

double max_sigma_estimate(const PdeProblem& p) {
  double worst = 0;
  Env env;
  for (double t : {p.time.t0, 0.5 * (p.time.t0 + p.time.T), p.time.T})
    for (int j = 0; j < p.space.n_nodes; ++j) {
      env.t = t;
      env.x = p.space.node(j);
      env.y = p.cs.phi.eval(env);
      for (double uu : p.controls.U)
        for (double vv : p.controls.V) {
          env.u = uu;
          env.v = vv;
          worst = std::fmax(worst, std::fabs(p.cs.sigma.eval(env)));
        }
    }
  return worst;
}

ValueField solve_core(const PdeProblem& p, ValueKind kind, bool allow_sigma_z) {
  require_slots(p.cs.h, 0, "h");
  if (allow_sigma_z)
    require_slots(p.cs.sigma, mask::y | mask::z, "sigma");
  else
    require_slots(p.cs.sigma, 0, "sigma");

  const bool sigma_z = allow_sigma_z && p.cs.sigma.references(Var::z);
  double lip_hint = -1;
  ProbeBox box;
  box.t0 = p.time.t0;
  box.t1 = p.time.T;
  box.u_values = p.controls.U;
  box.v_values = p.controls.V;
  if (sigma_z) {
    SmallnessCert cert = check_h31(p.cs, p.levy, 0.25, 400, kPdeSeed, box);
    if (!cert.holds)
      throw ConfigError("volatility z-slope " + std::to_string(cert.L_sigma) +
                        " exceeds the contraction threshold " + std::to_string(cert.threshold));
    lip_hint = cert.L_sigma;
  }

  const int n = p.space.n_nodes;
  const int ns = p.time.n_steps;
  const double dt = p.time.dt();
  const double dx = p.space.dx();

  const double s_max = max_sigma_estimate(p);
  const double rate = s_max * s_max / (dx * dx) + p.levy.total_intensity;
  if (dt * rate > 0.9 + 1e-12)
    throw SolverError("time step violates the CFL bound; need dt <= " +
                      std::to_string(0.9 / rate) + " for this grid");

  ValueField field;
  field.kind = kind;
  field.time = p.time;
  field.space = p.space;
  field.values.assign(static_cast<std::size_t>(ns + 1) * n, 0.0);
  field.argmax_u.assign(static_cast<std::size_t>(ns) * n, 0);
  field.argmin_v.assign(static_cast<std::size_t>(ns) * n, 0);

  Env env;
  for (int j = 0; j < n; ++j) {
    env.x = p.space.node(j);
    field.values[static_cast<std::size_t>(ns) * n + j] = p.cs.phi.eval(env);
  }

  ClampCount clamps;
  for (int k = ns - 1; k >= 0; --k) {
    const std::vector<double> w = field.slice(k + 1);
    const double t = p.time.time(k + 1);
    for (int j = 0; j < n; ++j) {
      int au = 0, av = 0;
      const double h = hamiltonian_at(p, kind, sigma_z, lip_hint, w, j, t, dt, &au, &av,
                                      j > 0 && j + 1 < n ? &clamps : nullptr);
      field.values[static_cast<std::size_t>(k) * n + j] = w[j] + dt * h;
      field.argmax_u[static_cast<std::size_t>(k) * n + j] = au;
      field.argmin_v[static_cast<std::size_t>(k) * n + j] = av;
    }
  }

  if (clamps.total > 0 && clamps.events > clamps.total / 5)
    throw SolverError("gradient clamped at " + std::to_string(clamps.events) + " of " +
                      std::to_string(clamps.total) +
                      " interior evaluations; the field is not monotone enough for the "
                      "z-coupled scheme");
  return field;
}

}  // namespace

PdeProblem load_pde_problem(const ConfigDoc& doc) {
  PdeProblem p;
  p.cs = parse_coefficients(doc);
  if (doc.has("levy", "atoms"))
    p.levy = discretize_levy(doc.num_list("levy", "atoms"), doc.num_list("levy", "intensities"),
                             p.cs.l, doc.num_or("levy", "C", 1.0));
  p.time = load_time_grid(doc);
  p.space = load_space_grid(doc);
  p.controls = load_controls(doc);
  p.options = load_solver_options(doc);
  return p;
}

NonlocalTerms evaluate_nonlocal(const std::vector<double>& slice_w, int node,
                                const CoefficientSet& cs, const LevyModel& levy,
                                const SpaceGrid& space, double t, double u, double v, double p) {
  NonlocalTerms out;
  if (levy.empty()) return out;

  Env env;
  env.t = t;
  env.x = space.node(node);
  env.u = u;
  env.v = v;
  const double w0 = slice_w[node];
  for (int a = 0; a < levy.n_atoms(); ++a) {
    env.e = levy.atoms[a];
    const double shift = cs.h.eval(env);
    const GridSplit gs = split_position(space, env.x + shift);
    const double wt = (1 - gs.frac) * slice_w[gs.lo] + gs.frac * slice_w[gs.lo + 1];
    out.B += (wt - w0 - p * shift) * levy.intensities[a];
    out.C += (wt - w0) * levy.l_values[a] * levy.intensities[a];
  }
  return out;
}

ValueField solve_hjbi_special(const PdeProblem& p, ValueKind kind) {
  return solve_core(p, kind, false);
}

ValueField solve_hjbi_general(const PdeProblem& p, ValueKind kind) {
  return solve_core(p, kind, true);
}

std::vector<double> viscosity_residual(const ValueField& field, const PdeProblem& p,
                                       ValueKind kind) {
  const int n = p.space.n_nodes;
  const int ns = p.time.n_steps;
  const double dt = p.time.dt();
  const int margin = interior_margin(n);
  const bool sigma_z = p.cs.sigma.references(Var::z);

  double lip_hint = -1;
  std::vector<double> res(static_cast<std::size_t>(ns + 1) * n, 0.0);
  for (int k = 0; k < ns; ++k) {
    const std::vector<double> w = field.slice(k);
    const std::vector<double> w_next = field.slice(k + 1);
    const double t = p.time.time(k);
    for (int j = margin; j < n - margin; ++j) {
      const double h =
          hamiltonian_at(p, kind, sigma_z, lip_hint, w, j, t, 0.0, nullptr, nullptr, nullptr);
      res[static_cast<std::size_t>(k) * n + j] = (w_next[j] - w[j]) / dt + h;
    }
  }
  return res;
}

int interior_margin(int n_nodes) { return std::max(1, n_nodes / 10); }

}  // namespace isaacs
