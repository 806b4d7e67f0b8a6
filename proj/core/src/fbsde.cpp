#include "isaacs/fbsde.hpp"

#include <cmath>
#include <string>

namespace isaacs {

namespace {

struct PicardAttempt {
  BackwardSolution sol;
  int iterations = 0;
  double final_change = 0;
  bool converged = false;
  std::vector<double> change_history;
};

PicardAttempt picard_window(const CoefficientSet& cs, const LevyModel& levy,
                            const TimeGrid& window, const SpaceGrid& space,
                            const PolicyField& u_policy, const PolicyField& v_policy,
                            const std::vector<double>& terminal, const FbsdeOptions& opt) {
  const int n = space.n_nodes;
  const int ns = window.n_steps;
  const int na = levy.n_atoms();

  PicardAttempt at;

  // Lagged fields; initial guess propagates the terminal data flat in time.
  std::vector<double> Y(static_cast<std::size_t>(ns + 1) * n);
  std::vector<double> Z(Y.size(), 0.0);
  for (int k = 0; k <= ns; ++k)
    for (int j = 0; j < n; ++j) Y[static_cast<std::size_t>(k) * n + j] = terminal[j];

  std::vector<SliceStencil> stencils(ns);
  std::vector<double> drift(n), vol(n), shifts(static_cast<std::size_t>(n) * std::max(na, 1));

  Driver driver = [&](int k, int j, double y, double z, double kbar) {
    Env env;
    env.t = window.time(k);
    env.x = space.node(j);
    env.y = y;
    env.z = z;
    env.k = kbar;
    env.u = u_policy[static_cast<std::size_t>(k) * n + j];
    env.v = v_policy[static_cast<std::size_t>(k) * n + j];
    return cs.f.eval(env);
  };

  for (int iter = 1; iter <= opt.picard_max; ++iter) {
    for (int k = 0; k < ns; ++k) {
      for (int j = 0; j < n; ++j) {
        Env env;
        env.t = window.time(k);
        env.x = space.node(j);
        env.y = Y[static_cast<std::size_t>(k) * n + j];
        env.z = Z[static_cast<std::size_t>(k) * n + j];
        env.u = u_policy[static_cast<std::size_t>(k) * n + j];
        env.v = v_policy[static_cast<std::size_t>(k) * n + j];
        drift[j] = cs.b.eval(env);
        vol[j] = cs.sigma.eval(env);
        for (int a = 0; a < na; ++a) {
          env.e = levy.atoms[a];
          shifts[static_cast<std::size_t>(j) * na + a] = cs.h.eval(env);
        }
      }
      stencils[k] = build_slice_stencil(space, levy, window.dt(), drift, vol, shifts);
    }

    BackwardSolution sol =
        solve_bsde(window, space, levy, terminal, driver,
                   [&](int k) -> const SliceStencil& { return stencils[k]; });

    double change = 0;
    for (std::size_t i = 0; i < Y.size(); ++i) {
      change = std::fmax(change, std::fabs(sol.Y[i] - Y[i]));
      change = std::fmax(change, std::fabs(sol.Z[i] - Z[i]));
    }
    at.change_history.push_back(change);
    at.iterations = iter;
    at.final_change = change;
    Y = sol.Y;
    Z = sol.Z;

    if (change <= opt.picard_tol) {
      at.sol = std::move(sol);
      at.converged = true;
      return at;
    }
    if (iter == opt.picard_max) at.sol = std::move(sol);
  }
  return at;
}

}  // namespace

WindowReport solve_fbsde_small(const CoefficientSet& cs, const LevyModel& levy,
                               const TimeGrid& window, const SpaceGrid& space,
                               const PolicyField& u_policy, const PolicyField& v_policy,
                               const std::vector<double>& terminal, const FbsdeOptions& opt) {
  const int n = space.n_nodes;
  const int ns = window.n_steps;
  if (ns > opt.delta0_steps)
    throw ConfigError("window of " + std::to_string(ns) + " steps exceeds delta0 = " +
                      std::to_string(opt.delta0_steps));
  if (static_cast<int>(u_policy.size()) != ns * n || static_cast<int>(v_policy.size()) != ns * n)
    throw ConfigError("policy fields must cover every (step, node) of the window");

  PicardAttempt at = picard_window(cs, levy, window, space, u_policy, v_policy, terminal, opt);
  if (at.converged) {
    WindowReport rep;
    rep.sol = std::move(at.sol);
    rep.picard_iterations = at.iterations;
    rep.final_change = at.final_change;
    rep.change_history = std::move(at.change_history);
    return rep;
  }

  if (ns == 1)
    throw SolverError("coupled solve failed to contract on a single step (last change " +
                      std::to_string(at.final_change) + "); the coupling is too strong for dt = " +
                      std::to_string(window.dt()));

  // Halve the window and chain through the midpoint slice.
  const int mid = ns / 2;
  const int na = levy.n_atoms();

  auto sub_policy = [&](const PolicyField& p, int first, int last) {
    PolicyField out(static_cast<std::size_t>(last - first) * n);
    for (int k = first; k < last; ++k)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(k - first) * n + j] = p[static_cast<std::size_t>(k) * n + j];
    return out;
  };

  WindowReport right =
      solve_fbsde_small(cs, levy, window.window(mid, ns), space, sub_policy(u_policy, mid, ns),
                        sub_policy(v_policy, mid, ns), terminal, opt);
  WindowReport left = solve_fbsde_small(cs, levy, window.window(0, mid), space,
                                        sub_policy(u_policy, 0, mid),
                                        sub_policy(v_policy, 0, mid), right.sol.slice_y(0), opt);

  WindowReport rep;
  rep.sol.time = window;
  rep.sol.space = space;
  rep.sol.n_atoms = na;
  rep.sol.Y.assign(static_cast<std::size_t>(ns + 1) * n, 0.0);
  rep.sol.Z.assign(rep.sol.Y.size(), 0.0);
  rep.sol.K.assign(rep.sol.Y.size() * std::max(na, 1), 0.0);
  if (na == 0) rep.sol.K.clear();

  auto copy_slice = [&](const BackwardSolution& src, int src_slice, int dst_slice) {
    for (int j = 0; j < n; ++j) {
      rep.sol.Y[rep.sol.idx(dst_slice, j)] = src.y(src_slice, j);
      rep.sol.Z[rep.sol.idx(dst_slice, j)] = src.z(src_slice, j);
      for (int a = 0; a < na; ++a)
        rep.sol.K[rep.sol.idx(dst_slice, j) * na + a] = src.k(src_slice, j, a);
    }
  };
  for (int k = 0; k < mid; ++k) copy_slice(left.sol, k, k);
  for (int k = mid; k <= ns; ++k) copy_slice(right.sol, k - mid, k);

  rep.sol.leakage = left.sol.leakage + right.sol.leakage;
  rep.picard_iterations = left.picard_iterations + right.picard_iterations + at.iterations;
  rep.window_splits = left.window_splits + right.window_splits + 1;
  rep.final_change = std::fmax(left.final_change, right.final_change);
  rep.change_history = std::move(right.change_history);
  rep.change_history.insert(rep.change_history.end(), left.change_history.begin(),
                            left.change_history.end());
  return rep;
}

std::vector<double> backward_semigroup(const CoefficientSet& cs, const LevyModel& levy,
                                       const TimeGrid& time, const SpaceGrid& space, int slice,
                                       int delta_steps, const PolicyField& u_policy,
                                       const PolicyField& v_policy,
                                       const std::vector<double>& terminal,
                                       const FbsdeOptions& opt) {
  if (delta_steps < 0 || delta_steps > opt.delta0_steps)
    throw ConfigError("semigroup step count must lie in [0, delta0]");
  if (delta_steps == 0) return terminal;
  const TimeGrid window = time.window(slice, slice + delta_steps);
  return solve_fbsde_small(cs, levy, window, space, u_policy, v_policy, terminal, opt)
      .sol.slice_y(0);
}

WindowReport cost_functional(const CoefficientSet& cs, const LevyModel& levy,
                             const TimeGrid& time, const SpaceGrid& space,
                             const PolicyField& u_policy, const PolicyField& v_policy,
                             const FbsdeOptions& opt) {
  const int n = space.n_nodes;
  const int na = levy.n_atoms();
  if (static_cast<int>(u_policy.size()) != time.n_steps * n ||
      static_cast<int>(v_policy.size()) != time.n_steps * n)
    throw ConfigError("policy fields must cover every (step, node) of the time grid");

  WindowReport rep;
  rep.sol.time = time;
  rep.sol.space = space;
  rep.sol.n_atoms = na;
  rep.sol.Y.assign(static_cast<std::size_t>(time.n_slices()) * n, 0.0);
  rep.sol.Z.assign(rep.sol.Y.size(), 0.0);
  rep.sol.K.assign(rep.sol.Y.size() * std::max(na, 1), 0.0);
  if (na == 0) rep.sol.K.clear();

  std::vector<double> current(n);
  for (int j = 0; j < n; ++j) {
    Env env;
    env.x = space.node(j);
    current[j] = cs.phi.eval(env);
  }
  for (int j = 0; j < n; ++j) rep.sol.Y[rep.sol.idx(time.n_steps, j)] = current[j];

  auto sub_policy = [&](const PolicyField& p, int first, int last) {
    PolicyField out(static_cast<std::size_t>(last - first) * n);
    for (int k = first; k < last; ++k)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(k - first) * n + j] = p[static_cast<std::size_t>(k) * n + j];
    return out;
  };

  int pos = time.n_steps;
  while (pos > 0) {
    const int len = std::min(opt.delta0_steps, pos);
    const int first = pos - len;
    WindowReport w =
        solve_fbsde_small(cs, levy, time.window(first, pos), space,
                          sub_policy(u_policy, first, pos), sub_policy(v_policy, first, pos),
                          current, opt);
    for (int k = 0; k < len; ++k)
      for (int j = 0; j < n; ++j) {
        rep.sol.Y[rep.sol.idx(first + k, j)] = w.sol.y(k, j);
        rep.sol.Z[rep.sol.idx(first + k, j)] = w.sol.z(k, j);
        for (int a = 0; a < na; ++a)
          rep.sol.K[rep.sol.idx(first + k, j) * na + a] = w.sol.k(k, j, a);
      }
    current = w.sol.slice_y(0);
    rep.sol.leakage += w.sol.leakage;
    rep.picard_iterations += w.picard_iterations;
    rep.window_splits += w.window_splits;
    rep.final_change = std::fmax(rep.final_change, w.final_change);
    rep.change_history.insert(rep.change_history.end(), w.change_history.begin(),
                              w.change_history.end());
    pos = first;
  }
  return rep;
}

}  // namespace isaacs
