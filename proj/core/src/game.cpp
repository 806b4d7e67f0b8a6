#include "isaacs/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace isaacs {

namespace {

constexpr std::uint64_t kCertSeed = 12;

LevyModel load_levy(const ConfigDoc& doc) {
  if (!doc.has("levy", "atoms")) return LevyModel{};
  CoefficientSet cs = parse_coefficients(doc);
  return discretize_levy(doc.num_list("levy", "atoms"), doc.num_list("levy", "intensities"), cs.l,
                         doc.num_or("levy", "C", 1.0));
}

}  // namespace

TimeGrid load_time_grid(const ConfigDoc& doc) {
  return TimeGrid(doc.num_or("grid", "t0", 0.0), doc.num("grid", "T"),
                  static_cast<int>(doc.integer("grid", "nt")));
}

SpaceGrid load_space_grid(const ConfigDoc& doc) {
  return SpaceGrid(doc.num("grid", "x_min"), doc.num("grid", "x_max"),
                   static_cast<int>(doc.integer("grid", "nx")));
}

FbsdeOptions load_solver_options(const ConfigDoc& doc) {
  FbsdeOptions opt;
  opt.delta0_steps = static_cast<int>(doc.int_or("solver", "delta0_steps", opt.delta0_steps));
  opt.picard_tol = doc.num_or("solver", "picard_tol", opt.picard_tol);
  opt.picard_max = static_cast<int>(doc.int_or("solver", "picard_max", opt.picard_max));
  opt.cfl_safety = doc.num_or("solver", "cfl_safety", opt.cfl_safety);
  if (opt.delta0_steps < 1) throw ConfigError("solver.delta0_steps must be at least 1");
  if (!(opt.picard_tol > 0)) throw ConfigError("solver.picard_tol must be positive");
  if (opt.picard_max < 1) throw ConfigError("solver.picard_max must be at least 1");
  if (!(opt.cfl_safety > 0) || opt.cfl_safety > 1)
    throw ConfigError("solver.cfl_safety must lie in (0, 1]");
  return opt;
}

ControlGrid load_controls(const ConfigDoc& doc) {
  ControlGrid grid;
  grid.U = doc.has("controls", "U") ? doc.num_list("controls", "U") : std::vector<double>{0.0};
  grid.V = doc.has("controls", "V") ? doc.num_list("controls", "V") : std::vector<double>{0.0};
  grid.validate();
  return grid;
}

GameProblem load_problem(const ConfigDoc& doc) {
  GameProblem p;
  p.cs = parse_coefficients(doc);
  p.levy = load_levy(doc);
  p.time = load_time_grid(doc);
  p.space = load_space_grid(doc);
  p.controls = load_controls(doc);
  p.options = load_solver_options(doc);
  p.value_lip = doc.num_or("model", "value_lip", 1.0);
  p.isaacs_factor = doc.num_or("solver", "isaacs_factor", 4.0);

  ProbeBox box;
  box.state_radius = doc.num_or("monotonicity", "radius", box.state_radius);
  box.t0 = p.time.t0;
  box.t1 = p.time.T;
  box.u_values = p.controls.U;
  box.v_values = p.controls.V;
  const int probes = static_cast<int>(doc.int_or("monotonicity", "probes", 400));

  p.cert = check_h23(p.cs, p.levy, monotonicity_params(doc), probes, kCertSeed, box);
  if (!p.cert.verified)
    throw ConfigError(doc.origin() + ": dissipativity check failed, worst violation " +
                      std::to_string(p.cert.worst_violation));
  return p;
}

ValueField solve_value(const GameProblem& p, ValueKind kind, std::vector<double> terminal) {
  const int n = p.space.n_nodes;
  const int ns = p.time.n_steps;
  if (static_cast<int>(terminal.size()) != n)
    throw ConfigError("terminal slice size does not match the space grid");

  ValueField field;
  field.kind = kind;
  field.time = p.time;
  field.space = p.space;
  field.values.assign(static_cast<std::size_t>(ns + 1) * n, 0.0);
  field.argmax_u.assign(static_cast<std::size_t>(ns) * n, 0);
  field.argmin_v.assign(static_cast<std::size_t>(ns) * n, 0);
  std::copy(terminal.begin(), terminal.end(), field.values.begin() + std::ptrdiff_t(ns) * n);

  const int nu = static_cast<int>(p.controls.U.size());
  const int nv = static_cast<int>(p.controls.V.size());

  // One-step flow value per control pair, recomputed each slice.
  std::vector<std::vector<double>> pair_value(static_cast<std::size_t>(nu) * nv);
  PolicyField u_field(n), v_field(n);

  std::vector<double> next = std::move(terminal);
  for (int k = ns - 1; k >= 0; --k) {
    for (int iu = 0; iu < nu; ++iu) {
      std::fill(u_field.begin(), u_field.end(), p.controls.U[iu]);
      for (int iv = 0; iv < nv; ++iv) {
        std::fill(v_field.begin(), v_field.end(), p.controls.V[iv]);
        pair_value[static_cast<std::size_t>(iu) * nv + iv] = backward_semigroup(
            p.cs, p.levy, p.time, p.space, k, 1, u_field, v_field, next, p.options);
      }
    }

    for (int j = 0; j < n; ++j) {
      int best_u = 0, best_v = 0;
      double best = 0;
      if (kind == ValueKind::Lower) {
        for (int iu = 0; iu < nu; ++iu) {
          int arg_v = 0;
          double inner = pair_value[static_cast<std::size_t>(iu) * nv][j];
          for (int iv = 1; iv < nv; ++iv) {
            const double y = pair_value[static_cast<std::size_t>(iu) * nv + iv][j];
            if (y < inner) inner = y, arg_v = iv;
          }
          if (iu == 0 || inner > best) best = inner, best_u = iu, best_v = arg_v;
        }
      } else {
        for (int iv = 0; iv < nv; ++iv) {
          int arg_u = 0;
          double inner = pair_value[static_cast<std::size_t>(0) * nv + iv][j];
          for (int iu = 1; iu < nu; ++iu) {
            const double y = pair_value[static_cast<std::size_t>(iu) * nv + iv][j];
            if (y > inner) inner = y, arg_u = iu;
          }
          if (iv == 0 || inner < best) best = inner, best_v = iv, best_u = arg_u;
        }
      }
      field.values[static_cast<std::size_t>(k) * n + j] = best;
      field.argmax_u[static_cast<std::size_t>(k) * n + j] = best_u;
      field.argmin_v[static_cast<std::size_t>(k) * n + j] = best_v;
    }
    next = field.slice(k);
  }
  return field;
}

namespace {

std::vector<double> terminal_payoff(const GameProblem& p) {
  std::vector<double> values(p.space.n_nodes);
  Env env;
  for (int j = 0; j < p.space.n_nodes; ++j) {
    env.x = p.space.node(j);
    values[j] = p.cs.phi.eval(env);
  }
  return values;
}

}  // namespace

ValueField lower_value(const GameProblem& p) {
  return solve_value(p, ValueKind::Lower, terminal_payoff(p));
}

ValueField upper_value(const GameProblem& p) {
  return solve_value(p, ValueKind::Upper, terminal_payoff(p));
}

DppReport dpp_consistency(const GameProblem& p, int split_slice) {
  if (split_slice < 0 || split_slice > p.time.n_steps)
    throw ConfigError("split slice must lie inside the time grid");

  const ValueField direct = lower_value(p);

  std::vector<double> mid = terminal_payoff(p);
  if (split_slice < p.time.n_steps) {
    GameProblem tail = p;
    tail.time = p.time.window(split_slice, p.time.n_steps);
    mid = solve_value(tail, ValueKind::Lower, std::move(mid)).slice(0);
  }
  std::vector<double> initial = mid;
  if (split_slice > 0) {
    GameProblem head = p;
    head.time = p.time.window(0, split_slice);
    initial = solve_value(head, ValueKind::Lower, std::move(mid)).slice(0);
  }

  DppReport rep;
  rep.split_slice = split_slice;
  for (int j = 0; j < p.space.n_nodes; ++j)
    rep.sup_gap = std::fmax(rep.sup_gap, std::fabs(initial[j] - direct.at(0, j)));
  return rep;
}

IsaacsReport isaacs_gap(const GameProblem& p, const ValueField& lower, const ValueField& upper) {
  IsaacsReport rep;
  rep.tolerance = p.isaacs_factor * p.time.dt();
  const int n = p.space.n_nodes;
  rep.gap_field.resize(n);
  for (int s = 0; s <= p.time.n_steps; ++s)
    for (int j = 0; j < n; ++j) {
      const double gap = upper.at(s, j) - lower.at(s, j);
      rep.max_gap = std::fmax(rep.max_gap, std::fabs(gap));
      if (s == 0) rep.gap_field[j] = gap;
    }
  rep.value_exists = rep.max_gap <= rep.tolerance;
  return rep;
}

}  // namespace isaacs
