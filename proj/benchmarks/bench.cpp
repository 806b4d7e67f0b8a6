#include <benchmark/benchmark.h>

#include "isaacs/bsde.hpp"
#include "isaacs/expr.hpp"
#include "isaacs/hjbi.hpp"
#include "isaacs/stencil.hpp"

namespace {

using namespace isaacs;

void BM_ExprEval(benchmark::State& state) {
  const Expression expr =
      parse_expression("0.5*x + sin(u)*cos(v) - 0.25*y*z + exp(-x*x)", mask::all, "bench");
  Env env;
  env.x = 0.7;
  env.y = -0.3;
  env.z = 0.1;
  env.u = 1.0;
  env.v = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expr.eval(env));
    env.x += 1e-9;
  }
}
BENCHMARK(BM_ExprEval);

void BM_StencilBuild(benchmark::State& state) {
  const SpaceGrid space(-5, 5, static_cast<int>(state.range(0)));
  const LevyModel levy;
  const double dx = space.dx();
  const std::vector<double> drift(space.n_nodes, 0.3);
  const std::vector<double> vol(space.n_nodes, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_slice_stencil(space, levy, 0.4 * dx * dx, drift, vol, {}));
}
BENCHMARK(BM_StencilBuild)->Arg(101)->Arg(401);

void BM_BsdeSweep(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const SpaceGrid space(-2, 2, nx);
  const LevyModel levy;
  // Step count follows the stability bound of the finer grids.
  const double dt_max = cfl_dt_bound(space, levy, 0.5, 0.0, 0.9);
  const TimeGrid time(0, 1, std::max(50, static_cast<int>(1.0 / dt_max) + 1));
  const std::vector<double> drift(space.n_nodes, 0.0);
  const std::vector<double> vol(space.n_nodes, 0.5);
  const SliceStencil st = build_slice_stencil(space, levy, time.dt(), drift, vol, {});
  std::vector<double> terminal(space.n_nodes);
  for (int j = 0; j < space.n_nodes; ++j) terminal[j] = space.node(j) * space.node(j);
  const Driver driver = [](int, int, double y, double z, double) { return -0.5 * y + 0.1 * z; };
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_bsde(time, space, levy, terminal, driver,
                                        [&](int) -> const SliceStencil& { return st; }));
}
BENCHMARK(BM_BsdeSweep)->Arg(41)->Arg(161);

void BM_HjbiSolve(benchmark::State& state) {
  const std::string text =
      "[model]\n"
      "b = \"u + v\"\n"
      "sigma = \"0.5\"\n"
      "f = \"0\"\n"
      "phi = \"max(x, 0)\"\n"
      "[controls]\n"
      "U = -1, 1\n"
      "V = -1, 1\n"
      "[grid]\n"
      "T = 0.5\n"
      "nt = 80\n"
      "x_min = -3\n"
      "x_max = 3\n"
      "nx = 121\n";
  const PdeProblem p = load_pde_problem(ConfigDoc::from_text(text, "bench"));
  for (auto _ : state) benchmark::DoNotOptimize(solve_hjbi_special(p, ValueKind::Lower));
}
BENCHMARK(BM_HjbiSolve);

}  // namespace

BENCHMARK_MAIN();
