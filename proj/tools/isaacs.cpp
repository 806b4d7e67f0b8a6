// Command line front end: configuration checking, game/PDE solving,
// property verification, and Monte Carlo sanity runs.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isaacs/coefficients.hpp"
#include "isaacs/csv.hpp"
#include "isaacs/game.hpp"
#include "isaacs/hjbi.hpp"
#include "isaacs/verify.hpp"
#include "isaacs/version.hpp"
#include "json.hpp"

namespace {

using namespace isaacs;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int nt = 0;  // 0 keeps the config value
  int nx = 0;
  std::string kind = "lower";
  std::string suite = "all";
  int n_paths = 10000;
};

ConfigDoc load_doc(const CommonArgs& args) {
  ConfigDoc doc = ConfigDoc::from_file(args.config_path);
  if (args.nt > 0) doc.set("grid", "nt", std::to_string(args.nt));
  if (args.nx > 0) doc.set("grid", "nx", std::to_string(args.nx));
  return doc;
}

MetaList base_meta(const ConfigDoc& doc, const CommonArgs& args, const std::string& content) {
  return {{"version", kVersion},
          {"generator", rng::kGeneratorId},
          {"config_digest", doc.digest()},
          {"seed", std::to_string(args.seed)},
          {"content", content}};
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / name).string();
}

ProbeBox probe_box(const ConfigDoc& doc) {
  ProbeBox box;
  box.state_radius = doc.num_or("monotonicity", "radius", box.state_radius);
  box.t0 = doc.num_or("grid", "t0", 0.0);
  box.t1 = doc.num_or("grid", "T", 1.0);
  if (doc.has("controls", "U")) box.u_values = doc.num_list("controls", "U");
  if (doc.has("controls", "V")) box.v_values = doc.num_list("controls", "V");
  return box;
}

LevyModel levy_of(const ConfigDoc& doc, const CoefficientSet& cs) {
  if (!doc.has("levy", "atoms")) return LevyModel{};
  return discretize_levy(doc.num_list("levy", "atoms"), doc.num_list("levy", "intensities"),
                         cs.l, doc.num_or("levy", "C", 1.0));
}

int run_check(const CommonArgs& args) {
  const ConfigDoc doc = load_doc(args);
  const CoefficientSet cs = parse_coefficients(doc);
  const LevyModel levy = levy_of(doc, cs);
  const ProbeBox box = probe_box(doc);
  const int probes = doc.int_or("monotonicity", "probes", 400);
  std::printf("config %s (%s)\n", doc.digest().c_str(), doc.origin().c_str());

  bool ok = true;
  const H22Report h22 = check_h22(cs, levy, probes, args.seed, box,
                                  doc.num_or("model", "growth_cap", 10.0));
  std::printf("regularity: %s (cap %g)\n", h22.pass ? "pass" : "FAIL", h22.cap);
  for (const auto& [name, pc] : h22.coefficients)
    std::printf("  %-5s growth %-10.4g slope %.4g\n", name.c_str(), pc.growth, pc.lip_overall);
  ok = ok && h22.pass;

  if (doc.has_section("monotonicity")) {
    const MonotonicityCert cert =
        check_h23(cs, levy, monotonicity_params(doc), probes, args.seed, box);
    std::printf("dissipativity: %s (worst violation %.3g over %d probes)\n",
                cert.verified ? "verified" : "FAIL", cert.worst_violation, cert.probes);
    ok = ok && cert.verified;
  } else {
    std::printf("dissipativity: skipped (no [monotonicity] section)\n");
  }

  if (cs.sigma.references(Var::z) || cs.h.references(Var::z)) {
    const SmallnessCert sc = check_h31(cs, levy, 0.25, probes, args.seed, box);
    std::printf("contraction: %s (volatility slope %.4g, jump constant %.4g, threshold %g)\n",
                sc.holds ? "holds" : "FAIL", sc.L_sigma, sc.C_tilde_h, sc.threshold);
    ok = ok && sc.holds;
  }

  if (!ok) {
    std::fprintf(stderr, "%s: certificate check failed\n", args.config_path.c_str());
    return 1;
  }
  return 0;
}

int run_solve_game(const CommonArgs& args) {
  const ConfigDoc doc = load_doc(args);
  const GameProblem p = load_problem(doc);
  const ValueField lower = lower_value(p);
  const ValueField upper = upper_value(p);
  const IsaacsReport rep = isaacs_gap(p, lower, upper);

  MetaList meta = base_meta(doc, args, "lower");
  const std::string lower_path = out_path(args, "lower.csv");
  export_field(lower, lower_path, meta);
  meta.back().second = "upper";
  const std::string upper_path = out_path(args, "upper.csv");
  export_field(upper, upper_path, meta);
  meta.back().second = "gap";
  const std::string gap_path = out_path(args, "gap.csv");
  export_gap(lower, upper, rep.gap_field, gap_path, meta);

  std::printf("config %s\n", doc.digest().c_str());
  std::printf("solved %d slices x %d nodes, max gap %.6g vs tolerance %.6g: %s\n",
              p.time.n_slices(), p.space.n_nodes, rep.max_gap, rep.tolerance,
              rep.value_exists ? "the game has a value" : "no value at this tolerance");
  std::printf("wrote %s %s %s\n", lower_path.c_str(), upper_path.c_str(), gap_path.c_str());
  return 0;
}

int run_solve_pde(const CommonArgs& args) {
  const ConfigDoc doc = load_doc(args);
  const PdeProblem p = load_pde_problem(doc);
  const ValueKind kind = args.kind == "upper" ? ValueKind::Upper : ValueKind::Lower;
  const bool general = p.cs.sigma.references(Var::z) || p.cs.sigma.references(Var::y);
  const ValueField field = general ? solve_hjbi_general(p, kind) : solve_hjbi_special(p, kind);

  MetaList meta = base_meta(doc, args, "pde_" + args.kind);
  meta.emplace_back("scheme", general ? "general" : "special");
  const std::string path = out_path(args, "pde_" + args.kind + ".csv");
  export_field(field, path, meta);
  std::printf("config %s\n", doc.digest().c_str());
  std::printf("solved %d slices x %d nodes (%s scheme)\n", p.time.n_slices(), p.space.n_nodes,
              general ? "general" : "special");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_verify(const CommonArgs& args) {
  const ConfigDoc doc = load_doc(args);
  std::vector<std::string> tokens;
  std::string token;
  for (char c : args.suite + ",") {
    if (c == ',') {
      if (!token.empty()) tokens.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  const std::vector<std::string> ids = select_properties(tokens);
  const VerificationReport report = run_suite(doc, ids, args.seed);

  const std::string path = out_path(args, "verify.json");
  const std::string json = report_to_json(report);
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    std::fwrite(json.data(), 1, json.size(), f);
    std::fclose(f);
  }

  std::printf("config %s, seed %llu\n", report.config_digest.c_str(),
              static_cast<unsigned long long>(report.seed));
  int passed = 0;
  for (const auto& e : report.entries) {
    std::printf("[%s] %-28s measured %-12.4g tol %-10.4g %s\n",
                e.pass ? "pass" : (e.status == "errored" ? " err" : "FAIL"), e.id.c_str(),
                e.measured, e.tol, e.tol_source == "config" ? "(tol from config)" : "");
    if (e.pass) ++passed;
  }
  std::printf("%d of %zu properties pass\n", passed, report.entries.size());
  std::printf("wrote %s\n", path.c_str());
  return report.all_pass() ? 0 : 3;
}

int run_simulate(const CommonArgs& args) {
  const ConfigDoc doc = load_doc(args);
  const PdeProblem p = load_pde_problem(doc);
  const int n = p.space.n_nodes;
  const PolicyField u_policy(static_cast<std::size_t>(p.time.n_steps) * n,
                             p.controls.U.front());
  const PolicyField v_policy(static_cast<std::size_t>(p.time.n_steps) * n,
                             p.controls.V.front());
  const double x0 = p.space.node(n / 2);
  const McReport rep = expected_value_reduction(p.cs, p.levy, p.time, p.space, u_policy,
                                                v_policy, p.options, x0, args.n_paths, args.seed);

  nlohmann::ordered_json out;
  out["version"] = kVersion;
  out["generator"] = rng::kGeneratorId;
  out["config_digest"] = doc.digest();
  out["seed"] = rep.seed;
  out["x0"] = x0;
  out["n_paths"] = rep.n_paths;
  out["grid_value"] = rep.grid_value;
  out["mc_mean"] = rep.mc_mean;
  out["mc_std_err"] = rep.mc_std_err;
  out["gap"] = rep.gap;
  const std::string path = out_path(args, "simulate.json");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    const std::string text = out.dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }

  std::printf("config %s\n", doc.digest().c_str());
  std::printf("grid value %.8g, Monte Carlo %.8g +- %.2g over %d paths (gap %.3g)\n",
              rep.grid_value, rep.mc_mean, rep.mc_std_err, rep.n_paths, rep.gap);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for zero-sum stochastic differential games"};
  app.require_subcommand(1);

  CommonArgs args;
  int selected = 0;

  auto add_common = [&](CLI::App* sub, bool grid_overrides) {
    sub->add_option("config", args.config_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "output directory for artifacts");
    sub->add_option("--seed", args.seed, "base seed for sampled quantities");
    if (grid_overrides) {
      sub->add_option("--nt", args.nt, "override the number of time steps");
      sub->add_option("--nx", args.nx, "override the number of space nodes");
    }
  };

  CLI::App* check = app.add_subcommand("check", "run the coefficient certificates");
  add_common(check, false);
  check->callback([&] { selected = 1; });

  CLI::App* game = app.add_subcommand("solve-game", "solve lower and upper game values");
  add_common(game, true);
  game->callback([&] { selected = 2; });

  CLI::App* pde = app.add_subcommand("solve-pde", "solve the integro-PDE field");
  add_common(pde, true);
  pde->add_option("--kind", args.kind, "which value to solve")
      ->check(CLI::IsMember({"lower", "upper"}));
  pde->callback([&] { selected = 3; });

  CLI::App* verify = app.add_subcommand("verify", "run the property suite");
  add_common(verify, false);
  verify->add_option("--suite", args.suite,
                     "comma separated properties, module names, or suite names");
  verify->callback([&] { selected = 4; });

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check of the grid value");
  add_common(simulate, false);
  simulate->add_option("--paths", args.n_paths, "number of Monte Carlo paths")
      ->check(CLI::PositiveNumber);
  simulate->callback([&] { selected = 5; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    switch (selected) {
      case 1: return run_check(args);
      case 2: return run_solve_game(args);
      case 3: return run_solve_pde(args);
      case 4: return run_verify(args);
      case 5: return run_simulate(args);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 2;
  }
  return 0;
}
