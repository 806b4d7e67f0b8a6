#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isaacs/config.hpp"
#include "isaacs/hjbi.hpp"

namespace isaacs {

/// Outcome of one property run. `status` is "pass", "fail", or "errored"
/// (a solver error with the diagnostic in `detail`); `tol_source` records
/// whether the tolerance came from the [verify] section or is the default.
struct PropertyEntry {
  std::string id;
  std::string anchor;
  double measured = 0;
  double tol = 0;
  std::string tol_source = "default";
  bool pass = false;
  std::string status = "fail";
  std::string detail;
  double runtime_ms = 0;
};

struct VerificationReport {
  std::string version;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<PropertyEntry> entries;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

struct PropertyInfo {
  const char* id;
  const char* anchor;   ///< slug of the mathematical statement exercised
  const char* module;   ///< owning module group
};

/// Every property id in fixed execution order.
const std::vector<PropertyInfo>& property_registry();

/// Expand selection tokens ("all", a module group, "isaacs", "comparison",
/// or explicit ids) into ids in registry order. Unknown tokens throw.
std::vector<std::string> select_properties(const std::vector<std::string>& tokens);

/// Run the selected properties against one config. Individual failures and
/// solver errors never abort the suite.
VerificationReport run_suite(const ConfigDoc& doc, const std::vector<std::string>& ids,
                             std::uint64_t seed);

/// Pretty-printed JSON: {version, config_digest, seed, entries:[...]}.
std::string report_to_json(const VerificationReport& report);

/// Monte Carlo estimate of the fixed-policy cost by per-path Euler stepping
/// of the forward dynamics (compensated jumps), accumulating the running
/// driver cost plus the terminal payoff. Draws the same substreams as
/// sample_paths. The driver must not reference the backward slots (y,z,k);
/// the policies are read at each step at the nearest grid node.
struct McEstimate {
  double mean = 0;
  double std_err = 0;
  int n_paths = 0;
};
McEstimate mc_cost_estimate(const CoefficientSet& cs, const LevyModel& levy, const TimeGrid& time,
                            const SpaceGrid& space, const PolicyField& u_policy,
                            const PolicyField& v_policy, double x0, int n_paths,
                            std::uint64_t seed);

/// Grid cost at x0 versus the Monte Carlo estimate of the same quantity.
struct McReport {
  double grid_value = 0;
  double mc_mean = 0;
  double mc_std_err = 0;
  double gap = 0;
  int n_paths = 0;
  std::uint64_t seed = 0;
};
McReport expected_value_reduction(const CoefficientSet& cs, const LevyModel& levy,
                                  const TimeGrid& time, const SpaceGrid& space,
                                  const PolicyField& u_policy, const PolicyField& v_policy,
                                  const FbsdeOptions& opt, double x0, int n_paths,
                                  std::uint64_t seed);

}  // namespace isaacs
