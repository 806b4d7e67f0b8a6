#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isaacs/bsde.hpp"
#include "isaacs/game.hpp"

namespace isaacs {

/// Ordered metadata written as `# key = value` lines ahead of the data.
using MetaList = std::vector<std::pair<std::string, std::string>>;

/// One row per (slice, node): slice, node, t, x, W. Floats carry 17
/// significant digits so a re-read reproduces them exactly.
void export_field(const ValueField& field, const std::string& path, const MetaList& meta);

/// One row per (slice, node): slice, node, t, x, Y, Z, then one K column
/// per jump atom.
void export_solution(const BackwardSolution& sol, const std::string& path, const MetaList& meta);

/// Initial-slice rows of both values plus their pointwise gap column.
void export_gap(const ValueField& lower, const ValueField& upper,
                const std::vector<double>& gap, const std::string& path, const MetaList& meta);

/// Re-parsed CSV: metadata pairs, the column-name line, numeric rows.
struct CsvTable {
  MetaList meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable import_csv(const std::string& path);

}  // namespace isaacs
