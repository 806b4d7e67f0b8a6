#include "isaacs/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace isaacs {

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const MetaList& meta) : file_(std::fopen(path.c_str(), "w")) {
    if (!file_) throw ConfigError("cannot open " + path + " for writing");
    for (const auto& [key, value] : meta) std::fprintf(file_, "# %s = %s\n", key.c_str(), value.c_str());
  }
  ~CsvWriter() {
    if (file_) std::fclose(file_);
  }
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::string& columns) { std::fprintf(file_, "# %s\n", columns.c_str()); }
  void ints(int slice, int node) { std::fprintf(file_, "%d,%d", slice, node); }
  void num(double v) { std::fprintf(file_, ",%.17g", v); }
  void end_row() { std::fputc('\n', file_); }

 private:
  std::FILE* file_;
};

}  // namespace

void export_field(const ValueField& field, const std::string& path, const MetaList& meta) {
  CsvWriter out(path, meta);
  out.header("slice,node,t,x,W");
  for (int k = 0; k < field.time.n_slices(); ++k)
    for (int j = 0; j < field.space.n_nodes; ++j) {
      out.ints(k, j);
      out.num(field.time.time(k));
      out.num(field.space.node(j));
      out.num(field.at(k, j));
      out.end_row();
    }
}

void export_solution(const BackwardSolution& sol, const std::string& path, const MetaList& meta) {
  CsvWriter out(path, meta);
  std::string columns = "slice,node,t,x,Y,Z";
  for (int a = 0; a < sol.n_atoms; ++a) columns += ",K" + std::to_string(a);
  out.header(columns);
  for (int k = 0; k < sol.time.n_slices(); ++k)
    for (int j = 0; j < sol.space.n_nodes; ++j) {
      out.ints(k, j);
      out.num(sol.time.time(k));
      out.num(sol.space.node(j));
      out.num(sol.y(k, j));
      out.num(sol.z(k, j));
      for (int a = 0; a < sol.n_atoms; ++a) out.num(sol.k(k, j, a));
      out.end_row();
    }
}

void export_gap(const ValueField& lower, const ValueField& upper,
                const std::vector<double>& gap, const std::string& path, const MetaList& meta) {
  CsvWriter out(path, meta);
  out.header("slice,node,t,x,W,U,gap");
  for (int j = 0; j < lower.space.n_nodes; ++j) {
    out.ints(0, j);
    out.num(lower.time.time(0));
    out.num(lower.space.node(j));
    out.num(lower.at(0, j));
    out.num(upper.at(0, j));
    out.num(gap[j]);
    out.end_row();
  }
}

CsvTable import_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path + " for reading");

  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t");
          const auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        table.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      } else {
        // Last non-metadata comment line names the columns.
        table.columns.clear();
        std::stringstream ss(body);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
          const auto b = cell.find_first_not_of(" \t");
          const auto e = cell.find_last_not_of(" \t");
          table.columns.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ": malformed numeric cell '" + cell + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace isaacs
