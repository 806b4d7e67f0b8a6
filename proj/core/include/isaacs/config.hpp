#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isaacs/errors.hpp"

namespace isaacs {

/// Line-oriented configuration document:
///
///   # comment
///   [section]
///   key = value            # numbers, lists, or "quoted expressions"
///   atoms = -1, 1          # comma-separated list
///
/// Section and key order is preserved for reporting; the digest is taken
/// over a canonicalized (sorted) rendering so formatting does not matter.
class ConfigDoc {
public:
  static ConfigDoc from_file(const std::string& path);
  static ConfigDoc from_text(const std::string& text, std::string origin = "<memory>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  /// Raw value as written (quotes included). Missing key raises ConfigError.
  const std::string& raw(const std::string& section, const std::string& key) const;

  /// Value with surrounding double quotes stripped (if present).
  std::string str(const std::string& section, const std::string& key) const;

  double num(const std::string& section, const std::string& key) const;
  double num_or(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key) const;
  int int_or(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> num_list(const std::string& section, const std::string& key) const;

  /// Insert or replace one value; creates the section if needed.
  /// Used for command line overrides, so the digest tracks the override.
  void set(const std::string& section, const std::string& key, std::string value);

  std::vector<std::string> section_names() const;
  std::vector<std::string> keys(const std::string& section) const;

  /// 64-bit FNV-1a over the canonicalized document, as 16 hex digits.
  /// Stable across whitespace, comments, and declaration order.
  std::string digest() const;

  const std::string& origin() const { return origin_; }

private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };

  const Section* find_section(const std::string& name) const;
  const std::string* find(const std::string& section, const std::string& key) const;

  std::vector<Section> sections_;
  std::string origin_;
};

}  // namespace isaacs
