#include "isaacs/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace isaacs {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment, honouring double-quoted spans.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '_' || c == '-'))
      return false;
  return true;
}

double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || !std::isfinite(v))
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  return v;
}

}  // namespace

ConfigDoc ConfigDoc::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

ConfigDoc ConfigDoc::from_text(const std::string& text, std::string origin) {
  ConfigDoc doc;
  doc.origin_ = std::move(origin);

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Section* current = nullptr;

  auto where = [&] { return doc.origin_ + ":" + std::to_string(lineno); };

  while (std::getline(in, line)) {
    ++lineno;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where() + ": unterminated section header");
      std::string name = trim(body.substr(1, body.size() - 2));
      if (!valid_name(name)) throw ConfigError(where() + ": invalid section name '" + name + "'");
      if (doc.find_section(name))
        throw ConfigError(where() + ": duplicate section [" + name + "]");
      doc.sections_.push_back({name, {}});
      current = &doc.sections_.back();
      continue;
    }

    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where() + ": expected 'key = value' or a section header");
    if (!current) throw ConfigError(where() + ": entry before any [section] header");

    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError(where() + ": invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(where() + ": empty value for key '" + key + "'");
    for (const auto& [k, v] : current->entries)
      if (k == key)
        throw ConfigError(where() + ": duplicate key '" + key + "' in section [" +
                          current->name + "]");
    current->entries.emplace_back(std::move(key), std::move(value));
  }
  return doc;
}

const ConfigDoc::Section* ConfigDoc::find_section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

const std::string* ConfigDoc::find(const std::string& section, const std::string& key) const {
  const Section* s = find_section(section);
  if (!s) return nullptr;
  for (const auto& [k, v] : s->entries)
    if (k == key) return &v;
  return nullptr;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

void ConfigDoc::set(const std::string& section, const std::string& key, std::string value) {
  for (auto& s : sections_)
    if (s.name == section) {
      for (auto& [k, v] : s.entries)
        if (k == key) {
          v = std::move(value);
          return;
        }
      s.entries.emplace_back(key, std::move(value));
      return;
    }
  sections_.push_back({section, {{key, std::move(value)}}});
}

bool ConfigDoc::has_section(const std::string& section) const {
  return find_section(section) != nullptr;
}

const std::string& ConfigDoc::raw(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v)
    throw ConfigError(origin_ + ": missing required setting " + section + "." + key);
  return *v;
}

std::string ConfigDoc::str(const std::string& section, const std::string& key) const {
  std::string v = raw(section, key);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double ConfigDoc::num(const std::string& section, const std::string& key) const {
  return parse_double(raw(section, key), origin_ + ": " + section + "." + key);
}

double ConfigDoc::num_or(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? num(section, key) : fallback;
}

int ConfigDoc::integer(const std::string& section, const std::string& key) const {
  double v = num(section, key);
  int i = static_cast<int>(std::lround(v));
  if (static_cast<double>(i) != v)
    throw ConfigError(origin_ + ": " + section + "." + key + " must be an integer");
  return i;
}

int ConfigDoc::int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

std::vector<double> ConfigDoc::num_list(const std::string& section, const std::string& key) const {
  const std::string v = raw(section, key);
  std::vector<double> out;
  std::size_t start = 0;
  int index = 0;
  while (start <= v.size()) {
    std::size_t comma = v.find(',', start);
    std::string item = trim(comma == std::string::npos ? v.substr(start)
                                                       : v.substr(start, comma - start));
    out.push_back(parse_double(item, origin_ + ": " + section + "." + key + "[" +
                                         std::to_string(index) + "]"));
    ++index;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> ConfigDoc::section_names() const {
  std::vector<std::string> out;
  out.reserve(sections_.size());
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

std::vector<std::string> ConfigDoc::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const Section* s = find_section(section))
    for (const auto& [k, v] : s->entries) out.push_back(k);
  return out;
}

std::string ConfigDoc::digest() const {
  std::vector<std::string> lines;
  for (const auto& s : sections_)
    for (const auto& [k, v] : s.entries) lines.push_back(s.name + "." + k + "=" + v);
  std::sort(lines.begin(), lines.end());

  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](const std::string& text) {
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& l : lines) {
    feed(l);
    feed("\n");
  }

  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace isaacs
