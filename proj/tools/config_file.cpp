#include "config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "wepadim/error.hpp"

namespace wepadim::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string scalar(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) fail(ErrorKind::config, where + ": empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(ErrorKind::config, where + ": unterminated string");
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> value_items(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty() || s.front() != '[') return {scalar(s, where)};
  if (s.back() != ']') fail(ErrorKind::config, where + ": unterminated list");
  std::vector<std::string> items;
  const std::string body = s.substr(1, s.size() - 2);
  if (trim(body).empty()) return items;
  std::string cur;
  bool quoted = false;
  for (const char c : body) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(scalar(cur, where));
      cur.clear();
    } else {
      cur += c;
    }
  }
  items.push_back(scalar(cur, where));
  return items;
}

}  // namespace

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::config, what + ": '" + s + "' is not a number");
}

long long parse_integer(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(ErrorKind::config, what + ": '" + s + "' is not an integer");
  }
  return v;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) fail(ErrorKind::config, where + ": bad section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorKind::config, where + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(ErrorKind::config, where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.contains(full)) fail(ErrorKind::config, where + ": duplicate key " + full);
    cfg.values_[full] = value_items(s.substr(eq + 1), where);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigFile::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, v] : values_) {
    if (!allowed.contains(key)) fail(ErrorKind::config, origin_ + ": unknown key '" + key + "'");
  }
}

std::optional<std::string> ConfigFile::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (it->second.size() != 1) fail(ErrorKind::config, origin_ + ": '" + key + "' must be a single value");
  return it->second.front();
}

std::optional<double> ConfigFile::real(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  return parse_real(*t, key);
}

std::optional<long long> ConfigFile::integer(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  return parse_integer(*t, key);
}

std::optional<bool> ConfigFile::boolean(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  if (*t == "true") return true;
  if (*t == "false") return false;
  fail(ErrorKind::config, origin_ + ": '" + key + "' must be true or false");
}

std::optional<std::vector<std::string>> ConfigFile::list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

}  // namespace wepadim::cli
