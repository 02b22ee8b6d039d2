#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wepadim::cli {

/// Minimal TOML-style configuration: `[section]` headers and
/// `key = value` lines, where a value is a bare word or number, a quoted
/// string, or a bracketed list of those. `#` starts a comment.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  /// Config error naming the first "section.key" not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> text(const std::string& key) const;
  std::optional<double> real(const std::string& key) const;
  std::optional<long long> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  /// Scalars are returned as one-element lists.
  std::optional<std::vector<std::string>> list(const std::string& key) const;

 private:
  std::string origin_;
  std::map<std::string, std::vector<std::string>> values_;  // "section.key" -> items
};

double parse_real(const std::string& s, const std::string& what);
long long parse_integer(const std::string& s, const std::string& what);

}  // namespace wepadim::cli
