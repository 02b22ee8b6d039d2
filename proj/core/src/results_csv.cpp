#include "wepadim/results_csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s, const std::string& line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::format, "bad number '" + s + "' in results line: " + line);
  }
}

int parse_int(const std::string& s, const std::string& line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(ErrorKind::format, "bad integer '" + s + "' in results line: " + line);
  }
  return v;
}

// Free text fields must not break the comma layout.
std::string clean(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string record_key(const SweepRecord& r) {
  return r.class_name + '|' + r.backbone + '|' + r.config.wavelet + '|' + std::to_string(r.config.level) + '|' +
         r.config.subbands.key() + '|' + real(r.config.sigma) + '|' + real(r.config.cov_reg);
}

std::string format_record(const SweepRecord& r) {
  std::string s;
  s += clean(r.class_name) + ',' + clean(r.backbone) + ',' + r.config.wavelet + ',';
  s += std::to_string(r.config.level) + ',' + r.config.subbands.key() + ',';
  s += real(r.config.sigma) + ',' + real(r.config.cov_reg) + ',';
  s += real(r.image_auc) + ',' + real(r.pixel_auc) + ',';
  s += real(r.fit_seconds) + ',' + real(r.score_seconds) + ',' + clean(r.status);
  return s;
}

SweepRecord parse_record(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 12) fail(ErrorKind::format, "results line needs 12 fields: " + line);
  SweepRecord r;
  r.class_name = f[0];
  r.backbone = f[1];
  r.config.wavelet = f[2];
  r.config.level = parse_int(f[3], line);
  r.config.subbands = SubbandSet::parse(f[4]);
  r.config.sigma = parse_real(f[5], line);
  r.config.cov_reg = parse_real(f[6], line);
  r.image_auc = parse_real(f[7], line);
  r.pixel_auc = parse_real(f[8], line);
  r.fit_seconds = parse_real(f[9], line);
  r.score_seconds = parse_real(f[10], line);
  r.status = f[11];
  return r;
}

void write_results(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
}

void write_results(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  write_results(records, out);
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

std::vector<SweepRecord> read_results(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<SweepRecord> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      if (line != kResultsHeader) fail(ErrorKind::format, "unexpected results header: " + line);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

std::vector<SweepRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  return read_results(in);
}

}  // namespace wepadim
