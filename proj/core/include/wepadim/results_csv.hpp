#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wepadim/config.hpp"

namespace wepadim {

/// One (class, configuration) evaluation. Failed configurations keep NaN
/// AUCs and a status other than "ok".
struct SweepRecord {
  std::string class_name;
  std::string backbone;
  WaveletConfig config;
  double image_auc = 0.0;
  double pixel_auc = 0.0;
  double fit_seconds = 0.0;
  double score_seconds = 0.0;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

/// Identifies a record within a sweep independent of its metrics.
std::string record_key(const SweepRecord& record);

inline constexpr const char* kResultsHeader =
    "class,backbone,wavelet,level,subbands,sigma,cov_reg,image_auc,pixel_auc,fit_s,score_s,status";

/// One CSV line without the trailing newline. Reals use %.17g so a
/// round trip through text is exact.
std::string format_record(const SweepRecord& record);
SweepRecord parse_record(const std::string& line);

void write_results(const std::vector<SweepRecord>& records, std::ostream& out);
void write_results(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

/// Reads complete lines only; a trailing line without a newline (an
/// interrupted append) is ignored.
std::vector<SweepRecord> read_results(std::istream& in);
std::vector<SweepRecord> read_results(const std::filesystem::path& path);

}  // namespace wepadim
