#pragma once

#include <string>
#include <vector>

#include "wepadim/analysis.hpp"

namespace wepadim {

struct TextTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;  // optional summary row
};

/// Columns padded to their widest cell, two spaces apart, a dashed rule
/// under the header and above the footer.
std::string render_table(const TextTable& table);

struct ReportSection {
  std::string name;
  std::vector<TextTable> tables;
};

TextTable backbone_best_table(const std::vector<SweepRecord>& records, Metric primary);
TextTable subband_table(const std::vector<SweepRecord>& records);
/// Rows whose partition is empty show "n/a" instead of numbers.
TextTable impact_report_table(const std::vector<SweepRecord>& records);
TextTable per_class_table(const std::vector<SweepRecord>& records, Metric primary);

/// The four report sections: backbone-best (image and pixel), subband
/// aggregate, component impact, per-class best (image and pixel).
std::vector<ReportSection> build_report(const std::vector<SweepRecord>& records);
std::string render_report(const std::vector<ReportSection>& sections);

/// "efficientnet-b5" -> "Eff-b5"; other names unchanged.
std::string short_backbone(const std::string& name);

}  // namespace wepadim
