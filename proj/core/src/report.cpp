#include "wepadim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

std::string fixed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string signed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%+.4f", v);
  return buf;
}

std::string p_text(double p) {
  if (std::isnan(p)) return "n/a";
  if (p < 1e-4) return "<0.0001";
  return fixed4(p);
}

// Joins at most `limit` items, marking the rest with "...".
std::string join_list(const std::vector<std::string>& items, std::size_t limit) {
  std::string s;
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
    if (i) s += ", ";
    s += items[i];
  }
  if (items.size() > limit) s += ", ...";
  return s;
}

std::size_t display_width(const std::string& s) {
  // Count UTF-8 code points rather than bytes.
  std::size_t n = 0;
  for (const unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

std::string short_backbone(const std::string& name) {
  const std::string prefix = "efficientnet-";
  if (name.rfind(prefix, 0) == 0) return "Eff-" + name.substr(prefix.size());
  return name;
}

std::string render_table(const TextTable& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], display_width(row[i]));
  };
  widen(t.header);
  for (const auto& r : t.rows) widen(r);
  if (t.footer.size() > 1) {
    // The footer's trailing cell is free text and may overhang.
    widen(std::vector<std::string>(t.footer.begin(), t.footer.end() - 1));
  }

  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
      s += row[i];
      if (i + 1 < row.size()) s += std::string(width[i] - display_width(row[i]) + 2, ' ');
    }
    return s + '\n';
  };
  std::size_t total = 0;
  for (const auto w : width) total += w;
  total += width.empty() ? 0 : 2 * (width.size() - 1);
  const std::string rule = std::string(total, '-') + '\n';

  std::string out;
  if (!t.title.empty()) out += t.title + '\n';
  out += line(t.header);
  out += rule;
  for (const auto& r : t.rows) out += line(r);
  if (!t.footer.empty()) {
    out += rule;
    out += line(t.footer);
  }
  return out;
}

TextTable backbone_best_table(const std::vector<SweepRecord>& records, Metric primary) {
  const bool image = primary == Metric::image_auc;
  TextTable t;
  t.title = image ? "Best average image AUC configuration by backbone"
                  : "Best average pixel AUC configuration by backbone";
  t.header = {"Backbone",
              image ? "Avg. Image AUC" : "Avg. Pixel AUC",
              image ? "Avg. Pixel AUC" : "Avg. Image AUC",
              "Wavelet",
              "Level",
              "Subbands",
              "Sigma",
              "Cov. Reg.",
              "Classes"};
  for (const auto& b : best_by_backbone(records, primary)) {
    t.rows.push_back({b.backbone, fixed4(b.mean_primary), fixed4(b.mean_secondary), b.config.wavelet,
                      std::to_string(b.config.level), b.config.subbands.key(), format_param(b.config.sigma),
                      format_param(b.config.cov_reg), std::to_string(b.classes)});
  }
  return t;
}

TextTable subband_table(const std::vector<SweepRecord>& records) {
  TextTable t;
  t.title = "Performance by subband combination";
  t.header = {"Subbands", "Image mean", "Image std", "Pixel mean", "Pixel std", "N"};
  for (const auto& s : aggregate_by_subband(records)) {
    t.rows.push_back({s.subbands, fixed4(s.image_mean), fixed4(s.image_std), fixed4(s.pixel_mean),
                      fixed4(s.pixel_std), std::to_string(s.count)});
  }
  return t;
}

TextTable impact_report_table(const std::vector<SweepRecord>& records) {
  TextTable t;
  t.title = "Component impact (with vs without)";
  t.header = {"Component", "Metric", "Mean with", "Mean without", "Difference", "p (Welch)", "N with", "N without"};
  for (const Metric m : {Metric::image_auc, Metric::pixel_auc}) {
    for (const Subband b : {Subband::LL, Subband::LH, Subband::HL, Subband::HH}) {
      try {
        const ImpactRow r = component_impact(records, b, m);
        t.rows.push_back({std::string(to_string(b)), std::string(to_string(m)), fixed4(r.mean_with),
                          fixed4(r.mean_without), signed4(r.difference), p_text(r.p_value),
                          std::to_string(r.n_with), std::to_string(r.n_without)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_metric) throw;
        t.rows.push_back({std::string(to_string(b)), std::string(to_string(m)), "n/a", "n/a", "n/a", "n/a", "", ""});
      }
    }
  }
  return t;
}

TextTable per_class_table(const std::vector<SweepRecord>& records, Metric primary) {
  const bool image = primary == Metric::image_auc;
  const BestPerClass best = best_per_class(records, primary, other_metric(primary));
  TextTable t;
  t.title = image ? "Best configuration per class (image AUC, pixel AUC breaks ties)"
                  : "Best configuration per class (pixel AUC, image AUC breaks ties)";
  t.header = {"Class",     "Image AUC", "Pixel AUC", "Backbone(s)",  "Wavelet(s)",
              "Level(s)",  "Subband(s)", "Sigma(s)", "Cov.Reg.(s)", "# Cfgs"};
  for (const auto& row : best.rows) {
    std::vector<std::string> backbones;
    for (const auto& b : row.backbones) backbones.push_back(short_backbone(b));
    t.rows.push_back({row.class_name, fixed4(row.best.image_auc), fixed4(row.best.pixel_auc),
                      join_list(backbones, 3), join_list(row.wavelets, 99), join_list(row.levels, 99),
                      join_list(row.subbands, 2), join_list(row.sigmas, 99), join_list(row.cov_regs, 99),
                      std::to_string(row.tied)});
  }
  if (!best.rows.empty()) {
    const double img = image ? best.mean_primary : best.mean_secondary;
    const double pix = image ? best.mean_secondary : best.mean_primary;
    t.footer = {"Average", fixed4(img), fixed4(pix),
                image ? "(average of best image AUCs; their pixel AUCs averaged)"
                      : "(average of best pixel AUCs; their image AUCs averaged)"};
  }
  return t;
}

std::vector<ReportSection> build_report(const std::vector<SweepRecord>& records) {
  std::vector<ReportSection> s;
  s.push_back({"backbone-best", {backbone_best_table(records, Metric::image_auc),
                                 backbone_best_table(records, Metric::pixel_auc)}});
  s.push_back({"subband-aggregate", {subband_table(records)}});
  s.push_back({"component-impact", {impact_report_table(records)}});
  s.push_back({"per-class-best", {per_class_table(records, Metric::image_auc),
                                  per_class_table(records, Metric::pixel_auc)}});
  return s;
}

std::string render_report(const std::vector<ReportSection>& sections) {
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i) out += '\n';
    out += "== " + sections[i].name + " ==\n";
    for (std::size_t k = 0; k < sections[i].tables.size(); ++k) {
      if (k) out += '\n';
      out += render_table(sections[i].tables[k]);
    }
  }
  return out;
}

}  // namespace wepadim
