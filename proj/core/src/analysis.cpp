#include "wepadim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

auto order_key(const SweepRecord& r) {
  return std::make_tuple(std::cref(r.class_name), std::cref(r.backbone), std::cref(r.config.wavelet),
                         r.config.level, r.config.subbands.bits(), r.config.sigma, r.config.cov_reg, r.image_auc,
                         r.pixel_auc);
}

bool canonical_less(const SweepRecord& a, const SweepRecord& b) { return order_key(a) < order_key(b); }

double mean(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double m) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

void add_unique(std::vector<std::string>& list, const std::string& value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

}  // namespace

std::string_view to_string(Metric m) noexcept { return m == Metric::image_auc ? "image_auc" : "pixel_auc"; }

double metric_value(const SweepRecord& r, Metric m) noexcept {
  return m == Metric::image_auc ? r.image_auc : r.pixel_auc;
}

Metric other_metric(Metric m) noexcept { return m == Metric::image_auc ? Metric::pixel_auc : Metric::image_auc; }

std::vector<SweepRecord> canonical_records(const std::vector<SweepRecord>& records) {
  std::vector<SweepRecord> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos && std::isfinite(v)) s += ".0";
  return s;
}

std::vector<SubbandStats> aggregate_by_subband(const std::vector<SweepRecord>& records) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : canonical_records(records)) {
    auto& g = groups[r.config.subbands.key()];
    g.first.push_back(r.image_auc);
    g.second.push_back(r.pixel_auc);
  }
  std::vector<SubbandStats> rows;
  for (const auto& [key, values] : groups) {
    SubbandStats s;
    s.subbands = key;
    s.count = values.first.size();
    s.image_mean = mean(values.first);
    s.image_std = std::sqrt(sample_variance(values.first, s.image_mean));
    s.pixel_mean = mean(values.second);
    s.pixel_std = std::sqrt(sample_variance(values.second, s.pixel_mean));
    rows.push_back(s);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SubbandStats& a, const SubbandStats& b) { return a.image_mean > b.image_mean; });
  return rows;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  WelchResult r;
  if (a.size() < 2 || b.size() < 2) {
    r.t = r.df = r.p_value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a, ma) / static_cast<double>(a.size());
  const double vb = sample_variance(b, mb) / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (se2 == 0.0) {
    const bool same = ma == mb;
    r.t = same ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.df = static_cast<double>(a.size() + b.size() - 2);
    r.p_value = same ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

ImpactRow component_impact(const std::vector<SweepRecord>& records, Subband component, Metric metric) {
  std::vector<double> with;
  std::vector<double> without;
  for (const auto& r : canonical_records(records)) {
    (r.config.subbands.contains(component) ? with : without).push_back(metric_value(r, metric));
  }
  if (with.empty() || without.empty()) {
    fail(ErrorKind::undefined_metric,
         "component impact of " + std::string(to_string(component)) + " needs records with and without it");
  }
  ImpactRow row;
  row.component = component;
  row.metric = metric;
  row.n_with = with.size();
  row.n_without = without.size();
  row.mean_with = mean(with);
  row.mean_without = mean(without);
  row.difference = row.mean_with - row.mean_without;
  row.p_value = welch_t_test(with, without).p_value;
  return row;
}

std::vector<ImpactRow> impact_table(const std::vector<SweepRecord>& records) {
  std::vector<ImpactRow> rows;
  for (const Metric m : {Metric::image_auc, Metric::pixel_auc}) {
    for (const Subband b : {Subband::LL, Subband::LH, Subband::HL, Subband::HH}) {
      rows.push_back(component_impact(records, b, m));
    }
  }
  return rows;
}

BestPerClass best_per_class(const std::vector<SweepRecord>& records, Metric primary, Metric tiebreak) {
  std::map<std::string, std::vector<SweepRecord>> by_class;
  for (auto& r : canonical_records(records)) by_class[r.class_name].push_back(std::move(r));

  BestPerClass table;
  table.primary = primary;
  for (auto& [name, recs] : by_class) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& r : recs) top = std::max(top, metric_value(r, primary));
    std::vector<const SweepRecord*> tied;
    for (const auto& r : recs) {
      if (metric_value(r, primary) == top) tied.push_back(&r);
    }
    std::stable_sort(tied.begin(), tied.end(), [&](const SweepRecord* a, const SweepRecord* b) {
      return metric_value(*a, tiebreak) > metric_value(*b, tiebreak);
    });
    ClassBest row;
    row.class_name = name;
    row.best = *tied.front();
    row.tied = tied.size();
    for (const SweepRecord* r : tied) {
      add_unique(row.backbones, r->backbone);
      add_unique(row.wavelets, r->config.wavelet);
      add_unique(row.levels, std::to_string(r->config.level));
      add_unique(row.subbands, r->config.subbands.key());
      add_unique(row.sigmas, format_param(r->config.sigma));
      add_unique(row.cov_regs, format_param(r->config.cov_reg));
    }
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](const ClassBest& a, const ClassBest& b) {
    return metric_value(a.best, primary) > metric_value(b.best, primary);
  });
  if (!table.rows.empty()) {
    std::vector<double> p;
    std::vector<double> s;
    for (const auto& row : table.rows) {
      p.push_back(metric_value(row.best, primary));
      s.push_back(metric_value(row.best, other_metric(primary)));
    }
    table.mean_primary = mean(p);
    table.mean_secondary = mean(s);
  }
  return table;
}

std::vector<BackboneBest> best_by_backbone(const std::vector<SweepRecord>& records, Metric primary) {
  // backbone -> configuration key -> records (canonical order keeps sums stable)
  std::map<std::string, std::map<std::tuple<std::string, int, std::uint8_t, double, double>, std::vector<SweepRecord>>>
      groups;
  for (auto& r : canonical_records(records)) {
    auto key = std::make_tuple(r.config.wavelet, r.config.level, r.config.subbands.bits(), r.config.sigma,
                               r.config.cov_reg);
    groups[r.backbone][key].push_back(std::move(r));
  }
  std::vector<BackboneBest> rows;
  for (const auto& [backbone, configs] : groups) {
    std::optional<BackboneBest> best;
    for (const auto& [key, recs] : configs) {
      std::vector<double> p;
      std::vector<double> s;
      for (const auto& r : recs) {
        p.push_back(metric_value(r, primary));
        s.push_back(metric_value(r, other_metric(primary)));
      }
      BackboneBest cand;
      cand.backbone = backbone;
      cand.config = recs.front().config;
      cand.classes = recs.size();
      cand.mean_primary = mean(p);
      cand.mean_secondary = mean(s);
      if (!best || cand.mean_primary > best->mean_primary ||
          (cand.mean_primary == best->mean_primary && cand.mean_secondary > best->mean_secondary)) {
        best = cand;
      }
    }
    rows.push_back(*best);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BackboneBest& a, const BackboneBest& b) {
    return a.mean_primary > b.mean_primary;
  });
  return rows;
}

}  // namespace wepadim
