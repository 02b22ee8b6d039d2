#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wepadim/results_csv.hpp"

namespace wepadim {

// All functions here ignore failed records and sort their input into a
// canonical order first, so results depend only on the set of records.

enum class Metric { image_auc, pixel_auc };

std::string_view to_string(Metric m) noexcept;
double metric_value(const SweepRecord& r, Metric m) noexcept;
Metric other_metric(Metric m) noexcept;

/// Records with status "ok" in canonical order.
std::vector<SweepRecord> canonical_records(const std::vector<SweepRecord>& records);

struct SubbandStats {
  std::string subbands;  // SubbandSet::key()
  std::size_t count = 0;
  double image_mean = 0.0;
  double image_std = 0.0;  // sample standard deviation, 0 for one record
  double pixel_mean = 0.0;
  double pixel_std = 0.0;
};

/// One row per subband set, sorted by mean image AUC descending (ties by
/// key).
std::vector<SubbandStats> aggregate_by_subband(const std::vector<SweepRecord>& records);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 0.0;  // two-sided
};

/// Welch's unequal-variance t-test. With both sample variances zero the
/// p-value is 1 for equal means and 0 otherwise; with fewer than two
/// values in a sample it is NaN.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct ImpactRow {
  Subband component = Subband::LL;
  Metric metric = Metric::image_auc;
  std::size_t n_with = 0;
  std::size_t n_without = 0;
  double mean_with = 0.0;
  double mean_without = 0.0;
  double difference = 0.0;  // mean_with - mean_without
  double p_value = 0.0;
};

/// Splits records by whether their subband set contains `component`.
/// Either side empty is an undefined-metric error.
ImpactRow component_impact(const std::vector<SweepRecord>& records, Subband component, Metric metric);

/// Every component for both metrics, metric-major.
std::vector<ImpactRow> impact_table(const std::vector<SweepRecord>& records);

struct ClassBest {
  std::string class_name;
  SweepRecord best;
  /// Number of records sharing the best primary value.
  std::size_t tied = 0;
  // Distinct parameter values over the tied records, best first.
  std::vector<std::string> backbones;
  std::vector<std::string> wavelets;
  std::vector<std::string> levels;
  std::vector<std::string> subbands;
  std::vector<std::string> sigmas;
  std::vector<std::string> cov_regs;
};

struct BestPerClass {
  Metric primary = Metric::image_auc;
  std::vector<ClassBest> rows;  // primary descending, then class name
  double mean_primary = 0.0;
  double mean_secondary = 0.0;  // of the listed records, not re-optimized
};

/// Per class, the record maximizing (primary, tiebreak). Ties are exact
/// equality of the primary value.
BestPerClass best_per_class(const std::vector<SweepRecord>& records, Metric primary, Metric tiebreak);

struct BackboneBest {
  std::string backbone;
  WaveletConfig config;
  std::size_t classes = 0;
  double mean_primary = 0.0;
  double mean_secondary = 0.0;
};

/// Per backbone, the configuration with the best class-averaged primary
/// metric (secondary breaks ties); rows sorted by that average.
std::vector<BackboneBest> best_by_backbone(const std::vector<SweepRecord>& records, Metric primary);

/// "%.1f"/"%g"-style short text used for parameter columns.
std::string format_param(double v);

}  // namespace wepadim
