#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "wepadim/results_csv.hpp"
#include "wepadim/sample_source.hpp"

namespace wepadim {

/// Cartesian hyperparameter grid. Records are produced in the order
/// wavelet, level, subbands, sigma, cov_reg (last varies fastest).
struct SweepGrid {
  std::vector<std::string> wavelets{"haar", "db2", "db4", "sym4"};
  std::vector<int> levels{1};
  std::vector<SubbandSet> subbands = SubbandSet::all_nonempty();
  std::vector<double> sigmas{2.0, 4.0, 6.0};
  std::vector<double> cov_regs{0.1, 0.01, 0.001};

  std::size_t size() const noexcept {
    return wavelets.size() * levels.size() * subbands.size() * sigmas.size() * cov_regs.size();
  }

  /// Config error for an empty axis or an invalid value on any axis.
  void validate() const;
};

/// Train and test splits of one class.
struct ClassSplits {
  const SampleSource* train = nullptr;
  const SampleSource* test = nullptr;
};

struct SweepOptions {
  std::string backbone = "synthetic";
  int threads = 1;
  /// When false, fit_s and score_s are written as 0 so that outputs of
  /// repeated runs compare byte for byte.
  bool record_timing = true;
  std::size_t batch = 16;
  /// record_key() values to skip (resumption).
  std::set<std::string> completed;
  /// Called for each new record as soon as it is final, in output order.
  std::function<void(const SweepRecord&)> on_record;
};

/// Digest of everything that determines the record set: grid axes, class
/// names and backbone tag.
std::string grid_hash(const SweepGrid& grid, const std::vector<std::string>& classes, const std::string& backbone);

/// Evaluates every (class, configuration) pair. Moments are accumulated
/// once per (wavelet, level, subbands) and reused across cov_reg values;
/// Mahalanobis maps are computed once per cov_reg and reused across sigma
/// values. A configuration that throws is recorded with a failure status
/// and the sweep continues.
std::vector<SweepRecord> sweep(const std::vector<ClassSplits>& classes, const SweepGrid& grid,
                               const SweepOptions& options = {});

/// Reference implementation: an independent fit_model + evaluate_model for
/// every configuration, no sharing.
std::vector<SweepRecord> sweep_by_refit(const std::vector<ClassSplits>& classes, const SweepGrid& grid,
                                        const SweepOptions& options = {});

}  // namespace wepadim
