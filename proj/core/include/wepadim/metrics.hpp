#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wepadim {

/// Exact ROC AUC over a stream of (score, label) chunks.
///
/// Each chunk is sorted and collapsed into runs of equal score holding
/// positive/negative counts; runs merge by score. Memory is bounded by the
/// number of distinct scores, and accumulators over disjoint chunks merge.
/// The result is the Mann-Whitney statistic with average ranks for ties.
class AucAccumulator {
 public:
  void add(std::span<const double> scores, std::span<const std::uint8_t> labels);
  void merge(const AucAccumulator& other);

  std::uint64_t positives() const noexcept { return positives_; }
  std::uint64_t negatives() const noexcept { return negatives_; }
  std::size_t distinct_scores() const noexcept { return runs_.size(); }

  /// Throws an undefined-metric error unless both classes are present.
  double auc() const;

 private:
  struct Run {
    double score;
    std::uint64_t pos;
    std::uint64_t neg;
  };
  void merge_runs(std::vector<Run>&& incoming);

  std::vector<Run> runs_;
  std::uint64_t positives_ = 0;
  std::uint64_t negatives_ = 0;
};

/// Labels are 0 (normal) or 1 (anomalous).
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace wepadim
