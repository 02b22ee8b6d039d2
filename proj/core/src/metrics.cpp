#include "wepadim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wepadim/error.hpp"

namespace wepadim {

void AucAccumulator::add(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::shape, "score and label counts differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const double s : scores) {
    if (std::isnan(s)) fail(ErrorKind::undefined_metric, "NaN score");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<Run> runs;
  for (const std::size_t i : order) {
    if (runs.empty() || runs.back().score != scores[i]) runs.push_back({scores[i], 0, 0});
    if (labels[i]) {
      ++runs.back().pos;
      ++positives_;
    } else {
      ++runs.back().neg;
      ++negatives_;
    }
  }
  merge_runs(std::move(runs));
}

void AucAccumulator::merge(const AucAccumulator& other) {
  positives_ += other.positives_;
  negatives_ += other.negatives_;
  merge_runs(std::vector<Run>(other.runs_));
}

void AucAccumulator::merge_runs(std::vector<Run>&& incoming) {
  if (runs_.empty()) {
    runs_ = std::move(incoming);
    return;
  }
  std::vector<Run> merged;
  merged.reserve(runs_.size() + incoming.size());
  std::size_t a = 0;
  std::size_t b = 0;
  auto push = [&](const Run& r) {
    if (!merged.empty() && merged.back().score == r.score) {
      merged.back().pos += r.pos;
      merged.back().neg += r.neg;
    } else {
      merged.push_back(r);
    }
  };
  while (a < runs_.size() || b < incoming.size()) {
    if (b == incoming.size() || (a < runs_.size() && runs_[a].score <= incoming[b].score)) {
      push(runs_[a++]);
    } else {
      push(incoming[b++]);
    }
  }
  runs_ = std::move(merged);
}

double AucAccumulator::auc() const {
  if (positives_ == 0 || negatives_ == 0) {
    fail(ErrorKind::undefined_metric, "ROC AUC needs both positive and negative labels");
  }
  // Each positive beats every negative scored strictly lower and ties
  // count one half; equivalent to the average-rank Mann-Whitney form.
  double wins = 0.0;
  std::uint64_t neg_below = 0;
  for (const Run& r : runs_) {
    wins += static_cast<double>(r.pos) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(r.neg));
    neg_below += r.neg;
  }
  return wins / (static_cast<double>(positives_) * static_cast<double>(negatives_));
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  AucAccumulator acc;
  acc.add(scores, labels);
  return acc.auc();
}

}  // namespace wepadim
