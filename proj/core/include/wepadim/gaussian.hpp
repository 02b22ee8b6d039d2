#pragma once

#include <span>
#include <vector>

#include "wepadim/config.hpp"
#include "wepadim/embed.hpp"
#include "wepadim/manifest.hpp"
#include "wepadim/tensor.hpp"

namespace wepadim {

/// Per-location first and second raw moments of embedding vectors.
///
/// The second moment keeps only the upper triangle, packed row-major
/// (P * D * (D + 1) / 2 values), so it is symmetric by construction. Two
/// accumulators over disjoint image sets merge by adding their fields.
class MomentAccumulator {
 public:
  MomentAccumulator(ImageSize grid, std::size_t dims);

  ImageSize grid() const noexcept { return grid_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t locations() const noexcept { return grid_.height * grid_.width; }
  std::size_t count() const noexcept { return count_; }

  std::span<const double> sum(std::size_t location) const;
  std::span<const double> outer_upper(std::size_t location) const;

  void add(const EmbeddingMap& embedding);

  /// Adds every embedding in index order. Work is split over locations, so
  /// the result is bitwise identical to calling add() sequentially for any
  /// thread count.
  void add_all(std::span<const EmbeddingMap> embeddings, int threads);

  void merge(const MomentAccumulator& other);

  friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;

 private:
  void check(const EmbeddingMap& e) const;

  ImageSize grid_;
  std::size_t dims_ = 0;
  std::size_t packed_ = 0;
  std::size_t count_ = 0;
  std::vector<double> sum_;
  std::vector<double> outer_;
};

/// Functional form: returns `acc` with `embedding` added.
MomentAccumulator accumulate(MomentAccumulator acc, const EmbeddingMap& embedding);

/// Fitted per-location Gaussians: means (P x D) and lower Cholesky factors
/// (P x D x D, upper triangle zero) of Sigma = C + epsilon * I.
struct PatchGaussians {
  ImageSize grid;
  std::size_t dims = 0;
  Tensor means;
  Tensor chol;
  double epsilon = 0.0;
  std::size_t sample_count = 0;

  std::size_t locations() const noexcept { return grid.height * grid.width; }
};

/// mu = sum / N, C = (outer - N mu mu^T) / (N - 1), Sigma = C + eps I,
/// factorized by Cholesky at every location. Needs N >= 2; a non positive
/// definite Sigma raises a numerical error naming the location.
PatchGaussians finalize(const MomentAccumulator& acc, double epsilon, int threads = 1);

/// In-place lower Cholesky of a dense row-major n x n matrix. Returns
/// false when a pivot is not safely positive.
bool cholesky_lower(std::span<double> matrix, std::size_t n);

/// Squared Mahalanobis distance per location via forward substitution
/// L z = f - mu; returns an H' x W' map of ||z||^2.
Tensor mahalanobis_map(const PatchGaussians& gaussians, const EmbeddingMap& embedding, int threads = 1);

/// A fitted model with the provenance needed to validate later inputs.
struct PatchGaussianModel {
  ModelConfig config;
  std::vector<LayerChannels> layers;
  ChannelLayout channel_layout;
  ImageSize input_size;
  PatchGaussians gaussians;
};

/// Throws a model-compatibility error unless `embedding` matches the
/// model's grid, dimension and channel layout.
Tensor mahalanobis_map(const PatchGaussianModel& model, const EmbeddingMap& embedding, int threads = 1);

}  // namespace wepadim
