#pragma once

#include <cstdint>
#include <vector>

#include "wepadim/config.hpp"
#include "wepadim/gaussian.hpp"
#include "wepadim/sample_source.hpp"
#include "wepadim/scoring.hpp"
#include "wepadim/wavelet.hpp"

namespace wepadim {

/// Maps feature stacks to model embeddings for one configuration.
class Embedder {
 public:
  explicit Embedder(ModelConfig config);

  EmbeddingMap operator()(const FeatureStack& stack) const;
  const ModelConfig& config() const noexcept { return config_; }

 private:
  ModelConfig config_;
  WaveletFamily family_;
};

/// Embeds `source[indices...]` in parallel; output order follows `indices`.
std::vector<EmbeddingMap> embed_samples(const SampleSource& source, const Embedder& embedder,
                                        std::size_t begin, std::size_t end, int threads);

/// Streams the whole source through the embedder into one accumulator,
/// `batch` images at a time, in index order.
MomentAccumulator accumulate_source(const SampleSource& train, const Embedder& embedder, int threads,
                                    std::size_t batch = 16);

/// Training phase: moments over every sample, then finalize with
/// config.wavelet.cov_reg.
PatchGaussianModel fit_model(const SampleSource& train, const ModelConfig& config, int threads = 1);

/// Inference for one image: embedding, Mahalanobis map, postprocess with
/// the model's sigma.
AnomalyResult score_image(const PatchGaussianModel& model, const FeatureStack& stack, int threads = 1);

struct ClassMetrics {
  double image_auc = 0.0;
  double pixel_auc = 0.0;
  std::vector<double> image_scores;
};

/// Image AUC of max-scores against labels and pixel AUC pooled over every
/// pixel of every test image. `masks[i]` is the H x W {0,1} ground truth.
ClassMetrics evaluate_maps(const std::vector<Tensor>& raw_maps, const std::vector<Tensor>& masks,
                           const std::vector<Label>& labels, ImageSize input_size, double sigma,
                           int threads = 1);

/// Scores every test sample with `model` and evaluates both AUCs.
ClassMetrics evaluate_model(const SampleSource& test, const PatchGaussianModel& model, int threads = 1);

}  // namespace wepadim
