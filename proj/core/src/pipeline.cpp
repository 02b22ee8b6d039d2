#include "wepadim/pipeline.hpp"

#include <algorithm>
#include <cstdint>

#include "wepadim/error.hpp"
#include "wepadim/metrics.hpp"
#include "wepadim/model_io.hpp"
#include "wepadim/parallel.hpp"

namespace wepadim {

Embedder::Embedder(ModelConfig config) : config_(std::move(config)) {
  config_.wavelet.validate();
  family_ = filter_bank(config_.wavelet.wavelet);
}

EmbeddingMap Embedder::operator()(const FeatureStack& stack) const {
  if (config_.method == EmbeddingMethod::random) return random_baseline_embedding(stack, config_.random);
  return build_embedding(stack, family_, config_.wavelet.level, config_.wavelet.subbands);
}

std::vector<EmbeddingMap> embed_samples(const SampleSource& source, const Embedder& embedder,
                                        std::size_t begin, std::size_t end, int threads) {
  std::vector<EmbeddingMap> out(end - begin);
  parallel_for(end - begin, threads, [&](std::size_t k) { out[k] = embedder(source.features(begin + k)); });
  return out;
}

MomentAccumulator accumulate_source(const SampleSource& train, const Embedder& embedder, int threads,
                                    std::size_t batch) {
  if (train.size() == 0) fail(ErrorKind::insufficient_data, "training split is empty");
  batch = std::max<std::size_t>(1, batch);
  std::vector<EmbeddingMap> first = embed_samples(train, embedder, 0, std::min(batch, train.size()), threads);
  MomentAccumulator acc(first.front().target_size, first.front().dims());
  acc.add_all(first, threads);
  for (std::size_t begin = first.size(); begin < train.size(); begin += batch) {
    const std::size_t end = std::min(begin + batch, train.size());
    const auto chunk = embed_samples(train, embedder, begin, end, threads);
    acc.add_all(chunk, threads);
  }
  return acc;
}

PatchGaussianModel fit_model(const SampleSource& train, const ModelConfig& config, int threads) {
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.label(i) != Label::normal) {
      fail(ErrorKind::manifest, "training sample '" + train.id(i) + "' is not normal");
    }
  }
  const Embedder embedder(config);
  const MomentAccumulator acc = accumulate_source(train, embedder, threads);

  PatchGaussianModel model;
  model.config = config;
  const FeatureStack probe = train.features(0);
  model.layers = layer_channels(probe);
  model.config.wavelet.layers.clear();
  for (const auto& l : model.layers) model.config.wavelet.layers.push_back(l.name);
  model.channel_layout = layout_for(model.config, model.layers);
  model.input_size = train.input_size();
  model.gaussians = finalize(acc, config.wavelet.cov_reg, threads);
  return model;
}

AnomalyResult score_image(const PatchGaussianModel& model, const FeatureStack& stack, int threads) {
  const Embedder embedder(model.config);
  const EmbeddingMap e = embedder(stack);
  return postprocess(mahalanobis_map(model, e, threads), stack.input_size, model.config.wavelet.sigma,
                     stack.image_id);
}

ClassMetrics evaluate_maps(const std::vector<Tensor>& raw_maps, const std::vector<Tensor>& masks,
                           const std::vector<Label>& labels, ImageSize input_size, double sigma,
                           int threads) {
  const std::size_t n = raw_maps.size();
  if (masks.size() != n || labels.size() != n) fail(ErrorKind::shape, "maps, masks and labels differ in count");
  ClassMetrics m;
  m.image_scores.resize(n);
  std::vector<AucAccumulator> pixel(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const AnomalyResult r = postprocess(raw_maps[i], input_size, sigma);
    m.image_scores[i] = r.image_score;
    const auto mask = masks[i].values();
    if (mask.size() != r.full_map.size()) fail(ErrorKind::shape, "mask size differs from input size");
    std::vector<std::uint8_t> truth(mask.size());
    for (std::size_t k = 0; k < mask.size(); ++k) truth[k] = mask[k] > 0.5 ? 1 : 0;
    pixel[i].add(r.full_map.values(), truth);
  });
  AucAccumulator pooled;
  for (const auto& p : pixel) pooled.merge(p);
  std::vector<std::uint8_t> image_labels(n);
  for (std::size_t i = 0; i < n; ++i) image_labels[i] = labels[i] == Label::anomalous ? 1 : 0;
  m.image_auc = roc_auc(m.image_scores, image_labels);
  m.pixel_auc = pooled.auc();
  return m;
}

ClassMetrics evaluate_model(const SampleSource& test, const PatchGaussianModel& model, int threads) {
  const Embedder embedder(model.config);
  const std::size_t n = test.size();
  std::vector<Tensor> raw(n);
  std::vector<Tensor> masks(n);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EmbeddingMap e = embedder(test.features(i));
    raw[i] = mahalanobis_map(model, e, threads);
    masks[i] = test.mask(i);
    labels[i] = test.label(i);
  }
  return evaluate_maps(raw, masks, labels, test.input_size(), model.config.wavelet.sigma, threads);
}

}  // namespace wepadim
