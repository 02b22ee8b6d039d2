#include "wepadim/sample_source.hpp"

#include "wepadim/error.hpp"

namespace wepadim {

ManifestSource::ManifestSource(CorpusManifest manifest) : manifest_(std::move(manifest)) {
  validate_manifest(manifest_);
}

FeatureStack ManifestSource::features(std::size_t i) const {
  return load_feature_stack(manifest_, manifest_.entries.at(i).id);
}

Tensor ManifestSource::mask(std::size_t i) const {
  return load_mask(manifest_, manifest_.entries.at(i).id);
}

MemorySource::MemorySource(std::string class_name, ImageSize input_size,
                           std::vector<MemorySample> samples)
    : class_name_(std::move(class_name)), input_size_(input_size), samples_(std::move(samples)) {
  for (auto& s : samples_) {
    validate_feature_stack(s.features);
    if (s.label == Label::anomalous && s.mask.size() == 0) {
      fail(ErrorKind::manifest, "anomalous sample '" + s.features.image_id + "' has no mask");
    }
    if (s.mask.size() != 0 &&
        (s.mask.rank() != 2 || s.mask.extent(0) != input_size_.height ||
         s.mask.extent(1) != input_size_.width)) {
      fail(ErrorKind::manifest, "mask of '" + s.features.image_id + "' does not match input size");
    }
  }
}

Tensor MemorySource::mask(std::size_t i) const {
  const auto& s = samples_.at(i);
  if (s.mask.size() == 0) return Tensor::zeros({input_size_.height, input_size_.width});
  return s.mask;
}

}  // namespace wepadim
