#pragma once

#include <string>
#include <vector>

#include "wepadim/manifest.hpp"

namespace wepadim {

/// Indexed access to the images of one corpus split. Implementations must
/// allow concurrent const calls.
class SampleSource {
 public:
  virtual ~SampleSource() = default;

  virtual std::size_t size() const = 0;
  virtual const std::string& class_name() const = 0;
  virtual ImageSize input_size() const = 0;
  virtual const std::string& id(std::size_t i) const = 0;
  virtual Label label(std::size_t i) const = 0;
  virtual FeatureStack features(std::size_t i) const = 0;
  /// H x W {0,1} ground truth; all zeros for normal images.
  virtual Tensor mask(std::size_t i) const = 0;
};

/// Lazily loads features and masks from a manifest on disk.
class ManifestSource final : public SampleSource {
 public:
  explicit ManifestSource(CorpusManifest manifest);

  std::size_t size() const override { return manifest_.entries.size(); }
  const std::string& class_name() const override { return manifest_.class_name; }
  ImageSize input_size() const override { return manifest_.input_size; }
  const std::string& id(std::size_t i) const override { return manifest_.entries.at(i).id; }
  Label label(std::size_t i) const override { return manifest_.entries.at(i).label; }
  FeatureStack features(std::size_t i) const override;
  Tensor mask(std::size_t i) const override;

  const CorpusManifest& manifest() const noexcept { return manifest_; }

 private:
  CorpusManifest manifest_;
};

struct MemorySample {
  FeatureStack features;
  Label label = Label::normal;
  Tensor mask;  // empty tensor means "no anomaly"
};

/// Fully in-memory corpus; used by the synthetic generator and tests.
class MemorySource final : public SampleSource {
 public:
  MemorySource(std::string class_name, ImageSize input_size, std::vector<MemorySample> samples);

  std::size_t size() const override { return samples_.size(); }
  const std::string& class_name() const override { return class_name_; }
  ImageSize input_size() const override { return input_size_; }
  const std::string& id(std::size_t i) const override { return samples_.at(i).features.image_id; }
  Label label(std::size_t i) const override { return samples_.at(i).label; }
  FeatureStack features(std::size_t i) const override { return samples_.at(i).features; }
  Tensor mask(std::size_t i) const override;

  const std::vector<MemorySample>& samples() const noexcept { return samples_; }

 private:
  std::string class_name_;
  ImageSize input_size_;
  std::vector<MemorySample> samples_;
};

}  // namespace wepadim
