#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wepadim/tensor.hpp"

namespace wepadim {

struct ImageSize {
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct FeatureLayer {
  std::string name;
  Tensor tensor;  // C x H x W
};

/// Multi-layer features of one image, earliest (largest) layer first.
struct FeatureStack {
  std::string image_id;
  ImageSize input_size;
  std::vector<FeatureLayer> layers;
};

/// Enforces rank-3 layers, a shared dtype and non-increasing spatial size.
void validate_feature_stack(const FeatureStack& stack);

enum class Split { train, test };
enum class Label { normal, anomalous };

struct ManifestEntry {
  std::string id;
  std::map<std::string, std::string> files;  // layer name -> path relative to corpus_root
  Label label = Label::normal;
  std::optional<std::string> mask;
};

struct CorpusManifest {
  std::filesystem::path corpus_root;
  std::string class_name;
  Split split = Split::train;
  ImageSize input_size;
  std::vector<std::string> layers;
  std::vector<ManifestEntry> entries;

  const ManifestEntry& entry(const std::string& image_id) const;
};

/// Throws a manifest error on protocol violations: anomalous entries in a
/// train split, anomalous test entries without a mask, entries missing a
/// layer file.
void validate_manifest(const CorpusManifest& manifest);

/// Reads manifest.json; corpus_root becomes the file's directory.
CorpusManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

FeatureStack load_feature_stack(const CorpusManifest& manifest, const std::string& image_id);

/// Ground-truth mask as an H x W tensor of {0, 1}. Any nonzero pixel is
/// anomalous. Dimensions must equal the manifest input size.
Tensor load_mask(const CorpusManifest& manifest, const std::string& image_id);

std::string to_string(Split split);
std::string to_string(Label label);

}  // namespace wepadim
