#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wepadim/manifest.hpp"
#include "wepadim/sample_source.hpp"
#include "wepadim/tensor.hpp"

namespace wepadim {

enum class Texture { smooth_noise, stripes };
enum class AnomalyKind { lowfreq_blob, highfreq_speckle };

std::string to_string(Texture t);
std::string to_string(AnomalyKind k);
Texture parse_texture(const std::string& s);        // "smooth-noise" | "stripes"
AnomalyKind parse_anomaly_kind(const std::string& s);  // "lowfreq-blob" | "highfreq-speckle"

/// Per-texture standard deviation of the random component: 1 for smooth
/// noise, 0.25 for stripes.
double texture_noise_std(Texture t) noexcept;

struct SynthSpec {
  std::uint64_t seed = 7;
  ImageSize image_size{224, 224};
  std::size_t n_train = 60;
  std::size_t n_test_normal = 20;
  std::size_t n_test_anomalous = 20;
  Texture texture = Texture::smooth_noise;
  AnomalyKind anomaly_kind = AnomalyKind::lowfreq_blob;
  /// Unset means 4 x texture_noise_std(texture).
  std::optional<double> anomaly_magnitude;
  std::string class_name = "synthetic";

  double magnitude() const noexcept;
  /// Config error for an empty image, zero training images or a
  /// non-positive magnitude.
  void validate() const;
};

struct StageSpec {
  std::size_t channels = 0;
  std::size_t factor = 0;  // total downsampling relative to the image
};

/// Fixed random convolutional pyramid standing in for a CNN backbone.
///
/// Stage s is a bias-free strided convolution of the previous stage
/// (the image for s = 0) followed by ReLU. Its stride is
/// factor_s / factor_{s-1}, its kernel is (2 * floor(stride / 2) + 1)^2
/// with matching zero padding, and weights are uniform(-a, a) with
/// a = sqrt(1 / fan_in), drawn from a stream derived from `seed`.
class PyramidExtractor {
 public:
  explicit PyramidExtractor(std::uint64_t seed, std::vector<StageSpec> stages = default_stages());

  /// (64, 4), (128, 8), (256, 16): ResNet-18 layer1-layer3 shapes.
  static std::vector<StageSpec> default_stages();

  const std::vector<StageSpec>& stages() const noexcept { return stages_; }
  std::size_t stride(std::size_t stage) const;
  std::size_t kernel_size(std::size_t stage) const;
  std::size_t in_channels(std::size_t stage) const;
  /// out x in x k x k weights of a stage.
  const std::vector<double>& weights(std::size_t stage) const { return weights_.at(stage); }

 private:
  std::vector<StageSpec> stages_;
  std::vector<std::vector<double>> weights_;
};

/// `image` is 1 x H x W (or H x W). Layers are named layer1, layer2, ...
/// H and W must be divisible by the largest factor.
FeatureStack extract_pyramid(const Tensor& image, const PyramidExtractor& extractor, std::string image_id = {});

struct SynthImage {
  std::string id;
  Label label = Label::normal;
  Tensor clean;  // H x W texture before any defect
  Tensor image;  // clean + defect
  Tensor mask;   // H x W {0, 1}
};

/// Image `index` of the train split (anomalous must be false), or of the
/// normal / anomalous test group. Each image draws from its own stream,
/// derived from (seed, group, index).
SynthImage generate_image(const SynthSpec& spec, Split split, bool anomalous, std::size_t index);

/// Train images, or test images with normals first, then anomalies.
std::vector<SynthImage> generate_images(const SynthSpec& spec, Split split, int threads = 1);

struct SynthCorpus {
  MemorySource train;
  MemorySource test;
};

/// In-memory corpus with extracted features.
SynthCorpus synthesize(const SynthSpec& spec, const PyramidExtractor& extractor, int threads = 1);

struct CorpusManifests {
  CorpusManifest train;
  CorpusManifest test;
};

/// Writes out_dir/{train,test}/manifest.json with images/<id>.npy,
/// features/<id>/<layer>.npy and, for anomalies, masks/<id>.pgm
/// (8-bit, 0 or 255).
CorpusManifests generate_corpus(const SynthSpec& spec, const PyramidExtractor& extractor,
                                const std::filesystem::path& out_dir, int threads = 1);

}  // namespace wepadim
