#include "wepadim/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "wepadim/error.hpp"
#include "wepadim/npy.hpp"
#include "wepadim/parallel.hpp"
#include "wepadim/pgm.hpp"
#include "wepadim/rng.hpp"
#include "wepadim/scoring.hpp"

namespace wepadim {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kTagTrain = 1;
constexpr std::uint64_t kTagTestNormal = 2;
constexpr std::uint64_t kTagTestAnomalous = 3;
constexpr std::uint64_t kTagDefect = 4;
constexpr std::uint64_t kTagKernel = 5;

constexpr double kBlobStd = 20.0;
constexpr double kBlobRadius = 40.0;
constexpr std::size_t kSpecklePatch = 16;
constexpr double kStripePeriod = 16.0;

std::string indexed(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
  return buf;
}

Tensor texture(const SynthSpec& spec, Rng& rng) {
  const std::size_t h = spec.image_size.height;
  const std::size_t w = spec.image_size.width;
  Tensor img = Tensor::zeros({h, w});
  if (spec.texture == Texture::smooth_noise) {
    for (auto& v : img.values()) v = rng.normal();
    img = gaussian_blur(img, 2.0);
    double mean = 0.0;
    for (const double v : img.values()) mean += v;
    mean /= static_cast<double>(img.size());
    double var = 0.0;
    for (const double v : img.values()) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(img.size()));
    for (auto& v : img.values()) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  } else {
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double noise = texture_noise_std(Texture::stripes);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        img(y, x) = std::sin(2.0 * std::numbers::pi * static_cast<double>(x) / kStripePeriod + phase) +
                    noise * rng.normal();
      }
    }
  }
  return img;
}

// Uniform position for a feature of half-extent `r` that keeps it inside
// the image when it fits.
double place(Rng& rng, std::size_t n, double r) {
  const double hi = static_cast<double>(n) - 1.0;
  if (hi >= 2.0 * r) return std::floor(rng.uniform(r, hi - r + 1.0));
  return std::floor(rng.uniform(0.0, hi + 1.0));
}

void inject(const SynthSpec& spec, std::size_t index, Tensor& image, Tensor& mask) {
  Rng rng(derive_seed(spec.seed, kTagDefect, index));
  const std::size_t h = spec.image_size.height;
  const std::size_t w = spec.image_size.width;
  const double mag = spec.magnitude();
  if (spec.anomaly_kind == AnomalyKind::lowfreq_blob) {
    const double cy = place(rng, h, kBlobRadius);
    const double cx = place(rng, w, kBlobRadius);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        const double r2 = dy * dy + dx * dx;
        if (r2 > kBlobRadius * kBlobRadius) continue;
        image(y, x) += mag * std::exp(-0.5 * r2 / (kBlobStd * kBlobStd));
        mask(y, x) = 1.0;
      }
    }
  } else {
    const std::size_t py = h > kSpecklePatch ? static_cast<std::size_t>(rng.below(h - kSpecklePatch + 1)) : 0;
    const std::size_t px = w > kSpecklePatch ? static_cast<std::size_t>(rng.below(w - kSpecklePatch + 1)) : 0;
    for (std::size_t y = py; y < std::min(h, py + kSpecklePatch); ++y) {
      for (std::size_t x = px; x < std::min(w, px + kSpecklePatch); ++x) {
        image(y, x) += (rng.next() >> 63) ? mag : -mag;
        mask(y, x) = 1.0;
      }
    }
  }
}

Tensor conv_relu(const Tensor& in, const std::vector<double>& weights, std::size_t out_channels, std::size_t k,
                 std::size_t stride) {
  const std::size_t cin = in.extent(0);
  const std::size_t h = in.extent(1);
  const std::size_t w = in.extent(2);
  const std::size_t pad = k / 2;
  const std::size_t ho = (h + 2 * pad - k) / stride + 1;
  const std::size_t wo = (w + 2 * pad - k) / stride + 1;
  Tensor out = Tensor::zeros({out_channels, ho, wo});
  for (std::size_t o = 0; o < out_channels; ++o) {
    double* dst = out.data() + o * ho * wo;
    for (std::size_t c = 0; c < cin; ++c) {
      const double* src = in.data() + c * h * w;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double wt = weights[((o * cin + c) * k + ky) * k + kx];
          for (std::size_t yo = 0; yo < ho; ++yo) {
            const std::ptrdiff_t yi = static_cast<std::ptrdiff_t>(yo * stride + ky) - static_cast<std::ptrdiff_t>(pad);
            if (yi < 0 || yi >= static_cast<std::ptrdiff_t>(h)) continue;
            const double* row = src + static_cast<std::size_t>(yi) * w;
            double* drow = dst + yo * wo;
            for (std::size_t xo = 0; xo < wo; ++xo) {
              const std::ptrdiff_t xi =
                  static_cast<std::ptrdiff_t>(xo * stride + kx) - static_cast<std::ptrdiff_t>(pad);
              if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(w)) continue;
              drow[xo] += wt * row[xi];
            }
          }
        }
      }
    }
  }
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

}  // namespace

std::string to_string(Texture t) { return t == Texture::smooth_noise ? "smooth-noise" : "stripes"; }

std::string to_string(AnomalyKind k) {
  return k == AnomalyKind::lowfreq_blob ? "lowfreq-blob" : "highfreq-speckle";
}

Texture parse_texture(const std::string& s) {
  if (s == "smooth-noise") return Texture::smooth_noise;
  if (s == "stripes") return Texture::stripes;
  fail(ErrorKind::config, "unknown texture '" + s + "'");
}

AnomalyKind parse_anomaly_kind(const std::string& s) {
  if (s == "lowfreq-blob") return AnomalyKind::lowfreq_blob;
  if (s == "highfreq-speckle") return AnomalyKind::highfreq_speckle;
  fail(ErrorKind::config, "unknown anomaly kind '" + s + "'");
}

double texture_noise_std(Texture t) noexcept { return t == Texture::smooth_noise ? 1.0 : 0.25; }

double SynthSpec::magnitude() const noexcept {
  return anomaly_magnitude.value_or(4.0 * texture_noise_std(texture));
}

void SynthSpec::validate() const {
  if (image_size.height == 0 || image_size.width == 0) fail(ErrorKind::config, "image size must be positive");
  if (n_train < 1) fail(ErrorKind::config, "n_train must be >= 1");
  if (!(magnitude() > 0.0)) fail(ErrorKind::config, "anomaly magnitude must be > 0");
}

PyramidExtractor::PyramidExtractor(std::uint64_t seed, std::vector<StageSpec> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) fail(ErrorKind::config, "extractor needs at least one stage");
  std::size_t prev = 1;
  for (const auto& s : stages_) {
    if (s.channels == 0 || s.factor == 0 || s.factor % prev != 0 || s.factor == prev) {
      fail(ErrorKind::config, "stage factors must be increasing multiples of each other");
    }
    prev = s.factor;
  }
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    const std::size_t k = kernel_size(s);
    const std::size_t fan_in = in_channels(s) * k * k;
    const double a = std::sqrt(1.0 / static_cast<double>(fan_in));
    Rng rng(derive_seed(seed, kTagKernel, s));
    std::vector<double> wts(stages_[s].channels * fan_in);
    for (auto& v : wts) v = rng.uniform(-a, a);
    weights_.push_back(std::move(wts));
  }
}

std::vector<StageSpec> PyramidExtractor::default_stages() { return {{64, 4}, {128, 8}, {256, 16}}; }

std::size_t PyramidExtractor::stride(std::size_t stage) const {
  const std::size_t prev = stage == 0 ? 1 : stages_.at(stage - 1).factor;
  return stages_.at(stage).factor / prev;
}

std::size_t PyramidExtractor::kernel_size(std::size_t stage) const { return 2 * (stride(stage) / 2) + 1; }

std::size_t PyramidExtractor::in_channels(std::size_t stage) const {
  return stage == 0 ? 1 : stages_.at(stage - 1).channels;
}

FeatureStack extract_pyramid(const Tensor& image, const PyramidExtractor& extractor, std::string image_id) {
  Tensor x;
  if (image.rank() == 2) {
    x = Tensor({1, image.extent(0), image.extent(1)}, std::vector<double>(image.values().begin(), image.values().end()));
  } else {
    require_rank(image, 3, "extractor input");
    if (image.extent(0) != 1) fail(ErrorKind::shape, "extractor input must have one channel");
    x = image;
  }
  const std::size_t h = x.extent(1);
  const std::size_t w = x.extent(2);
  const std::size_t largest = extractor.stages().back().factor;
  if (h == 0 || w == 0 || h % largest != 0 || w % largest != 0) {
    fail(ErrorKind::size, "image size " + std::to_string(h) + "x" + std::to_string(w) +
                              " is not divisible by the extractor factor " + std::to_string(largest));
  }
  FeatureStack stack;
  stack.image_id = std::move(image_id);
  stack.input_size = {h, w};
  for (std::size_t s = 0; s < extractor.stages().size(); ++s) {
    x = conv_relu(x, extractor.weights(s), extractor.stages()[s].channels, extractor.kernel_size(s),
                  extractor.stride(s));
    stack.layers.push_back({"layer" + std::to_string(s + 1), x});
  }
  return stack;
}

SynthImage generate_image(const SynthSpec& spec, Split split, bool anomalous, std::size_t index) {
  if (split == Split::train && anomalous) fail(ErrorKind::config, "training images are normal");
  const std::uint64_t tag = split == Split::train ? kTagTrain : anomalous ? kTagTestAnomalous : kTagTestNormal;
  SynthImage out;
  out.id = indexed(split == Split::train ? "train" : anomalous ? "test_anom" : "test_normal", index);
  out.label = anomalous ? Label::anomalous : Label::normal;
  Rng rng(derive_seed(spec.seed, tag, index));
  out.clean = texture(spec, rng);
  out.image = out.clean;
  out.mask = Tensor::zeros({spec.image_size.height, spec.image_size.width});
  if (anomalous) inject(spec, index, out.image, out.mask);
  return out;
}

std::vector<SynthImage> generate_images(const SynthSpec& spec, Split split, int threads) {
  spec.validate();
  const std::size_t normals = split == Split::train ? spec.n_train : spec.n_test_normal;
  const std::size_t anomalies = split == Split::train ? 0 : spec.n_test_anomalous;
  std::vector<SynthImage> out(normals + anomalies);
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = i < normals ? generate_image(spec, split, false, i) : generate_image(spec, split, true, i - normals);
  });
  return out;
}

SynthCorpus synthesize(const SynthSpec& spec, const PyramidExtractor& extractor, int threads) {
  auto build = [&](Split split) {
    const auto images = generate_images(spec, split, threads);
    std::vector<MemorySample> samples(images.size());
    parallel_for(images.size(), threads, [&](std::size_t i) {
      samples[i].features = extract_pyramid(images[i].image, extractor, images[i].id);
      samples[i].label = images[i].label;
      if (images[i].label == Label::anomalous) samples[i].mask = images[i].mask;
    });
    return MemorySource(spec.class_name, spec.image_size, std::move(samples));
  };
  return SynthCorpus{build(Split::train), build(Split::test)};
}

CorpusManifests generate_corpus(const SynthSpec& spec, const PyramidExtractor& extractor,
                                const std::filesystem::path& out_dir, int threads) {
  namespace fs = std::filesystem;
  auto write_split = [&](Split split) {
    const fs::path root = out_dir / to_string(split);
    std::error_code ec;
    fs::create_directories(root / "images", ec);
    fs::create_directories(root / "features", ec);
    if (split == Split::test) fs::create_directories(root / "masks", ec);
    if (ec) fail(ErrorKind::io, "cannot create " + root.string() + ": " + ec.message());

    const auto images = generate_images(spec, split, threads);
    CorpusManifest m;
    m.corpus_root = root;
    m.class_name = spec.class_name;
    m.split = split;
    m.input_size = spec.image_size;
    for (std::size_t s = 0; s < extractor.stages().size(); ++s) m.layers.push_back("layer" + std::to_string(s + 1));
    m.entries.resize(images.size());
    parallel_for(images.size(), threads, [&](std::size_t i) {
      const SynthImage& img = images[i];
      ManifestEntry& e = m.entries[i];
      e.id = img.id;
      e.label = img.label;
      const FeatureStack stack = extract_pyramid(img.image, extractor, img.id);
      std::error_code dir_ec;
      fs::create_directories(root / "features" / img.id, dir_ec);
      if (dir_ec) fail(ErrorKind::io, "cannot create feature directory for " + img.id);
      for (const auto& layer : stack.layers) {
        const std::string rel = "features/" + img.id + "/" + layer.name + ".npy";
        write_tensor(layer.tensor, root / rel);
        e.files[layer.name] = rel;
      }
      const std::string image_rel = "images/" + img.id + ".npy";
      write_tensor(img.image, root / image_rel);
      e.files["image"] = image_rel;
      if (img.label == Label::anomalous) {
        Greymap g;
        g.height = spec.image_size.height;
        g.width = spec.image_size.width;
        g.maxval = 255;
        g.pixels.resize(img.mask.size());
        for (std::size_t k = 0; k < img.mask.size(); ++k) g.pixels[k] = img.mask.values()[k] > 0.5 ? 255 : 0;
        const std::string mask_rel = "masks/" + img.id + ".pgm";
        write_pgm(g, root / mask_rel);
        e.mask = mask_rel;
      }
    });
    validate_manifest(m);
    write_manifest(m, root / "manifest.json");
    return m;
  };
  CorpusManifests out{write_split(Split::train), write_split(Split::test)};
  return out;
}

}  // namespace wepadim
