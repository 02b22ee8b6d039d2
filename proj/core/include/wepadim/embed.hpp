#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wepadim/manifest.hpp"
#include "wepadim/subband.hpp"
#include "wepadim/tensor.hpp"
#include "wepadim/wavelet.hpp"

namespace wepadim {

/// Provenance of one embedding channel. `subband` is empty for raw
/// (random-baseline) channels.
struct ChannelTag {
  std::string layer;
  std::optional<Subband> subband;
  std::size_t channel = 0;

  friend bool operator==(const ChannelTag&, const ChannelTag&) = default;
};

using ChannelLayout = std::vector<ChannelTag>;

struct LayerChannels {
  std::string name;
  std::size_t channels = 0;
};

std::vector<LayerChannels> layer_channels(const FeatureStack& stack);

/// Layers outermost (earliest first), then subbands in canonical order,
/// then original channel index. Its length is sum_l |S| * C_l.
ChannelLayout wavelet_channel_layout(const std::vector<LayerChannels>& layers, const SubbandSet& subbands);

/// Stable hex digest of a layout, stored with fitted models.
std::string layout_hash(const ChannelLayout& layout);

/// Wavelet-enhanced embedding, D_W x H' x W'.
struct EmbeddingMap {
  Tensor data;
  ChannelLayout channel_layout;
  ImageSize target_size;

  std::size_t dims() const noexcept { return channel_layout.size(); }
  std::size_t locations() const noexcept { return target_size.height * target_size.width; }
};

/// Per-layer level-`level` DWT, selection of `subbands` (for level > 1 the
/// detail bands come from the coarsest level, next to its LL), per-layer
/// concatenation, bilinear alignment to the first layer's post-DWT size and
/// concatenation across layers.
EmbeddingMap build_embedding(const FeatureStack& stack, const WaveletFamily& family, int level,
                             const SubbandSet& subbands);

/// Post-DWT grid of the earliest layer; the spatial size every embedding of
/// this configuration has.
ImageSize embedding_grid(const FeatureStack& stack, const WaveletFamily& family, int level);

/// Bilinear resampling of a C x h x w (or h x w) tensor with the half-pixel
/// convention: src = (dst + 0.5) * (in / out) - 0.5, clamped to the valid
/// range. Same-size input is returned unchanged.
Tensor bilinear_resize(const Tensor& input, ImageSize target);

/// Sorted, distinct channel indices for the random-selection baseline.
struct RandomSelection {
  std::uint64_t seed = 0;
  std::size_t dims = 0;
  std::vector<std::size_t> indices;
};

/// Seeded Fisher-Yates prefix over [0, total_channels): the first `dims`
/// positions of a partial shuffle driven by xoshiro256** seeded with
/// SplitMix64(seed), then sorted.
RandomSelection make_random_selection(std::uint64_t seed, std::size_t total_channels, std::size_t dims);

ChannelLayout random_channel_layout(const std::vector<LayerChannels>& layers, const RandomSelection& selection);

/// Original PaDiM embedding: raw layers aligned to the earliest layer's
/// size, concatenated, then gathered by `selection.indices`.
EmbeddingMap random_baseline_embedding(const FeatureStack& stack, const RandomSelection& selection);

}  // namespace wepadim
