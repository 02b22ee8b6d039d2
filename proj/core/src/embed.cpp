#include "wepadim/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wepadim/dwt.hpp"
#include "wepadim/error.hpp"
#include "wepadim/hash.hpp"
#include "wepadim/rng.hpp"

namespace wepadim {
namespace {

struct AxisWeights {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::vector<double> frac;
};

AxisWeights axis_weights(std::size_t in, std::size_t out) {
  AxisWeights w;
  w.lo.resize(out);
  w.hi.resize(out);
  w.frac.resize(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t d = 0; d < out; ++d) {
    double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    w.lo[d] = i0;
    w.hi[d] = std::min(i0 + 1, in - 1);
    w.frac[d] = src - static_cast<double>(i0);
  }
  return w;
}

void resize_plane(std::span<const double> in, std::size_t h, std::size_t w, const AxisWeights& ys,
                  const AxisWeights& xs, std::span<double> out, std::size_t oh, std::size_t ow) {
  for (std::size_t y = 0; y < oh; ++y) {
    const double* r0 = in.data() + ys.lo[y] * w;
    const double* r1 = in.data() + ys.hi[y] * w;
    const double fy = ys.frac[y];
    double* dst = out.data() + y * ow;
    for (std::size_t x = 0; x < ow; ++x) {
      const double fx = xs.frac[x];
      const double top = r0[xs.lo[x]] * (1.0 - fx) + r0[xs.hi[x]] * fx;
      const double bottom = r1[xs.lo[x]] * (1.0 - fx) + r1[xs.hi[x]] * fx;
      dst[x] = top * (1.0 - fy) + bottom * fy;
    }
  }
  (void)h;
}

// Copies (resizing when needed) all channels of `band` into `out` starting at
// channel `offset`.
void place_channels(const Tensor& band, ImageSize target, Tensor& out, std::size_t offset) {
  const std::size_t c = band.extent(0);
  const std::size_t h = band.extent(1);
  const std::size_t w = band.extent(2);
  if (h == target.height && w == target.width) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const auto src = band.plane(ch);
      std::copy(src.begin(), src.end(), out.plane(offset + ch).begin());
    }
    return;
  }
  const AxisWeights ys = axis_weights(h, target.height);
  const AxisWeights xs = axis_weights(w, target.width);
  for (std::size_t ch = 0; ch < c; ++ch) {
    resize_plane(band.plane(ch), h, w, ys, xs, out.plane(offset + ch), target.height, target.width);
  }
}

}  // namespace

std::vector<LayerChannels> layer_channels(const FeatureStack& stack) {
  std::vector<LayerChannels> out;
  for (const auto& l : stack.layers) out.push_back({l.name, l.tensor.extent(0)});
  return out;
}

ChannelLayout wavelet_channel_layout(const std::vector<LayerChannels>& layers, const SubbandSet& subbands) {
  ChannelLayout layout;
  for (const auto& layer : layers) {
    for (const Subband s : subbands.members()) {
      for (std::size_t c = 0; c < layer.channels; ++c) layout.push_back({layer.name, s, c});
    }
  }
  return layout;
}

std::string layout_hash(const ChannelLayout& layout) {
  std::string text;
  text.reserve(layout.size() * 16);
  for (const auto& tag : layout) {
    text += tag.layer;
    text += '|';
    text += tag.subband ? std::string(to_string(*tag.subband)) : std::string("RAW");
    text += '|';
    text += std::to_string(tag.channel);
    text += '\n';
  }
  return hex64(fnv1a64(text));
}

ImageSize embedding_grid(const FeatureStack& stack, const WaveletFamily& family, int level) {
  if (stack.layers.empty()) fail(ErrorKind::size, "feature stack has no layers");
  const Tensor& first = stack.layers.front().tensor;
  require_rank(first, 3, "feature layer");
  return dwt_output_size({first.extent(1), first.extent(2)}, family.length(), level);
}

EmbeddingMap build_embedding(const FeatureStack& stack, const WaveletFamily& family, int level,
                             const SubbandSet& subbands) {
  const ImageSize target = embedding_grid(stack, family, level);
  EmbeddingMap map;
  map.target_size = target;
  map.channel_layout = wavelet_channel_layout(layer_channels(stack), subbands);
  map.data = Tensor::zeros({map.channel_layout.size(), target.height, target.width});

  std::size_t offset = 0;
  for (const auto& layer : stack.layers) {
    require_rank(layer.tensor, 3, "feature layer");
    const SubbandPyramid pyr = dwt2d(layer.tensor, family, level);
    const DetailBands& coarsest = pyr.details.back();
    for (const Subband s : subbands.members()) {
      const Tensor* band = nullptr;
      switch (s) {
        case Subband::LL: band = &pyr.ll; break;
        case Subband::LH: band = &coarsest.lh; break;
        case Subband::HL: band = &coarsest.hl; break;
        case Subband::HH: band = &coarsest.hh; break;
      }
      place_channels(*band, target, map.data, offset);
      offset += band->extent(0);
    }
  }
  return map;
}

Tensor bilinear_resize(const Tensor& input, ImageSize target) {
  if (target.height == 0 || target.width == 0) fail(ErrorKind::shape, "resize target must be non-empty");
  if (input.rank() == 2) {
    Tensor as3({1, input.extent(0), input.extent(1)},
               std::vector<double>(input.values().begin(), input.values().end()));
    Tensor out = bilinear_resize(as3, target);
    return Tensor({target.height, target.width},
                  std::vector<double>(out.values().begin(), out.values().end()));
  }
  require_rank(input, 3, "bilinear_resize input");
  if (input.extent(1) == 0 || input.extent(2) == 0) fail(ErrorKind::shape, "resize input must be non-empty");
  if (input.extent(1) == target.height && input.extent(2) == target.width) return input;
  Tensor out = Tensor::zeros({input.extent(0), target.height, target.width});
  place_channels(input, target, out, 0);
  return out;
}

RandomSelection make_random_selection(std::uint64_t seed, std::size_t total_channels, std::size_t dims) {
  if (dims == 0 || dims > total_channels) {
    fail(ErrorKind::config, "random selection of " + std::to_string(dims) + " out of " +
                                std::to_string(total_channels) + " channels");
  }
  std::vector<std::size_t> perm(total_channels);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < dims; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total_channels - i));
    std::swap(perm[i], perm[j]);
  }
  RandomSelection sel{seed, dims, std::vector<std::size_t>(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(dims))};
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel;
}

ChannelLayout random_channel_layout(const std::vector<LayerChannels>& layers, const RandomSelection& selection) {
  ChannelLayout raw;
  for (const auto& layer : layers) {
    for (std::size_t c = 0; c < layer.channels; ++c) raw.push_back({layer.name, std::nullopt, c});
  }
  if (selection.indices.empty() ||
      std::adjacent_find(selection.indices.begin(), selection.indices.end(),
                         std::greater_equal<>()) != selection.indices.end()) {
    fail(ErrorKind::config, "random selection indices must be non-empty and strictly increasing");
  }
  ChannelLayout out;
  for (const std::size_t idx : selection.indices) {
    if (idx >= raw.size()) {
      fail(ErrorKind::config, "random selection index " + std::to_string(idx) + " out of range for " +
                                  std::to_string(raw.size()) + " channels");
    }
    out.push_back(raw[idx]);
  }
  return out;
}

EmbeddingMap random_baseline_embedding(const FeatureStack& stack, const RandomSelection& selection) {
  if (stack.layers.empty()) fail(ErrorKind::size, "feature stack has no layers");
  const auto layers = layer_channels(stack);
  EmbeddingMap map;
  map.channel_layout = random_channel_layout(layers, selection);
  const Tensor& first = stack.layers.front().tensor;
  map.target_size = {first.extent(1), first.extent(2)};
  map.data = Tensor::zeros({selection.indices.size(), map.target_size.height, map.target_size.width});

  // Map each selected global index to (layer, channel) and resize lazily per layer.
  std::size_t out_ch = 0;
  std::size_t layer_begin = 0;
  for (const auto& layer : stack.layers) {
    const std::size_t c = layer.tensor.extent(0);
    std::vector<std::size_t> picked;
    while (out_ch + picked.size() < selection.indices.size() &&
           selection.indices[out_ch + picked.size()] < layer_begin + c) {
      picked.push_back(selection.indices[out_ch + picked.size()] - layer_begin);
    }
    if (!picked.empty()) {
      Tensor subset = Tensor::zeros({picked.size(), layer.tensor.extent(1), layer.tensor.extent(2)});
      for (std::size_t k = 0; k < picked.size(); ++k) {
        const auto src = layer.tensor.plane(picked[k]);
        std::copy(src.begin(), src.end(), subset.plane(k).begin());
      }
      place_channels(subset, map.target_size, map.data, out_ch);
      out_ch += picked.size();
    }
    layer_begin += c;
  }
  return map;
}

}  // namespace wepadim
