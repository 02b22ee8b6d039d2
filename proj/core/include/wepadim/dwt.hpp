#pragma once

#include <vector>

#include "wepadim/manifest.hpp"
#include "wepadim/tensor.hpp"
#include "wepadim/wavelet.hpp"

namespace wepadim {

/// Detail subbands of one level. Label "AB": filter A along width, B along
/// height. lh is the horizontal detail, hl the vertical, hh the diagonal.
struct DetailBands {
  Tensor lh;
  Tensor hl;
  Tensor hh;
};

struct SubbandPyramid {
  int level = 0;
  Tensor ll;                         // C x H_J x W_J
  std::vector<DetailBands> details;  // details[j-1] holds level j (j = 1 is finest)
};

/// Per-axis coefficient count under zero padding: floor((n + L - 1) / 2).
std::size_t dwt_output_length(std::size_t n, std::size_t filter_length) noexcept;

/// Spatial size after `level` recursive decompositions of an (h, w) map.
/// Throws a size error when an axis is shorter than the filter at any level.
ImageSize dwt_output_size(ImageSize input, std::size_t filter_length, int level);

/// Separable multi-level 2D DWT applied independently to every channel of
/// a C x H x W tensor, zero-padded at the borders.
SubbandPyramid dwt2d(const Tensor& input, const WaveletFamily& family, int level);

/// Inverse of dwt2d. `original_size` is the spatial size of the tensor
/// that was decomposed.
Tensor idwt2d(const SubbandPyramid& pyramid, const WaveletFamily& family, ImageSize original_size);

}  // namespace wepadim
