#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wepadim/manifest.hpp"
#include "wepadim/pgm.hpp"
#include "wepadim/tensor.hpp"

namespace wepadim {

struct AnomalyResult {
  std::string image_id;
  Tensor raw_map;     // H' x W' squared Mahalanobis distances
  Tensor full_map;    // input_H x input_W, upsampled then smoothed
  double image_score = 0.0;  // max of full_map
};

/// Normalized 1D Gaussian taps over [-ceil(4 sigma), ceil(4 sigma)].
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur of an H x W map with half-sample symmetric
/// ("reflect") borders. sigma == 0 returns the input unchanged.
Tensor gaussian_blur(const Tensor& map, double sigma);

/// Bilinear upsampling of the raw map to `input_size`, Gaussian smoothing,
/// and the image score as the maximum of the smoothed map.
AnomalyResult postprocess(const Tensor& raw_map, ImageSize input_size, double sigma,
                          std::string image_id = {});

/// Heatmap normalization: per-image [min, max] when `range` is empty,
/// otherwise the fixed [lo, hi].
struct HeatmapRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Linear quantization to 16-bit samples; a degenerate range yields zeros.
Greymap quantize_heatmap(const Tensor& map, std::optional<HeatmapRange> range);

/// Writes a 16-bit P5 PGM of `result.full_map`.
void export_heatmap(const AnomalyResult& result, const std::filesystem::path& path,
                    std::optional<HeatmapRange> range = std::nullopt);

}  // namespace wepadim
