#pragma once

#include <string>
#include <vector>

#include "wepadim/embed.hpp"
#include "wepadim/subband.hpp"

namespace wepadim {

/// One point of the hyperparameter grid.
struct WaveletConfig {
  std::string wavelet = "haar";
  int level = 1;
  SubbandSet subbands = SubbandSet({Subband::LL, Subband::LH, Subband::HL});
  double sigma = 2.0;    // anomaly-map smoothing in pixels; 0 disables the blur
  double cov_reg = 0.01; // epsilon added to the covariance diagonal
  std::vector<std::string> layers;

  /// Throws a config error for an unknown wavelet, level < 1, sigma < 0
  /// or cov_reg < 0.
  void validate() const;

  friend bool operator==(const WaveletConfig&, const WaveletConfig&) = default;
};

enum class EmbeddingMethod { wavelet, random };

/// Everything needed to turn a feature stack into a model embedding.
struct ModelConfig {
  EmbeddingMethod method = EmbeddingMethod::wavelet;
  WaveletConfig wavelet;
  RandomSelection random;  // used when method == random
};

}  // namespace wepadim
