#pragma once

#include <filesystem>

#include "wepadim/gaussian.hpp"

namespace wepadim {

inline constexpr int kModelFormatVersion = 1;

/// Writes a model bundle directory: means.npy (P x D f64), chol.npy
/// (P x D x D f64) and model.json (configuration, layer channels, layout
/// hash, N, epsilon, format version).
void save_model(const PatchGaussianModel& model, const std::filesystem::path& dir);

/// Reads a bundle and re-derives the channel layout with the current
/// layout algorithm; any disagreement with the stored hash, dimension or
/// payload shapes is a model-compatibility error.
PatchGaussianModel load_model(const std::filesystem::path& dir);

/// Channel layout implied by a model configuration and its layer list.
ChannelLayout layout_for(const ModelConfig& config, const std::vector<LayerChannels>& layers);

}  // namespace wepadim
