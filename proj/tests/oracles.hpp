#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance binary. They favour the textbook formula over speed.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "test_util.hpp"
#include "wepadim/embed.hpp"
#include "wepadim/manifest.hpp"

namespace wepadim::test {

/// Three layers shaped like ResNet-18 layer1..3 for a 224 x 224 input.
inline FeatureStack resnet_stack(std::uint64_t seed) {
  FeatureStack s = random_stack({{64, 56}, {128, 28}, {256, 14}}, seed, {224, 224});
  return s;
}

/// N random embeddings on a common grid with an anonymous channel layout.
inline std::vector<EmbeddingMap> random_embeddings(std::size_t n, ImageSize grid, std::size_t dims,
                                                   std::uint64_t seed) {
  ChannelLayout layout;
  for (std::size_t c = 0; c < dims; ++c) layout.push_back({"x", std::nullopt, c});
  std::vector<EmbeddingMap> out;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor t = Tensor::zeros({dims, grid.height, grid.width});
    // correlated channels with a location-dependent offset
    for (std::size_t p = 0; p < grid.height * grid.width; ++p) {
      double shared = rng.normal();
      for (std::size_t c = 0; c < dims; ++c) {
        t.values()[c * grid.height * grid.width + p] = 3.0 + 0.1 * static_cast<double>(p) + 0.5 * shared +
                                                       (1.0 + 0.2 * static_cast<double>(c)) * rng.normal();
      }
    }
    out.push_back({std::move(t), layout, grid});
  }
  return out;
}

inline Eigen::VectorXd vector_at(const EmbeddingMap& e, std::size_t p) {
  const std::size_t d = e.dims(), np = e.locations();
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < d; ++c) v(static_cast<Eigen::Index>(c)) = e.data.values()[c * np + p];
  return v;
}

struct TwoPassFit {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;  // unbiased, without regularization
};

/// Mean first, then centred outer products.
inline TwoPassFit two_pass_fit(std::span<const EmbeddingMap> embeddings) {
  TwoPassFit fit;
  const std::size_t np = embeddings.front().locations();
  const auto n = static_cast<double>(embeddings.size());
  for (std::size_t p = 0; p < np; ++p) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(embeddings.front().dims()));
    for (const auto& e : embeddings) mu += vector_at(e, p);
    mu /= n;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(mu.size(), mu.size());
    for (const auto& e : embeddings) {
      const Eigen::VectorXd d = vector_at(e, p) - mu;
      c += d * d.transpose();
    }
    fit.means.push_back(mu);
    fit.covariances.push_back(c / (n - 1.0));
  }
  return fit;
}

/// (f - mu)^T (C + eps I)^{-1} (f - mu) with an explicit dense inverse.
inline double dense_mahalanobis(const Eigen::VectorXd& f, const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov,
                                double eps) {
  const Eigen::MatrixXd sigma = cov + eps * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  const Eigen::MatrixXd inv = sigma.inverse();
  const Eigen::VectorXd d = f - mu;
  return d.dot(inv * d);
}

/// Probability that a random positive outranks a random negative, ties half.
inline double pairwise_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace wepadim::test
