#include "wepadim/gaussian.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "wepadim/error.hpp"
#include "wepadim/parallel.hpp"
#include "wepadim/wavelet.hpp"

namespace wepadim {

void WaveletConfig::validate() const {
  filter_bank(wavelet);
  if (level < 1) fail(ErrorKind::config, "level must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(ErrorKind::config, "sigma must be >= 0");
  if (!(cov_reg >= 0.0) || !std::isfinite(cov_reg)) fail(ErrorKind::config, "cov_reg must be >= 0");
}

MomentAccumulator::MomentAccumulator(ImageSize grid, std::size_t dims)
    : grid_(grid),
      dims_(dims),
      packed_(dims * (dims + 1) / 2),
      sum_(grid.height * grid.width * dims, 0.0),
      outer_(grid.height * grid.width * packed_, 0.0) {
  if (dims == 0 || grid.height == 0 || grid.width == 0) {
    fail(ErrorKind::shape, "moment accumulator needs a non-empty grid and dimension");
  }
}

std::span<const double> MomentAccumulator::sum(std::size_t location) const {
  return std::span<const double>(sum_).subspan(location * dims_, dims_);
}

std::span<const double> MomentAccumulator::outer_upper(std::size_t location) const {
  return std::span<const double>(outer_).subspan(location * packed_, packed_);
}

void MomentAccumulator::check(const EmbeddingMap& e) const {
  if (e.target_size != grid_ || e.dims() != dims_ || e.data.rank() != 3 ||
      e.data.extent(0) != dims_) {
    fail(ErrorKind::shape, "embedding " + std::to_string(e.dims()) + "x" +
                               std::to_string(e.target_size.height) + "x" +
                               std::to_string(e.target_size.width) +
                               " does not match accumulator " + std::to_string(dims_) + "x" +
                               std::to_string(grid_.height) + "x" + std::to_string(grid_.width));
  }
}

void MomentAccumulator::add(const EmbeddingMap& embedding) {
  add_all(std::span<const EmbeddingMap>(&embedding, 1), 1);
}

void MomentAccumulator::add_all(std::span<const EmbeddingMap> embeddings, int threads) {
  for (const auto& e : embeddings) check(e);
  const std::size_t p_count = locations();
  const std::size_t d = dims_;
  parallel_for(p_count, threads, [&](std::size_t p) {
    std::vector<double> f(d);
    double* s = sum_.data() + p * d;
    double* o = outer_.data() + p * packed_;
    for (const auto& e : embeddings) {
      const double* src = e.data.data();
      for (std::size_t i = 0; i < d; ++i) f[i] = src[i * p_count + p];
      std::size_t k = 0;
      for (std::size_t i = 0; i < d; ++i) {
        s[i] += f[i];
        const double fi = f[i];
        for (std::size_t j = i; j < d; ++j) o[k++] += fi * f[j];
      }
    }
  });
  count_ += embeddings.size();
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.grid_ != grid_ || other.dims_ != dims_) {
    fail(ErrorKind::shape, "cannot merge accumulators of different shapes");
  }
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
  for (std::size_t i = 0; i < outer_.size(); ++i) outer_[i] += other.outer_[i];
  count_ += other.count_;
}

MomentAccumulator accumulate(MomentAccumulator acc, const EmbeddingMap& embedding) {
  acc.add(embedding);
  return acc;
}

bool cholesky_lower(std::span<double> a, std::size_t n) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  const double tol = 16.0 * static_cast<double>(n) * DBL_EPSILON * max_diag;
  for (std::size_t i = 0; i < n; ++i) {
    double* row_i = a.data() + i * n;
    for (std::size_t j = 0; j <= i; ++j) {
      const double* row_j = a.data() + j * n;
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
      if (j == i) {
        if (!(s > tol) || !std::isfinite(s)) return false;
        row_i[i] = std::sqrt(s);
      } else {
        row_i[j] = s / row_j[j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) row_i[j] = 0.0;
  }
  return true;
}

PatchGaussians finalize(const MomentAccumulator& acc, double epsilon, int threads) {
  if (acc.count() < 2) {
    fail(ErrorKind::insufficient_data, "need at least 2 training samples, got " + std::to_string(acc.count()));
  }
  if (!(epsilon >= 0.0)) fail(ErrorKind::config, "epsilon must be >= 0");
  const std::size_t d = acc.dims();
  const std::size_t p_count = acc.locations();
  const auto n = static_cast<double>(acc.count());

  PatchGaussians g;
  g.grid = acc.grid();
  g.dims = d;
  g.epsilon = epsilon;
  g.sample_count = acc.count();
  g.means = Tensor::zeros({p_count, d});
  g.chol = Tensor::zeros({p_count, d, d});

  std::vector<std::size_t> failed(p_count, 0);
  parallel_for(p_count, threads, [&](std::size_t p) {
    const auto s = acc.sum(p);
    const auto o = acc.outer_upper(p);
    double* mu = g.means.data() + p * d;
    for (std::size_t i = 0; i < d; ++i) mu[i] = s[i] / n;
    std::span<double> m(g.chol.data() + p * d * d, d * d);
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        const double c = (o[k++] - n * mu[i] * mu[j]) / (n - 1.0);
        m[i * d + j] = c;
        m[j * d + i] = c;
      }
      m[i * d + i] += epsilon;
    }
    if (!cholesky_lower(m, d)) failed[p] = 1;
  });
  for (std::size_t p = 0; p < p_count; ++p) {
    if (failed[p]) {
      fail(ErrorKind::numerical, "covariance at location (" + std::to_string(p / g.grid.width) + ", " +
                                     std::to_string(p % g.grid.width) +
                                     ") is not positive definite (epsilon = " + std::to_string(epsilon) + ")");
    }
  }
  return g;
}

Tensor mahalanobis_map(const PatchGaussians& g, const EmbeddingMap& e, int threads) {
  if (e.target_size != g.grid || e.dims() != g.dims || e.data.extent(0) != g.dims) {
    fail(ErrorKind::model_compatibility, "embedding shape does not match the fitted model");
  }
  const std::size_t d = g.dims;
  const std::size_t p_count = g.locations();
  Tensor out = Tensor::zeros({g.grid.height, g.grid.width});
  parallel_for(p_count, threads, [&](std::size_t p) {
    std::vector<double> z(d);
    const double* mu = g.means.data() + p * d;
    const double* l = g.chol.data() + p * d * d;
    const double* src = e.data.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double v = src[i * p_count + p] - mu[i];
      const double* row = l + i * d;
      for (std::size_t k = 0; k < i; ++k) v -= row[k] * z[k];
      z[i] = v / row[i];
      acc += z[i] * z[i];
    }
    out.values()[p] = acc;
  });
  return out;
}

Tensor mahalanobis_map(const PatchGaussianModel& model, const EmbeddingMap& embedding, int threads) {
  if (embedding.channel_layout != model.channel_layout) {
    fail(ErrorKind::model_compatibility, "embedding channel layout does not match the model");
  }
  return mahalanobis_map(model.gaussians, embedding, threads);
}

}  // namespace wepadim
