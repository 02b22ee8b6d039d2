#include "wepadim/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "wepadim/embed.hpp"
#include "wepadim/error.hpp"

namespace wepadim {
namespace {

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::config, "gaussian kernel needs sigma > 0");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (auto& v : k) v /= total;
  return k;
}

Tensor gaussian_blur(const Tensor& map, double sigma) {
  require_rank(map, 2, "gaussian_blur input");
  if (sigma == 0.0) return map;
  const std::vector<double> k = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
  const std::size_t h = map.extent(0);
  const std::size_t w = map.extent(1);
  if (h == 0 || w == 0) return map;

  Tensor tmp = Tensor::zeros({h, w});
  std::vector<std::size_t> idx(w * k.size());
  for (std::size_t x = 0; x < w; ++x) {
    for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
      idx[x * k.size() + static_cast<std::size_t>(t + radius)] =
          reflect_index(static_cast<std::ptrdiff_t>(x) + t, w);
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    const double* row = map.data() + y * w;
    double* dst = tmp.data() + y * w;
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      const std::size_t* ix = idx.data() + x * k.size();
      for (std::size_t t = 0; t < k.size(); ++t) s += k[t] * row[ix[t]];
      dst[x] = s;
    }
  }

  Tensor out = Tensor::zeros({h, w});
  for (std::size_t y = 0; y < h; ++y) {
    double* dst = out.data() + y * w;
    for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
      const std::size_t sy = reflect_index(static_cast<std::ptrdiff_t>(y) + t, h);
      const double kt = k[static_cast<std::size_t>(t + radius)];
      const double* src = tmp.data() + sy * w;
      for (std::size_t x = 0; x < w; ++x) dst[x] += kt * src[x];
    }
  }
  return out;
}

AnomalyResult postprocess(const Tensor& raw_map, ImageSize input_size, double sigma, std::string image_id) {
  require_rank(raw_map, 2, "raw anomaly map");
  if (input_size.height < raw_map.extent(0) || input_size.width < raw_map.extent(1)) {
    fail(ErrorKind::shape, "input size is smaller than the raw anomaly map");
  }
  if (!(sigma >= 0.0)) fail(ErrorKind::config, "sigma must be >= 0");
  AnomalyResult r;
  r.image_id = std::move(image_id);
  r.raw_map = raw_map;
  r.full_map = gaussian_blur(bilinear_resize(raw_map, input_size), sigma);
  const auto v = r.full_map.values();
  r.image_score = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  return r;
}

Greymap quantize_heatmap(const Tensor& map, std::optional<HeatmapRange> range) {
  require_rank(map, 2, "heatmap");
  Greymap g;
  g.height = map.extent(0);
  g.width = map.extent(1);
  g.maxval = 65535;
  g.pixels.assign(map.size(), 0);
  const auto v = map.values();
  if (v.empty()) return g;
  HeatmapRange r;
  if (range) {
    r = *range;
  } else {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    r = {*lo, *hi};
  }
  if (!(r.hi > r.lo)) return g;
  const double scale = 65535.0 / (r.hi - r.lo);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = std::round((v[i] - r.lo) * scale);
    g.pixels[i] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
  }
  return g;
}

void export_heatmap(const AnomalyResult& result, const std::filesystem::path& path,
                    std::optional<HeatmapRange> range) {
  write_pgm(quantize_heatmap(result.full_map, range), path);
}

}  // namespace wepadim
