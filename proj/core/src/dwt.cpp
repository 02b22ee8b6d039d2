#include "wepadim/dwt.hpp"

#include <algorithm>
#include <span>
#include <string>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

// Analysis keeps the odd samples of the full zero-padded convolution:
//   out[i] = sum_k f[k] * x[2i + 1 - k]
// Synthesis is the exact adjoint of that operator.

void analyze_rows(std::span<const double> in, std::size_t h, std::size_t w,
                  const std::vector<double>& lo, const std::vector<double>& hi,
                  std::span<double> out_lo, std::span<double> out_hi, std::size_t m) {
  const std::size_t len = lo.size();
  for (std::size_t y = 0; y < h; ++y) {
    const double* row = in.data() + y * w;
    double* rl = out_lo.data() + y * m;
    double* rh = out_hi.data() + y * m;
    for (std::size_t i = 0; i < m; ++i) {
      double sl = 0.0;
      double sh = 0.0;
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * i + 1);
      for (std::size_t k = 0; k < len; ++k) {
        const std::ptrdiff_t src = base - static_cast<std::ptrdiff_t>(k);
        if (src < 0) break;
        if (src >= static_cast<std::ptrdiff_t>(w)) continue;
        sl += lo[k] * row[src];
        sh += hi[k] * row[src];
      }
      rl[i] = sl;
      rh[i] = sh;
    }
  }
}

void analyze_cols(std::span<const double> in, std::size_t h, std::size_t w,
                  const std::vector<double>& lo, const std::vector<double>& hi,
                  std::span<double> out_lo, std::span<double> out_hi, std::size_t m) {
  const std::size_t len = lo.size();
  std::fill(out_lo.begin(), out_lo.end(), 0.0);
  std::fill(out_hi.begin(), out_hi.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* rl = out_lo.data() + i * w;
    double* rh = out_hi.data() + i * w;
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * i + 1);
    for (std::size_t k = 0; k < len; ++k) {
      const std::ptrdiff_t src = base - static_cast<std::ptrdiff_t>(k);
      if (src < 0) break;
      if (src >= static_cast<std::ptrdiff_t>(h)) continue;
      const double* row = in.data() + static_cast<std::size_t>(src) * w;
      const double fl = lo[k];
      const double fh = hi[k];
      for (std::size_t x = 0; x < w; ++x) {
        rl[x] += fl * row[x];
        rh[x] += fh * row[x];
      }
    }
  }
}

void synthesize_rows(std::span<const double> lo_in, std::span<const double> hi_in, std::size_t h,
                     std::size_t m, const std::vector<double>& lo, const std::vector<double>& hi,
                     std::span<double> out, std::size_t n) {
  const std::size_t len = lo.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    const double* a = lo_in.data() + y * m;
    const double* d = hi_in.data() + y * m;
    double* row = out.data() + y * n;
    for (std::size_t i = 0; i < m; ++i) {
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * i + 1);
      for (std::size_t k = 0; k < len; ++k) {
        const std::ptrdiff_t dst = base - static_cast<std::ptrdiff_t>(k);
        if (dst < 0) break;
        if (dst >= static_cast<std::ptrdiff_t>(n)) continue;
        row[dst] += lo[k] * a[i] + hi[k] * d[i];
      }
    }
  }
}

void synthesize_cols(std::span<const double> lo_in, std::span<const double> hi_in, std::size_t m,
                     std::size_t w, const std::vector<double>& lo, const std::vector<double>& hi,
                     std::span<double> out, std::size_t n) {
  const std::size_t len = lo.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = lo_in.data() + i * w;
    const double* d = hi_in.data() + i * w;
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * i + 1);
    for (std::size_t k = 0; k < len; ++k) {
      const std::ptrdiff_t dst = base - static_cast<std::ptrdiff_t>(k);
      if (dst < 0) break;
      if (dst >= static_cast<std::ptrdiff_t>(n)) continue;
      double* row = out.data() + static_cast<std::size_t>(dst) * w;
      const double fl = lo[k];
      const double fh = hi[k];
      for (std::size_t x = 0; x < w; ++x) row[x] += fl * a[x] + fh * d[x];
    }
  }
}

struct SingleLevel {
  Tensor ll;
  DetailBands details;
};

SingleLevel analyze_level(const Tensor& in, const WaveletFamily& f) {
  const std::size_t c = in.extent(0);
  const std::size_t h = in.extent(1);
  const std::size_t w = in.extent(2);
  const std::size_t len = f.length();
  const std::size_t mh = dwt_output_length(h, len);
  const std::size_t mw = dwt_output_length(w, len);

  SingleLevel out{Tensor::zeros({c, mh, mw}),
                  {Tensor::zeros({c, mh, mw}), Tensor::zeros({c, mh, mw}), Tensor::zeros({c, mh, mw})}};
  std::vector<double> lo_w(h * mw);
  std::vector<double> hi_w(h * mw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    analyze_rows(in.plane(ch), h, w, f.lowpass_dec, f.highpass_dec, lo_w, hi_w, mw);
    analyze_cols(lo_w, h, mw, f.lowpass_dec, f.highpass_dec, out.ll.plane(ch),
                 out.details.lh.plane(ch), mh);
    analyze_cols(hi_w, h, mw, f.lowpass_dec, f.highpass_dec, out.details.hl.plane(ch),
                 out.details.hh.plane(ch), mh);
  }
  return out;
}

Tensor synthesize_level(const Tensor& ll, const DetailBands& d, const WaveletFamily& f, ImageSize size) {
  const std::size_t c = ll.extent(0);
  const std::size_t mh = ll.extent(1);
  const std::size_t mw = ll.extent(2);
  Tensor out = Tensor::zeros({c, size.height, size.width});
  std::vector<double> lo_w(size.height * mw);
  std::vector<double> hi_w(size.height * mw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    synthesize_cols(ll.plane(ch), d.lh.plane(ch), mh, mw, f.lowpass_dec, f.highpass_dec, lo_w,
                    size.height);
    synthesize_cols(d.hl.plane(ch), d.hh.plane(ch), mh, mw, f.lowpass_dec, f.highpass_dec, hi_w,
                    size.height);
    synthesize_rows(lo_w, hi_w, size.height, mw, f.lowpass_dec, f.highpass_dec, out.plane(ch),
                    size.width);
  }
  return out;
}

}  // namespace

std::size_t dwt_output_length(std::size_t n, std::size_t filter_length) noexcept {
  return (n + filter_length - 1) / 2;
}

ImageSize dwt_output_size(ImageSize input, std::size_t filter_length, int level) {
  if (level < 1) fail(ErrorKind::config, "decomposition level must be >= 1");
  ImageSize s = input;
  for (int j = 1; j <= level; ++j) {
    if (s.height < filter_length || s.width < filter_length) {
      fail(ErrorKind::size, "input " + std::to_string(s.height) + "x" + std::to_string(s.width) +
                                " at level " + std::to_string(j) + " is smaller than the " +
                                std::to_string(filter_length) + "-tap filter");
    }
    s = {dwt_output_length(s.height, filter_length), dwt_output_length(s.width, filter_length)};
  }
  return s;
}

SubbandPyramid dwt2d(const Tensor& input, const WaveletFamily& family, int level) {
  require_rank(input, 3, "dwt2d input");
  if (family.length() < 2 || family.highpass_dec.size() != family.length()) {
    fail(ErrorKind::config, "malformed filter bank '" + family.name + "'");
  }
  dwt_output_size({input.extent(1), input.extent(2)}, family.length(), level);

  SubbandPyramid pyr;
  pyr.level = level;
  Tensor current = input;
  for (int j = 0; j < level; ++j) {
    SingleLevel step = analyze_level(current, family);
    pyr.details.push_back(std::move(step.details));
    current = std::move(step.ll);
  }
  pyr.ll = std::move(current);
  return pyr;
}

Tensor idwt2d(const SubbandPyramid& pyramid, const WaveletFamily& family, ImageSize original_size) {
  if (pyramid.level < 1 || pyramid.details.size() != static_cast<std::size_t>(pyramid.level)) {
    fail(ErrorKind::config, "pyramid level does not match its detail count");
  }
  std::vector<ImageSize> sizes{original_size};
  for (int j = 0; j < pyramid.level; ++j) {
    sizes.push_back(dwt_output_size(sizes.back(), family.length(), 1));
  }
  const std::size_t channels = pyramid.ll.rank() == 3 ? pyramid.ll.extent(0) : 0;
  auto check = [&](const Tensor& t, ImageSize s) {
    if (t.rank() != 3 || t.extent(0) != channels || t.extent(1) != s.height || t.extent(2) != s.width) {
      fail(ErrorKind::config, "pyramid subband shape does not match family '" + family.name +
                                  "' and original size");
    }
  };
  check(pyramid.ll, sizes.back());
  for (int j = 0; j < pyramid.level; ++j) {
    const auto& d = pyramid.details[static_cast<std::size_t>(j)];
    check(d.lh, sizes[static_cast<std::size_t>(j) + 1]);
    check(d.hl, sizes[static_cast<std::size_t>(j) + 1]);
    check(d.hh, sizes[static_cast<std::size_t>(j) + 1]);
  }
  Tensor current = pyramid.ll;
  for (int j = pyramid.level - 1; j >= 0; --j) {
    current = synthesize_level(current, pyramid.details[static_cast<std::size_t>(j)], family,
                               sizes[static_cast<std::size_t>(j)]);
  }
  return current;
}

}  // namespace wepadim
