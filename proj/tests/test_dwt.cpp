#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "wepadim/dwt.hpp"
#include "wepadim/npy.hpp"
#include "wepadim/wavelet.hpp"

namespace wepadim {
namespace {

using test::fixture;
using test::max_abs_diff;

Tensor negated(Tensor t) {
  for (double& v : t.values()) v = -v;
  return t;
}

class DwtFamily : public ::testing::TestWithParam<std::string> {};

TEST_P(DwtFamily, MatchesPywtZeroMode) {
  const std::string w = GetParam();
  const Tensor x = read_tensor(fixture("dwt_input.npy"));
  const SubbandPyramid p = dwt2d(x, filter_bank(w), 2);
  ASSERT_EQ(p.details.size(), 2u);
  // pywt's tabulated sym4 taps are ~8e-13 off the exact filter
  const double tol = w == "sym4" ? 1e-10 : 1e-12;
  EXPECT_LT(max_abs_diff(p.ll, read_tensor(fixture("dwt_" + w + "_ll2.npy"))), tol);
  for (int j = 1; j <= 2; ++j) {
    const std::string pre = "dwt_" + w + "_l" + std::to_string(j) + "_";
    const DetailBands& d = p.details[j - 1];
    // pywt's highpass is the negation of ours: LH and HL flip sign, HH does not.
    EXPECT_LT(max_abs_diff(d.lh, negated(read_tensor(fixture(pre + "ch.npy")))), tol) << w << " level " << j;
    EXPECT_LT(max_abs_diff(d.hl, negated(read_tensor(fixture(pre + "cv.npy")))), tol) << w << " level " << j;
    EXPECT_LT(max_abs_diff(d.hh, read_tensor(fixture(pre + "cd.npy"))), tol) << w << " level " << j;
  }
}

TEST_P(DwtFamily, PerfectReconstruction) {
  const WaveletFamily f = filter_bank(GetParam());
  for (int level : {1, 2}) {
    for (const Shape& shape : {Shape{3, 56, 56}, Shape{2, 17, 23}}) {
      const Tensor x = test::random_tensor(shape, 40 + level);
      const Tensor back = idwt2d(dwt2d(x, f, level), f, {shape[1], shape[2]});
      EXPECT_LT(max_abs_diff(back, x), 1e-8) << GetParam() << " J=" << level;
    }
  }
}

TEST_P(DwtFamily, FiltersAreOrthonormal) {
  const WaveletFamily f = filter_bank(GetParam());
  const std::size_t L = f.length();
  ASSERT_EQ(L % 2, 0u);
  for (std::size_t shift = 0; shift < L; shift += 2) {
    double hh = 0.0, gg = 0.0, hg = 0.0;
    for (std::size_t n = 0; n + shift < L; ++n) {
      hh += f.lowpass_dec[n] * f.lowpass_dec[n + shift];
      gg += f.highpass_dec[n] * f.highpass_dec[n + shift];
      hg += f.lowpass_dec[n] * f.highpass_dec[n + shift];
    }
    EXPECT_NEAR(hh, shift == 0 ? 1.0 : 0.0, 1e-12);
    EXPECT_NEAR(gg, shift == 0 ? 1.0 : 0.0, 1e-12);
    EXPECT_NEAR(hg, 0.0, 1e-12);
  }
  for (std::size_t n = 0; n < L; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    EXPECT_EQ(f.highpass_dec[n], sign * f.lowpass_dec[L - 1 - n]);
  }
}

// Away from the zero-padded border a constant input has no detail energy and
// LL = 2^J c. Level-J coefficient k reads input samples within
// (2^J - 1)(L - 1) + 1 of 2^J k, so "interior" keeps that distance from both
// edges.
TEST_P(DwtFamily, ConstantInputInterior) {
  const WaveletFamily f = filter_bank(GetParam());
  const double c = 1.75;
  const std::size_t n = 64;
  Tensor x = Tensor::zeros({1, n, n});
  for (double& v : x.values()) v = c;
  for (int level : {1, 2}) {
    const SubbandPyramid p = dwt2d(x, f, level);
    const std::size_t scale = std::size_t{1} << level;
    const std::size_t reach = (scale - 1) * (f.length() - 1);
    const std::size_t out = p.ll.extent(1);
    std::size_t checked = 0;
    for (std::size_t k = 0; k < out; ++k) {
      if (scale * k + scale - 1 < reach || scale * k + scale - 1 >= n) continue;
      for (std::size_t m = 0; m < out; ++m) {
        if (scale * m + scale - 1 < reach || scale * m + scale - 1 >= n) continue;
        ++checked;
        EXPECT_NEAR(p.ll(0, k, m), std::pow(2.0, level) * c, 1e-12);
        const DetailBands& top = p.details.back();
        EXPECT_NEAR(top.lh(0, k, m), 0.0, 1e-12);
        EXPECT_NEAR(top.hl(0, k, m), 0.0, 1e-12);
        EXPECT_NEAR(top.hh(0, k, m), 0.0, 1e-12);
      }
    }
    EXPECT_GT(checked, 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, DwtFamily, ::testing::Values("haar", "db2", "db4", "sym4"));

TEST(Dwt, HaarTwoByTwoClosedForm) {
  const double a = 1.0, b = 2.0, c = 3.0, d = 5.0;
  const Tensor x({1, 2, 2}, {a, b, c, d});
  const SubbandPyramid p = dwt2d(x, filter_bank("haar"), 1);
  ASSERT_EQ(p.ll.shape(), (Shape{1, 1, 1}));
  EXPECT_NEAR(p.ll.values()[0], (a + b + c + d) / 2.0, 1e-12);
  // g = (h1, -h0) applied as a convolution: each detail is "second minus first"
  const DetailBands& dt = p.details[0];
  EXPECT_NEAR(dt.hl.values()[0], (b - a + d - c) / 2.0, 1e-12);
  EXPECT_NEAR(dt.lh.values()[0], (c + d - a - b) / 2.0, 1e-12);
  EXPECT_NEAR(dt.hh.values()[0], (a - b - c + d) / 2.0, 1e-12);
}

TEST(Dwt, OutputLengths) {
  EXPECT_EQ(dwt_output_length(56, 2), 28u);
  EXPECT_EQ(dwt_output_length(56, 4), 29u);
  EXPECT_EQ(dwt_output_length(56, 8), 31u);
  EXPECT_EQ(dwt_output_length(7, 2), 4u);
  EXPECT_EQ(dwt_output_size({56, 28}, 8, 2), (ImageSize{19, 12}));
  EXPECT_EQ(test::error_kind([] { dwt_output_size({4, 4}, 8, 1); }), ErrorKind::size);
  const Tensor x = read_tensor(fixture("dwt_input.npy"));
  const SubbandPyramid p = dwt2d(x, filter_bank("db4"), 2);
  EXPECT_EQ(p.ll.shape(), (Shape{3, 19, 19}));
  EXPECT_EQ(p.details[0].hh.shape(), (Shape{3, 31, 31}));
}

TEST(Dwt, Sym4AgreesWithPywtTaps) {
  const std::vector<double> pywt_dec_lo = {-0.07576571478927333, -0.02963552764599851, 0.49761866763201545,
                                           0.8037387518059161,   0.29785779560527736,  -0.09921954357684722,
                                           -0.012603967262037833, 0.0322231006040427};
  const WaveletFamily f = filter_bank("sym4");
  double highpass_dc = 0.0;
  for (std::size_t n = 0; n < 8; ++n) {
    EXPECT_NEAR(f.lowpass_dec[n], pywt_dec_lo[n], 1e-12);
    highpass_dc += f.highpass_dec[n];
  }
  EXPECT_LT(std::fabs(highpass_dc), 1e-15);
}

TEST(Dwt, UnknownFamilyIsConfigError) {
  EXPECT_EQ(test::error_kind([] { filter_bank("coif1"); }), ErrorKind::config);
  EXPECT_EQ(supported_wavelets(), (std::vector<std::string>{"haar", "db2", "db4", "sym4"}));
}

}  // namespace
}  // namespace wepadim
