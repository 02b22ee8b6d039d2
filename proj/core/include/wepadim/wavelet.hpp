#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wepadim {

/// Orthogonal two-channel filter bank.
///
/// The highpass analysis filter is the quadrature mirror of the lowpass:
/// g[n] = (-1)^n h[L-1-n]. This is the negation of the PyWavelets
/// convention, so LH and HL coefficients differ in sign from pywt while LL
/// and HH agree. Synthesis uses the adjoint (time-reversed) filters.
struct WaveletFamily {
  std::string name;
  std::vector<double> lowpass_dec;
  std::vector<double> highpass_dec;
  std::vector<double> lowpass_rec;
  std::vector<double> highpass_rec;

  std::size_t length() const noexcept { return lowpass_dec.size(); }
};

/// One of haar, db2, db4, sym4. Anything else is a config error.
WaveletFamily filter_bank(std::string_view name);

const std::vector<std::string>& supported_wavelets();

}  // namespace wepadim
