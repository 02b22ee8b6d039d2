#include "wepadim/wavelet.hpp"

#include <algorithm>
#include <string>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

// Lowpass decomposition taps in convolution order (pywt dec_lo order).
const std::vector<double> kHaar = {0.7071067811865476, 0.7071067811865476};

const std::vector<double> kDb2 = {-0.12940952255126037, 0.2241438680420134, 0.8365163037378079,
                                  0.48296291314453416};

const std::vector<double> kDb4 = {-0.010597401785069032, 0.0328830116668852,
                                  0.030841381835560764,  -0.18703481171909309,
                                  -0.027983769416859854, 0.6308807679298589,
                                  0.7148465705529157,    0.2303778133088965};

// Spectral factorization of the degree-3 Daubechies polynomial, evaluated
// at 50 digits. The commonly tabulated sym4 taps agree to 8e-13 but leave
// a highpass DC gain of about 1e-12.
const std::vector<double> kSym4 = {-0.075765714789502213,  -0.029635527646002492,
                                   0.49761866763277499,    0.80373875180513208,
                                   0.29785779560530605,    -0.099219543576633533,
                                   -0.012603967262031304,  0.032223100604051466};

WaveletFamily make_family(std::string name, const std::vector<double>& h) {
  WaveletFamily w;
  w.name = std::move(name);
  w.lowpass_dec = h;
  const std::size_t len = h.size();
  w.highpass_dec.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    w.highpass_dec[n] = sign * h[len - 1 - n];
  }
  w.lowpass_rec.assign(w.lowpass_dec.rbegin(), w.lowpass_dec.rend());
  w.highpass_rec.assign(w.highpass_dec.rbegin(), w.highpass_dec.rend());
  return w;
}

}  // namespace

const std::vector<std::string>& supported_wavelets() {
  static const std::vector<std::string> names = {"haar", "db2", "db4", "sym4"};
  return names;
}

WaveletFamily filter_bank(std::string_view name) {
  if (name == "haar") return make_family("haar", kHaar);
  if (name == "db2") return make_family("db2", kDb2);
  if (name == "db4") return make_family("db4", kDb4);
  if (name == "sym4") return make_family("sym4", kSym4);
  fail(ErrorKind::config, "unsupported wavelet '" + std::string(name) + "'");
}

}  // namespace wepadim
