// Copyright 2026 The NSC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NSC_MFCC_H_
#define NSC_MFCC_H_

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "nsc/error.h"
#include "nsc/fft.h"

namespace nsc {

struct MfccConfig {
  std::array<int, 4> filterbank_sizes{8, 16, 32, 128};
  int fft_size = 512;
  int sample_rate = 16000;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  double log_floor = 1e-8;  // keeps silence finite and differentiable

  int NumBins() const { return fft_size / 2 + 1; }
};

inline double HzToMel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

inline double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular filters with centers equally spaced on the mel scale between
// mel_low_hz and mel_high_hz. Each weight is the triangle's mean value over
// the bin's frequency interval (exact piecewise-linear integral), so every
// row has positive sum even when filters are narrower than one bin
// (num_filters = 128 against 257 bins). Rows are num_filters x NumBins().
std::vector<std::vector<double>> MelFilterbank(int num_filters,
                                               const MfccConfig& config);

// MFCC pipeline at window granularity: |FFT|^2 -> mel filterbank ->
// log(max(., log_floor)) -> orthonormal DCT-II, all coefficients kept.
// Filter and DCT matrices are built once; Compute / PerceptualLoss are pure
// and safe to call concurrently on one instance.
template <typename T>
class MfccComputer {
 public:
  explicit MfccComputer(const MfccConfig& config = {}) : config_(config) {
    const int nbins = config_.NumBins();
    for (size_t bank = 0; bank < config_.filterbank_sizes.size(); ++bank) {
      const int m = config_.filterbank_sizes[bank];
      auto rows = MelFilterbank(m, config_);
      Bank b;
      b.num_filters = m;
      b.weights.resize(static_cast<size_t>(m) * nbins);
      b.support.resize(m);
      for (int f = 0; f < m; ++f) {
        int lo = nbins, hi = 0;
        for (int k = 0; k < nbins; ++k) {
          b.weights[static_cast<size_t>(f) * nbins + k] =
              static_cast<T>(rows[f][k]);
          if (rows[f][k] > 0.0) {
            lo = std::min(lo, k);
            hi = std::max(hi, k + 1);
          }
        }
        b.support[f] = {lo, hi};
      }
      // DCT-II, orthonormal: dct[k][j] = s_k cos(pi (j + 0.5) k / m).
      b.dct.resize(static_cast<size_t>(m) * m);
      for (int k = 0; k < m; ++k) {
        const double s = std::sqrt((k == 0 ? 1.0 : 2.0) / m);
        for (int j = 0; j < m; ++j) {
          b.dct[static_cast<size_t>(k) * m + j] =
              static_cast<T>(s * std::cos(M_PI * (j + 0.5) * k / m));
        }
      }
      banks_[bank] = std::move(b);
    }
  }

  const MfccConfig& config() const { return config_; }
  int NumBanks() const { return static_cast<int>(banks_.size()); }

  // Cepstral coefficients for one bank; the window is zero-padded to
  // fft_size if shorter.
  std::vector<T> Compute(const T* window, int len, int bank_index) const {
    Spectrum spec = PowerSpectrum(window, len);
    const Bank& bank = banks_.at(bank_index);
    std::vector<T> mel(bank.num_filters), logmel(bank.num_filters);
    ApplyBank(bank, spec.power.data(), mel.data(), logmel.data());
    std::vector<T> coeffs(bank.num_filters);
    ApplyDct(bank, logmel.data(), coeffs.data());
    return coeffs;
  }

  // All four banks at once.
  std::vector<std::vector<T>> ComputeAll(const T* window, int len) const {
    std::vector<std::vector<T>> out(banks_.size());
    Spectrum spec = PowerSpectrum(window, len);
    for (size_t i = 0; i < banks_.size(); ++i) {
      const Bank& bank = banks_[i];
      std::vector<T> mel(bank.num_filters), logmel(bank.num_filters);
      ApplyBank(bank, spec.power.data(), mel.data(), logmel.data());
      out[i].resize(bank.num_filters);
      ApplyDct(bank, logmel.data(), out[i].data());
    }
    return out;
  }

  // P(x, y): mean over the four banks of the mean-squared coefficient
  // difference. If grad_y is non-null, grad_scale * dP/dy is accumulated
  // into it (len entries).
  T PerceptualLoss(const T* x, const T* y, int len, T grad_scale = T(1),
                   T* grad_y = nullptr) const {
    return PerceptualLossCached(ComputeAll(x, len), y, len, grad_scale,
                                grad_y);
  }

  // Same, with the reference coefficients precomputed (they are reused
  // across epochs during training).
  T PerceptualLossCached(const std::vector<std::vector<T>>& x_coeffs,
                         const T* y, int len, T grad_scale = T(1),
                         T* grad_y = nullptr) const {
    const int nbins = config_.NumBins();
    Spectrum spec = PowerSpectrum(y, len);
    std::vector<T> gpower;
    if (grad_y != nullptr) gpower.assign(nbins, T(0));

    T loss = T(0);
    const T bank_weight = T(1) / T(banks_.size());
    for (size_t i = 0; i < banks_.size(); ++i) {
      const Bank& bank = banks_[i];
      const int m = bank.num_filters;
      std::vector<T> mel(m), logmel(m), coeffs(m);
      ApplyBank(bank, spec.power.data(), mel.data(), logmel.data());
      ApplyDct(bank, logmel.data(), coeffs.data());

      T sq = T(0);
      for (int k = 0; k < m; ++k) {
        const T d = coeffs[k] - x_coeffs[i][k];
        sq += d * d;
      }
      loss += bank_weight * sq / static_cast<T>(m);

      if (grad_y == nullptr) continue;
      // d(loss)/d(coeff_k) = 2 diff_k / (m * banks)
      std::vector<T> gcoeff(m), glogmel(m, T(0));
      for (int k = 0; k < m; ++k) {
        gcoeff[k] =
            T(2) * (coeffs[k] - x_coeffs[i][k]) * bank_weight / static_cast<T>(m);
      }
      // DCT transpose.
      for (int k = 0; k < m; ++k) {
        const T g = gcoeff[k];
        const T* row = &bank.dct[static_cast<size_t>(k) * m];
        for (int j = 0; j < m; ++j) glogmel[j] += g * row[j];
      }
      // log and filterbank transpose.
      const T floor = static_cast<T>(config_.log_floor);
      for (int f = 0; f < m; ++f) {
        if (mel[f] <= floor) continue;  // clamped branch: zero slope
        const T gmel = glogmel[f] / mel[f];
        const T* row = &bank.weights[static_cast<size_t>(f) * nbins];
        const auto [lo, hi] = bank.support[f];
        for (int k = lo; k < hi; ++k) gpower[k] += gmel * row[k];
      }
    }

    if (grad_y != nullptr) {
      PowerSpectrumBackward(spec, gpower.data(), len, grad_scale, grad_y);
    }
    return loss;
  }

 private:
  struct Bank {
    int num_filters = 0;
    std::vector<T> weights;                    // num_filters x nbins
    std::vector<std::pair<int, int>> support;  // [lo, hi) per filter
    std::vector<T> dct;                        // num_filters x num_filters
  };

  struct Spectrum {
    std::vector<std::complex<T>> fft;  // full fft_size spectrum
    std::vector<T> power;              // |X_k|^2 for k in [0, nbins)
  };

  Spectrum PowerSpectrum(const T* window, int len) const {
    const int n = config_.fft_size;
    Spectrum spec;
    spec.fft.assign(n, std::complex<T>(0));
    const int copy = std::min(len, n);
    for (int i = 0; i < copy; ++i) spec.fft[i] = std::complex<T>(window[i]);
    FftInPlace(&spec.fft);
    const int nbins = config_.NumBins();
    spec.power.resize(nbins);
    for (int k = 0; k < nbins; ++k) spec.power[k] = std::norm(spec.fft[k]);
    return spec;
  }

  // With L depending on the one-sided power bins P_k = |X_k|^2,
  // dL/dy_t = 2 Re(DFT(G)_t) where G_k = (dL/dP_k) conj(X_k) on the used
  // bins and zero elsewhere. One extra forward FFT per gradient.
  void PowerSpectrumBackward(const Spectrum& spec, const T* gpower, int len,
                             T grad_scale, T* grad_y) const {
    const int n = config_.fft_size;
    const int nbins = config_.NumBins();
    std::vector<std::complex<T>> g(n, std::complex<T>(0));
    for (int k = 0; k < nbins; ++k) {
      g[k] = gpower[k] * std::conj(spec.fft[k]);
    }
    FftInPlace(&g);
    const int copy = std::min(len, n);
    for (int t = 0; t < copy; ++t) {
      grad_y[t] += grad_scale * T(2) * g[t].real();
    }
  }

  void ApplyBank(const Bank& bank, const T* power, T* mel, T* logmel) const {
    const int nbins = config_.NumBins();
    const T floor = static_cast<T>(config_.log_floor);
    for (int f = 0; f < bank.num_filters; ++f) {
      const T* row = &bank.weights[static_cast<size_t>(f) * nbins];
      const auto [lo, hi] = bank.support[f];
      T acc = T(0);
      for (int k = lo; k < hi; ++k) acc += row[k] * power[k];
      mel[f] = acc;
      logmel[f] = std::log(std::max(acc, floor));
    }
  }

  void ApplyDct(const Bank& bank, const T* logmel, T* coeffs) const {
    const int m = bank.num_filters;
    for (int k = 0; k < m; ++k) {
      const T* row = &bank.dct[static_cast<size_t>(k) * m];
      T acc = T(0);
      for (int j = 0; j < m; ++j) acc += row[j] * logmel[j];
      coeffs[k] = acc;
    }
  }

  MfccConfig config_;
  std::array<Bank, 4> banks_;
};

}  // namespace nsc

#endif  // NSC_MFCC_H_
