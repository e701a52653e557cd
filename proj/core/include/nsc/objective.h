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

#ifndef NSC_OBJECTIVE_H_
#define NSC_OBJECTIVE_H_

#include <cmath>
#include <vector>

#include "nsc/error.h"
#include "nsc/framing.h"
#include "nsc/tensor.h"

namespace nsc {

// Loss weights. The first three are constants; entropy is the dynamic
// weight the bitrate controller adjusts between epochs.
struct LossWeights {
  double mse = 30.0;
  double perceptual = 5.0;
  double quantization = 10.0;
  double entropy = 0.5;
};

template <typename T>
struct LossReport {
  T mse = T(0);
  T perceptual = T(0);
  T quantization_penalty = T(0);
  T entropy_bits = T(0);
  T total = T(0);
};

// Soft assignments for a flat run of symbols: row i is the probability
// vector of symbol i over num_bins quantization bins.
template <typename T>
struct SoftAssignments {
  int num_symbols = 0;
  int num_bins = 0;
  std::vector<T> values;

  SoftAssignments() = default;
  SoftAssignments(int symbols, int bins)
      : num_symbols(symbols),
        num_bins(bins),
        values(static_cast<size_t>(symbols) * bins, T(0)) {}

  T* Row(int i) { return values.data() + static_cast<size_t>(i) * num_bins; }
  const T* Row(int i) const {
    return values.data() + static_cast<size_t>(i) * num_bins;
  }
};

// Mean squared difference over every element.
template <typename T>
T MseLoss(const Tensor<T>& x, const Tensor<T>& y) {
  if (!x.SameShape(y)) {
    throw Error(ErrorKind::kLengthMismatch, "mse operands differ in shape");
  }
  double acc = 0.0;
  for (size_t i = 0; i < x.values.size(); ++i) {
    const double d = static_cast<double>(y.values[i]) - x.values[i];
    acc += d * d;
  }
  return static_cast<T>(acc / static_cast<double>(x.values.size()));
}

// Accumulates scale * d(mse)/dy = scale * 2 (y - x) / n into gy.
template <typename T>
void MseLossBackward(const Tensor<T>& x, const Tensor<T>& y, T scale,
                     Tensor<T>* gy) {
  if (!x.SameShape(y) || !gy->SameShape(y)) {
    throw Error(ErrorKind::kLengthMismatch, "mse backward shape");
  }
  const T factor = scale * T(2) / static_cast<T>(x.values.size());
  for (size_t i = 0; i < x.values.size(); ++i) {
    gy->values[i] += factor * (y.values[i] - x.values[i]);
  }
}

// Mean over symbols of (sum_j sqrt(c_ij) - 1): zero exactly when every
// assignment is one-hot, positive otherwise.
template <typename T>
T QuantizationPenalty(const SoftAssignments<T>& c) {
  double acc = 0.0;
  for (int i = 0; i < c.num_symbols; ++i) {
    const T* row = c.Row(i);
    double s = 0.0;
    for (int j = 0; j < c.num_bins; ++j) {
      s += std::sqrt(std::max(static_cast<double>(row[j]), 0.0));
    }
    acc += s - 1.0;
  }
  return static_cast<T>(acc / static_cast<double>(c.num_symbols));
}

// d/dc sqrt(c) diverges at zero, so the gradient is evaluated with c
// floored at 1e-12.
template <typename T>
void QuantizationPenaltyBackward(const SoftAssignments<T>& c, T scale,
                                 SoftAssignments<T>* gc) {
  const T factor = scale / static_cast<T>(c.num_symbols);
  for (int i = 0; i < c.num_symbols; ++i) {
    const T* row = c.Row(i);
    T* grow = gc->Row(i);
    for (int j = 0; j < c.num_bins; ++j) {
      const T v = std::max(row[j], static_cast<T>(1e-12));
      grow[j] += factor * T(0.5) / std::sqrt(v);
    }
  }
}

// Histogram h: the mean of all soft assignments in the minibatch.
template <typename T>
std::vector<T> MeanAssignment(const SoftAssignments<T>& c) {
  if (c.num_symbols < 1) {
    throw Error(ErrorKind::kInvalidArgument, "empty minibatch");
  }
  std::vector<double> h(c.num_bins, 0.0);
  for (int i = 0; i < c.num_symbols; ++i) {
    const T* row = c.Row(i);
    for (int j = 0; j < c.num_bins; ++j) h[j] += row[j];
  }
  std::vector<T> out(c.num_bins);
  for (int j = 0; j < c.num_bins; ++j) {
    out[j] = static_cast<T>(h[j] / c.num_symbols);
  }
  return out;
}

// Shannon entropy of h in bits, with 0 log 0 := 0 (the floor sits inside
// the log only).
template <typename T>
T EntropyBits(const std::vector<T>& h) {
  double bits = 0.0;
  for (const T& p : h) {
    const double clamped = std::max(static_cast<double>(p), 1e-12);
    bits -= static_cast<double>(p) * std::log2(clamped);
  }
  return static_cast<T>(bits);
}

// Backpropagates scale * d(EntropyBits(MeanAssignment(c)))/dc into gc.
template <typename T>
void EntropyBackward(const SoftAssignments<T>& c, const std::vector<T>& h,
                     T scale, SoftAssignments<T>* gc) {
  const double ln2 = std::log(2.0);
  std::vector<T> dh(c.num_bins);
  for (int j = 0; j < c.num_bins; ++j) {
    const double p = static_cast<double>(h[j]);
    double g = -std::log2(std::max(p, 1e-12));
    if (p > 1e-12) g -= 1.0 / ln2;
    dh[j] = static_cast<T>(g);
  }
  const T factor = scale / static_cast<T>(c.num_symbols);
  for (int i = 0; i < c.num_symbols; ++i) {
    T* grow = gc->Row(i);
    for (int j = 0; j < c.num_bins; ++j) grow[j] += factor * dh[j];
  }
}

// bitrate = windows/sec * symbols/window * bits/symbol. With the default
// framing that is (16000 / 480) * 256 * bits.
inline double BitrateEstimate(double bits_per_symbol,
                              const FrameConfig& frame = {},
                              int sample_rate = 16000,
                              int symbols_per_window = 256) {
  const double windows_per_sec =
      static_cast<double>(sample_rate) / frame.Hop();
  return windows_per_sec * symbols_per_window * bits_per_symbol;
}

// Assembles the weighted total. With quantization off (training stage 1)
// only the distortion terms contribute.
template <typename T>
LossReport<T> TotalLoss(T mse, T perceptual, T quantization_penalty,
                        T entropy_bits, const LossWeights& weights,
                        bool quantization_on) {
  LossReport<T> report;
  report.mse = mse;
  report.perceptual = perceptual;
  report.quantization_penalty = quantization_on ? quantization_penalty : T(0);
  report.entropy_bits = quantization_on ? entropy_bits : T(0);
  report.total = static_cast<T>(weights.mse) * report.mse +
                 static_cast<T>(weights.perceptual) * report.perceptual;
  if (quantization_on) {
    report.total += static_cast<T>(weights.quantization) *
                        report.quantization_penalty +
                    static_cast<T>(weights.entropy) * report.entropy_bits;
  }
  return report;
}

}  // namespace nsc

#endif  // NSC_OBJECTIVE_H_
