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

#ifndef NSC_QUANTIZER_H_
#define NSC_QUANTIZER_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nsc/error.h"
#include "nsc/nn.h"
#include "nsc/rng.h"

namespace nsc {

// Trainable scalar quantizer: N bin values shared by every symbol position,
// and a softmax temperature. The temperature is parameterized as
// sigma = exp(log_sigma) so it stays positive under gradient updates.
template <typename T>
struct QuantizerState {
  std::vector<T> bins;
  T log_sigma = T(0);

  std::vector<T> bin_grad;
  T log_sigma_grad = T(0);

  static QuantizerState Make(std::vector<T> bins, double sigma) {
    if (bins.size() < 2) {
      throw Error(ErrorKind::kInvalidArgument, "need at least 2 bins");
    }
    if (!(sigma > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "sigma must be positive");
    }
    QuantizerState q;
    q.bins = std::move(bins);
    q.log_sigma = static_cast<T>(std::log(sigma));
    q.bin_grad.assign(q.bins.size(), T(0));
    return q;
  }

  int NumBins() const { return static_cast<int>(bins.size()); }
  T Sigma() const { return std::exp(log_sigma); }

  void CollectParams(std::vector<ParamRef<T>>* out) {
    if (bin_grad.size() != bins.size()) bin_grad.assign(bins.size(), T(0));
    out->push_back({bins.data(), bin_grad.data(), bins.size()});
    out->push_back({&log_sigma, &log_sigma_grad, 1});
  }
};

// S_j proportional to exp(-sigma |x - B_j|), computed with max subtraction
// so sigma = 300 never overflows or collapses to 0/0.
template <typename T>
void SoftQuantize(T x, const QuantizerState<T>& q, T* s) {
  const int n = q.NumBins();
  const T sigma = q.Sigma();
  T best = -std::numeric_limits<T>::infinity();
  for (int j = 0; j < n; ++j) {
    s[j] = -sigma * std::abs(x - q.bins[j]);
    best = std::max(best, s[j]);
  }
  T sum = T(0);
  for (int j = 0; j < n; ++j) {
    s[j] = std::exp(s[j] - best);
    sum += s[j];
  }
  const T inv = T(1) / sum;
  for (int j = 0; j < n; ++j) s[j] *= inv;
}

template <typename T>
std::vector<T> SoftQuantize(T x, const QuantizerState<T>& q) {
  std::vector<T> s(q.NumBins());
  SoftQuantize(x, q, s.data());
  return s;
}

// Dot product of the soft assignment with the bin values.
template <typename T>
T Dequantize(const T* s, const QuantizerState<T>& q) {
  T acc = T(0);
  for (int j = 0; j < q.NumBins(); ++j) acc += s[j] * q.bins[j];
  return acc;
}

// Argmax with ties broken toward the lowest index, so bitstreams are
// deterministic.
template <typename T>
int Harden(const T* s, int n) {
  int best = 0;
  for (int j = 1; j < n; ++j) {
    if (s[j] > s[best]) best = j;
  }
  return best;
}

template <typename T>
int Harden(const std::vector<T>& s) {
  return Harden(s.data(), static_cast<int>(s.size()));
}

// Nearest bin by absolute distance, ties toward the lowest index. Agrees
// with Harden(SoftQuantize(x)) whenever there is no exact tie.
template <typename T>
int NearestBin(T x, const QuantizerState<T>& q) {
  int best = 0;
  T best_d = std::abs(x - q.bins[0]);
  for (int j = 1; j < q.NumBins(); ++j) {
    const T d = std::abs(x - q.bins[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

// Backpropagates dL/dS (gs) through the softmax onto x, the bins, and
// log_sigma. s must be the assignment SoftQuantize produced for x.
// Gradients accumulate into q->bin_grad / q->log_sigma_grad; returns dL/dx.
template <typename T>
T SoftQuantizeBackward(T x, QuantizerState<T>* q, const T* s, const T* gs) {
  const int n = q->NumBins();
  const T sigma = q->Sigma();
  // Softmax Jacobian: ga_j = s_j (gs_j - sum_k gs_k s_k).
  T dot = T(0);
  for (int j = 0; j < n; ++j) dot += gs[j] * s[j];
  T gx = T(0);
  T gsigma = T(0);
  for (int j = 0; j < n; ++j) {
    const T ga = s[j] * (gs[j] - dot);
    const T diff = x - q->bins[j];
    const T sign = diff > T(0) ? T(1) : (diff < T(0) ? T(-1) : T(0));
    // a_j = -sigma |x - B_j|
    gx += ga * (-sigma) * sign;
    q->bin_grad[j] += ga * sigma * sign;
    gsigma += ga * (-std::abs(diff));
  }
  q->log_sigma_grad += gsigma * sigma;
  return gx;
}

// 1-D k-means with k-means++ seeding. Samples are sorted once, after which
// each Lloyd iteration is O(k log n) using prefix sums: assignment
// boundaries are the midpoints between adjacent (sorted) centroids.
// Stops after 100 iterations or when no centroid moves more than 1e-6.
// Returns bins sorted ascending.
template <typename T>
std::vector<T> KmeansInit(const std::vector<T>& samples, int num_bins,
                          uint64_t seed,
                          std::vector<double>* inertia_trace = nullptr) {
  const size_t n = samples.size();
  if (num_bins < 1) {
    throw Error(ErrorKind::kInvalidArgument, "num_bins must be >= 1");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  size_t distinct = n > 0 ? 1 : 0;
  for (size_t i = 1; i < n; ++i) {
    if (sorted[i] != sorted[i - 1]) ++distinct;
  }
  if (distinct < static_cast<size_t>(num_bins)) {
    throw Error(ErrorKind::kTooFewDistinctValues,
                "k-means needs " + std::to_string(num_bins) +
                    " distinct values, got " + std::to_string(distinct));
  }

  // Prefix sums of x and x^2 for O(1) segment statistics.
  std::vector<double> psum(n + 1, 0.0), psq(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    psum[i + 1] = psum[i] + sorted[i];
    psq[i + 1] = psq[i] + sorted[i] * sorted[i];
  }

  // k-means++ seeding. Duplicates of chosen centers have zero weight, so
  // every pick is a new distinct value.
  Rng rng(seed);
  std::vector<double> centers;
  centers.reserve(num_bins);
  centers.push_back(sorted[rng.UniformInt(static_cast<int>(n))]);
  std::vector<double> d2(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = sorted[i] - centers[0];
    d2[i] = d * d;
  }
  while (centers.size() < static_cast<size_t>(num_bins)) {
    double total = 0.0;
    for (double d : d2) total += d;
    const double r = rng.Uniform() * total;
    double cum = 0.0;
    size_t pick = n - 1;
    for (size_t i = 0; i < n; ++i) {
      cum += d2[i];
      if (cum >= r && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    const double c = sorted[pick];
    centers.push_back(c);
    for (size_t i = 0; i < n; ++i) {
      const double d = sorted[i] - c;
      d2[i] = std::min(d2[i], d * d);
    }
  }
  std::sort(centers.begin(), centers.end());

  const int k = num_bins;
  for (int iter = 0; iter < 100; ++iter) {
    // Segment boundaries: first sample index strictly above each midpoint
    // (an equidistant sample joins the lower cluster).
    std::vector<size_t> bounds(k + 1);
    bounds[0] = 0;
    bounds[k] = n;
    for (int j = 0; j + 1 < k; ++j) {
      const double mid = 0.5 * (centers[j] + centers[j + 1]);
      bounds[j + 1] =
          std::upper_bound(sorted.begin(), sorted.end(), mid) - sorted.begin();
    }
    if (inertia_trace != nullptr) {
      double inertia = 0.0;
      for (int j = 0; j < k; ++j) {
        const size_t lo = bounds[j], hi = bounds[j + 1];
        const double count = static_cast<double>(hi - lo);
        inertia += (psq[hi] - psq[lo]) - 2.0 * centers[j] * (psum[hi] - psum[lo]) +
                   centers[j] * centers[j] * count;
      }
      inertia_trace->push_back(inertia);
    }
    double moved = 0.0;
    for (int j = 0; j < k; ++j) {
      const size_t lo = bounds[j], hi = bounds[j + 1];
      if (hi <= lo) continue;  // empty cluster keeps its centroid
      const double mean = (psum[hi] - psum[lo]) / static_cast<double>(hi - lo);
      moved = std::max(moved, std::abs(mean - centers[j]));
      centers[j] = mean;
    }
    if (moved < 1e-6) break;
  }

  std::sort(centers.begin(), centers.end());
  std::vector<T> bins(centers.size());
  for (size_t j = 0; j < centers.size(); ++j) {
    bins[j] = static_cast<T>(centers[j]);
  }
  return bins;
}

}  // namespace nsc

#endif  // NSC_QUANTIZER_H_
