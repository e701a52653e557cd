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

#ifndef NSC_FFT_H_
#define NSC_FFT_H_

#include <cmath>
#include <complex>
#include <vector>

#include "nsc/error.h"

namespace nsc {

// Iterative radix-2 Cooley-Tukey. Size must be a power of two. Twiddles are
// evaluated in double regardless of T.
template <typename T>
void FftInPlace(std::vector<std::complex<T>>* data, bool inverse = false) {
  const size_t n = data->size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "FFT size must be a power of two, got " + std::to_string(n));
  }
  std::complex<T>* a = data->data();

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<T> wlen(static_cast<T>(std::cos(angle)),
                               static_cast<T>(std::sin(angle)));
    for (size_t i = 0; i < n; i += len) {
      std::complex<T> w(1);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<T> u = a[i + k];
        std::complex<T> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const T scale = static_cast<T>(1.0 / static_cast<double>(n));
    for (size_t i = 0; i < n; ++i) a[i] *= scale;
  }
}

}  // namespace nsc

#endif  // NSC_FFT_H_
