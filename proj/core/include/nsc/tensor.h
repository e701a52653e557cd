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

#ifndef NSC_TENSOR_H_
#define NSC_TENSOR_H_

#include <cmath>
#include <cstddef>
#include <vector>

namespace nsc {

// Dense (batch, channels, length) tensor, length-major.
template <typename T>
struct Tensor {
  int batch = 0;
  int channels = 0;
  int length = 0;
  std::vector<T> values;

  Tensor() = default;
  Tensor(int b, int c, int l)
      : batch(b),
        channels(c),
        length(l),
        values(static_cast<size_t>(b) * c * l, T(0)) {}

  size_t Size() const { return values.size(); }

  T* Row(int b, int c) {
    return values.data() + (static_cast<size_t>(b) * channels + c) * length;
  }
  const T* Row(int b, int c) const {
    return values.data() + (static_cast<size_t>(b) * channels + c) * length;
  }

  T& At(int b, int c, int t) { return Row(b, c)[t]; }
  const T& At(int b, int c, int t) const { return Row(b, c)[t]; }

  bool SameShape(const Tensor& other) const {
    return batch == other.batch && channels == other.channels &&
           length == other.length;
  }

  bool AllFinite() const {
    for (const T& v : values) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }
};

}  // namespace nsc

#endif  // NSC_TENSOR_H_
