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

#ifndef NSC_FRAMING_H_
#define NSC_FRAMING_H_

#include <cstddef>
#include <utility>
#include <vector>

namespace nsc {

// 32 ms windows (512 samples at 16 kHz) advancing by 480 samples, so
// adjacent windows share a 32-sample overlap region.
struct FrameConfig {
  int window_len = 512;
  int overlap = 32;

  int Hop() const { return window_len - overlap; }
  void Validate() const;
};

struct WindowSequence {
  std::vector<std::vector<float>> windows;  // each exactly window_len samples
  size_t original_len = 0;
};

// Complementary Hann ramps over the overlap region. fade_in[n] rises from
// ~0 to ~1; fade_out = 1 - fade_in, so the pair sums to exactly 1 and
// constant signals pass through overlap-add unchanged. The half-sample
// offset keeps the ramp symmetric: fade_in[n] + fade_in[overlap-1-n] = 1.
std::pair<std::vector<double>, std::vector<double>> CrossfadeWeights(
    int overlap);

// Slices a signal into raw windows starting at multiples of the hop. The
// final partial window is zero-padded; original_len records the true length
// so OverlapAdd can truncate. Window count is
// ceil(max(len - overlap, 1) / hop).
WindowSequence ExtractWindows(const std::vector<float>& samples,
                              const FrameConfig& config);

// Inverse of ExtractWindows: crossfades adjacent windows over the overlap
// region and truncates to original_len. With unmodified windows this is an
// exact identity.
std::vector<float> OverlapAdd(const WindowSequence& sequence,
                              const FrameConfig& config);

// Number of windows ExtractWindows produces for a signal of length len.
size_t WindowCount(size_t len, const FrameConfig& config);

}  // namespace nsc

#endif  // NSC_FRAMING_H_
