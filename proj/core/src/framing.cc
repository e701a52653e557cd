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

#include "nsc/framing.h"

#include <cmath>

#include "nsc/error.h"

namespace nsc {

void FrameConfig::Validate() const {
  if (window_len <= 0 || overlap <= 0 || overlap >= window_len) {
    throw Error(ErrorKind::kInvalidArgument,
                "frame config needs 0 < overlap < window_len");
  }
}

std::pair<std::vector<double>, std::vector<double>> CrossfadeWeights(
    int overlap) {
  if (overlap < 1) {
    throw Error(ErrorKind::kInvalidArgument, "overlap must be >= 1");
  }
  std::vector<double> fade_in(overlap), fade_out(overlap);
  for (int n = 0; n < overlap; ++n) {
    fade_in[n] = 0.5 * (1.0 - std::cos(M_PI * (n + 0.5) / overlap));
    fade_out[n] = 1.0 - fade_in[n];
  }
  return {std::move(fade_in), std::move(fade_out)};
}

size_t WindowCount(size_t len, const FrameConfig& config) {
  const size_t hop = static_cast<size_t>(config.Hop());
  const size_t overlap = static_cast<size_t>(config.overlap);
  size_t effective = len > overlap ? len - overlap : 1;
  return (effective + hop - 1) / hop;
}

WindowSequence ExtractWindows(const std::vector<float>& samples,
                              const FrameConfig& config) {
  config.Validate();
  if (samples.empty()) {
    throw Error(ErrorKind::kEmptySignal, "cannot window an empty signal");
  }
  const size_t len = samples.size();
  const size_t window_len = static_cast<size_t>(config.window_len);
  const size_t hop = static_cast<size_t>(config.Hop());
  const size_t count = WindowCount(len, config);

  WindowSequence seq;
  seq.original_len = len;
  seq.windows.resize(count);
  for (size_t w = 0; w < count; ++w) {
    std::vector<float>& window = seq.windows[w];
    window.assign(window_len, 0.0f);
    const size_t start = w * hop;
    const size_t avail = len > start ? std::min(window_len, len - start) : 0;
    for (size_t n = 0; n < avail; ++n) window[n] = samples[start + n];
  }
  return seq;
}

std::vector<float> OverlapAdd(const WindowSequence& sequence,
                              const FrameConfig& config) {
  config.Validate();
  if (sequence.windows.empty()) {
    throw Error(ErrorKind::kLengthMismatch, "no windows to reconstruct");
  }
  const size_t window_len = static_cast<size_t>(config.window_len);
  const size_t overlap = static_cast<size_t>(config.overlap);
  const size_t hop = static_cast<size_t>(config.Hop());
  const size_t count = sequence.windows.size();
  for (size_t w = 0; w < count; ++w) {
    if (sequence.windows[w].size() != window_len) {
      throw Error(ErrorKind::kLengthMismatch,
                  "window " + std::to_string(w) + " has " +
                      std::to_string(sequence.windows[w].size()) +
                      " samples, expected " + std::to_string(window_len));
    }
  }

  auto [fade_in, fade_out] = CrossfadeWeights(config.overlap);

  // Accumulate in double so the crossfade identity v*f + v*(1-f) == v
  // survives the cast back to float.
  std::vector<double> acc((count - 1) * hop + window_len, 0.0);
  for (size_t w = 0; w < count; ++w) {
    const std::vector<float>& window = sequence.windows[w];
    const size_t start = w * hop;
    for (size_t n = 0; n < window_len; ++n) {
      double weight = 1.0;
      if (w > 0 && n < overlap) {
        weight = fade_in[n];
      } else if (w + 1 < count && n >= window_len - overlap) {
        weight = fade_out[n - (window_len - overlap)];
      }
      acc[start + n] += weight * static_cast<double>(window[n]);
    }
  }

  const size_t out_len = std::min(sequence.original_len, acc.size());
  std::vector<float> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = static_cast<float>(acc[i]);
  return out;
}

}  // namespace nsc
