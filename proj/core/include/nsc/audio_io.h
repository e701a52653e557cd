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

#ifndef NSC_AUDIO_IO_H_
#define NSC_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace nsc {

inline constexpr int kSampleRate = 16000;
inline constexpr float kPeakTarget = 0.999f;

// Mono 16 kHz signal, samples in [-1, 1].
struct Signal {
  std::vector<float> samples;
  int sample_rate = kSampleRate;
};

struct SplitCounts {
  int train = 0;
  int validation = 0;
  int test = 0;
  int Total() const { return train + validation + test; }
};

struct CorpusSplit {
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> validation;
  std::vector<std::filesystem::path> test;
  uint64_t seed = 0;
};

// Reads a RIFF/WAVE file. Only PCM16 / mono / 16 kHz is accepted; anything
// else is rejected rather than converted. Integer samples map to floats by
// division with 32768.
Signal ReadWav(const std::filesystem::path& path);

// Writes PCM16 mono. Samples are rounded to the nearest integer level and
// clamped to [-32768, 32767], so a round trip is exact to 1/32768 per sample.
void WriteWav(const std::filesystem::path& path, const Signal& signal);

// Scales so the peak magnitude lands on kPeakTarget. An all-zero signal is
// returned unchanged. Idempotent.
Signal PeakNormalize(const Signal& signal);

// Deterministic disjoint train/validation/test split over the .wav files in
// a flat directory. Files are sorted by path, then shuffled with the seed.
CorpusSplit SplitCorpus(const std::filesystem::path& dir,
                        const SplitCounts& counts, uint64_t seed);

}  // namespace nsc

#endif  // NSC_AUDIO_IO_H_
