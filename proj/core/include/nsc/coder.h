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

#ifndef NSC_CODER_H_
#define NSC_CODER_H_

#include <cstdint>
#include <vector>

namespace nsc {

inline constexpr char kBitstreamMagic[4] = {'N', 'S', 'C', '1'};
inline constexpr uint8_t kBitstreamVersion = 1;
inline constexpr uint32_t kFrequencyScale = 1u << 16;

// Static symbol frequencies for the range coder. Every count is at least 1
// so any symbol stays decodable regardless of the trained histogram.
struct FrequencyTable {
  std::vector<uint32_t> counts;
  uint32_t total = 0;

  static FrequencyTable FromHistogram(const std::vector<double>& histogram);
  static FrequencyTable FromCounts(std::vector<uint32_t> counts);

  int NumSymbols() const { return static_cast<int>(counts.size()); }
  // Entropy of the table's implied distribution, bits per symbol.
  double EntropyBits() const;
  // counts[i] / total as probabilities.
  std::vector<double> Probabilities() const;
  std::vector<uint32_t> Cumulative() const;  // size N + 1

  bool operator==(const FrequencyTable& other) const {
    return counts == other.counts;
  }
};

// Static-model range coding (32-bit carry-less, byte renormalization).
// Encoding is deterministic; the decoder consumes exactly the bytes the
// encoder produced, so truncation and most corruption are detected.
std::vector<uint8_t> RangeEncode(const std::vector<uint16_t>& symbols,
                                 const FrequencyTable& table);
std::vector<uint16_t> RangeDecode(const uint8_t* data, size_t size,
                                  size_t count, const FrequencyTable& table);
std::vector<uint16_t> RangeDecode(const std::vector<uint8_t>& data,
                                  size_t count, const FrequencyTable& table);

struct BitstreamMeta {
  uint32_t sample_rate = 16000;
  uint16_t window_len = 512;
  uint16_t overlap = 32;
  uint32_t num_windows = 0;
  uint64_t original_len = 0;

  int SymbolsPerWindow() const { return window_len / 2; }
  bool operator==(const BitstreamMeta& other) const {
    return sample_rate == other.sample_rate &&
           window_len == other.window_len && overlap == other.overlap &&
           num_windows == other.num_windows &&
           original_len == other.original_len;
  }
};

// Little-endian container, independent of host byte order:
//   "NSC1" | version u8 | sample_rate u32 | window_len u16 | overlap u16 |
//   num_windows u32 | original_len u64 | counts u32 x N | payload
// N is not stored; the decoder knows it from the model.
std::vector<uint8_t> PackBitstream(const std::vector<uint16_t>& symbols,
                                   const BitstreamMeta& meta,
                                   const FrequencyTable& table);

struct UnpackedBitstream {
  std::vector<uint16_t> symbols;
  BitstreamMeta meta;
  FrequencyTable table;
};

UnpackedBitstream UnpackBitstream(const uint8_t* data, size_t size,
                                  int num_bins);
UnpackedBitstream UnpackBitstream(const std::vector<uint8_t>& data,
                                  int num_bins);

// Header bytes before the payload: 25 fixed + 4 per symbol.
inline size_t BitstreamHeaderSize(int num_bins) {
  return 25 + 4 * static_cast<size_t>(num_bins);
}

}  // namespace nsc

#endif  // NSC_CODER_H_
