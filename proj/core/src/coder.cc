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

#include "nsc/coder.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "nsc/error.h"

namespace nsc {
namespace {

// Renormalization thresholds. kBot must exceed the largest possible table
// total (kFrequencyScale plus one rounding unit per symbol) so the scaled
// range never collapses to zero.
constexpr uint32_t kTop = 1u << 24;
constexpr uint32_t kBot = 1u << 17;

void CheckTable(const FrequencyTable& table) {
  if (table.counts.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "table needs >= 2 symbols");
  }
  uint32_t total = 0;
  for (uint32_t c : table.counts) {
    if (c == 0) {
      throw Error(ErrorKind::kInvalidArgument, "zero frequency count");
    }
    total += c;
  }
  if (total != table.total || total > kBot) {
    throw Error(ErrorKind::kInvalidArgument, "bad frequency total");
  }
}

class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>* out) : out_(out) {}

  void Encode(uint32_t cum, uint32_t freq, uint32_t total) {
    const uint32_t r = range_ / total;
    low_ += r * cum;
    range_ = r * freq;
    Normalize();
  }

  void Finish() {
    for (int i = 0; i < 4; ++i) {
      out_->push_back(static_cast<uint8_t>(low_ >> 24));
      low_ <<= 8;
    }
  }

 private:
  void Normalize() {
    while ((low_ ^ (low_ + range_)) < kTop ||
           (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
      out_->push_back(static_cast<uint8_t>(low_ >> 24));
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  std::vector<uint8_t>* out_;
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* data, size_t size) : data_(data), size_(size) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
  }

  // Value in [0, total) locating the next symbol in cumulative order.
  uint32_t DecodeTarget(uint32_t total) {
    r_ = range_ / total;
    return std::min((code_ - low_) / r_, total - 1);
  }

  void Consume(uint32_t cum, uint32_t freq) {
    low_ += r_ * cum;
    range_ = r_ * freq;
    while ((low_ ^ (low_ + range_)) < kTop ||
           (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
      code_ = (code_ << 8) | NextByte();
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  size_t BytesConsumed() const { return pos_; }

 private:
  uint8_t NextByte() {
    if (pos_ >= size_) {
      throw Error(ErrorKind::kCorruptPayload, "payload exhausted");
    }
    return data_[pos_++];
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
  uint32_t r_ = 1;
};

void PutU16(std::vector<uint8_t>* out, uint16_t v) {
  out->push_back(static_cast<uint8_t>(v & 0xff));
  out->push_back(static_cast<uint8_t>(v >> 8));
}

void PutU32(std::vector<uint8_t>* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<uint8_t>* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t GetU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t GetU32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

uint64_t GetU64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

FrequencyTable FrequencyTable::FromHistogram(
    const std::vector<double>& histogram) {
  FrequencyTable table;
  table.counts.reserve(histogram.size());
  for (double h : histogram) {
    const double scaled = h * static_cast<double>(kFrequencyScale);
    const long count = std::lround(std::max(scaled, 0.0));
    table.counts.push_back(static_cast<uint32_t>(std::max(count, 1L)));
  }
  for (uint32_t c : table.counts) table.total += c;
  return table;
}

FrequencyTable FrequencyTable::FromCounts(std::vector<uint32_t> counts) {
  FrequencyTable table;
  table.counts = std::move(counts);
  for (uint32_t c : table.counts) table.total += c;
  return table;
}

double FrequencyTable::EntropyBits() const {
  double bits = 0.0;
  for (uint32_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    bits -= p * std::log2(p);
  }
  return bits;
}

std::vector<double> FrequencyTable::Probabilities() const {
  std::vector<double> p(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / total;
  }
  return p;
}

std::vector<uint32_t> FrequencyTable::Cumulative() const {
  std::vector<uint32_t> cum(counts.size() + 1, 0);
  for (size_t i = 0; i < counts.size(); ++i) cum[i + 1] = cum[i] + counts[i];
  return cum;
}

std::vector<uint8_t> RangeEncode(const std::vector<uint16_t>& symbols,
                                 const FrequencyTable& table) {
  CheckTable(table);
  const std::vector<uint32_t> cum = table.Cumulative();
  const int n = table.NumSymbols();
  std::vector<uint8_t> out;
  out.reserve(symbols.size() / 2 + 16);
  RangeEncoder encoder(&out);
  for (uint16_t sym : symbols) {
    if (sym >= n) {
      throw Error(ErrorKind::kSymbolOutOfRange,
                  "symbol " + std::to_string(sym) + " with " +
                      std::to_string(n) + " table entries");
    }
    encoder.Encode(cum[sym], table.counts[sym], table.total);
  }
  encoder.Finish();
  return out;
}

std::vector<uint16_t> RangeDecode(const uint8_t* data, size_t size,
                                  size_t count, const FrequencyTable& table) {
  CheckTable(table);
  const std::vector<uint32_t> cum = table.Cumulative();
  std::vector<uint16_t> symbols(count);
  RangeDecoder decoder(data, size);
  for (size_t i = 0; i < count; ++i) {
    const uint32_t target = decoder.DecodeTarget(table.total);
    // First symbol whose cumulative interval contains target.
    const auto it = std::upper_bound(cum.begin() + 1, cum.end(), target);
    const int sym = static_cast<int>(it - cum.begin()) - 1;
    decoder.Consume(cum[sym], table.counts[sym]);
    symbols[i] = static_cast<uint16_t>(sym);
  }
  if (decoder.BytesConsumed() != size) {
    throw Error(ErrorKind::kCorruptPayload,
                "payload has " + std::to_string(size) + " bytes, consumed " +
                    std::to_string(decoder.BytesConsumed()));
  }
  return symbols;
}

std::vector<uint16_t> RangeDecode(const std::vector<uint8_t>& data,
                                  size_t count, const FrequencyTable& table) {
  return RangeDecode(data.data(), data.size(), count, table);
}

std::vector<uint8_t> PackBitstream(const std::vector<uint16_t>& symbols,
                                   const BitstreamMeta& meta,
                                   const FrequencyTable& table) {
  const size_t expected =
      static_cast<size_t>(meta.num_windows) * meta.SymbolsPerWindow();
  if (symbols.size() != expected) {
    throw Error(ErrorKind::kLengthMismatch,
                "expected " + std::to_string(expected) + " symbols, got " +
                    std::to_string(symbols.size()));
  }
  std::vector<uint8_t> out;
  out.reserve(BitstreamHeaderSize(table.NumSymbols()) + symbols.size() / 4);
  out.insert(out.end(), kBitstreamMagic, kBitstreamMagic + 4);
  out.push_back(kBitstreamVersion);
  PutU32(&out, meta.sample_rate);
  PutU16(&out, meta.window_len);
  PutU16(&out, meta.overlap);
  PutU32(&out, meta.num_windows);
  PutU64(&out, meta.original_len);
  for (uint32_t c : table.counts) PutU32(&out, c);

  std::vector<uint8_t> payload = RangeEncode(symbols, table);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

UnpackedBitstream UnpackBitstream(const uint8_t* data, size_t size,
                                  int num_bins) {
  if (size < 4 || std::memcmp(data, kBitstreamMagic, 4) != 0) {
    throw Error(ErrorKind::kBadMagic, "not an NSC bitstream");
  }
  if (size < 5) {
    throw Error(ErrorKind::kCorruptPayload, "header cut short");
  }
  if (data[4] != kBitstreamVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "bitstream version " + std::to_string(data[4]));
  }
  const size_t header = BitstreamHeaderSize(num_bins);
  if (size < header) {
    throw Error(ErrorKind::kCorruptPayload, "header cut short");
  }

  UnpackedBitstream result;
  result.meta.sample_rate = GetU32(data + 5);
  result.meta.window_len = GetU16(data + 9);
  result.meta.overlap = GetU16(data + 11);
  result.meta.num_windows = GetU32(data + 13);
  result.meta.original_len = GetU64(data + 17);
  if (result.meta.window_len < 2 || result.meta.window_len % 2 != 0 ||
      result.meta.overlap == 0 ||
      result.meta.overlap >= result.meta.window_len) {
    throw Error(ErrorKind::kCorruptPayload, "implausible framing fields");
  }

  std::vector<uint32_t> counts(num_bins);
  for (int i = 0; i < num_bins; ++i) {
    counts[i] = GetU32(data + 25 + 4 * static_cast<size_t>(i));
    if (counts[i] == 0) {
      throw Error(ErrorKind::kCorruptPayload, "zero frequency count");
    }
  }
  result.table = FrequencyTable::FromCounts(std::move(counts));

  const size_t count = static_cast<size_t>(result.meta.num_windows) *
                       result.meta.SymbolsPerWindow();
  result.symbols =
      RangeDecode(data + header, size - header, count, result.table);
  return result;
}

UnpackedBitstream UnpackBitstream(const std::vector<uint8_t>& data,
                                  int num_bins) {
  return UnpackBitstream(data.data(), data.size(), num_bins);
}

}  // namespace nsc
