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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nsc/coder.h"
#include "nsc/error.h"
#include "testutil.h"

using namespace nsc;

namespace {

// Random table whose total stays below the coder's renormalization bound.
FrequencyTable RandomTable(Rng* rng, int n) {
  const uint32_t max_count =
      std::max<uint32_t>(1, (1u << 17) / static_cast<uint32_t>(n) - 1);
  std::vector<uint32_t> counts(n);
  for (auto& c : counts) {
    c = 1 + static_cast<uint32_t>(rng->UniformInt(static_cast<int>(max_count)));
  }
  return FrequencyTable::FromCounts(std::move(counts));
}

std::vector<uint16_t> SampleFromTable(Rng* rng, const FrequencyTable& table,
                                      size_t count) {
  const auto cum = table.Cumulative();
  std::vector<uint16_t> symbols(count);
  for (size_t i = 0; i < count; ++i) {
    const uint32_t r =
        static_cast<uint32_t>(rng->NextU64() % table.total);
    const auto it = std::upper_bound(cum.begin() + 1, cum.end(), r);
    symbols[i] = static_cast<uint16_t>(it - cum.begin() - 1);
  }
  return symbols;
}

}  // namespace

TEST_CASE("frequency table from histogram") {
  SUBCASE("uniform histogram scales to 2048 per symbol") {
    std::vector<double> h(32, 1.0 / 32.0);
    FrequencyTable table = FrequencyTable::FromHistogram(h);
    for (uint32_t c : table.counts) CHECK(c == 2048);
    CHECK(table.total == 65536);
  }
  SUBCASE("zero probability floors at one") {
    std::vector<double> h = {1.0, 0.0, 0.0};
    FrequencyTable table = FrequencyTable::FromHistogram(h);
    CHECK(table.counts[0] == 65536);
    CHECK(table.counts[1] == 1);
    CHECK(table.counts[2] == 1);
  }
  SUBCASE("entropy of uniform table") {
    std::vector<double> h(32, 1.0 / 32.0);
    CHECK(FrequencyTable::FromHistogram(h).EntropyBits() ==
          doctest::Approx(5.0));
  }
}

TEST_CASE("round trip over random tables and sequences") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.UniformInt(63);
    FrequencyTable table = RandomTable(&rng, n);
    const size_t len = static_cast<size_t>(rng.UniformInt(5000));
    std::vector<uint16_t> symbols(len);
    for (auto& s : symbols) {
      s = static_cast<uint16_t>(rng.UniformInt(n));
    }
    std::vector<uint8_t> bytes = RangeEncode(symbols, table);
    std::vector<uint16_t> back = RangeDecode(bytes, len, table);
    REQUIRE(back == symbols);
  }
}

TEST_CASE("skewed distributions still round trip") {
  Rng rng(3);
  std::vector<uint32_t> counts(32, 1);
  counts[7] = 65536 - 31;
  FrequencyTable table = FrequencyTable::FromCounts(std::move(counts));
  std::vector<uint16_t> symbols(20000, 7);
  for (int i = 0; i < 200; ++i) {
    symbols[rng.UniformInt(20000)] = static_cast<uint16_t>(rng.UniformInt(32));
  }
  std::vector<uint8_t> bytes = RangeEncode(symbols, table);
  CHECK(RangeDecode(bytes, symbols.size(), table) == symbols);
}

TEST_CASE("constant sequence compresses to almost nothing") {
  std::vector<uint32_t> counts(32, 1);
  counts[0] = 65536 - 31;
  FrequencyTable table = FrequencyTable::FromCounts(std::move(counts));
  std::vector<uint16_t> symbols(10000, 0);
  std::vector<uint8_t> bytes = RangeEncode(symbols, table);
  CHECK(bytes.size() <= 40);
}

TEST_CASE("empirical rate approaches the table entropy") {
  Rng rng(5);
  std::vector<uint32_t> counts = {20000, 15000, 9000, 9000, 5000, 4000,
                                  2000,  1000,  300,  200,  30,   6};
  FrequencyTable table = FrequencyTable::FromCounts(std::move(counts));
  const double entropy = table.EntropyBits();
  const size_t count = 100000;
  std::vector<uint16_t> symbols = SampleFromTable(&rng, table, count);
  std::vector<uint8_t> bytes = RangeEncode(symbols, table);
  const double bits_per_symbol = bytes.size() * 8.0 / count;

  // Sampling noise moves the empirical cross-entropy a little; the coder
  // overhead itself is far below 2%.
  CHECK(bits_per_symbol < entropy * 1.02);
  CHECK(bits_per_symbol > entropy * 0.95);

  // Cross-entropy bound against the empirical distribution.
  std::vector<size_t> freq(table.NumSymbols(), 0);
  for (uint16_t s : symbols) ++freq[s];
  double cross = 0.0;
  const auto p = table.Probabilities();
  for (int j = 0; j < table.NumSymbols(); ++j) {
    if (freq[j] == 0) continue;
    cross -= (static_cast<double>(freq[j]) / count) * std::log2(p[j]);
  }
  CHECK(bits_per_symbol <= cross + 0.05);
}

TEST_CASE("encode validates symbols") {
  FrequencyTable table = FrequencyTable::FromCounts({10, 10, 10});
  std::vector<uint16_t> symbols = {0, 2, 3};
  try {
    RangeEncode(symbols, table);
    FAIL("expected SymbolOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSymbolOutOfRange);
  }
}

TEST_CASE("decoder detects truncation and trailing garbage") {
  Rng rng(7);
  FrequencyTable table = RandomTable(&rng, 16);
  std::vector<uint16_t> symbols(3000);
  for (auto& s : symbols) s = static_cast<uint16_t>(rng.UniformInt(16));
  std::vector<uint8_t> bytes = RangeEncode(symbols, table);

  SUBCASE("truncated") {
    std::vector<uint8_t> cut(bytes.begin(), bytes.end() - 1);
    try {
      RangeDecode(cut, symbols.size(), table);
      FAIL("expected CorruptPayload");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kCorruptPayload);
    }
  }
  SUBCASE("trailing garbage") {
    std::vector<uint8_t> extra = bytes;
    extra.push_back(0xAB);
    try {
      RangeDecode(extra, symbols.size(), table);
      FAIL("expected CorruptPayload");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kCorruptPayload);
    }
  }
  SUBCASE("decoder consumes exactly what the encoder wrote") {
    // Implied by the two cases above; also check direct equality byte-wise
    // via a second encode.
    std::vector<uint8_t> again = RangeEncode(symbols, table);
    CHECK(again == bytes);
  }
}

TEST_CASE("bitstream container") {
  Rng rng(11);
  FrequencyTable table = RandomTable(&rng, 32);
  BitstreamMeta meta;
  meta.num_windows = 3;
  meta.original_len = 1452;
  std::vector<uint16_t> symbols(3 * 256);
  for (auto& s : symbols) s = static_cast<uint16_t>(rng.UniformInt(32));

  std::vector<uint8_t> packed = PackBitstream(symbols, meta, table);

  SUBCASE("header is 25 + 4N bytes") {
    std::vector<uint8_t> payload = RangeEncode(symbols, table);
    CHECK(BitstreamHeaderSize(32) == 153);
    CHECK(packed.size() == 153 + payload.size());
    CHECK(std::equal(payload.begin(), payload.end(), packed.end() - payload.size()));
  }
  SUBCASE("round trip is exact") {
    UnpackedBitstream back = UnpackBitstream(packed, 32);
    CHECK(back.symbols == symbols);
    CHECK(back.meta == meta);
    CHECK(back.table == table);
  }
  SUBCASE("bad magic") {
    std::vector<uint8_t> tampered = packed;
    tampered[0] = 'X';
    try {
      UnpackBitstream(tampered, 32);
      FAIL("expected BadMagic");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kBadMagic);
    }
  }
  SUBCASE("unsupported version") {
    std::vector<uint8_t> tampered = packed;
    tampered[4] = 9;
    try {
      UnpackBitstream(tampered, 32);
      FAIL("expected UnsupportedVersion");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnsupportedVersion);
    }
  }
  SUBCASE("truncated payload leaves no output") {
    std::vector<uint8_t> cut(packed.begin(), packed.end() - 2);
    try {
      UnpackBitstream(cut, 32);
      FAIL("expected CorruptPayload");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kCorruptPayload);
    }
  }
  SUBCASE("short header") {
    std::vector<uint8_t> cut(packed.begin(), packed.begin() + 20);
    try {
      UnpackBitstream(cut, 32);
      FAIL("expected CorruptPayload");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kCorruptPayload);
    }
  }
  SUBCASE("deterministic bytes") {
    CHECK(PackBitstream(symbols, meta, table) == packed);
  }
}

TEST_CASE("empty symbol stream packs and unpacks") {
  FrequencyTable table = FrequencyTable::FromCounts({5, 5});
  BitstreamMeta meta;
  meta.num_windows = 0;
  meta.original_len = 0;
  std::vector<uint8_t> packed = PackBitstream({}, meta, table);
  UnpackedBitstream back = UnpackBitstream(packed, 2);
  CHECK(back.symbols.empty());
  CHECK(back.meta.num_windows == 0);
}
