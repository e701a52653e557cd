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

#include "nsc/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "nsc/error.h"
#include "nsc/rng.h"

namespace nsc {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kBitsPerSample = 16;

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<uint8_t>* out, uint32_t v) {
  out->push_back(static_cast<uint8_t>(v & 0xff));
  out->push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out->push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out->push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

void PutU16(std::vector<uint8_t>* out, uint16_t v) {
  out->push_back(static_cast<uint8_t>(v & 0xff));
  out->push_back(static_cast<uint8_t>((v >> 8) & 0xff));
}

}  // namespace

Signal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIoError, "read failed for " + path.string());
  }
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kCorruptFile,
                "not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  bool have_data = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_offset = 0, data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t chunk_size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw Error(ErrorKind::kCorruptFile,
                  "truncated chunk in " + path.string());
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw Error(ErrorKind::kCorruptFile,
                    "short fmt chunk in " + path.string());
      }
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
      have_data = true;
    }
    // Chunk bodies are word-aligned.
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt || !have_data) {
    throw Error(ErrorKind::kCorruptFile,
                "missing fmt/data chunk in " + path.string());
  }
  if (format != kFormatPcm || bits != kBitsPerSample) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "need PCM16, got format " + std::to_string(format) + " / " +
                    std::to_string(bits) + " bits: " + path.string());
  }
  if (channels != 1) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "need mono, got " + std::to_string(channels) +
                    " channels: " + path.string());
  }
  if (rate != static_cast<uint32_t>(kSampleRate)) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "need 16000 Hz, got " + std::to_string(rate) +
                    " Hz: " + path.string());
  }
  if (data_size % 2 != 0) {
    throw Error(ErrorKind::kCorruptFile,
                "odd PCM16 data size in " + path.string());
  }

  Signal signal;
  signal.sample_rate = kSampleRate;
  size_t count = data_size / 2;
  signal.samples.resize(count);
  const uint8_t* p = bytes.data() + data_offset;
  for (size_t i = 0; i < count; ++i) {
    int16_t v = static_cast<int16_t>(ReadU16(p + 2 * i));
    signal.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  return signal;
}

void WriteWav(const std::filesystem::path& path, const Signal& signal) {
  const uint32_t data_size = static_cast<uint32_t>(signal.samples.size() * 2);
  std::vector<uint8_t> bytes;
  bytes.reserve(44 + data_size);
  bytes.insert(bytes.end(), {'R', 'I', 'F', 'F'});
  PutU32(&bytes, 36 + data_size);
  bytes.insert(bytes.end(), {'W', 'A', 'V', 'E'});
  bytes.insert(bytes.end(), {'f', 'm', 't', ' '});
  PutU32(&bytes, 16);
  PutU16(&bytes, kFormatPcm);
  PutU16(&bytes, 1);
  PutU32(&bytes, static_cast<uint32_t>(signal.sample_rate));
  PutU32(&bytes, static_cast<uint32_t>(signal.sample_rate) * 2);
  PutU16(&bytes, 2);
  PutU16(&bytes, kBitsPerSample);
  bytes.insert(bytes.end(), {'d', 'a', 't', 'a'});
  PutU32(&bytes, data_size);
  for (float x : signal.samples) {
    long v = std::lround(static_cast<double>(x) * 32768.0);
    v = std::clamp(v, -32768L, 32767L);
    PutU16(&bytes, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::kIoError, "write failed for " + path.string());
  }
}

Signal PeakNormalize(const Signal& signal) {
  if (signal.samples.empty()) {
    throw Error(ErrorKind::kEmptySignal, "cannot normalize an empty signal");
  }
  float peak = 0.0f;
  for (float x : signal.samples) peak = std::max(peak, std::fabs(x));
  if (peak == 0.0f) return signal;

  const double gain = static_cast<double>(kPeakTarget) / peak;
  Signal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(signal.samples.size());
  for (size_t i = 0; i < signal.samples.size(); ++i) {
    out.samples[i] =
        static_cast<float>(static_cast<double>(signal.samples[i]) * gain);
  }
  return out;
}

CorpusSplit SplitCorpus(const std::filesystem::path& dir,
                        const SplitCounts& counts, uint64_t seed) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  const int needed = counts.Total();
  if (static_cast<int>(files.size()) < needed) {
    throw Error(ErrorKind::kNotEnoughFiles,
                "corpus " + dir.string() + " has " +
                    std::to_string(files.size()) + " wav files, need " +
                    std::to_string(needed));
  }

  Rng rng(seed);
  rng.Shuffle(&files);

  CorpusSplit split;
  split.seed = seed;
  auto it = files.begin();
  split.train.assign(it, it + counts.train);
  it += counts.train;
  split.validation.assign(it, it + counts.validation);
  it += counts.validation;
  split.test.assign(it, it + counts.test);
  return split;
}

}  // namespace nsc
