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

#include "nsc/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "nsc/error.h"

namespace nsc {
namespace {

// Little-endian writer/reader over a byte buffer. Floats travel as their
// IEEE-754 bit patterns, so files are identical across hosts.
class Writer {
 public:
  void U8(uint8_t v) { bytes_.push_back(v); }
  void U16(uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Raw(const char* data, size_t n) {
    bytes_.insert(bytes_.end(), data, data + n);
  }
  const std::vector<uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint8_t U8() { return Take(1)[0]; }
  uint16_t U16() {
    const uint8_t* p = Take(2);
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
  }
  uint32_t U32() {
    const uint8_t* p = Take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  uint64_t U64() {
    const uint8_t* p = Take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  const uint8_t* Take(size_t n) {
    if (pos_ + n > size_) {
      throw Error(ErrorKind::kTruncated, "checkpoint ends early");
    }
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  size_t Remaining() const { return size_ - pos_; }

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

void WriteBlockList(Writer* w, const std::vector<BlockSpec>& blocks) {
  w->U32(static_cast<uint32_t>(blocks.size()));
  for (const BlockSpec& b : blocks) {
    w->U8(static_cast<uint8_t>(b.kind));
    w->U32(static_cast<uint32_t>(b.in_channels));
    w->U32(static_cast<uint32_t>(b.out_channels));
  }
}

std::vector<BlockSpec> ReadBlockList(Reader* r) {
  const uint32_t count = r->U32();
  if (count > 1024) {
    throw Error(ErrorKind::kCorruptFile, "implausible block count");
  }
  std::vector<BlockSpec> blocks(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint8_t kind = r->U8();
    if (kind > static_cast<uint8_t>(BlockKind::kUpsample)) {
      throw Error(ErrorKind::kCorruptFile, "unknown block kind");
    }
    blocks[i].kind = static_cast<BlockKind>(kind);
    blocks[i].in_channels = static_cast<int>(r->U32());
    blocks[i].out_channels = static_cast<int>(r->U32());
  }
  return blocks;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, Model& model,
                    const FrequencyTable& table, const TrainConfig& config,
                    uint32_t best_epoch, double validation_score,
                    double estimated_bps) {
  Writer w;
  w.Raw(kCheckpointMagic, 4);
  w.U8(kCheckpointVersion);

  w.U32(static_cast<uint32_t>(model.sample_rate));
  w.U16(static_cast<uint16_t>(model.frame.window_len));
  w.U16(static_cast<uint16_t>(model.frame.overlap));
  w.U32(static_cast<uint32_t>(model.spec.channels));
  w.U32(static_cast<uint32_t>(model.spec.residual_blocks));
  WriteBlockList(&w, model.spec.encoder);
  WriteBlockList(&w, model.spec.decoder);

  // Weights in parameter-registration order.
  std::vector<ParamRef<float>> params = model.NetworkParams();
  uint64_t total = 0;
  for (const auto& p : params) total += p.size;
  w.U64(total);
  for (const auto& p : params) {
    for (size_t i = 0; i < p.size; ++i) w.F32(p.value[i]);
  }

  // Quantizer: log_sigma is stored directly so save/load/save is
  // byte-identical (exp/log do not round-trip in float).
  w.U32(static_cast<uint32_t>(model.quantizer.bins.size()));
  for (float b : model.quantizer.bins) w.F32(b);
  w.F32(model.quantizer.log_sigma);

  w.U32(static_cast<uint32_t>(table.counts.size()));
  for (uint32_t c : table.counts) w.U32(c);

  w.U32(static_cast<uint32_t>(config.stage1_epochs));
  w.U32(static_cast<uint32_t>(config.stage2_epochs));
  w.U32(static_cast<uint32_t>(config.batch_size));
  w.F64(config.alpha_initial);
  w.F64(config.alpha_final);
  w.F64(config.tau_initial);
  w.F64(config.tau_change);
  w.F64(config.target_bps);
  w.F64(config.target_halfwidth_bps);
  w.U64(config.seed);

  w.U32(best_epoch);
  w.F64(validation_score);
  w.F64(estimated_bps);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  }
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) {
    throw Error(ErrorKind::kIoError, "write failed for " + path.string());
  }
}

void SaveCheckpoint(const std::filesystem::path& path, Checkpoint& checkpoint) {
  SaveCheckpoint(path, checkpoint.model, checkpoint.table, checkpoint.config,
                 checkpoint.best_epoch, checkpoint.validation_score,
                 checkpoint.estimated_bps);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  Reader r(bytes.data(), bytes.size());

  const uint8_t* magic = r.Take(4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(ErrorKind::kBadMagic, "not an NSC model file");
  }
  const uint8_t version = r.U8();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "model version " + std::to_string(version));
  }

  Checkpoint checkpoint;
  Model& model = checkpoint.model;
  model.sample_rate = static_cast<int>(r.U32());
  model.frame.window_len = r.U16();
  model.frame.overlap = r.U16();
  model.spec.channels = static_cast<int>(r.U32());
  model.spec.residual_blocks = static_cast<int>(r.U32());
  model.spec.encoder = ReadBlockList(&r);
  model.spec.decoder = ReadBlockList(&r);

  model.encoder = Network<float>(model.spec.encoder, nullptr);
  model.decoder = Network<float>(model.spec.decoder, nullptr);

  std::vector<ParamRef<float>> params = model.NetworkParams();
  uint64_t total = 0;
  for (const auto& p : params) total += p.size;
  if (r.U64() != total) {
    throw Error(ErrorKind::kCorruptFile, "weight count mismatch");
  }
  for (const auto& p : params) {
    for (size_t i = 0; i < p.size; ++i) p.value[i] = r.F32();
  }

  const uint32_t num_bins = r.U32();
  if (num_bins > 65536) {
    throw Error(ErrorKind::kCorruptFile, "implausible bin count");
  }
  model.quantizer.bins.resize(num_bins);
  for (uint32_t i = 0; i < num_bins; ++i) model.quantizer.bins[i] = r.F32();
  model.quantizer.log_sigma = r.F32();
  model.quantizer.bin_grad.assign(num_bins, 0.0f);

  const uint32_t table_size = r.U32();
  if (table_size > 65536) {
    throw Error(ErrorKind::kCorruptFile, "implausible table size");
  }
  std::vector<uint32_t> counts(table_size);
  for (uint32_t i = 0; i < table_size; ++i) counts[i] = r.U32();
  checkpoint.table = FrequencyTable::FromCounts(std::move(counts));

  TrainConfig& cfg = checkpoint.config;
  cfg.stage1_epochs = static_cast<int>(r.U32());
  cfg.stage2_epochs = static_cast<int>(r.U32());
  cfg.batch_size = static_cast<int>(r.U32());
  cfg.alpha_initial = r.F64();
  cfg.alpha_final = r.F64();
  cfg.tau_initial = r.F64();
  cfg.tau_change = r.F64();
  cfg.target_bps = r.F64();
  cfg.target_halfwidth_bps = r.F64();
  cfg.seed = r.U64();
  cfg.channels = model.spec.channels;
  cfg.residual_blocks = model.spec.residual_blocks;
  cfg.num_bins = static_cast<int>(num_bins);

  checkpoint.best_epoch = r.U32();
  checkpoint.validation_score = r.F64();
  checkpoint.estimated_bps = r.F64();

  if (r.Remaining() != 0) {
    throw Error(ErrorKind::kCorruptFile, "trailing bytes in model file");
  }
  return checkpoint;
}

}  // namespace nsc
