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

#include "nsc/codec.h"

#include <algorithm>

#include "nsc/error.h"
#include "nsc/tensor.h"

namespace nsc {
namespace {

// Inference batches a handful of windows at a time to bound memory.
constexpr int kInferenceBatch = 64;

Tensor<float> WindowBatch(const WindowSequence& windows, size_t begin,
                          size_t end, int window_len) {
  Tensor<float> x(static_cast<int>(end - begin), 1, window_len);
  for (size_t w = begin; w < end; ++w) {
    std::copy(windows.windows[w].begin(), windows.windows[w].end(),
              x.Row(static_cast<int>(w - begin), 0));
  }
  return x;
}

}  // namespace

Model Model::Create(int channels, int residual_blocks, uint64_t seed) {
  Model model;
  model.spec = NetworkSpec::Default(channels, residual_blocks);
  Rng rng(seed);
  model.encoder = Network<float>(model.spec.encoder, &rng);
  model.decoder = Network<float>(model.spec.decoder, &rng);
  return model;
}

std::vector<ParamRef<float>> Model::NetworkParams() {
  std::vector<ParamRef<float>> params;
  encoder.CollectParams(&params);
  decoder.CollectParams(&params);
  return params;
}

std::vector<ParamRef<float>> Model::AllParams() {
  std::vector<ParamRef<float>> params = NetworkParams();
  quantizer.CollectParams(&params);
  return params;
}

std::vector<std::vector<float>> EncoderCodes(Model* model,
                                             const WindowSequence& windows) {
  const size_t count = windows.windows.size();
  const int symbols = model->SymbolsPerWindow();
  std::vector<std::vector<float>> codes(count);
  for (size_t begin = 0; begin < count; begin += kInferenceBatch) {
    const size_t end = std::min(count, begin + kInferenceBatch);
    Tensor<float> x =
        WindowBatch(windows, begin, end, model->frame.window_len);
    Tensor<float> z = model->encoder.Forward(x);
    if (z.channels != 1 || z.length != symbols) {
      throw Error(ErrorKind::kShapeMismatch, "unexpected encoder code shape");
    }
    for (size_t w = begin; w < end; ++w) {
      const float* row = z.Row(static_cast<int>(w - begin), 0);
      codes[w].assign(row, row + symbols);
    }
  }
  return codes;
}

std::vector<uint16_t> EncodeWindows(Model* model,
                                    const WindowSequence& windows) {
  if (!model->QuantizerReady()) {
    throw Error(ErrorKind::kInvalidArgument, "quantizer not initialized");
  }
  std::vector<std::vector<float>> codes = EncoderCodes(model, windows);
  const int symbols = model->SymbolsPerWindow();
  std::vector<uint16_t> out;
  out.reserve(codes.size() * symbols);
  for (const std::vector<float>& row : codes) {
    for (float z : row) {
      out.push_back(static_cast<uint16_t>(NearestBin(z, model->quantizer)));
    }
  }
  return out;
}

WindowSequence DecodeWindows(Model* model,
                             const std::vector<uint16_t>& symbols,
                             uint32_t num_windows, size_t original_len) {
  const int per_window = model->SymbolsPerWindow();
  if (symbols.size() != static_cast<size_t>(num_windows) * per_window) {
    throw Error(ErrorKind::kLengthMismatch, "symbol count / window mismatch");
  }
  WindowSequence seq;
  seq.original_len = original_len;
  seq.windows.resize(num_windows);

  const int n = model->quantizer.NumBins();
  for (size_t begin = 0; begin < num_windows;
       begin += static_cast<size_t>(kInferenceBatch)) {
    const size_t end =
        std::min<size_t>(num_windows, begin + kInferenceBatch);
    Tensor<float> shat(static_cast<int>(end - begin), 1, per_window);
    for (size_t w = begin; w < end; ++w) {
      float* row = shat.Row(static_cast<int>(w - begin), 0);
      for (int i = 0; i < per_window; ++i) {
        const uint16_t sym = symbols[w * per_window + i];
        if (sym >= n) {
          throw Error(ErrorKind::kSymbolOutOfRange,
                      "symbol " + std::to_string(sym));
        }
        row[i] = model->quantizer.bins[sym];
      }
    }
    Tensor<float> y = model->decoder.Forward(shat);
    if (y.channels != 1 || y.length != model->frame.window_len) {
      throw Error(ErrorKind::kShapeMismatch, "unexpected decoder output");
    }
    for (size_t w = begin; w < end; ++w) {
      const float* row = y.Row(static_cast<int>(w - begin), 0);
      seq.windows[w].assign(row, row + model->frame.window_len);
    }
  }
  return seq;
}

std::vector<uint8_t> EncodeSignal(Model* model, const FrequencyTable& table,
                                  const Signal& signal) {
  if (signal.sample_rate != model->sample_rate) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "signal rate " + std::to_string(signal.sample_rate) +
                    " does not match model rate " +
                    std::to_string(model->sample_rate));
  }
  const Signal normalized = PeakNormalize(signal);
  const WindowSequence windows = ExtractWindows(normalized.samples, model->frame);
  const std::vector<uint16_t> symbols = EncodeWindows(model, windows);

  BitstreamMeta meta;
  meta.sample_rate = static_cast<uint32_t>(model->sample_rate);
  meta.window_len = static_cast<uint16_t>(model->frame.window_len);
  meta.overlap = static_cast<uint16_t>(model->frame.overlap);
  meta.num_windows = static_cast<uint32_t>(windows.windows.size());
  meta.original_len = windows.original_len;
  return PackBitstream(symbols, meta, table);
}

Signal DecodeSignal(Model* model, const FrequencyTable& model_table,
                    const std::vector<uint8_t>& bitstream) {
  UnpackedBitstream unpacked =
      UnpackBitstream(bitstream, model->quantizer.NumBins());
  if (!(unpacked.table == model_table)) {
    throw Error(ErrorKind::kModelMismatch,
                "bitstream frequency table does not match the model");
  }
  if (unpacked.meta.window_len != model->frame.window_len ||
      unpacked.meta.overlap != model->frame.overlap ||
      unpacked.meta.sample_rate != static_cast<uint32_t>(model->sample_rate)) {
    throw Error(ErrorKind::kModelMismatch,
                "bitstream framing does not match the model");
  }
  WindowSequence windows =
      DecodeWindows(model, unpacked.symbols, unpacked.meta.num_windows,
                    unpacked.meta.original_len);
  Signal out;
  out.sample_rate = model->sample_rate;
  out.samples = OverlapAdd(windows, model->frame);
  for (float& v : out.samples) v = std::clamp(v, -1.0f, 1.0f);
  return out;
}

}  // namespace nsc
