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

#ifndef NSC_CODEC_H_
#define NSC_CODEC_H_

#include <cstdint>
#include <vector>

#include "nsc/audio_io.h"
#include "nsc/coder.h"
#include "nsc/framing.h"
#include "nsc/nn.h"
#include "nsc/quantizer.h"

namespace nsc {

// The deployable codec: encoder/decoder networks plus the trained
// quantizer. Forward passes cache activations, so clone per thread for
// concurrent use; the weights themselves are only written by the trainer.
struct Model {
  NetworkSpec spec;
  Network<float> encoder;
  Network<float> decoder;
  QuantizerState<float> quantizer;
  FrameConfig frame;
  int sample_rate = kSampleRate;

  static Model Create(int channels, int residual_blocks, uint64_t seed);

  bool QuantizerReady() const { return quantizer.bins.size() >= 2; }
  int SymbolsPerWindow() const { return frame.window_len / 2; }

  std::vector<ParamRef<float>> NetworkParams();
  std::vector<ParamRef<float>> AllParams();  // networks + quantizer
};

// Runs the encoder over a window sequence and hardens each code scalar to
// its nearest bin. Output is num_windows * SymbolsPerWindow() symbols.
std::vector<uint16_t> EncodeWindows(Model* model, const WindowSequence& windows);

// Per-window encoder outputs before quantization (one row of
// SymbolsPerWindow() scalars per window).
std::vector<std::vector<float>> EncoderCodes(Model* model,
                                             const WindowSequence& windows);

// Maps hardened symbols back to bin values and runs the decoder.
WindowSequence DecodeWindows(Model* model, const std::vector<uint16_t>& symbols,
                             uint32_t num_windows, size_t original_len);

// Full deployment path: peak-normalize, window, encode, harden, range-code,
// pack. Deterministic for fixed (model, signal).
std::vector<uint8_t> EncodeSignal(Model* model, const FrequencyTable& table,
                                  const Signal& signal);

// Inverse of EncodeSignal. The bitstream's table and framing must match the
// model's; a disagreement means the stream was produced by another model.
Signal DecodeSignal(Model* model, const FrequencyTable& model_table,
                    const std::vector<uint8_t>& bitstream);

}  // namespace nsc

#endif  // NSC_CODEC_H_
