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

#ifndef NSC_TRAINING_STEP_H_
#define NSC_TRAINING_STEP_H_

#include <vector>

#include "nsc/mfcc.h"
#include "nsc/nn.h"
#include "nsc/objective.h"
#include "nsc/quantizer.h"
#include "nsc/tensor.h"

namespace nsc {

template <typename T>
struct StepResult {
  LossReport<T> report;
  std::vector<T> histogram;  // mean soft assignment, empty in stage 1
};

// One full forward/backward pass of the codec objective over a minibatch of
// (B, 1, window_len) inputs. Parameter gradients accumulate into the
// encoder, decoder and quantizer; callers zero them between steps. With
// quantization_on false the quantizer is bypassed entirely (the decoder
// sees raw encoder codes), matching training stage 1.
//
// cached_input_coeffs, when given, points at per-window MFCC vectors of the
// inputs (ComputeAll output), one pointer per batch row.
template <typename T>
StepResult<T> RunTrainingStep(
    Network<T>* encoder, Network<T>* decoder, QuantizerState<T>* quantizer,
    bool quantization_on, const Tensor<T>& input,
    const MfccComputer<T>& mfcc, const LossWeights& weights,
    const std::vector<const std::vector<std::vector<T>>*>*
        cached_input_coeffs = nullptr) {
  const int batch = input.batch;
  const int window_len = input.length;

  Tensor<T> codes = encoder->Forward(input);
  const int symbols_per_window = codes.length;
  const int num_symbols = batch * symbols_per_window;

  SoftAssignments<T> assignments;
  Tensor<T> decoder_in;
  if (quantization_on) {
    const int n = quantizer->NumBins();
    assignments = SoftAssignments<T>(num_symbols, n);
    decoder_in = Tensor<T>(batch, 1, symbols_per_window);
    for (int b = 0; b < batch; ++b) {
      const T* z = codes.Row(b, 0);
      T* shat = decoder_in.Row(b, 0);
      for (int i = 0; i < symbols_per_window; ++i) {
        T* s = assignments.Row(b * symbols_per_window + i);
        SoftQuantize(z[i], *quantizer, s);
        shat[i] = Dequantize(s, *quantizer);
      }
    }
  } else {
    decoder_in = codes;
  }

  Tensor<T> output = decoder->Forward(decoder_in);

  // Loss terms.
  const T mse = MseLoss(input, output);
  T perceptual = T(0);
  Tensor<T> output_grad(output.batch, output.channels, output.length);
  MseLossBackward(input, output, static_cast<T>(weights.mse), &output_grad);
  const T perceptual_scale =
      static_cast<T>(weights.perceptual) / static_cast<T>(batch);
  for (int b = 0; b < batch; ++b) {
    if (cached_input_coeffs != nullptr) {
      perceptual += mfcc.PerceptualLossCached(
          *(*cached_input_coeffs)[b], output.Row(b, 0), window_len,
          perceptual_scale, output_grad.Row(b, 0));
    } else {
      perceptual +=
          mfcc.PerceptualLoss(input.Row(b, 0), output.Row(b, 0), window_len,
                              perceptual_scale, output_grad.Row(b, 0));
    }
  }
  perceptual /= static_cast<T>(batch);

  T qpen = T(0);
  T entropy = T(0);
  StepResult<T> result;
  if (quantization_on) {
    qpen = QuantizationPenalty(assignments);
    result.histogram = MeanAssignment(assignments);
    entropy = EntropyBits(result.histogram);
  }

  Tensor<T> shat_grad = decoder->Backward(output_grad);

  if (quantization_on) {
    SoftAssignments<T> assignment_grad(num_symbols, quantizer->NumBins());
    QuantizationPenaltyBackward(assignments,
                                static_cast<T>(weights.quantization),
                                &assignment_grad);
    EntropyBackward(assignments, result.histogram,
                    static_cast<T>(weights.entropy), &assignment_grad);

    Tensor<T> code_grad(batch, 1, symbols_per_window);
    const int n = quantizer->NumBins();
    for (int b = 0; b < batch; ++b) {
      const T* z = codes.Row(b, 0);
      const T* gshat = shat_grad.Row(b, 0);
      T* gz = code_grad.Row(b, 0);
      for (int i = 0; i < symbols_per_window; ++i) {
        const int row_index = b * symbols_per_window + i;
        const T* s = assignments.Row(row_index);
        T* gs = assignment_grad.Row(row_index);
        // Dequantize: shat = sum_j s_j B_j contributes to both gs and the
        // bin gradient directly.
        const T g = gshat[i];
        for (int j = 0; j < n; ++j) {
          gs[j] += g * quantizer->bins[j];
          quantizer->bin_grad[j] += g * s[j];
        }
        gz[i] = SoftQuantizeBackward(z[i], quantizer, s, gs);
      }
    }
    encoder->Backward(code_grad);
  } else {
    encoder->Backward(shat_grad);
  }

  result.report =
      TotalLoss(mse, perceptual, qpen, entropy, weights, quantization_on);
  return result;
}

}  // namespace nsc

#endif  // NSC_TRAINING_STEP_H_
