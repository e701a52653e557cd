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

#ifndef NSC_NN_H_
#define NSC_NN_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nsc/error.h"
#include "nsc/rng.h"
#include "nsc/tensor.h"

namespace nsc {

// View of one trainable parameter block and its gradient accumulator.
template <typename T>
struct ParamRef {
  T* value = nullptr;
  T* grad = nullptr;
  size_t size = 0;
};

// Layers cache their forward input, so a Module instance is exclusive to
// one thread between Forward and Backward. Parameter gradients accumulate
// across Backward calls until the optimizer clears them.
template <typename T>
class Module {
 public:
  virtual ~Module() = default;
  virtual Tensor<T> Forward(const Tensor<T>& input) = 0;
  virtual Tensor<T> Backward(const Tensor<T>& output_grad) = 0;
  virtual void CollectParams(std::vector<ParamRef<T>>* /*out*/) {}
};

// 1-D convolution with same padding; stride 2 halves the length (ceil).
template <typename T>
class Conv1d : public Module<T> {
 public:
  Conv1d(int in_channels, int out_channels, int kernel, int stride)
      : in_channels_(in_channels),
        out_channels_(out_channels),
        kernel_(kernel),
        stride_(stride),
        pad_(kernel / 2),
        weight_(static_cast<size_t>(out_channels) * in_channels * kernel,
                T(0)),
        bias_(out_channels, T(0)),
        weight_grad_(weight_.size(), T(0)),
        bias_grad_(out_channels, T(0)) {
    if (kernel % 2 != 1 || kernel < 1 || (stride != 1 && stride != 2)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "conv1d supports odd kernels and stride 1 or 2");
    }
  }

  // Fan-in scaled uniform init; biases start at zero.
  void InitUniform(Rng* rng) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(in_channels_) * kernel_);
    for (T& w : weight_) w = static_cast<T>(rng->Uniform(-bound, bound));
    for (T& b : bias_) b = T(0);
  }

  int OutLength(int in_len) const {
    return stride_ == 1 ? in_len : (in_len + 1) / 2;
  }

  Tensor<T> Forward(const Tensor<T>& input) override {
    if (input.channels != in_channels_ || input.length < 1) {
      throw Error(ErrorKind::kShapeMismatch,
                  "conv1d expects " + std::to_string(in_channels_) +
                      " channels, got " + std::to_string(input.channels));
    }
    input_ = input;
    const int out_len = OutLength(input.length);
    Tensor<T> out(input.batch, out_channels_, out_len);
    const int in_len = input.length;
    for (int b = 0; b < input.batch; ++b) {
      for (int oc = 0; oc < out_channels_; ++oc) {
        T* orow = out.Row(b, oc);
        const T bias = bias_[oc];
        for (int t = 0; t < out_len; ++t) orow[t] = bias;
        for (int ic = 0; ic < in_channels_; ++ic) {
          const T* w = WeightRow(oc, ic);
          const T* x = input.Row(b, ic);
          for (int k = 0; k < kernel_; ++k) {
            const T wk = w[k];
            const int off = k - pad_;
            if (stride_ == 1) {
              const int t0 = std::max(0, -off);
              const int t1 = std::min(out_len, in_len - off);
              for (int t = t0; t < t1; ++t) orow[t] += wk * x[t + off];
            } else {
              const int t0 = std::max(0, (-off + 1) / 2);
              const int t1 = std::min(out_len, (in_len - off + 1) / 2);
              for (int t = t0; t < t1; ++t) orow[t] += wk * x[2 * t + off];
            }
          }
        }
      }
    }
    return out;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    const int in_len = input_.length;
    const int out_len = OutLength(in_len);
    if (output_grad.batch != input_.batch ||
        output_grad.channels != out_channels_ ||
        output_grad.length != out_len) {
      throw Error(ErrorKind::kShapeMismatch, "conv1d backward shape");
    }
    Tensor<T> input_grad(input_.batch, in_channels_, in_len);
    for (int b = 0; b < input_.batch; ++b) {
      for (int oc = 0; oc < out_channels_; ++oc) {
        const T* gy = output_grad.Row(b, oc);
        T gb = T(0);
        for (int t = 0; t < out_len; ++t) gb += gy[t];
        bias_grad_[oc] += gb;
        for (int ic = 0; ic < in_channels_; ++ic) {
          const T* w = WeightRow(oc, ic);
          T* gwrow = WeightGradRow(oc, ic);
          const T* x = input_.Row(b, ic);
          T* gx = input_grad.Row(b, ic);
          for (int k = 0; k < kernel_; ++k) {
            const int off = k - pad_;
            const T wk = w[k];
            T gw = T(0);
            if (stride_ == 1) {
              const int t0 = std::max(0, -off);
              const int t1 = std::min(out_len, in_len - off);
              for (int t = t0; t < t1; ++t) {
                gw += gy[t] * x[t + off];
                gx[t + off] += wk * gy[t];
              }
            } else {
              const int t0 = std::max(0, (-off + 1) / 2);
              const int t1 = std::min(out_len, (in_len - off + 1) / 2);
              for (int t = t0; t < t1; ++t) {
                gw += gy[t] * x[2 * t + off];
                gx[2 * t + off] += wk * gy[t];
              }
            }
            gwrow[k] += gw;
          }
        }
      }
    }
    return input_grad;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    out->push_back({weight_.data(), weight_grad_.data(), weight_.size()});
    out->push_back({bias_.data(), bias_grad_.data(), bias_.size()});
  }

  std::vector<T>& weight() { return weight_; }
  std::vector<T>& bias() { return bias_; }
  int stride() const { return stride_; }

 private:
  T* WeightRow(int oc, int ic) {
    return weight_.data() +
           (static_cast<size_t>(oc) * in_channels_ + ic) * kernel_;
  }
  T* WeightGradRow(int oc, int ic) {
    return weight_grad_.data() +
           (static_cast<size_t>(oc) * in_channels_ + ic) * kernel_;
  }

  int in_channels_, out_channels_, kernel_, stride_, pad_;
  std::vector<T> weight_, bias_, weight_grad_, bias_grad_;
  Tensor<T> input_;
};

// Per-channel parametric ReLU: f(v) = v for v > 0, a_c * v otherwise.
template <typename T>
class PRelu : public Module<T> {
 public:
  explicit PRelu(int channels, T init_slope = T(0.25))
      : slope_(channels, init_slope), slope_grad_(channels, T(0)) {}

  Tensor<T> Forward(const Tensor<T>& input) override {
    if (input.channels != static_cast<int>(slope_.size())) {
      throw Error(ErrorKind::kShapeMismatch, "prelu channel count");
    }
    input_ = input;
    Tensor<T> out = input;
    for (int b = 0; b < input.batch; ++b) {
      for (int c = 0; c < input.channels; ++c) {
        const T a = slope_[c];
        T* row = out.Row(b, c);
        for (int t = 0; t < input.length; ++t) {
          if (row[t] <= T(0)) row[t] *= a;
        }
      }
    }
    return out;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    if (!output_grad.SameShape(input_)) {
      throw Error(ErrorKind::kShapeMismatch, "prelu backward shape");
    }
    Tensor<T> input_grad(input_.batch, input_.channels, input_.length);
    for (int b = 0; b < input_.batch; ++b) {
      for (int c = 0; c < input_.channels; ++c) {
        const T a = slope_[c];
        const T* v = input_.Row(b, c);
        const T* g = output_grad.Row(b, c);
        T* gx = input_grad.Row(b, c);
        T ga = T(0);
        for (int t = 0; t < input_.length; ++t) {
          if (v[t] > T(0)) {
            gx[t] = g[t];
          } else {
            gx[t] = a * g[t];
            ga += g[t] * v[t];
          }
        }
        slope_grad_[c] += ga;
      }
    }
    return input_grad;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    out->push_back({slope_.data(), slope_grad_.data(), slope_.size()});
  }

  std::vector<T>& slope() { return slope_; }

 private:
  std::vector<T> slope_, slope_grad_;
  Tensor<T> input_;
};

// (B, 2C, L) -> (B, C, 2L): channel pair (2j, 2j+1) interleaves into the
// length axis of output channel j. Backward applies the inverse permutation.
template <typename T>
class SubpixelUpsample : public Module<T> {
 public:
  Tensor<T> Forward(const Tensor<T>& input) override {
    if (input.channels % 2 != 0) {
      throw Error(ErrorKind::kOddChannels,
                  "subpixel upsampling needs an even channel count, got " +
                      std::to_string(input.channels));
    }
    Tensor<T> out(input.batch, input.channels / 2, input.length * 2);
    for (int b = 0; b < input.batch; ++b) {
      for (int j = 0; j < out.channels; ++j) {
        const T* even = input.Row(b, 2 * j);
        const T* odd = input.Row(b, 2 * j + 1);
        T* orow = out.Row(b, j);
        for (int t = 0; t < input.length; ++t) {
          orow[2 * t] = even[t];
          orow[2 * t + 1] = odd[t];
        }
      }
    }
    return out;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    if (output_grad.length % 2 != 0) {
      throw Error(ErrorKind::kShapeMismatch, "subpixel backward length");
    }
    Tensor<T> input_grad(output_grad.batch, output_grad.channels * 2,
                         output_grad.length / 2);
    for (int b = 0; b < output_grad.batch; ++b) {
      for (int j = 0; j < output_grad.channels; ++j) {
        const T* g = output_grad.Row(b, j);
        T* even = input_grad.Row(b, 2 * j);
        T* odd = input_grad.Row(b, 2 * j + 1);
        for (int t = 0; t < input_grad.length; ++t) {
          even[t] = g[2 * t];
          odd[t] = g[2 * t + 1];
        }
      }
    }
    return input_grad;
  }
};

enum class BlockKind : uint8_t {
  kResidual = 0,
  kChannelChange = 1,
  kDownsample = 2,
  kUpsample = 3,
};

struct BlockSpec {
  BlockKind kind = BlockKind::kResidual;
  int in_channels = 0;
  int out_channels = 0;
};

// y = x + conv/act/conv/act path; exact identity when the convs are zero.
template <typename T>
class ResidualBlock : public Module<T> {
 public:
  explicit ResidualBlock(int channels)
      : conv1_(channels, channels, 9, 1),
        act1_(channels),
        conv2_(channels, channels, 9, 1),
        act2_(channels) {}

  Tensor<T> Forward(const Tensor<T>& input) override {
    Tensor<T> h = act2_.Forward(conv2_.Forward(act1_.Forward(conv1_.Forward(input))));
    for (size_t i = 0; i < h.values.size(); ++i) h.values[i] += input.values[i];
    return h;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    Tensor<T> g = conv1_.Backward(
        act1_.Backward(conv2_.Backward(act2_.Backward(output_grad))));
    for (size_t i = 0; i < g.values.size(); ++i)
      g.values[i] += output_grad.values[i];
    return g;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    conv1_.CollectParams(out);
    act1_.CollectParams(out);
    conv2_.CollectParams(out);
    act2_.CollectParams(out);
  }

  Conv1d<T>& conv1() { return conv1_; }
  Conv1d<T>& conv2() { return conv2_; }
  void Init(Rng* rng) {
    conv1_.InitUniform(rng);
    conv2_.InitUniform(rng);
  }

 private:
  Conv1d<T> conv1_;
  PRelu<T> act1_;
  Conv1d<T> conv2_;
  PRelu<T> act2_;
};

// y = act(conv9(x)) + proj1(x); maps C_in -> C_out at constant length.
template <typename T>
class ChannelChangeBlock : public Module<T> {
 public:
  ChannelChangeBlock(int in_channels, int out_channels)
      : main_(in_channels, out_channels, 9, 1),
        act_(out_channels),
        proj_(in_channels, out_channels, 1, 1) {}

  Tensor<T> Forward(const Tensor<T>& input) override {
    Tensor<T> y = act_.Forward(main_.Forward(input));
    Tensor<T> skip = proj_.Forward(input);
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += skip.values[i];
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    Tensor<T> g = main_.Backward(act_.Backward(output_grad));
    Tensor<T> gskip = proj_.Backward(output_grad);
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] += gskip.values[i];
    return g;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    main_.CollectParams(out);
    act_.CollectParams(out);
    proj_.CollectParams(out);
  }

  void Init(Rng* rng) {
    main_.InitUniform(rng);
    proj_.InitUniform(rng);
  }

 private:
  Conv1d<T> main_;
  PRelu<T> act_;
  Conv1d<T> proj_;
};

// Strided conv path plus strided 1x projection skip; halves the length.
template <typename T>
class DownsampleBlock : public Module<T> {
 public:
  DownsampleBlock(int in_channels, int out_channels)
      : main_(in_channels, out_channels, 9, 2),
        act_(out_channels),
        proj_(in_channels, out_channels, 1, 2) {}

  Tensor<T> Forward(const Tensor<T>& input) override {
    Tensor<T> y = act_.Forward(main_.Forward(input));
    Tensor<T> skip = proj_.Forward(input);
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += skip.values[i];
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    Tensor<T> g = main_.Backward(act_.Backward(output_grad));
    Tensor<T> gskip = proj_.Backward(output_grad);
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] += gskip.values[i];
    return g;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    main_.CollectParams(out);
    act_.CollectParams(out);
    proj_.CollectParams(out);
  }

  void Init(Rng* rng) {
    main_.InitUniform(rng);
    proj_.InitUniform(rng);
  }

 private:
  Conv1d<T> main_;
  PRelu<T> act_;
  Conv1d<T> proj_;
};

// Subpixel path with subpixel projection skip; doubles the length. The
// convs emit 2 * out_channels, which the subpixel shuffle folds into time.
template <typename T>
class UpsampleBlock : public Module<T> {
 public:
  UpsampleBlock(int in_channels, int out_channels)
      : main_(in_channels, 2 * out_channels, 9, 1),
        act_(2 * out_channels),
        proj_(in_channels, 2 * out_channels, 1, 1) {}

  Tensor<T> Forward(const Tensor<T>& input) override {
    Tensor<T> y = shuffle_main_.Forward(act_.Forward(main_.Forward(input)));
    Tensor<T> skip = shuffle_proj_.Forward(proj_.Forward(input));
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += skip.values[i];
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    Tensor<T> g =
        main_.Backward(act_.Backward(shuffle_main_.Backward(output_grad)));
    Tensor<T> gskip = proj_.Backward(shuffle_proj_.Backward(output_grad));
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] += gskip.values[i];
    return g;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    main_.CollectParams(out);
    act_.CollectParams(out);
    proj_.CollectParams(out);
  }

  void Init(Rng* rng) {
    main_.InitUniform(rng);
    proj_.InitUniform(rng);
  }

 private:
  Conv1d<T> main_;
  PRelu<T> act_;
  Conv1d<T> proj_;
  SubpixelUpsample<T> shuffle_main_;
  SubpixelUpsample<T> shuffle_proj_;
};

template <typename T>
std::unique_ptr<Module<T>> BuildBlock(const BlockSpec& spec, Rng* rng) {
  std::unique_ptr<Module<T>> block;
  switch (spec.kind) {
    case BlockKind::kResidual: {
      if (spec.in_channels != spec.out_channels) {
        throw Error(ErrorKind::kInvalidArgument,
                    "residual block must preserve channels");
      }
      auto b = std::make_unique<ResidualBlock<T>>(spec.in_channels);
      if (rng != nullptr) b->Init(rng);
      block = std::move(b);
      break;
    }
    case BlockKind::kChannelChange: {
      auto b = std::make_unique<ChannelChangeBlock<T>>(spec.in_channels,
                                                       spec.out_channels);
      if (rng != nullptr) b->Init(rng);
      block = std::move(b);
      break;
    }
    case BlockKind::kDownsample: {
      auto b = std::make_unique<DownsampleBlock<T>>(spec.in_channels,
                                                    spec.out_channels);
      if (rng != nullptr) b->Init(rng);
      block = std::move(b);
      break;
    }
    case BlockKind::kUpsample: {
      auto b = std::make_unique<UpsampleBlock<T>>(spec.in_channels,
                                                  spec.out_channels);
      if (rng != nullptr) b->Init(rng);
      block = std::move(b);
      break;
    }
  }
  return block;
}

// Encoder maps (B, 1, 512) -> (B, 1, 256); the decoder mirrors it with the
// single stride-2 stage replaced by a subpixel upsample.
struct NetworkSpec {
  int channels = 32;
  int residual_blocks = 2;
  std::vector<BlockSpec> encoder;
  std::vector<BlockSpec> decoder;

  static NetworkSpec Default(int channels, int residual_blocks) {
    NetworkSpec spec;
    spec.channels = channels;
    spec.residual_blocks = residual_blocks;
    spec.encoder.push_back({BlockKind::kChannelChange, 1, channels});
    for (int i = 0; i < residual_blocks; ++i) {
      spec.encoder.push_back({BlockKind::kResidual, channels, channels});
    }
    spec.encoder.push_back({BlockKind::kDownsample, channels, channels});
    spec.encoder.push_back({BlockKind::kChannelChange, channels, 1});

    spec.decoder.push_back({BlockKind::kChannelChange, 1, channels});
    for (int i = 0; i < residual_blocks; ++i) {
      spec.decoder.push_back({BlockKind::kResidual, channels, channels});
    }
    spec.decoder.push_back({BlockKind::kUpsample, channels, channels});
    spec.decoder.push_back({BlockKind::kChannelChange, channels, 1});
    return spec;
  }
};

template <typename T>
class Network : public Module<T> {
 public:
  Network() = default;
  Network(const std::vector<BlockSpec>& blocks, Rng* rng) : spec_(blocks) {
    for (const BlockSpec& b : blocks) {
      blocks_.push_back(BuildBlock<T>(b, rng));
    }
  }

  Tensor<T> Forward(const Tensor<T>& input) override {
    Tensor<T> x = input;
    for (auto& block : blocks_) {
      x = block->Forward(x);
#ifndef NDEBUG
      if (!x.AllFinite()) {
        throw Error(ErrorKind::kNanLoss, "non-finite activation in forward");
      }
#endif
    }
    return x;
  }

  Tensor<T> Backward(const Tensor<T>& output_grad) override {
    Tensor<T> g = output_grad;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      g = (*it)->Backward(g);
    }
    return g;
  }

  void CollectParams(std::vector<ParamRef<T>>* out) override {
    for (auto& block : blocks_) block->CollectParams(out);
  }

  std::vector<ParamRef<T>> Params() {
    std::vector<ParamRef<T>> out;
    CollectParams(&out);
    return out;
  }

  const std::vector<BlockSpec>& blocks() const { return spec_; }
  size_t NumBlocks() const { return blocks_.size(); }
  Module<T>& block(size_t i) { return *blocks_[i]; }

 private:
  std::vector<BlockSpec> spec_;
  std::vector<std::unique_ptr<Module<T>>> blocks_;
};

}  // namespace nsc

#endif  // NSC_NN_H_
