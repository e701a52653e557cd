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

#include <benchmark/benchmark.h>

#include <complex>

#include "nsc/codec.h"
#include "nsc/fft.h"
#include "nsc/mfcc.h"
#include "nsc/rng.h"

namespace {

nsc::Tensor<float> RandomWindow(int batch, int len, uint64_t seed) {
  nsc::Rng rng(seed);
  nsc::Tensor<float> t(batch, 1, len);
  for (float& v : t.values) v = static_cast<float>(rng.Uniform(-0.8, 0.8));
  return t;
}

void BM_Fft512(benchmark::State& state) {
  nsc::Rng rng(1);
  std::vector<std::complex<float>> a(512);
  for (auto& v : a) v = {static_cast<float>(rng.Uniform(-1, 1)), 0.0f};
  for (auto _ : state) {
    auto copy = a;
    nsc::FftInPlace(&copy);
    benchmark::DoNotOptimize(copy.data());
  }
}
BENCHMARK(BM_Fft512);

void BM_Mfcc512(benchmark::State& state) {
  nsc::MfccComputer<float> mfcc;
  nsc::Rng rng(2);
  std::vector<float> window(512);
  for (auto& v : window) v = static_cast<float>(rng.Uniform(-1, 1));
  for (auto _ : state) {
    auto coeffs = mfcc.ComputeAll(window.data(), 512);
    benchmark::DoNotOptimize(coeffs.data());
  }
}
BENCHMARK(BM_Mfcc512);

void BM_Conv1dForward(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  nsc::Conv1d<float> conv(channels, channels, 9, 1);
  nsc::Rng rng(3);
  conv.InitUniform(&rng);
  nsc::Tensor<float> x(1, channels, 512);
  for (float& v : x.values) v = static_cast<float>(rng.Uniform(-1, 1));
  for (auto _ : state) {
    auto y = conv.Forward(x);
    benchmark::DoNotOptimize(y.values.data());
  }
  state.SetItemsProcessed(state.iterations() * channels * channels * 512 * 9);
}
BENCHMARK(BM_Conv1dForward)->Arg(16)->Arg(32);

void BM_EncoderWindow(benchmark::State& state) {
  nsc::Model model =
      nsc::Model::Create(static_cast<int>(state.range(0)), 2, 11);
  nsc::Tensor<float> x = RandomWindow(1, 512, 4);
  for (auto _ : state) {
    auto z = model.encoder.Forward(x);
    benchmark::DoNotOptimize(z.values.data());
  }
}
BENCHMARK(BM_EncoderWindow)->Arg(16)->Arg(32);

void BM_DecoderWindow(benchmark::State& state) {
  nsc::Model model =
      nsc::Model::Create(static_cast<int>(state.range(0)), 2, 13);
  nsc::Tensor<float> z = RandomWindow(1, 256, 5);
  for (auto _ : state) {
    auto y = model.decoder.Forward(z);
    benchmark::DoNotOptimize(y.values.data());
  }
}
BENCHMARK(BM_DecoderWindow)->Arg(16)->Arg(32);

void BM_RangeCoder(benchmark::State& state) {
  nsc::Rng rng(6);
  std::vector<uint32_t> counts(32);
  for (auto& c : counts) c = 1 + rng.UniformInt(4000);
  nsc::FrequencyTable table = nsc::FrequencyTable::FromCounts(counts);
  std::vector<uint16_t> symbols(100000);
  for (auto& s : symbols) s = static_cast<uint16_t>(rng.UniformInt(32));
  for (auto _ : state) {
    auto bytes = nsc::RangeEncode(symbols, table);
    auto back = nsc::RangeDecode(bytes, symbols.size(), table);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * symbols.size());
}
BENCHMARK(BM_RangeCoder);

}  // namespace

BENCHMARK_MAIN();
