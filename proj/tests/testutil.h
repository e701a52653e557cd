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

#ifndef NSC_TESTS_TESTUTIL_H_
#define NSC_TESTS_TESTUTIL_H_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nsc/audio_io.h"
#include "nsc/rng.h"
#include "nsc/tensor.h"

namespace nsc::test {

// Self-deleting temporary directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("nsc_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<float> RandomSamples(Rng* rng, size_t n,
                                        double amplitude = 0.8) {
  std::vector<float> out(n);
  for (size_t i = 0; i < n; ++i) {
    out[i] = static_cast<float>(rng->Uniform(-amplitude, amplitude));
  }
  return out;
}

inline Tensor<double> RandomTensor(Rng* rng, int b, int c, int l,
                                   double amplitude = 1.0) {
  Tensor<double> t(b, c, l);
  for (double& v : t.values) v = rng->Uniform(-amplitude, amplitude);
  return t;
}

// Central finite differences against an analytic gradient, elementwise.
// loss() must re-evaluate the full forward pass; param points at the value
// being perturbed. Returns the max relative error over the checked slots.
inline double GradCheck(const std::function<double()>& loss, double* param,
                        size_t count, const double* analytic,
                        double epsilon = 1e-4) {
  double worst = 0.0;
  for (size_t i = 0; i < count; ++i) {
    const double saved = param[i];
    param[i] = saved + epsilon;
    const double up = loss();
    param[i] = saved - epsilon;
    const double down = loss();
    param[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

// Speech-shaped synthetic fixture: a few amplitude-modulated harmonics over
// a low level of lowpass noise. Deterministic per (seed, file index).
inline Signal FixtureSignal(uint64_t seed, double seconds) {
  Rng rng(seed);
  const int n = static_cast<int>(seconds * kSampleRate);
  const double f0 = rng.Uniform(110.0, 220.0);
  const double am_rate = rng.Uniform(2.0, 4.0);
  const double am_phase = rng.Uniform(0.0, 2.0 * M_PI);
  const int harmonics = 3 + rng.UniformInt(4);
  std::vector<double> amp(harmonics), phase(harmonics), detune(harmonics);
  const double rolloff = rng.Uniform(0.8, 1.5);
  for (int h = 0; h < harmonics; ++h) {
    amp[h] = 1.0 / std::pow(h + 1.0, rolloff);
    phase[h] = rng.Uniform(0.0, 2.0 * M_PI);
    detune[h] = rng.Uniform(-0.8, 0.8);
  }
  const double noise_amp = rng.Uniform(0.01, 0.04);

  Signal signal;
  signal.samples.resize(n);
  double lp = 0.0;
  const double lp_coeff = 0.6;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double v = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      v += amp[h] * std::sin(2.0 * M_PI * (f0 * (h + 1) + detune[h]) * t +
                             phase[h]);
    }
    const double envelope =
        0.55 + 0.45 * std::sin(2.0 * M_PI * am_rate * t + am_phase);
    lp = lp_coeff * lp + (1.0 - lp_coeff) * rng.Uniform(-1.0, 1.0);
    v = v * envelope + noise_amp * lp;
    signal.samples[i] = static_cast<float>(v);
  }
  // Keep a known headroom; PeakNormalize happens inside the pipeline.
  float peak = 0.0f;
  for (float s : signal.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0f) {
    for (float& s : signal.samples) s = s / peak * 0.9f;
  }
  return signal;
}

// Writes count fixture files into dir.
inline void WriteFixtureCorpus(const std::filesystem::path& dir, int count,
                               double seconds, uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "fixture_%03d.wav", i);
    WriteWav(dir / name, FixtureSignal(seed + 1000 + i, seconds));
  }
}

}  // namespace nsc::test

#endif  // NSC_TESTS_TESTUTIL_H_
