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
#include <complex>

#include "doctest.h"
#include "nsc/fft.h"
#include "nsc/mfcc.h"
#include "testutil.h"

using namespace nsc;

namespace {

std::vector<double> Sine(double freq_hz, int len, double amplitude = 0.7) {
  std::vector<double> x(len);
  for (int i = 0; i < len; ++i) {
    x[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * i / 16000.0);
  }
  return x;
}

double Mse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("fft matches a naive dft and inverts") {
  Rng rng(5);
  std::vector<std::complex<double>> a(64);
  for (auto& v : a) v = {rng.Uniform(-1, 1), rng.Uniform(-1, 1)};
  std::vector<std::complex<double>> original = a;

  std::vector<std::complex<double>> direct(64);
  for (int k = 0; k < 64; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < 64; ++n) {
      acc += original[n] * std::polar(1.0, -2.0 * M_PI * k * n / 64.0);
    }
    direct[k] = acc;
  }

  FftInPlace(&a);
  for (int k = 0; k < 64; ++k) {
    CHECK(std::abs(a[k] - direct[k]) < 1e-10);
  }
  FftInPlace(&a, true);
  for (int k = 0; k < 64; ++k) {
    CHECK(std::abs(a[k] - original[k]) < 1e-12);
  }
}

TEST_CASE("mel scale") {
  CHECK(HzToMel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(HzToMel(700.0) == doctest::Approx(781.17).epsilon(1e-4));
  CHECK(MelToHz(HzToMel(3456.0)) == doctest::Approx(3456.0).epsilon(1e-10));
  CHECK(HzToMel(0.0) == 0.0);
}

TEST_CASE("filterbank rows are positive, contiguous, in-band") {
  MfccConfig config;
  for (int m : {1, 8, 16, 32, 128}) {
    auto rows = MelFilterbank(m, config);
    REQUIRE(static_cast<int>(rows.size()) == m);
    for (int f = 0; f < m; ++f) {
      double sum = 0.0;
      int first = -1, last = -1;
      for (int k = 0; k < config.NumBins(); ++k) {
        REQUIRE(rows[f][k] >= 0.0);
        sum += rows[f][k];
        if (rows[f][k] > 0.0) {
          if (first < 0) first = k;
          last = k;
        }
      }
      REQUIRE(sum > 0.0);
      // Support is one contiguous run.
      for (int k = first; k <= last; ++k) {
        if (k > first && k < last) REQUIRE(rows[f][k] > 0.0);
      }
    }
  }
}

TEST_CASE("zero window produces a flat log spectrum") {
  MfccComputer<double> mfcc;
  std::vector<double> zero(512, 0.0);
  for (int bank = 0; bank < 4; ++bank) {
    const int m = mfcc.config().filterbank_sizes[bank];
    std::vector<double> coeffs = mfcc.Compute(zero.data(), 512, bank);
    REQUIRE(static_cast<int>(coeffs.size()) == m);
    // log(max(0, floor)) is constant, so only the DC coefficient survives.
    CHECK(coeffs[0] ==
          doctest::Approx(std::sqrt(static_cast<double>(m)) * std::log(1e-8)));
    for (int k = 1; k < m; ++k) {
      CHECK(std::abs(coeffs[k]) < 1e-9);
    }
    for (double c : coeffs) CHECK(std::isfinite(c));
  }
}

TEST_CASE("deterministic") {
  MfccComputer<double> mfcc;
  Rng rng(9);
  std::vector<double> x(512);
  for (auto& v : x) v = rng.Uniform(-1, 1);
  auto a = mfcc.ComputeAll(x.data(), 512);
  auto b = mfcc.ComputeAll(x.data(), 512);
  for (int bank = 0; bank < 4; ++bank) {
    for (size_t i = 0; i < a[bank].size(); ++i) {
      REQUIRE(a[bank][i] == b[bank][i]);
    }
  }
}

TEST_CASE("distinct tones are distinct") {
  MfccComputer<double> mfcc;
  auto x = Sine(1000.0, 512);
  auto y = Sine(4000.0, 512);
  auto cx = mfcc.Compute(x.data(), 512, 2);  // 32-filter bank
  auto cy = mfcc.Compute(y.data(), 512, 2);
  CHECK(Mse(cx, cy) > 0.1);
}

TEST_CASE("perceptual loss basics") {
  MfccComputer<double> mfcc;
  Rng rng(13);
  std::vector<double> x(512), y(512);
  for (auto& v : x) v = rng.Uniform(-1, 1);
  for (auto& v : y) v = rng.Uniform(-1, 1);

  CHECK(mfcc.PerceptualLoss(x.data(), x.data(), 512) == 0.0);
  CHECK(mfcc.PerceptualLoss(x.data(), y.data(), 512) ==
        mfcc.PerceptualLoss(y.data(), x.data(), 512));
  CHECK(mfcc.PerceptualLoss(x.data(), y.data(), 512) > 0.0);
}

TEST_CASE("perceptual loss gradient matches finite differences") {
  MfccComputer<double> mfcc;
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(512), y(512);
    for (auto& v : x) v = rng.Uniform(-0.9, 0.9);
    for (auto& v : y) v = rng.Uniform(-0.9, 0.9);

    std::vector<double> grad(512, 0.0);
    mfcc.PerceptualLoss(x.data(), y.data(), 512, 1.0, grad.data());

    auto loss = [&]() { return mfcc.PerceptualLoss(x.data(), y.data(), 512); };
    // Check a seeded subset of coordinates; full 512 x 10 is slow for
    // nothing.
    for (int probe = 0; probe < 24; ++probe) {
      const int i = rng.UniformInt(512);
      worst = std::max(
          worst, test::GradCheck(loss, &y[i], 1, &grad[i], 1e-4));
    }
  }
  CHECK(worst < 1e-3);
}
