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

#include "nsc/mfcc.h"

#include <algorithm>

#include "nsc/error.h"

namespace nsc {
namespace {

// Integral of the triangle with knots (left, center, right) and unit peak
// over the interval [a, b]. Trapezoid rule is exact on each linear segment.
double TriangleIntegral(double left, double center, double right, double a,
                        double b) {
  auto segment = [](double x0, double x1, double v0, double v1, double lo,
                    double hi) {
    const double c0 = std::max(x0, lo);
    const double c1 = std::min(x1, hi);
    if (c1 <= c0) return 0.0;
    auto value = [&](double x) {
      return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
    };
    return (c1 - c0) * 0.5 * (value(c0) + value(c1));
  };
  return segment(left, center, 0.0, 1.0, a, b) +
         segment(center, right, 1.0, 0.0, a, b);
}

}  // namespace

std::vector<std::vector<double>> MelFilterbank(int num_filters,
                                               const MfccConfig& config) {
  if (num_filters < 1) {
    throw Error(ErrorKind::kInvalidArgument, "num_filters must be >= 1");
  }
  const int nbins = config.NumBins();
  const double bin_width =
      static_cast<double>(config.sample_rate) / config.fft_size;
  const double mel_low = HzToMel(config.mel_low_hz);
  const double mel_high = HzToMel(config.mel_high_hz);

  // num_filters + 2 equally spaced mel points; filter f spans points
  // [f, f+2] in Hz.
  std::vector<double> hz_points(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    const double mel =
        mel_low + (mel_high - mel_low) * i / (num_filters + 1);
    hz_points[i] = MelToHz(mel);
  }

  std::vector<std::vector<double>> rows(num_filters,
                                        std::vector<double>(nbins, 0.0));
  for (int f = 0; f < num_filters; ++f) {
    const double left = hz_points[f];
    const double center = hz_points[f + 1];
    const double right = hz_points[f + 2];
    for (int k = 0; k < nbins; ++k) {
      // Each bin owns the frequency interval centered on k * bin_width,
      // clipped to [0, nyquist]; the weight is the triangle's average
      // value over that interval. Filters narrower than a bin still land
      // their full area in the bin that contains them.
      const double a = std::max(0.0, (k - 0.5) * bin_width);
      const double b =
          std::min(config.sample_rate / 2.0, (k + 0.5) * bin_width);
      if (b <= a || b <= left || a >= right) continue;
      rows[f][k] = TriangleIntegral(left, center, right, a, b) / bin_width;
    }
  }
  return rows;
}

}  // namespace nsc
