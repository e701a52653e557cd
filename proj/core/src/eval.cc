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

#include "nsc/eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "nsc/error.h"
#include "nsc/mfcc.h"
#include "nsc/objective.h"
#include "nsc/quantizer.h"

namespace nsc {
namespace {

double Percentile95(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const size_t index =
      std::min(samples.size() - 1,
               static_cast<size_t>(std::ceil(samples.size() * 0.95)) - 1);
  return samples[index];
}

double Mean(const std::vector<double>& samples) {
  double acc = 0.0;
  for (double s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

}  // namespace

double SnrDb(const std::vector<float>& reference,
             const std::vector<float>& decoded) {
  const size_t n = std::min(reference.size(), decoded.size());
  double signal = 0.0, noise = 0.0;
  for (size_t i = 0; i < n; ++i) {
    signal += static_cast<double>(reference[i]) * reference[i];
    const double d = static_cast<double>(reference[i]) - decoded[i];
    noise += d * d;
  }
  if (noise <= 0.0 || signal <= 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / noise));
}

EvalReport RunEval(Checkpoint* checkpoint,
                   const std::vector<std::filesystem::path>& files,
                   bool bypass) {
  Model& model = checkpoint->model;
  MfccComputer<float> mfcc;
  EvalReport report;
  const int symbols = model.SymbolsPerWindow();

  for (const auto& path : files) {
    FileEvalResult result;
    result.file = path;
    try {
      const Signal normalized = PeakNormalize(ReadWav(path));
      result.seconds = static_cast<double>(normalized.samples.size()) /
                       normalized.sample_rate;
      const WindowSequence windows =
          ExtractWindows(normalized.samples, model.frame);

      std::vector<float> decoded;
      if (bypass) {
        decoded = OverlapAdd(windows, model.frame);
      } else {
        const std::vector<uint8_t> bitstream =
            EncodeSignal(&model, checkpoint->table, normalized);
        result.bitstream_bytes = bitstream.size();
        result.measured_bps =
            static_cast<double>(bitstream.size()) * 8.0 / result.seconds;

        // Per-file rate estimate from the soft assignments of this file's
        // encoder output.
        const std::vector<std::vector<float>> codes =
            EncoderCodes(&model, windows);
        std::vector<double> histogram(model.quantizer.NumBins(), 0.0);
        std::vector<float> soft(model.quantizer.NumBins());
        size_t count = 0;
        for (const auto& row : codes) {
          for (float z : row) {
            SoftQuantize(z, model.quantizer, soft.data());
            for (int j = 0; j < model.quantizer.NumBins(); ++j) {
              histogram[j] += soft[j];
            }
            ++count;
          }
        }
        for (double& h : histogram) h /= static_cast<double>(count);
        result.estimated_bps =
            BitrateEstimate(EntropyBits(histogram), model.frame,
                            model.sample_rate, symbols);

        const Signal out = DecodeSignal(&model, checkpoint->table, bitstream);
        decoded = out.samples;
      }

      result.snr_db = SnrDb(normalized.samples, decoded);
      const WindowSequence decoded_windows =
          ExtractWindows(decoded, model.frame);
      double perceptual = 0.0;
      for (size_t w = 0; w < windows.windows.size(); ++w) {
        perceptual += mfcc.PerceptualLoss(windows.windows[w].data(),
                                          decoded_windows.windows[w].data(),
                                          model.frame.window_len);
      }
      result.perceptual = perceptual / static_cast<double>(windows.windows.size());
    } catch (const Error& e) {
      result.failed = true;
      result.error = e.what();
      ++report.failures;
    }
    report.files.push_back(std::move(result));
  }

  int ok = 0;
  for (const auto& f : report.files) {
    if (f.failed) continue;
    ++ok;
    report.mean_snr_db += f.snr_db;
    report.mean_perceptual += f.perceptual;
    report.mean_measured_bps += f.measured_bps;
    report.mean_estimated_bps += f.estimated_bps;
  }
  if (ok > 0) {
    report.mean_snr_db /= ok;
    report.mean_perceptual /= ok;
    report.mean_measured_bps /= ok;
    report.mean_estimated_bps /= ok;
  }
  return report;
}

void WriteEvalCsv(const std::filesystem::path& path,
                  const EvalReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  }
  out << "file,snr_db,perceptual,measured_bps,estimated_bps,bytes,seconds,"
         "error\n";
  for (const auto& f : report.files) {
    out << f.file.filename().string() << "," << f.snr_db << ","
        << f.perceptual << "," << f.measured_bps << "," << f.estimated_bps
        << "," << f.bitstream_bytes << "," << f.seconds << "," << f.error
        << "\n";
  }
}

void PrintEvalTable(std::ostream& os, const EvalReport& report) {
  os << std::left << std::setw(28) << "file" << std::right << std::setw(9)
     << "snr_db" << std::setw(12) << "perceptual" << std::setw(14)
     << "measured_bps" << std::setw(14) << "estimated_bps" << "\n";
  for (const auto& f : report.files) {
    if (f.failed) {
      os << std::left << std::setw(28) << f.file.filename().string()
         << "  error: " << f.error << "\n";
      continue;
    }
    os << std::left << std::setw(28) << f.file.filename().string()
       << std::right << std::fixed << std::setprecision(2) << std::setw(9)
       << f.snr_db << std::setw(12) << std::setprecision(5) << f.perceptual
       << std::setw(14) << std::setprecision(1) << f.measured_bps
       << std::setw(14) << f.estimated_bps << std::defaultfloat << "\n";
  }
  os << std::left << std::setw(28) << "mean" << std::right << std::fixed
     << std::setprecision(2) << std::setw(9) << report.mean_snr_db
     << std::setw(12) << std::setprecision(5) << report.mean_perceptual
     << std::setw(14) << std::setprecision(1) << report.mean_measured_bps
     << std::setw(14) << report.mean_estimated_bps << std::defaultfloat
     << "\n";
}

BenchReport RunBench(Model* model, int iterations, uint64_t seed) {
  if (iterations < 1) {
    throw Error(ErrorKind::kInvalidArgument, "iterations must be >= 1");
  }
  const int window_len = model->frame.window_len;
  const int symbols = model->SymbolsPerWindow();
  Rng rng(seed);
  Tensor<float> window(1, 1, window_len);
  for (float& v : window.values) {
    v = static_cast<float>(rng.Uniform(-0.8, 0.8));
  }

  const bool quantized = model->QuantizerReady();
  Tensor<float> codes;
  std::vector<uint16_t> hardened(symbols);
  Tensor<float> decoder_in(1, 1, symbols);

  auto encode_once = [&]() {
    codes = model->encoder.Forward(window);
    const float* z = codes.Row(0, 0);
    for (int i = 0; i < symbols; ++i) {
      hardened[i] = quantized
                        ? static_cast<uint16_t>(NearestBin(z[i], model->quantizer))
                        : 0;
    }
  };
  auto decode_once = [&]() {
    float* shat = decoder_in.Row(0, 0);
    if (quantized) {
      for (int i = 0; i < symbols; ++i) {
        shat[i] = model->quantizer.bins[hardened[i]];
      }
    } else {
      std::copy(codes.Row(0, 0), codes.Row(0, 0) + symbols, shat);
    }
    Tensor<float> y = model->decoder.Forward(decoder_in);
    // Keep the result alive so the pass is not optimized away.
    volatile float sink = y.values[0];
    (void)sink;
  };

  const int warmup = std::min(50, iterations);
  for (int i = 0; i < warmup; ++i) {
    encode_once();
    decode_once();
  }

  BenchReport report;
  report.iterations = iterations;
  std::vector<double> encode_ms(iterations), decode_ms(iterations),
      combined_ms(iterations);
  using Clock = std::chrono::steady_clock;
  for (int i = 0; i < iterations; ++i) {
    const auto t0 = Clock::now();
    encode_once();
    const auto t1 = Clock::now();
    decode_once();
    const auto t2 = Clock::now();
    encode_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    decode_ms[i] = std::chrono::duration<double, std::milli>(t2 - t1).count();
    combined_ms[i] = encode_ms[i] + decode_ms[i];
  }
  report.encode_mean_ms = Mean(encode_ms);
  report.encode_p95_ms = Percentile95(encode_ms);
  report.decode_mean_ms = Mean(decode_ms);
  report.decode_p95_ms = Percentile95(decode_ms);
  report.combined_mean_ms = Mean(combined_ms);
  report.combined_p95_ms = Percentile95(combined_ms);
  return report;
}

void PrintBenchTable(std::ostream& os, const BenchReport& report) {
  os << "per-window timings over " << report.iterations
     << " iterations (single thread)\n";
  os << std::left << std::setw(10) << "" << std::right << std::setw(12)
     << "mean_ms" << std::setw(12) << "p95_ms" << "\n";
  os << std::left << std::setw(10) << "encode" << std::right << std::fixed
     << std::setprecision(3) << std::setw(12) << report.encode_mean_ms
     << std::setw(12) << report.encode_p95_ms << "\n";
  os << std::left << std::setw(10) << "decode" << std::right << std::setw(12)
     << report.decode_mean_ms << std::setw(12) << report.decode_p95_ms
     << "\n";
  os << std::left << std::setw(10) << "combined" << std::right << std::setw(12)
     << report.combined_mean_ms << std::setw(12) << report.combined_p95_ms
     << std::defaultfloat << "\n";
}

}  // namespace nsc
