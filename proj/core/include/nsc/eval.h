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

#ifndef NSC_EVAL_H_
#define NSC_EVAL_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsc/checkpoint.h"
#include "nsc/codec.h"

namespace nsc {

inline constexpr double kSnrCapDb = 99.0;

// SNR in dB of decoded against reference, capped at kSnrCapDb (an exact
// reconstruction would be infinite).
double SnrDb(const std::vector<float>& reference,
             const std::vector<float>& decoded);

struct FileEvalResult {
  std::filesystem::path file;
  double snr_db = 0.0;
  double perceptual = 0.0;     // P(x, y), mean over windows
  double measured_bps = 0.0;   // actual bitstream bytes over duration
  double estimated_bps = 0.0;  // soft-assignment entropy estimate
  size_t bitstream_bytes = 0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct EvalReport {
  std::vector<FileEvalResult> files;
  double mean_snr_db = 0.0;
  double mean_perceptual = 0.0;
  double mean_measured_bps = 0.0;
  double mean_estimated_bps = 0.0;
  int failures = 0;
};

// Full encode/decode of every file through the deployment path. With
// bypass the codec is skipped (windows are reassembled directly), which
// pins the reporting path: SNR caps at 99 dB and P is 0.
EvalReport RunEval(Checkpoint* checkpoint,
                   const std::vector<std::filesystem::path>& files,
                   bool bypass = false);

void WriteEvalCsv(const std::filesystem::path& path, const EvalReport& report);
void PrintEvalTable(std::ostream& os, const EvalReport& report);

struct BenchReport {
  int iterations = 0;
  double encode_mean_ms = 0.0;
  double encode_p95_ms = 0.0;
  double decode_mean_ms = 0.0;
  double decode_p95_ms = 0.0;
  double combined_mean_ms = 0.0;
  double combined_p95_ms = 0.0;
};

// Times single-window encode (encoder forward + hardening) and decode
// (dequantize + decoder forward) over warm iterations, single-threaded.
BenchReport RunBench(Model* model, int iterations, uint64_t seed = 42);

void PrintBenchTable(std::ostream& os, const BenchReport& report);

}  // namespace nsc

#endif  // NSC_EVAL_H_
