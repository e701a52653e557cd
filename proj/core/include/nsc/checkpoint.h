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

#ifndef NSC_CHECKPOINT_H_
#define NSC_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>

#include "nsc/codec.h"
#include "nsc/coder.h"
#include "nsc/trainer.h"

namespace nsc {

inline constexpr char kCheckpointMagic[4] = {'N', 'S', 'C', 'M'};
inline constexpr uint8_t kCheckpointVersion = 1;

// Self-contained model file ("NSCM", fixed little-endian): network spec,
// all weights, quantizer, frequency table, training-config snapshot and the
// saved epoch's validation bookkeeping. Decoding a bitstream needs nothing
// else. Round-trips byte-exactly.
struct Checkpoint {
  Model model;
  FrequencyTable table;
  TrainConfig config;
  uint32_t best_epoch = 0;
  double validation_score = 0.0;
  double estimated_bps = 0.0;
};

void SaveCheckpoint(const std::filesystem::path& path, Model& model,
                    const FrequencyTable& table, const TrainConfig& config,
                    uint32_t best_epoch, double validation_score,
                    double estimated_bps);
void SaveCheckpoint(const std::filesystem::path& path, Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace nsc

#endif  // NSC_CHECKPOINT_H_
