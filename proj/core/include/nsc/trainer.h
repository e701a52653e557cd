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

#ifndef NSC_TRAINER_H_
#define NSC_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsc/adam.h"
#include "nsc/codec.h"
#include "nsc/mfcc.h"
#include "nsc/objective.h"

namespace nsc {

struct TrainConfig {
  int stage1_epochs = 5;
  int stage2_epochs = 145;
  int batch_size = 128;
  double alpha_initial = 0.025;
  double alpha_final = 0.01;
  double tau_initial = 0.5;
  double tau_change = 0.025;
  double target_bps = 9000.0;
  double target_halfwidth_bps = 450.0;
  uint64_t seed = 42;

  // Architecture and data handling; not part of the checkpoint's config
  // snapshot (the network spec is stored separately).
  int channels = 32;
  int residual_blocks = 2;
  int num_bins = 32;
  double sigma_initial = 300.0;
  int train_files = 0;  // 0: take ~80% of the corpus
  int val_files = 0;    // 0: take ~10%, at least 1
  size_t kmeans_sample_cap = 1u << 20;

  int TotalEpochs() const { return stage1_epochs + stage2_epochs; }
  bool InTargetRegion(double bps) const {
    return bps >= target_bps - target_halfwidth_bps &&
           bps <= target_bps + target_halfwidth_bps;
  }
};

// Single descending cosine arc from alpha_initial (epoch 0) to alpha_final
// (epoch TotalEpochs), no restarts.
double CosineLr(int epoch, const TrainConfig& config);

// Feedback rule holding the estimated bitrate inside target +- halfwidth:
// +tau_change above the region, -tau_change below (clamped at zero),
// unchanged inside.
double EntropyController(double estimated_bps, double target_bps,
                         double halfwidth_bps, double lambda_entropy,
                         double tau_change);

// One CSV row per epoch. Stage-1 rows leave the quantization, entropy and
// bitrate fields empty: those terms do not exist before the quantizer does.
struct EpochRecord {
  int epoch = 0;
  int stage = 1;
  double mse = 0.0;
  double perceptual = 0.0;
  double quantization_penalty = 0.0;
  double entropy_bits = 0.0;
  double total = 0.0;
  double lambda_entropy = 0.0;
  double learning_rate = 0.0;
  double validation_mse = 0.0;
  double validation_score = 0.0;
  double estimated_bps = 0.0;
  bool checkpointed = false;
};

std::string EpochRecordCsvHeader();
std::string EpochRecordCsvRow(const EpochRecord& record);

// Everything the trainer tracked about the saved model.
struct BestCheckpoint {
  bool valid = false;
  uint32_t epoch = 0;
  double validation_score = 0.0;
  double estimated_bps = 0.0;
};

class TrainSession {
 public:
  TrainSession(std::vector<std::filesystem::path> train_files,
               std::vector<std::filesystem::path> validation_files,
               const TrainConfig& config);

  // Stage 1: distortion-only training with the quantizer bypassed.
  void RunStage1();

  // K-means over a full pass of encoder outputs, then quantization on and
  // lambda_entropy = tau_initial.
  void TransitionToStage2();

  // Stage 2: full objective, per-epoch validation, bitrate controller, and
  // best-model checkpointing into checkpoint_path.
  void RunStage2();

  // All three phases. Returns the checkpoint that was written (the best
  // qualifying epoch, or the final state if no epoch landed in the target
  // region).
  BestCheckpoint Train();

  void set_checkpoint_path(const std::filesystem::path& path) {
    checkpoint_path_ = path;
  }
  void set_log_path(const std::filesystem::path& path) { log_path_ = path; }

  Model& model() { return model_; }
  const std::vector<EpochRecord>& log() const { return records_; }
  double lambda_entropy() const { return weights_.entropy; }
  bool quantization_on() const { return quantization_on_; }
  const FrequencyTable& last_table() const { return last_table_; }

  struct ValidationResult {
    double mse = 0.0;
    double perceptual = 0.0;
    double score = 0.0;         // -(lambda_mse mse + lambda_p P), hardened path
    double entropy_bits = 0.0;  // soft-assignment entropy over the val set
    double estimated_bps = 0.0;
    std::vector<double> histogram;
  };
  ValidationResult Validate();

 private:
  struct WindowSet {
    std::vector<std::vector<float>> windows;
    std::vector<std::vector<std::vector<float>>> mfcc;  // per window, 4 banks
  };

  void LoadData(const std::vector<std::filesystem::path>& files,
                WindowSet* out);
  EpochRecord TrainEpoch(int epoch);
  void SaveBest(const ValidationResult& validation, uint32_t epoch);
  void AppendLog(const EpochRecord& record);

  TrainConfig config_;
  std::vector<std::filesystem::path> train_paths_, val_paths_;
  WindowSet train_, val_;
  Model model_;
  MfccComputer<float> mfcc_;
  LossWeights weights_;
  bool quantization_on_ = false;
  int next_epoch_ = 0;
  std::unique_ptr<Adam<float>> optimizer_;
  Rng order_rng_;
  std::vector<EpochRecord> records_;
  std::filesystem::path checkpoint_path_;
  std::filesystem::path log_path_;
  bool log_header_written_ = false;
  BestCheckpoint best_;
  FrequencyTable last_table_;
};

// Convenience wrapper used by the CLI: splits the corpus, trains, writes
// the checkpoint and CSV log.
BestCheckpoint RunTraining(const std::filesystem::path& corpus_dir,
                           const TrainConfig& config,
                           const std::filesystem::path& checkpoint_path,
                           const std::filesystem::path& log_path);

}  // namespace nsc

#endif  // NSC_TRAINER_H_
