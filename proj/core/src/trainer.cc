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

#include "nsc/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "nsc/checkpoint.h"
#include "nsc/error.h"
#include "nsc/log.h"
#include "nsc/training_step.h"

namespace nsc {
namespace {

constexpr int kValidationBatch = 64;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

double CosineLr(int epoch, const TrainConfig& config) {
  const int total = config.TotalEpochs();
  const double t = std::clamp(epoch, 0, total);
  return config.alpha_final +
         0.5 * (config.alpha_initial - config.alpha_final) *
             (1.0 + std::cos(M_PI * t / total));
}

double EntropyController(double estimated_bps, double target_bps,
                         double halfwidth_bps, double lambda_entropy,
                         double tau_change) {
  if (estimated_bps > target_bps + halfwidth_bps) {
    return lambda_entropy + tau_change;
  }
  if (estimated_bps < target_bps - halfwidth_bps) {
    return std::max(0.0, lambda_entropy - tau_change);
  }
  return lambda_entropy;
}

std::string EpochRecordCsvHeader() {
  return "epoch,stage,mse,perceptual,quantization_penalty,entropy_bits,total,"
         "lambda_entropy,learning_rate,validation_mse,validation_score,"
         "estimated_bps,checkpointed";
}

std::string EpochRecordCsvRow(const EpochRecord& r) {
  std::string row = std::to_string(r.epoch) + "," + std::to_string(r.stage) +
                    "," + FormatDouble(r.mse) + "," + FormatDouble(r.perceptual);
  // Quantization, entropy and bitrate fields only exist once the quantizer
  // does; stage-1 rows leave them empty.
  if (r.stage == 1) {
    row += ",,";
  } else {
    row += "," + FormatDouble(r.quantization_penalty) + "," +
           FormatDouble(r.entropy_bits);
  }
  row += "," + FormatDouble(r.total);
  row += r.stage == 1 ? "," : "," + FormatDouble(r.lambda_entropy);
  row += "," + FormatDouble(r.learning_rate);
  row += "," + FormatDouble(r.validation_mse);
  row += "," + FormatDouble(r.validation_score);
  row += r.stage == 1 ? "," : "," + FormatDouble(r.estimated_bps);
  row += r.checkpointed ? ",1" : ",0";
  return row;
}

TrainSession::TrainSession(std::vector<std::filesystem::path> train_files,
                           std::vector<std::filesystem::path> validation_files,
                           const TrainConfig& config)
    : config_(config),
      train_paths_(std::move(train_files)),
      val_paths_(std::move(validation_files)),
      mfcc_(MfccConfig{}),
      order_rng_(config.seed + 1) {
  if (train_paths_.empty() || val_paths_.empty()) {
    throw Error(ErrorKind::kNotEnoughFiles,
                "training needs at least one train and one validation file");
  }
  weights_.entropy = config_.tau_initial;
  model_ = Model::Create(config_.channels, config_.residual_blocks,
                         config_.seed);
  LoadData(train_paths_, &train_);
  LoadData(val_paths_, &val_);
  if (train_.windows.empty() || val_.windows.empty()) {
    throw Error(ErrorKind::kEmptySignal, "corpus produced no windows");
  }
  optimizer_ = std::make_unique<Adam<float>>(model_.NetworkParams());
}

void TrainSession::LoadData(const std::vector<std::filesystem::path>& files,
                            WindowSet* out) {
  for (const auto& path : files) {
    Signal signal = PeakNormalize(ReadWav(path));
    WindowSequence seq = ExtractWindows(signal.samples, model_.frame);
    for (auto& window : seq.windows) {
      out->mfcc.push_back(
          mfcc_.ComputeAll(window.data(), model_.frame.window_len));
      out->windows.push_back(std::move(window));
    }
  }
}

EpochRecord TrainSession::TrainEpoch(int epoch) {
  const double lr = CosineLr(epoch, config_);
  const size_t num_windows = train_.windows.size();
  const size_t batch =
      std::min<size_t>(static_cast<size_t>(config_.batch_size), num_windows);
  const size_t num_batches = num_windows / batch;

  std::vector<size_t> order(num_windows);
  std::iota(order.begin(), order.end(), size_t{0});
  order_rng_.Shuffle(&order);

  EpochRecord record;
  record.epoch = epoch;
  record.stage = quantization_on_ ? 2 : 1;
  record.lambda_entropy = weights_.entropy;
  record.learning_rate = lr;

  const int window_len = model_.frame.window_len;
  Tensor<float> input(static_cast<int>(batch), 1, window_len);
  std::vector<const std::vector<std::vector<float>>*> coeffs(batch);

  for (size_t b = 0; b < num_batches; ++b) {
    for (size_t i = 0; i < batch; ++i) {
      const size_t w = order[b * batch + i];
      std::copy(train_.windows[w].begin(), train_.windows[w].end(),
                input.Row(static_cast<int>(i), 0));
      coeffs[i] = &train_.mfcc[w];
    }
    StepResult<float> step;
    try {
      step = RunTrainingStep(
          &model_.encoder, &model_.decoder,
          quantization_on_ ? &model_.quantizer : nullptr, quantization_on_,
          input, mfcc_, weights_, &coeffs);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNanLoss) throw;
      throw Error(ErrorKind::kNanLoss,
                  "epoch " + std::to_string(epoch) + " minibatch " +
                      std::to_string(b) + ": " + e.what());
    }
    if (!std::isfinite(step.report.total)) {
      throw Error(ErrorKind::kNanLoss,
                  "non-finite loss at epoch " + std::to_string(epoch) +
                      " minibatch " + std::to_string(b));
    }
    optimizer_->Step(lr);
    optimizer_->ZeroGrad();

    record.mse += step.report.mse;
    record.perceptual += step.report.perceptual;
    record.quantization_penalty += step.report.quantization_penalty;
    record.entropy_bits += step.report.entropy_bits;
    record.total += step.report.total;
  }

  const double scale = 1.0 / static_cast<double>(num_batches);
  record.mse *= scale;
  record.perceptual *= scale;
  record.quantization_penalty *= scale;
  record.entropy_bits *= scale;
  record.total *= scale;
  return record;
}

TrainSession::ValidationResult TrainSession::Validate() {
  const int window_len = model_.frame.window_len;
  const int symbols = model_.SymbolsPerWindow();
  const size_t count = val_.windows.size();
  const int num_bins = quantization_on_ ? model_.quantizer.NumBins() : 0;

  ValidationResult result;
  result.histogram.assign(std::max(num_bins, 1), 0.0);
  double mse_acc = 0.0, perceptual_acc = 0.0;
  size_t total_symbols = 0;

  std::vector<float> soft(std::max(num_bins, 1));
  for (size_t begin = 0; begin < count; begin += kValidationBatch) {
    const size_t end = std::min(count, begin + kValidationBatch);
    const int b = static_cast<int>(end - begin);
    Tensor<float> x(b, 1, window_len);
    for (int i = 0; i < b; ++i) {
      std::copy(val_.windows[begin + i].begin(), val_.windows[begin + i].end(),
                x.Row(i, 0));
    }
    Tensor<float> z = model_.encoder.Forward(x);
    Tensor<float> decoder_in(b, 1, symbols);
    if (quantization_on_) {
      for (int i = 0; i < b; ++i) {
        const float* code = z.Row(i, 0);
        float* shat = decoder_in.Row(i, 0);
        for (int s = 0; s < symbols; ++s) {
          // Deployment path: hardened symbols.
          shat[s] = model_.quantizer.bins[NearestBin(code[s], model_.quantizer)];
          // Rate estimate: soft assignments, as in training.
          SoftQuantize(code[s], model_.quantizer, soft.data());
          for (int j = 0; j < num_bins; ++j) {
            result.histogram[j] += soft[j];
          }
        }
      }
      total_symbols += static_cast<size_t>(b) * symbols;
    } else {
      decoder_in = z;
    }
    Tensor<float> y = model_.decoder.Forward(decoder_in);
    mse_acc += static_cast<double>(MseLoss(x, y)) * b;
    for (int i = 0; i < b; ++i) {
      perceptual_acc += mfcc_.PerceptualLossCached(val_.mfcc[begin + i],
                                                   y.Row(i, 0), window_len);
    }
  }

  const double n = static_cast<double>(count);
  result.mse = mse_acc / n;
  result.perceptual = perceptual_acc / n;
  result.score =
      -(weights_.mse * result.mse + weights_.perceptual * result.perceptual);
  if (quantization_on_ && total_symbols > 0) {
    for (double& h : result.histogram) {
      h /= static_cast<double>(total_symbols);
    }
    std::vector<double> h(result.histogram.begin(), result.histogram.end());
    result.entropy_bits = EntropyBits(h);
    result.estimated_bps = BitrateEstimate(result.entropy_bits, model_.frame,
                                           model_.sample_rate, symbols);
  }
  return result;
}

void TrainSession::RunStage1() {
  for (int epoch = 0; epoch < config_.stage1_epochs; ++epoch) {
    EpochRecord record = TrainEpoch(epoch);
    ValidationResult validation = Validate();
    record.validation_mse = validation.mse;
    record.validation_score = validation.score;
    AppendLog(record);
    NSC_LOG_INFO("epoch " << epoch << " stage 1 total " << record.total
                          << " val_mse " << validation.mse);
  }
  next_epoch_ = config_.stage1_epochs;
}

void TrainSession::TransitionToStage2() {
  // Bins come from k-means over encoder outputs for one full pass of the
  // training set, subsampled to the cap.
  WindowSequence seq;
  seq.windows = train_.windows;
  seq.original_len = train_.windows.size() * model_.frame.window_len;
  std::vector<std::vector<float>> codes = EncoderCodes(&model_, seq);
  std::vector<float> samples;
  samples.reserve(codes.size() * codes.front().size());
  for (const auto& row : codes) {
    samples.insert(samples.end(), row.begin(), row.end());
  }
  if (samples.size() > config_.kmeans_sample_cap) {
    Rng rng(config_.seed + 2);
    std::vector<size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    rng.Shuffle(&idx);
    std::vector<float> subset(config_.kmeans_sample_cap);
    for (size_t i = 0; i < subset.size(); ++i) subset[i] = samples[idx[i]];
    samples = std::move(subset);
  }
  std::vector<float> bins =
      KmeansInit(samples, config_.num_bins, config_.seed + 3);
  model_.quantizer =
      QuantizerState<float>::Make(std::move(bins), config_.sigma_initial);
  weights_.entropy = config_.tau_initial;
  quantization_on_ = true;
  // Fresh moments: the parameter set changed shape.
  optimizer_ = std::make_unique<Adam<float>>(model_.AllParams());
  NSC_LOG_INFO("stage 2: " << config_.num_bins << " bins initialized, sigma "
                           << model_.quantizer.Sigma() << ", lambda_entropy "
                           << weights_.entropy);
}

void TrainSession::SaveBest(const ValidationResult& validation,
                            uint32_t epoch) {
  last_table_ = FrequencyTable::FromHistogram(validation.histogram);
  best_.valid = true;
  best_.epoch = epoch;
  best_.validation_score = validation.score;
  best_.estimated_bps = validation.estimated_bps;
  if (!checkpoint_path_.empty()) {
    SaveCheckpoint(checkpoint_path_, model_, last_table_, config_, epoch,
                   validation.score, validation.estimated_bps);
  }
}

void TrainSession::RunStage2() {
  const int first = next_epoch_;
  const int last = config_.stage1_epochs + config_.stage2_epochs;
  for (int epoch = first; epoch < last; ++epoch) {
    EpochRecord record = TrainEpoch(epoch);
    ValidationResult validation = Validate();
    record.validation_mse = validation.mse;
    record.validation_score = validation.score;
    record.estimated_bps = validation.estimated_bps;

    const bool in_region = config_.InTargetRegion(validation.estimated_bps);
    if (in_region &&
        (!best_.valid || validation.score > best_.validation_score)) {
      SaveBest(validation, static_cast<uint32_t>(epoch));
      record.checkpointed = true;
    }
    AppendLog(record);
    NSC_LOG_INFO("epoch " << epoch << " stage 2 total " << record.total
                          << " est_bps " << validation.estimated_bps
                          << " lambda " << weights_.entropy
                          << (record.checkpointed ? " *" : ""));

    weights_.entropy =
        EntropyController(validation.estimated_bps, config_.target_bps,
                          config_.target_halfwidth_bps, weights_.entropy,
                          config_.tau_change);
  }
  next_epoch_ = last;
}

BestCheckpoint TrainSession::Train() {
  RunStage1();
  TransitionToStage2();
  RunStage2();
  if (!best_.valid) {
    // No epoch landed in the target region; keep the final state so the
    // run still produces a usable model.
    NSC_LOG_WARN("no epoch reached the target bitrate region ("
                 << config_.target_bps - config_.target_halfwidth_bps << ".."
                 << config_.target_bps + config_.target_halfwidth_bps
                 << " bps); saving the final model");
    ValidationResult validation = Validate();
    SaveBest(validation, static_cast<uint32_t>(config_.TotalEpochs() - 1));
  }
  return best_;
}

void TrainSession::AppendLog(const EpochRecord& record) {
  records_.push_back(record);
  if (log_path_.empty()) return;
  std::ofstream out(log_path_, log_header_written_
                                   ? (std::ios::app | std::ios::out)
                                   : (std::ios::trunc | std::ios::out));
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot write " + log_path_.string());
  }
  if (!log_header_written_) {
    out << EpochRecordCsvHeader() << "\n";
    log_header_written_ = true;
  }
  out << EpochRecordCsvRow(record) << "\n";
}

BestCheckpoint RunTraining(const std::filesystem::path& corpus_dir,
                           const TrainConfig& config,
                           const std::filesystem::path& checkpoint_path,
                           const std::filesystem::path& log_path) {
  // Resolve split sizes against the corpus when not pinned.
  size_t available = 0;
  if (std::filesystem::is_directory(corpus_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        ++available;
      }
    }
  }
  SplitCounts counts;
  counts.train = config.train_files;
  counts.validation = config.val_files;
  if (counts.train == 0) {
    counts.train = std::max<int>(1, static_cast<int>(available * 8 / 10));
  }
  if (counts.validation == 0) {
    counts.validation = std::max<int>(
        1, std::min<int>(static_cast<int>(available) - counts.train,
                         std::max<int>(1, static_cast<int>(available / 10))));
  }
  counts.test = 0;

  CorpusSplit split = SplitCorpus(corpus_dir, counts, config.seed);
  TrainSession session(split.train, split.validation, config);
  session.set_checkpoint_path(checkpoint_path);
  session.set_log_path(log_path);
  return session.Train();
}

}  // namespace nsc
