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

// Command-line interface: train, encode, decode, eval, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nsc/checkpoint.h"
#include "nsc/codec.h"
#include "nsc/error.h"
#include "nsc/eval.h"
#include "nsc/log.h"
#include "nsc/trainer.h"

namespace fs = std::filesystem;

namespace {

struct TrainOptions {
  std::string corpus;
  std::string out = "model.nscm";
  std::string log;
  double target_bps = 9000.0;
  uint64_t seed = 42;
  bool desk_scale = false;
  int channels = 32;
  int blocks = 2;
  int epochs_stage1 = 5;
  int epochs_stage2 = 145;
  int batch_size = 128;
  int train_files = 0;
  int val_files = 0;
};

int CmdTrain(const TrainOptions& opt, const CLI::App& cmd) {
  if (!fs::is_directory(opt.corpus)) {
    throw nsc::Error(nsc::ErrorKind::kIoError,
                     "corpus directory does not exist: " + opt.corpus);
  }
  nsc::TrainConfig config;
  config.target_bps = opt.target_bps;
  config.seed = opt.seed;
  if (opt.desk_scale) {
    // Small preset that trains in minutes on a desktop CPU. Explicit flags
    // still win over the preset.
    config.channels = 16;
    config.residual_blocks = 1;
    config.stage1_epochs = 10;
    config.stage2_epochs = 20;
    config.batch_size = 32;
    config.train_files = 48;
    config.val_files = 8;
  }
  // Explicit flags win over the preset.
  if (cmd.count("--channels")) config.channels = opt.channels;
  if (cmd.count("--blocks")) config.residual_blocks = opt.blocks;
  if (cmd.count("--epochs-stage1")) config.stage1_epochs = opt.epochs_stage1;
  if (cmd.count("--epochs-stage2")) config.stage2_epochs = opt.epochs_stage2;
  if (cmd.count("--batch-size")) config.batch_size = opt.batch_size;
  if (cmd.count("--train-files")) config.train_files = opt.train_files;
  if (cmd.count("--val-files")) config.val_files = opt.val_files;

  fs::path log_path = opt.log.empty()
                          ? fs::path(opt.out).replace_extension(".train.csv")
                          : fs::path(opt.log);
  nsc::BestCheckpoint best =
      nsc::RunTraining(opt.corpus, config, opt.out, log_path);
  std::cout << "saved " << opt.out << " (epoch " << best.epoch
            << ", validation score " << best.validation_score
            << ", estimated " << best.estimated_bps << " bps)\n"
            << "training log: " << log_path.string() << "\n";
  return 0;
}

int CmdEncode(const std::string& model_path, const std::string& in_path,
              const std::string& out_path) {
  nsc::Checkpoint checkpoint = nsc::LoadCheckpoint(model_path);
  nsc::Signal input = nsc::ReadWav(in_path);
  std::vector<uint8_t> bitstream =
      nsc::EncodeSignal(&checkpoint.model, checkpoint.table, input);

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw nsc::Error(nsc::ErrorKind::kIoError, "cannot open " + out_path);
  }
  out.write(reinterpret_cast<const char*>(bitstream.data()),
            static_cast<std::streamsize>(bitstream.size()));
  if (!out) {
    throw nsc::Error(nsc::ErrorKind::kIoError, "write failed for " + out_path);
  }

  const double seconds =
      static_cast<double>(input.samples.size()) / input.sample_rate;
  const double kbps =
      seconds > 0 ? bitstream.size() * 8.0 / seconds / 1000.0 : 0.0;
  std::printf("%zu samples -> %zu bytes, %.2f kbps\n", input.samples.size(),
              bitstream.size(), kbps);
  return 0;
}

int CmdDecode(const std::string& model_path, const std::string& in_path,
              const std::string& out_path) {
  nsc::Checkpoint checkpoint = nsc::LoadCheckpoint(model_path);
  std::ifstream in(in_path, std::ios::binary);
  if (!in) {
    throw nsc::Error(nsc::ErrorKind::kIoError, "cannot open " + in_path);
  }
  std::vector<uint8_t> bitstream((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  // Decode fully before touching the output path, so a corrupt stream
  // leaves nothing behind.
  nsc::Signal signal =
      nsc::DecodeSignal(&checkpoint.model, checkpoint.table, bitstream);
  nsc::WriteWav(out_path, signal);
  std::printf("decoded %zu samples to %s\n", signal.samples.size(),
              out_path.c_str());
  return 0;
}

int CmdEval(const std::string& model_path, const std::string& corpus,
            const std::string& csv, bool bypass) {
  if (!fs::is_directory(corpus)) {
    throw nsc::Error(nsc::ErrorKind::kIoError,
                     "corpus directory does not exist: " + corpus);
  }
  nsc::Checkpoint checkpoint = nsc::LoadCheckpoint(model_path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw nsc::Error(nsc::ErrorKind::kNotEnoughFiles,
                     "no .wav files in " + corpus);
  }
  nsc::EvalReport report = nsc::RunEval(&checkpoint, files, bypass);
  nsc::PrintEvalTable(std::cout, report);
  if (!csv.empty()) {
    nsc::WriteEvalCsv(csv, report);
    std::cout << "wrote " << csv << "\n";
  }
  return report.failures == 0 ? 0 : 2;
}

int CmdBench(const std::string& model_path, int iters, uint64_t seed) {
  nsc::Checkpoint checkpoint = nsc::LoadCheckpoint(model_path);
  nsc::BenchReport report = nsc::RunBench(&checkpoint.model, iters, seed);
  nsc::PrintBenchTable(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsc: learned wideband speech codec"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "train a codec on a corpus");
  train->add_option("--corpus", train_opt.corpus, "directory of 16 kHz mono wav files")
      ->required();
  train->add_option("--target-bps", train_opt.target_bps, "target bitrate in bits/sec")
      ->required();
  train->add_option("--out", train_opt.out, "output model path (.nscm)");
  train->add_option("--log", train_opt.log, "training log CSV path");
  train->add_option("--seed", train_opt.seed, "RNG seed");
  train->add_flag("--desk-scale", train_opt.desk_scale,
                  "small config: C=16, R=1, 10+20 epochs, 48+8 files");
  train->add_option("--channels", train_opt.channels, "conv channels");
  train->add_option("--blocks", train_opt.blocks, "residual blocks per network");
  train->add_option("--epochs-stage1", train_opt.epochs_stage1, "epochs without quantization");
  train->add_option("--epochs-stage2", train_opt.epochs_stage2, "epochs with quantization");
  train->add_option("--batch-size", train_opt.batch_size, "minibatch size");
  train->add_option("--train-files", train_opt.train_files, "training file count (0 = auto)");
  train->add_option("--val-files", train_opt.val_files, "validation file count (0 = auto)");

  std::string model_path, in_path, out_path;
  CLI::App* encode = app.add_subcommand("encode", "wav -> nsc bitstream");
  encode->add_option("model", model_path, ".nscm model")->required();
  encode->add_option("input", in_path, "input wav")->required();
  encode->add_option("output", out_path, "output .nsc")->required();

  CLI::App* decode = app.add_subcommand("decode", "nsc bitstream -> wav");
  decode->add_option("model", model_path, ".nscm model")->required();
  decode->add_option("input", in_path, "input .nsc")->required();
  decode->add_option("output", out_path, "output wav")->required();

  std::string eval_corpus, eval_csv;
  bool eval_bypass = false;
  CLI::App* eval = app.add_subcommand("eval", "codec quality over a corpus");
  eval->add_option("model", model_path, ".nscm model")->required();
  eval->add_option("corpus", eval_corpus, "directory of wav files")->required();
  eval->add_option("--csv", eval_csv, "write per-file results to CSV");
  eval->add_flag("--bypass", eval_bypass, "skip the codec (reporting-path check)");

  int bench_iters = 1000;
  uint64_t bench_seed = 42;
  CLI::App* bench = app.add_subcommand("bench", "per-window encode/decode timings");
  bench->add_option("model", model_path, ".nscm model")->required();
  bench->add_option("--iters", bench_iters, "timed iterations");
  bench->add_option("--seed", bench_seed, "RNG seed for the test window");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return CmdTrain(train_opt, *train);
    if (encode->parsed()) return CmdEncode(model_path, in_path, out_path);
    if (decode->parsed()) return CmdDecode(model_path, in_path, out_path);
    if (eval->parsed()) return CmdEval(model_path, eval_corpus, eval_csv, eval_bypass);
    if (bench->parsed()) return CmdBench(model_path, bench_iters, bench_seed);
  } catch (const nsc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
