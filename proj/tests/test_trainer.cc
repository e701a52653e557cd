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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nsc/checkpoint.h"
#include "nsc/trainer.h"
#include "testutil.h"

using namespace nsc;

namespace {

// Small corpus/config that trains in a couple of seconds.
struct TinySetup {
  test::TempDir dir{"trainer"};
  std::vector<std::filesystem::path> train, val;
  TrainConfig config;

  explicit TinySetup(uint64_t seed = 42, int files = 8,
                     double seconds = 1.5) {
    test::WriteFixtureCorpus(dir.path(), files, seconds, seed);
    std::vector<std::filesystem::path> all;
    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
      all.push_back(entry.path());
    }
    std::sort(all.begin(), all.end());
    for (size_t i = 0; i < all.size(); ++i) {
      (i + 2 < all.size() ? train : val).push_back(all[i]);
    }
    config.channels = 8;
    config.residual_blocks = 1;
    config.num_bins = 8;
    config.stage1_epochs = 2;
    config.stage2_epochs = 3;
    config.batch_size = 16;
    config.seed = seed;
    config.target_bps = 9000.0;
  }
};

}  // namespace

TEST_CASE("cosine learning rate endpoints and midpoint") {
  TrainConfig config;  // 5 + 145 epochs, 0.025 -> 0.01
  CHECK(CosineLr(0, config) == doctest::Approx(0.025));
  CHECK(CosineLr(config.TotalEpochs(), config) == doctest::Approx(0.01));
  CHECK(CosineLr(config.TotalEpochs() / 2, config) ==
        doctest::Approx(0.0175));
  // Monotone descending arc.
  for (int e = 1; e <= config.TotalEpochs(); ++e) {
    CHECK(CosineLr(e, config) <= CosineLr(e - 1, config));
  }
}

TEST_CASE("entropy controller rules") {
  // Above the region: increase.
  CHECK(EntropyController(10000, 9000, 450, 0.5, 0.025) ==
        doctest::Approx(0.525));
  // Inside: unchanged.
  CHECK(EntropyController(8900, 9000, 450, 0.5, 0.025) == 0.5);
  CHECK(EntropyController(9450, 9000, 450, 0.5, 0.025) == 0.5);
  CHECK(EntropyController(8550, 9000, 450, 0.5, 0.025) == 0.5);
  // Below: decrease, clamped at zero.
  CHECK(EntropyController(8000, 9000, 450, 0.5, 0.025) ==
        doctest::Approx(0.475));
  CHECK(EntropyController(5000, 9000, 450, 0.01, 0.025) == 0.0);
}

TEST_CASE("controller converges on simulated plants") {
  SUBCASE("gentle plant around 9 kbps") {
    // bitrate = 9000 + 4000 (0.6 - lambda)
    double lambda = 0.5;
    bool inside = false;
    for (int epoch = 0; epoch < 60; ++epoch) {
      const double est = 9000.0 + 4000.0 * (0.6 - lambda);
      inside = est >= 8550.0 && est <= 9450.0;
      if (inside) break;
      lambda = EntropyController(est, 9000, 450, lambda, 0.025);
    }
    CHECK(inside);
  }
  SUBCASE("steeper plant, four paper operating points") {
    for (double target : {9000.0, 16000.0, 20000.0, 24000.0}) {
      double lambda = 0.5;
      int first_inside = -1;
      for (int epoch = 0; epoch < 60; ++epoch) {
        const double est = 35000.0 - 30000.0 * lambda;
        const bool inside = std::abs(est - target) <= 450.0;
        if (inside && first_inside < 0) first_inside = epoch;
        if (first_inside >= 0) {
          REQUIRE(inside);  // must remain inside once converged
        }
        lambda = EntropyController(est, target, 450, lambda, 0.025);
      }
      REQUIRE(first_inside >= 0);
      REQUIRE(first_inside < 60);
    }
  }
}

TEST_CASE("stage 1 trains and is deterministic") {
  TinySetup setup;
  TrainSession a(setup.train, setup.val, setup.config);
  a.RunStage1();
  REQUIRE(a.log().size() == 2);
  CHECK(a.log()[0].stage == 1);
  // Distortion drops over the stage.
  CHECK(a.log().back().total < a.log().front().total);
  CHECK_FALSE(a.quantization_on());

  TrainSession b(setup.train, setup.val, setup.config);
  b.RunStage1();
  auto pa = a.model().NetworkParams();
  auto pb = b.model().NetworkParams();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    REQUIRE(pa[i].size == pb[i].size);
    for (size_t j = 0; j < pa[i].size; ++j) {
      REQUIRE(pa[i].value[j] == pb[i].value[j]);
    }
  }
}

TEST_CASE("stage 1 log leaves quantizer fields empty") {
  EpochRecord record;
  record.epoch = 3;
  record.stage = 1;
  record.mse = 0.5;
  record.perceptual = 0.25;
  record.total = 16.25;
  const std::string row = EpochRecordCsvRow(record);
  // epoch,stage,mse,perceptual,<qpen>,<entropy>,total,<lambda>,...
  std::vector<std::string> fields;
  std::stringstream ss(row);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() >= 12);
  CHECK(fields[4].empty());   // quantization penalty
  CHECK(fields[5].empty());   // entropy bits
  CHECK(fields[7].empty());   // lambda_entropy
  CHECK(fields[11].empty());  // estimated bps

  record.stage = 2;
  record.quantization_penalty = 0.125;
  record.entropy_bits = 3.5;
  record.lambda_entropy = 0.5;
  record.estimated_bps = 9000;
  const std::string row2 = EpochRecordCsvRow(record);
  fields.clear();
  std::stringstream ss2(row2);
  while (std::getline(ss2, field, ',')) fields.push_back(field);
  CHECK(fields[4] == "0.125");
  CHECK(fields[5] == "3.5");
}

TEST_CASE("transition initializes the quantizer") {
  TinySetup setup;
  TrainSession session(setup.train, setup.val, setup.config);
  session.RunStage1();
  session.TransitionToStage2();
  CHECK(session.quantization_on());
  CHECK(session.lambda_entropy() == doctest::Approx(0.5));
  const auto& bins = session.model().quantizer.bins;
  REQUIRE(static_cast<int>(bins.size()) == setup.config.num_bins);
  for (size_t j = 1; j < bins.size(); ++j) {
    CHECK(bins[j] >= bins[j - 1]);
  }
  CHECK(session.model().quantizer.Sigma() == doctest::Approx(300.0));
}

TEST_CASE("degenerate encoder outputs surface TooFewDistinctValues") {
  TinySetup setup;
  TrainConfig config = setup.config;
  config.stage1_epochs = 0;  // straight to the transition
  TrainSession session(setup.train, setup.val, config);
  // Zero every weight: the encoder then emits the same value everywhere
  // and k-means cannot find num_bins distinct samples.
  for (auto& p : session.model().NetworkParams()) {
    for (size_t i = 0; i < p.size; ++i) p.value[i] = 0.0f;
  }
  session.RunStage1();
  try {
    session.TransitionToStage2();
    FAIL("expected TooFewDistinctValues");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTooFewDistinctValues);
  }
}

TEST_CASE("nan loss aborts with the minibatch index") {
  TinySetup setup;
  TrainSession session(setup.train, setup.val, setup.config);
  auto params = session.model().NetworkParams();
  params[0].value[0] = std::numeric_limits<float>::quiet_NaN();
  try {
    session.RunStage1();
    FAIL("expected NanLoss");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNanLoss);
    CHECK(std::string(e.what()).find("minibatch") != std::string::npos);
  }
}

TEST_CASE("full tiny run writes best checkpoint and log") {
  TinySetup setup;
  const auto model_path = setup.dir.path() / "tiny.nscm";
  const auto log_path = setup.dir.path() / "tiny.csv";
  TrainSession session(setup.train, setup.val, setup.config);
  session.set_checkpoint_path(model_path);
  session.set_log_path(log_path);
  BestCheckpoint best = session.Train();

  REQUIRE(std::filesystem::exists(model_path));
  Checkpoint loaded = LoadCheckpoint(model_path);
  CHECK(loaded.config.target_bps == 9000.0);
  CHECK(loaded.model.QuantizerReady());

  // Log has one row per epoch, stage 1 then stage 2.
  REQUIRE(session.log().size() ==
          static_cast<size_t>(setup.config.TotalEpochs()));
  CHECK(session.log()[0].stage == 1);
  CHECK(session.log().back().stage == 2);

  // The stored score matches the best row among qualifying epochs, or the
  // trainer fell back to the final epoch.
  bool any_checkpointed = false;
  double best_score = -1e300;
  for (const auto& r : session.log()) {
    if (r.checkpointed) {
      any_checkpointed = true;
      best_score = std::max(best_score, r.validation_score);
    }
  }
  if (any_checkpointed) {
    CHECK(best.validation_score == doctest::Approx(best_score));
  }
  std::ifstream log_in(log_path);
  std::string header;
  std::getline(log_in, header);
  CHECK(header == EpochRecordCsvHeader());

  // lambda never negative, moves by at most tau_change per epoch.
  double prev = -1.0;
  for (const auto& r : session.log()) {
    if (r.stage != 2) continue;
    CHECK(r.lambda_entropy >= 0.0);
    if (prev >= 0.0) {
      CHECK(std::abs(r.lambda_entropy - prev) <=
            setup.config.tau_change + 1e-12);
    }
    prev = r.lambda_entropy;
  }
}

TEST_CASE("two identical runs write byte-identical checkpoints") {
  TinySetup setup;
  auto run = [&](const std::filesystem::path& out) {
    TrainSession session(setup.train, setup.val, setup.config);
    session.set_checkpoint_path(out);
    session.Train();
  };
  const auto a = setup.dir.path() / "a.nscm";
  const auto b = setup.dir.path() / "b.nscm";
  run(a);
  run(b);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::vector<char> ba((std::istreambuf_iterator<char>(fa)),
                       std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(fb)),
                       std::istreambuf_iterator<char>());
  CHECK(ba == bb);
}
