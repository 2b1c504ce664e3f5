// Copyright 2026 The GEAT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "geat/corpus.hpp"
#include "geat/model.hpp"
#include "geat/tokenize.hpp"

namespace geat {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double margin = 0.2;
  double unseen_weight = 1.0;  // weight of the unseen-lab repulsion term
  bool shift_augment = true;   // fresh random offset per record per epoch
  uint64_t seed = 0;
  bool use_f64 = false;        // train in 64-bit (32-bit is the default)
};

struct EpochLogRow {
  int epoch = 0;
  std::string split;
  double loss = 0, top1 = 0, top10 = 0;
};

/// Hinge on the similarity gap: max(0, margin - sim_ap + sim_an).
double triplet_loss(double sim_ap, double sim_an, double margin);

struct TripletTrainResult {
  TripletParams params;
  std::vector<EpochLogRow> log;
};

struct ClassifierTrainResult {
  ClassifierParams params;
  std::vector<EpochLogRow> log;
};

/// Trains the metric model: anchors are sequence embeddings, positives are
/// the true labs' table rows, negatives come from hard mining against the
/// current table, and every anchor also repels the unseen row. The lab
/// table is updated together with the encoder. Deterministic per seed.
/// The config's lab_count/feature_count/vocab_size are overwritten from the
/// dataset and tokenizer.
TripletTrainResult train_triplet(const Dataset& train, const Tokenizer& tok, ModelConfig mc,
                                 const TrainConfig& tc);

/// Supervised softmax cross-entropy with the same augmentation policy.
ClassifierTrainResult train_classifier(const Dataset& train, const Tokenizer& tok,
                                       ModelConfig mc, const TrainConfig& tc);

/// Log CSV: epoch,split,loss,top1,top10.
void write_train_log(const std::string& path, const std::vector<EpochLogRow>& log);

}  // namespace geat
