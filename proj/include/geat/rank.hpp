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

#include <span>
#include <string>
#include <vector>

#include "geat/checkpoint.hpp"
#include "geat/corpus.hpp"
#include "geat/model.hpp"
#include "geat/tokenize.hpp"

namespace geat {

/// Every real lab exactly once, sorted by score descending (ties by lab
/// index ascending).
struct Ranking {
  std::string kind;  // "triplet", "classifier", "ensemble-borda", ...
  std::vector<std::pair<int32_t, double>> entries;
};

/// Ranking plus the averaged unseen-row similarity (NaN for the classifier,
/// which has no unseen embedding).
struct RankOutcome {
  Ranking ranking;
  double unseen_score = 0;
};

Ranking make_ranking(std::string kind, std::vector<std::pair<int32_t, double>> scores);

/// Test-time augmentation: offset 0 plus tta_n-1 random circular shifts,
/// outputs averaged (similarities for the triplet model, probabilities for
/// the classifier).
RankOutcome rank_labs(const TripletParams& p, const Tokenizer& tok, const DnaRecord& record,
                      int tta_n, uint64_t seed);
RankOutcome rank_labs(const ClassifierParams& p, const Tokenizer& tok, const DnaRecord& record,
                      int tta_n, uint64_t seed);

/// Batch versions reusing one inference graph; record i uses seed ^ i.
std::vector<RankOutcome> rank_dataset(const TripletParams& p, const Tokenizer& tok,
                                      std::span<const DnaRecord> records, int tta_n,
                                      uint64_t seed);
std::vector<RankOutcome> rank_dataset(const ClassifierParams& p, const Tokenizer& tok,
                                      std::span<const DnaRecord> records, int tta_n,
                                      uint64_t seed);

/// Fraction of records whose true lab appears in the first k entries.
double top_k_accuracy(std::span<const Ranking> rankings, std::span<const int32_t> truths,
                      int64_t k);

/// True when the best real-lab score falls below the threshold or the
/// unseen row outscores every real lab.
bool detect_unknown(const Ranking& r, double unseen_score, double threshold);

/// Mean of the records' TTA-averaged embeddings, L2-normalized. Lets a new
/// lab be ranked from a handful of sample sequences without retraining.
Tensor lab_embedding_from_samples(const TripletParams& p, const Tokenizer& tok,
                                  std::span<const DnaRecord> records, int tta_n, uint64_t seed);

/// Copy of p with `row` appended as a new real lab (index L); the unseen
/// row stays last.
TripletParams append_lab_row(const TripletParams& p, const Tensor& row);

// ranking CSV: record_id,rank,lab_name,score (rank is 1-based); rows sorted
// by record id
struct RecordRanking {
  std::string record_id;
  RankOutcome outcome;
};
void write_rankings_csv(const std::string& path, std::vector<RecordRanking> rankings,
                        const LabVocab& vocab);

struct NamedRanking {
  std::string record_id;
  std::vector<std::pair<std::string, double>> entries;  // rank order
};
std::vector<NamedRanking> read_rankings_csv(const std::string& path);

/// Evaluation report CSV: k,accuracy.
void write_eval_report(const std::string& path,
                       const std::vector<std::pair<int64_t, double>>& rows);

}  // namespace geat
