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

#include "geat/rank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geat/csv.hpp"
#include "geat/kernels.hpp"
#include "geat/rng.hpp"

namespace geat {

namespace {

std::vector<uint64_t> tta_offsets(const DnaRecord& record, int tta_n, uint64_t seed) {
  if (tta_n < 1) throw ValidationError("tta_n must be at least 1");
  std::vector<uint64_t> offsets(static_cast<size_t>(tta_n), 0);  // offset 0 comes first
  Rng rng(seed);
  for (int i = 1; i < tta_n; ++i) {
    offsets[static_cast<size_t>(i)] = rng.bounded(record.sequence.size());
  }
  return offsets;
}

EncodedBatch tta_batch(const Tokenizer& tok, const DnaRecord& record, int tta_n, uint64_t seed,
                       const ModelConfig& mc) {
  const auto offsets = tta_offsets(record, tta_n, seed);
  const std::vector<DnaRecord> variants(static_cast<size_t>(tta_n), record);
  return make_batch(tok, variants, offsets, mc);
}

/// Column means of a (rows x cols) float tensor, accumulated in double.
std::vector<double> column_means(const Tensor& rows) {
  const int64_t n = rows.dim(0), cols = rows.dim(1);
  std::vector<double> mean(static_cast<size_t>(cols), 0.0);
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t c = 0; c < cols; ++c) mean[static_cast<size_t>(c)] += rows.at(r, c);
  }
  for (auto& v : mean) v /= static_cast<double>(n);
  return mean;
}

}  // namespace

Ranking make_ranking(std::string kind, std::vector<std::pair<int32_t, double>> scores) {
  for (const auto& [lab, score] : scores) {
    if (!std::isfinite(score)) {
      throw NumericError("ranking: non-finite score for lab " + std::to_string(lab));
    }
  }
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return Ranking{std::move(kind), std::move(scores)};
}

std::vector<RankOutcome> rank_dataset(const TripletParams& p, const Tokenizer& tok,
                                      std::span<const DnaRecord> records, int tta_n,
                                      uint64_t seed) {
  TripletEncoder encoder(p);
  std::vector<RankOutcome> out;
  out.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    const EncodedBatch batch = tta_batch(tok, records[i], tta_n, seed ^ i, p.config);
    const Tensor sims = lab_similarities(p, encoder.embed(batch), /*include_unseen=*/true);
    const auto mean = column_means(sims);

    std::vector<std::pair<int32_t, double>> scores;
    scores.reserve(static_cast<size_t>(p.config.lab_count));
    for (int64_t lab = 0; lab < p.config.lab_count; ++lab) {
      scores.emplace_back(static_cast<int32_t>(lab), mean[static_cast<size_t>(lab)]);
    }
    out.push_back({make_ranking("triplet", std::move(scores)),
                   mean[static_cast<size_t>(p.config.lab_count)]});
  }
  return out;
}

std::vector<RankOutcome> rank_dataset(const ClassifierParams& p, const Tokenizer& tok,
                                      std::span<const DnaRecord> records, int tta_n,
                                      uint64_t seed) {
  ClassifierNet net(p);
  std::vector<RankOutcome> out;
  out.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    const EncodedBatch batch = tta_batch(tok, records[i], tta_n, seed ^ i, p.config);
    const Tensor probs = net.probs(batch);
    const auto mean = column_means(probs);

    std::vector<std::pair<int32_t, double>> scores;
    scores.reserve(static_cast<size_t>(p.config.lab_count));
    for (int64_t lab = 0; lab < p.config.lab_count; ++lab) {
      scores.emplace_back(static_cast<int32_t>(lab), mean[static_cast<size_t>(lab)]);
    }
    out.push_back({make_ranking("classifier", std::move(scores)),
                   std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

RankOutcome rank_labs(const TripletParams& p, const Tokenizer& tok, const DnaRecord& record,
                      int tta_n, uint64_t seed) {
  return rank_dataset(p, tok, {&record, 1}, tta_n, seed).front();
}

RankOutcome rank_labs(const ClassifierParams& p, const Tokenizer& tok, const DnaRecord& record,
                      int tta_n, uint64_t seed) {
  return rank_dataset(p, tok, {&record, 1}, tta_n, seed).front();
}

double top_k_accuracy(std::span<const Ranking> rankings, std::span<const int32_t> truths,
                      int64_t k) {
  if (rankings.size() != truths.size()) {
    throw ValidationError("top_k_accuracy: rankings and truths differ in length");
  }
  if (rankings.empty()) throw ValidationError("top_k_accuracy: empty input");
  if (k < 1) throw ValidationError("top_k_accuracy: k must be at least 1");
  int64_t hits = 0;
  for (size_t i = 0; i < rankings.size(); ++i) {
    const auto& entries = rankings[i].entries;
    const int64_t limit = std::min<int64_t>(k, static_cast<int64_t>(entries.size()));
    for (int64_t j = 0; j < limit; ++j) {
      if (entries[static_cast<size_t>(j)].first == truths[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

bool detect_unknown(const Ranking& r, double unseen_score, double threshold) {
  if (r.entries.empty()) throw ValidationError("detect_unknown: empty ranking");
  const double top = r.entries.front().second;
  return top < threshold || unseen_score > top;
}

Tensor lab_embedding_from_samples(const TripletParams& p, const Tokenizer& tok,
                                  std::span<const DnaRecord> records, int tta_n,
                                  uint64_t seed) {
  if (records.empty()) {
    throw ValidationError("lab_embedding_from_samples: need at least one record");
  }
  TripletEncoder encoder(p);
  const int64_t e = p.config.embed_dim;
  std::vector<double> acc(static_cast<size_t>(e), 0.0);
  for (size_t i = 0; i < records.size(); ++i) {
    const EncodedBatch batch = tta_batch(tok, records[i], tta_n, seed ^ i, p.config);
    const auto mean = column_means(encoder.embed(batch));  // TTA average per record
    for (int64_t d = 0; d < e; ++d) acc[static_cast<size_t>(d)] += mean[static_cast<size_t>(d)];
  }
  Tensor out({e});
  for (int64_t d = 0; d < e; ++d) {
    out.at(d) = static_cast<float>(acc[static_cast<size_t>(d)] /
                                   static_cast<double>(records.size()));
  }
  Tensor normalized({1, e}, out.data);
  kernels::l2norm_rows_forward(normalized.ptr(), 1, e, out.ptr());
  return out;
}

TripletParams append_lab_row(const TripletParams& p, const Tensor& row) {
  if (row.size() != p.config.embed_dim) {
    throw ValidationError("append_lab_row: row must have embed_dim entries");
  }
  TripletParams out = p;
  out.config.lab_count += 1;
  out.lab_table = Tensor({p.config.lab_count + 2, p.config.embed_dim});
  const int64_t e = p.config.embed_dim;
  // real labs, then the new lab, then the unseen row
  std::copy_n(p.lab_table.ptr(), p.config.lab_count * e, out.lab_table.ptr());
  std::copy_n(row.ptr(), e, out.lab_table.ptr() + p.config.lab_count * e);
  std::copy_n(p.lab_table.ptr() + p.config.lab_count * e, e,
              out.lab_table.ptr() + (p.config.lab_count + 1) * e);
  return out;
}

void write_rankings_csv(const std::string& path, std::vector<RecordRanking> rankings,
                        const LabVocab& vocab) {
  std::sort(rankings.begin(), rankings.end(),
            [](const RecordRanking& a, const RecordRanking& b) {
              return a.record_id < b.record_id;
            });
  auto out = csv::open_output(path);
  out << "record_id,rank,lab_name,score\n";
  for (const auto& rr : rankings) {
    const auto& entries = rr.outcome.ranking.entries;
    for (size_t pos = 0; pos < entries.size(); ++pos) {
      out << rr.record_id << ',' << (pos + 1) << ','
          << vocab.names.at(static_cast<size_t>(entries[pos].first)) << ','
          << csv::fmt_float(entries[pos].second) << "\n";
    }
  }
}

std::vector<NamedRanking> read_rankings_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || csv::split_line(lines[0]) !=
                           std::vector<std::string>{"record_id", "rank", "lab_name", "score"}) {
    throw ValidationError("not a ranking CSV (expected record_id,rank,lab_name,score): " + path);
  }
  std::vector<NamedRanking> out;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = csv::split_line(lines[ln]);
    if (fields.size() != 4) {
      throw ValidationError("ranking CSV row " + std::to_string(ln) + ": expected 4 columns");
    }
    if (out.empty() || out.back().record_id != fields[0]) {
      out.push_back({fields[0], {}});
    }
    const auto rank = std::stoll(fields[1]);
    if (rank != static_cast<int64_t>(out.back().entries.size()) + 1) {
      throw ValidationError("ranking CSV row " + std::to_string(ln) +
                            ": ranks must be 1-based and contiguous per record");
    }
    out.back().entries.emplace_back(fields[2], std::stod(fields[3]));
  }
  return out;
}

void write_eval_report(const std::string& path,
                       const std::vector<std::pair<int64_t, double>>& rows) {
  auto out = csv::open_output(path);
  out << "k,accuracy\n";
  for (const auto& [k, acc] : rows) out << k << ',' << csv::fmt_float(acc) << "\n";
}

}  // namespace geat
