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

#include "geat/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geat/csv.hpp"
#include "geat/kernels.hpp"
#include "geat/mining.hpp"
#include "geat/optimizer.hpp"
#include "geat/rng.hpp"

namespace geat {

double triplet_loss(double sim_ap, double sim_an, double margin) {
  return std::max(0.0, margin - sim_ap + sim_an);
}

namespace {

// rng stream layout: 0 = parameter init, 1+epoch = per-epoch shuffling and
// shift offsets (offset streams split per record ordinal inside the epoch).
constexpr uint64_t kInitStream = 0;

struct EpochPlan {
  std::vector<int64_t> order;
  std::vector<uint64_t> offsets;  // aligned with `order`
};

EpochPlan plan_epoch(const Dataset& ds, const Rng& root, int epoch, bool shift_augment) {
  EpochPlan plan;
  plan.order.resize(static_cast<size_t>(ds.size()));
  std::iota(plan.order.begin(), plan.order.end(), int64_t{0});
  Rng epoch_rng = root.split(1 + static_cast<uint64_t>(epoch));
  epoch_rng.shuffle(plan.order);
  plan.offsets.resize(plan.order.size(), 0);
  if (shift_augment) {
    for (size_t i = 0; i < plan.order.size(); ++i) {
      const auto& rec = ds.records[static_cast<size_t>(plan.order[i])];
      Rng rec_rng = epoch_rng.split(static_cast<uint64_t>(plan.order[i]));
      plan.offsets[i] = rec_rng.bounded(rec.sequence.size());
    }
  }
  return plan;
}

/// 1-based rank of `truth` under descending score with index tie-break.
template <typename T>
int64_t rank_of_truth(const T* row, int64_t n, int64_t truth) {
  int64_t rank = 1;
  const T score = row[truth];
  for (int64_t j = 0; j < n; ++j) {
    if (j == truth) continue;
    if (row[j] > score || (row[j] == score && j < truth)) ++rank;
  }
  return rank;
}

void check_train_inputs(const Dataset& ds, const TrainConfig& tc, bool triplet) {
  if (ds.size() == 0) throw ValidationError("training dataset is empty");
  if (ds.lab_count() < 2) throw ValidationError("training needs at least 2 labs");
  if (tc.epochs < 1) throw ValidationError("epochs must be positive");
  if (tc.batch_size < (triplet ? 2 : 1)) {
    throw ValidationError(triplet ? "triplet training needs batch_size >= 2"
                                  : "batch_size must be positive");
  }
  if (tc.margin <= 0) throw ValidationError("margin must be positive");
}

template <typename T>
TripletTrainResult train_triplet_impl(const Dataset& ds, const Tokenizer& tok, ModelConfig mc,
                                      const TrainConfig& tc) {
  check_train_inputs(ds, tc, /*triplet=*/true);
  mc.vocab_size = tok.vocab_size();
  mc.feature_count = ds.feature_count;
  mc.lab_count = ds.lab_count();
  mc.margin = tc.margin;

  auto tg = build_triplet_graph<T>(mc, tc.margin, tc.unseen_weight, /*with_loss=*/true);
  auto& g = tg.g;

  Rng root(tc.seed);
  load_params(g, named_tensors(init_triplet_params(mc, root.split(kInitStream).seed())));

  AdamStateT<T> adam;
  adam.config.lr = tc.learning_rate;

  const int64_t n = ds.size();
  const int64_t labs = mc.lab_count;
  TripletTrainResult result;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const EpochPlan plan = plan_epoch(ds, root, epoch, tc.shift_augment);
    double loss_sum = 0;
    int64_t top1 = 0, top10 = 0;

    for (int64_t start = 0; start < n; start += tc.batch_size) {
      const int64_t bsz = std::min<int64_t>(tc.batch_size, n - start);
      const std::span<const int64_t> idx(plan.order.data() + start, static_cast<size_t>(bsz));
      const std::span<const uint64_t> offs(plan.offsets.data() + start,
                                           static_cast<size_t>(bsz));
      const EncodedBatch batch = make_batch(tok, ds, idx, offs, mc);

      IntTensor pos({bsz});
      IntTensor unseen({bsz});
      for (int64_t i = 0; i < bsz; ++i) {
        pos.data[static_cast<size_t>(i)] = ds.records[static_cast<size_t>(idx[static_cast<size_t>(i)])].lab;
        unseen.data[static_cast<size_t>(i)] = static_cast<int32_t>(labs);
      }

      try {
        set_batch_inputs(g, batch);
        g.set_int_input("pos_ids", pos);
        g.set_int_input("unseen_ids", unseen);
        g.forward(0, tg.anchor);

        const Tensor anchors = g.value(tg.anchor).template cast<float>();
        const Tensor lab_table = g.param_value("lab_table").template cast<float>();
        const MiningResult mined = hard_negatives({pos, anchors, lab_table});
        g.set_int_input("neg_ids", mined.negative_indices);
        g.forward(tg.anchor + 1, tg.loss);
        g.backward(tg.loss);
        adam_step(g, adam);

        loss_sum += static_cast<double>(g.value(tg.loss).at(0)) * static_cast<double>(bsz);

        // running train metrics against the pre-update lab table
        Tensor normalized({labs, mc.embed_dim});
        kernels::l2norm_rows_forward(lab_table.ptr(), labs, mc.embed_dim, normalized.ptr());
        Tensor sims({bsz, labs});
        kernels::sim_matrix(anchors.ptr(), normalized.ptr(), bsz, labs, mc.embed_dim,
                            sims.ptr());
        for (int64_t i = 0; i < bsz; ++i) {
          const int64_t r = rank_of_truth(sims.ptr() + i * labs, labs,
                                          pos.data[static_cast<size_t>(i)]);
          top1 += r <= 1;
          top10 += r <= 10;
        }
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(start / tc.batch_size) + ": " + e.what());
      }
    }

    result.log.push_back({epoch, "train", loss_sum / static_cast<double>(n),
                          static_cast<double>(top1) / static_cast<double>(n),
                          static_cast<double>(top10) / static_cast<double>(n)});
  }

  result.params = triplet_from_tensors(mc, extract_params(g, g.param_names()));
  return result;
}

template <typename T>
ClassifierTrainResult train_classifier_impl(const Dataset& ds, const Tokenizer& tok,
                                            ModelConfig mc, const TrainConfig& tc) {
  check_train_inputs(ds, tc, /*triplet=*/false);
  mc.vocab_size = tok.vocab_size();
  mc.feature_count = ds.feature_count;
  mc.lab_count = ds.lab_count();
  mc.margin = tc.margin;

  auto cg = build_classifier_graph<T>(mc, /*with_loss=*/true);
  auto& g = cg.g;

  Rng root(tc.seed);
  load_params(g, named_tensors(init_classifier_params(mc, root.split(kInitStream).seed())));

  AdamStateT<T> adam;
  adam.config.lr = tc.learning_rate;

  const int64_t n = ds.size();
  const int64_t labs = mc.lab_count;
  ClassifierTrainResult result;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const EpochPlan plan = plan_epoch(ds, root, epoch, tc.shift_augment);
    double loss_sum = 0;
    int64_t top1 = 0, top10 = 0;

    for (int64_t start = 0; start < n; start += tc.batch_size) {
      const int64_t bsz = std::min<int64_t>(tc.batch_size, n - start);
      const std::span<const int64_t> idx(plan.order.data() + start, static_cast<size_t>(bsz));
      const std::span<const uint64_t> offs(plan.offsets.data() + start,
                                           static_cast<size_t>(bsz));
      const EncodedBatch batch = make_batch(tok, ds, idx, offs, mc);

      IntTensor labels({bsz});
      for (int64_t i = 0; i < bsz; ++i) {
        labels.data[static_cast<size_t>(i)] =
            ds.records[static_cast<size_t>(idx[static_cast<size_t>(i)])].lab;
      }

      try {
        set_batch_inputs(g, batch);
        g.set_int_input("labels", labels);
        g.forward();
        g.backward(cg.loss);
        adam_step(g, adam);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(start / tc.batch_size) + ": " + e.what());
      }

      loss_sum += static_cast<double>(g.value(cg.loss).at(0)) * static_cast<double>(bsz);
      const auto& logits = g.value(cg.logits);
      for (int64_t i = 0; i < bsz; ++i) {
        const int64_t r = rank_of_truth(logits.ptr() + i * labs, labs,
                                        labels.data[static_cast<size_t>(i)]);
        top1 += r <= 1;
        top10 += r <= 10;
      }
    }

    result.log.push_back({epoch, "train", loss_sum / static_cast<double>(n),
                          static_cast<double>(top1) / static_cast<double>(n),
                          static_cast<double>(top10) / static_cast<double>(n)});
  }

  result.params = classifier_from_tensors(mc, extract_params(g, g.param_names()));
  return result;
}

}  // namespace

TripletTrainResult train_triplet(const Dataset& train, const Tokenizer& tok, ModelConfig mc,
                                 const TrainConfig& tc) {
  return tc.use_f64 ? train_triplet_impl<double>(train, tok, mc, tc)
                    : train_triplet_impl<float>(train, tok, mc, tc);
}

ClassifierTrainResult train_classifier(const Dataset& train, const Tokenizer& tok,
                                       ModelConfig mc, const TrainConfig& tc) {
  return tc.use_f64 ? train_classifier_impl<double>(train, tok, mc, tc)
                    : train_classifier_impl<float>(train, tok, mc, tc);
}

void write_train_log(const std::string& path, const std::vector<EpochLogRow>& log) {
  auto out = csv::open_output(path);
  out << "epoch,split,loss,top1,top10\n";
  for (const auto& row : log) {
    out << row.epoch << ',' << row.split << ',' << csv::fmt_float(row.loss) << ','
        << csv::fmt_float(row.top1) << ',' << csv::fmt_float(row.top10) << "\n";
  }
}

}  // namespace geat
