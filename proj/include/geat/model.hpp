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
#include <utility>
#include <vector>

#include "geat/corpus.hpp"
#include "geat/graph.hpp"
#include "geat/tensor.hpp"
#include "geat/tokenize.hpp"

namespace geat {

/// Shared architecture settings for the classifier and the triplet network.
struct ModelConfig {
  int64_t vocab_size = 1001;
  int64_t max_len = 1000;
  int64_t token_embed_dim = 64;
  std::vector<int64_t> kernel_sizes = {3, 4, 5};
  int64_t filters_per_kernel = 128;
  int64_t feature_count = 0;
  int64_t embed_dim = 200;   // E
  int64_t lab_count = 0;     // L; the triplet lab table has L+1 rows
  int64_t hidden_dim = 256;
  double margin = 0.2;

  int64_t pooled_dim() const {
    return static_cast<int64_t>(kernel_sizes.size()) * filters_per_kernel;
  }
  int64_t max_kernel() const;
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Trainable tensors of the triplet (embedding) network. Row lab_count of
/// lab_table is the "unseen" lab.
struct TripletParams {
  ModelConfig config;
  Tensor token_table;                  // V x D
  std::vector<Tensor> conv_w, conv_b;  // per kernel size: (K,D,C) and (C)
  Tensor proj_w, proj_b;               // (pooled+F) x E, E
  Tensor lab_table;                    // (L+1) x E
};

/// Trainable tensors of the softmax classifier.
struct ClassifierParams {
  ModelConfig config;
  Tensor token_table;
  std::vector<Tensor> conv_w, conv_b;
  Tensor hidden_w, hidden_b;           // (pooled+F) x H, H
  Tensor out_w, out_b;                 // H x L, L
};

/// Glorot-uniform conv/dense weights, normal(0, 0.05) embedding tables.
TripletParams init_triplet_params(const ModelConfig& mc, uint64_t seed);
ClassifierParams init_classifier_params(const ModelConfig& mc, uint64_t seed);

/// Canonical (name, tensor) directory used by graphs and checkpoints.
std::vector<std::pair<std::string, Tensor>> named_tensors(const TripletParams& p);
std::vector<std::pair<std::string, Tensor>> named_tensors(const ClassifierParams& p);
TripletParams triplet_from_tensors(const ModelConfig& mc,
                                   const std::vector<std::pair<std::string, Tensor>>& tensors);
ClassifierParams classifier_from_tensors(
    const ModelConfig& mc, const std::vector<std::pair<std::string, Tensor>>& tensors);

/// One fixed-length batch ready for the graph inputs.
struct EncodedBatch {
  IntTensor ids;        // B x T
  IntTensor true_len;   // B
  Tensor features;      // B x F
  int64_t rows() const { return ids.dim(0); }
};

/// Shift + encode + pad each record. The batch width is trimmed to
/// max(true_len) + max_kernel - 1 (capped at max_len): trailing all-pad
/// columns can never reach a pooled window, so outputs are unchanged.
EncodedBatch make_batch(const Tokenizer& tok, std::span<const DnaRecord> records,
                        std::span<const uint64_t> offsets, const ModelConfig& mc);

/// Same, gathering records from the dataset by index.
EncodedBatch make_batch(const Tokenizer& tok, const Dataset& ds,
                        std::span<const int64_t> indices, std::span<const uint64_t> offsets,
                        const ModelConfig& mc);

// Graph builders shared by training and inference. Parameters are created
// zero-filled; fill them with load_params.
template <typename T>
struct TripletGraph {
  GraphT<T> g;
  int anchor = -1;                          // B x E, unit rows
  int sim_ap = -1, sim_an = -1, sim_au = -1;  // with_loss only
  int loss = -1;
};
template <typename T>
TripletGraph<T> build_triplet_graph(const ModelConfig& mc, double margin, double unseen_weight,
                                    bool with_loss);

template <typename T>
struct ClassifierGraph {
  GraphT<T> g;
  int logits = -1;
  int loss = -1;
};
template <typename T>
ClassifierGraph<T> build_classifier_graph(const ModelConfig& mc, bool with_loss);

template <typename T>
void load_params(GraphT<T>& g, const std::vector<std::pair<std::string, Tensor>>& tensors);
template <typename T>
std::vector<std::pair<std::string, Tensor>> extract_params(
    GraphT<T>& g, const std::vector<std::string>& names);
template <typename T>
void set_batch_inputs(GraphT<T>& g, const EncodedBatch& batch);

/// Numerically stable in-place row softmax.
template <typename T>
void softmax_rows(TensorT<T>& logits);

/// B x E unit-norm sequence embeddings.
Tensor embed_sequence(const TripletParams& p, const EncodedBatch& batch);

/// B x L (or B x (L+1) with the unseen row) cosine similarities against the
/// normalized lab table.
Tensor lab_similarities(const TripletParams& p, const Tensor& seq_embeddings,
                        bool include_unseen);

/// B x L probabilities, rows sum to 1.
Tensor classifier_probs(const ClassifierParams& p, const EncodedBatch& batch);

/// Reusable inference session: builds the graph once, then runs batches.
class TripletEncoder {
 public:
  explicit TripletEncoder(const TripletParams& p);
  const ModelConfig& config() const { return config_; }
  Tensor embed(const EncodedBatch& batch);
 private:
  ModelConfig config_;
  TripletGraph<float> tg_;
};

class ClassifierNet {
 public:
  explicit ClassifierNet(const ClassifierParams& p);
  const ModelConfig& config() const { return config_; }
  Tensor probs(const EncodedBatch& batch);
 private:
  ModelConfig config_;
  ClassifierGraph<float> cg_;
};

}  // namespace geat
