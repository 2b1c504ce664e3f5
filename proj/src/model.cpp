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

#include "geat/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "geat/kernels.hpp"
#include "geat/rng.hpp"

namespace geat {

int64_t ModelConfig::max_kernel() const {
  int64_t mx = 0;
  for (int64_t k : kernel_sizes) mx = std::max(mx, k);
  return mx;
}

void ModelConfig::validate() const {
  if (vocab_size < 1 || max_len < 1 || token_embed_dim < 1 || filters_per_kernel < 1 ||
      feature_count < 0 || lab_count < 1 || hidden_dim < 1) {
    throw ValidationError("model config: all dimensions must be positive");
  }
  if (embed_dim < 2) throw ValidationError("model config: embed_dim must be at least 2");
  if (kernel_sizes.empty()) throw ValidationError("model config: no kernel sizes");
  for (int64_t k : kernel_sizes) {
    if (k < 1) throw ValidationError("model config: kernel sizes must be positive");
    if (k > max_len) throw ValidationError("model config: kernel size exceeds max_len");
  }
  for (size_t i = 0; i + 1 < kernel_sizes.size(); ++i) {
    for (size_t j = i + 1; j < kernel_sizes.size(); ++j) {
      if (kernel_sizes[i] == kernel_sizes[j]) {
        throw ValidationError("model config: duplicate kernel size");
      }
    }
  }
  if (margin <= 0) throw ValidationError("model config: margin must be positive");
}

namespace {

Tensor glorot_uniform(Shape shape, int64_t fan_in, int64_t fan_out, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(-bound, bound));
  return t;
}

Tensor gaussian(Shape shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = static_cast<float>(rng.normal() * stddev);
  return t;
}

std::string conv_name(const char* prefix, int64_t k) {
  return std::string(prefix) + std::to_string(k);
}

}  // namespace

TripletParams init_triplet_params(const ModelConfig& mc, uint64_t seed) {
  mc.validate();
  Rng rng(seed);
  TripletParams p;
  p.config = mc;
  p.token_table = gaussian({mc.vocab_size, mc.token_embed_dim}, 0.05, rng);
  for (int64_t k : mc.kernel_sizes) {
    p.conv_w.push_back(glorot_uniform({k, mc.token_embed_dim, mc.filters_per_kernel},
                                      k * mc.token_embed_dim, mc.filters_per_kernel, rng));
    p.conv_b.push_back(Tensor({mc.filters_per_kernel}));
  }
  const int64_t proj_in = mc.pooled_dim() + mc.feature_count;
  p.proj_w = glorot_uniform({proj_in, mc.embed_dim}, proj_in, mc.embed_dim, rng);
  p.proj_b = Tensor({mc.embed_dim});
  p.lab_table = gaussian({mc.lab_count + 1, mc.embed_dim}, 0.05, rng);
  return p;
}

ClassifierParams init_classifier_params(const ModelConfig& mc, uint64_t seed) {
  mc.validate();
  Rng rng(seed);
  ClassifierParams p;
  p.config = mc;
  p.token_table = gaussian({mc.vocab_size, mc.token_embed_dim}, 0.05, rng);
  for (int64_t k : mc.kernel_sizes) {
    p.conv_w.push_back(glorot_uniform({k, mc.token_embed_dim, mc.filters_per_kernel},
                                      k * mc.token_embed_dim, mc.filters_per_kernel, rng));
    p.conv_b.push_back(Tensor({mc.filters_per_kernel}));
  }
  const int64_t hidden_in = mc.pooled_dim() + mc.feature_count;
  p.hidden_w = glorot_uniform({hidden_in, mc.hidden_dim}, hidden_in, mc.hidden_dim, rng);
  p.hidden_b = Tensor({mc.hidden_dim});
  p.out_w = glorot_uniform({mc.hidden_dim, mc.lab_count}, mc.hidden_dim, mc.lab_count, rng);
  p.out_b = Tensor({mc.lab_count});
  return p;
}

std::vector<std::pair<std::string, Tensor>> named_tensors(const TripletParams& p) {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("token_table", p.token_table);
  for (size_t i = 0; i < p.conv_w.size(); ++i) {
    out.emplace_back(conv_name("conv_w", p.config.kernel_sizes[i]), p.conv_w[i]);
    out.emplace_back(conv_name("conv_b", p.config.kernel_sizes[i]), p.conv_b[i]);
  }
  out.emplace_back("proj_w", p.proj_w);
  out.emplace_back("proj_b", p.proj_b);
  out.emplace_back("lab_table", p.lab_table);
  return out;
}

std::vector<std::pair<std::string, Tensor>> named_tensors(const ClassifierParams& p) {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("token_table", p.token_table);
  for (size_t i = 0; i < p.conv_w.size(); ++i) {
    out.emplace_back(conv_name("conv_w", p.config.kernel_sizes[i]), p.conv_w[i]);
    out.emplace_back(conv_name("conv_b", p.config.kernel_sizes[i]), p.conv_b[i]);
  }
  out.emplace_back("hidden_w", p.hidden_w);
  out.emplace_back("hidden_b", p.hidden_b);
  out.emplace_back("out_w", p.out_w);
  out.emplace_back("out_b", p.out_b);
  return out;
}

namespace {

Tensor take_tensor(std::unordered_map<std::string, Tensor>& pool, const std::string& name) {
  auto it = pool.find(name);
  if (it == pool.end()) throw ValidationError("missing tensor '" + name + "'");
  Tensor t = std::move(it->second);
  pool.erase(it);
  return t;
}

std::unordered_map<std::string, Tensor> tensor_pool(
    const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::unordered_map<std::string, Tensor> pool;
  for (const auto& [name, t] : tensors) {
    if (!pool.emplace(name, t).second) throw ValidationError("duplicate tensor '" + name + "'");
  }
  return pool;
}

}  // namespace

TripletParams triplet_from_tensors(const ModelConfig& mc,
                                   const std::vector<std::pair<std::string, Tensor>>& tensors) {
  auto pool = tensor_pool(tensors);
  TripletParams p;
  p.config = mc;
  p.token_table = take_tensor(pool, "token_table");
  for (int64_t k : mc.kernel_sizes) {
    p.conv_w.push_back(take_tensor(pool, conv_name("conv_w", k)));
    p.conv_b.push_back(take_tensor(pool, conv_name("conv_b", k)));
  }
  p.proj_w = take_tensor(pool, "proj_w");
  p.proj_b = take_tensor(pool, "proj_b");
  p.lab_table = take_tensor(pool, "lab_table");
  if (p.lab_table.rank() != 2 || p.lab_table.dim(0) != mc.lab_count + 1) {
    throw ValidationError("lab_table must have lab_count+1 rows");
  }
  return p;
}

ClassifierParams classifier_from_tensors(
    const ModelConfig& mc, const std::vector<std::pair<std::string, Tensor>>& tensors) {
  auto pool = tensor_pool(tensors);
  ClassifierParams p;
  p.config = mc;
  p.token_table = take_tensor(pool, "token_table");
  for (int64_t k : mc.kernel_sizes) {
    p.conv_w.push_back(take_tensor(pool, conv_name("conv_w", k)));
    p.conv_b.push_back(take_tensor(pool, conv_name("conv_b", k)));
  }
  p.hidden_w = take_tensor(pool, "hidden_w");
  p.hidden_b = take_tensor(pool, "hidden_b");
  p.out_w = take_tensor(pool, "out_w");
  p.out_b = take_tensor(pool, "out_b");
  return p;
}

namespace {

EncodedBatch make_batch_ptrs(const Tokenizer& tok, const std::vector<const DnaRecord*>& records,
                             std::span<const uint64_t> offsets, const ModelConfig& mc) {
  if (records.empty()) throw ValidationError("make_batch: empty batch");
  if (offsets.size() != records.size()) {
    throw ValidationError("make_batch: one offset per record required");
  }
  const int64_t n = static_cast<int64_t>(records.size());

  std::vector<TokenSeq> seqs(static_cast<size_t>(n));
#pragma omp parallel for
  for (int64_t i = 0; i < n; ++i) {
    seqs[static_cast<size_t>(i)] = prepare_input(tok, *records[static_cast<size_t>(i)],
                                                 offsets[static_cast<size_t>(i)], mc.max_len);
  }

  int64_t max_true = 1;
  for (const auto& s : seqs) max_true = std::max(max_true, s.true_len);
  const int64_t width = std::min(mc.max_len, std::max(max_true + mc.max_kernel() - 1,
                                                      mc.max_kernel()));

  EncodedBatch batch;
  batch.ids = IntTensor({n, width});
  batch.true_len = IntTensor({n});
  batch.features = Tensor({n, mc.feature_count});
  for (int64_t i = 0; i < n; ++i) {
    const auto& rec = *records[static_cast<size_t>(i)];
    if (static_cast<int64_t>(rec.features.size()) != mc.feature_count) {
      throw ValidationError("record " + rec.id + ": feature width " +
                            std::to_string(rec.features.size()) + " != model feature_count " +
                            std::to_string(mc.feature_count));
    }
    const auto& s = seqs[static_cast<size_t>(i)];
    std::copy_n(s.ids.begin(), width, batch.ids.data.begin() + i * width);
    batch.true_len.data[static_cast<size_t>(i)] = static_cast<int32_t>(s.true_len);
    for (int64_t f = 0; f < mc.feature_count; ++f) {
      batch.features.at(i, f) = static_cast<float>(rec.features[static_cast<size_t>(f)]);
    }
  }
  return batch;
}

}  // namespace

EncodedBatch make_batch(const Tokenizer& tok, std::span<const DnaRecord> records,
                        std::span<const uint64_t> offsets, const ModelConfig& mc) {
  std::vector<const DnaRecord*> ptrs;
  ptrs.reserve(records.size());
  for (const auto& rec : records) ptrs.push_back(&rec);
  return make_batch_ptrs(tok, ptrs, offsets, mc);
}

EncodedBatch make_batch(const Tokenizer& tok, const Dataset& ds,
                        std::span<const int64_t> indices, std::span<const uint64_t> offsets,
                        const ModelConfig& mc) {
  std::vector<const DnaRecord*> ptrs;
  ptrs.reserve(indices.size());
  for (int64_t idx : indices) {
    if (idx < 0 || idx >= ds.size()) throw ValidationError("make_batch: record index out of range");
    ptrs.push_back(&ds.records[static_cast<size_t>(idx)]);
  }
  return make_batch_ptrs(tok, ptrs, offsets, mc);
}

namespace {

template <typename T>
struct Trunk {
  int ids, true_len, features;
  int out;  // B x (pooled + F)
};

template <typename T>
Trunk<T> build_trunk(GraphT<T>& g, const ModelConfig& mc) {
  Trunk<T> t{};
  t.ids = g.int_input("ids");
  t.true_len = g.int_input("true_len");
  t.features = g.input("features");

  const int table = g.param("token_table", TensorT<T>({mc.vocab_size, mc.token_embed_dim}));
  const int emb = g.embedding_lookup(table, t.ids);

  int pooled = -1;
  for (int64_t k : mc.kernel_sizes) {
    const int w = g.param("conv_w" + std::to_string(k),
                          TensorT<T>({k, mc.token_embed_dim, mc.filters_per_kernel}));
    const int b = g.param("conv_b" + std::to_string(k), TensorT<T>({mc.filters_per_kernel}));
    const int conv = g.conv1d(emb, w, b, t.true_len);
    const int pool = g.max_over_time(conv, t.true_len);
    pooled = pooled < 0 ? pool : g.concat(pooled, pool);
  }
  t.out = mc.feature_count > 0 ? g.concat(pooled, t.features) : pooled;
  return t;
}

}  // namespace

template <typename T>
TripletGraph<T> build_triplet_graph(const ModelConfig& mc, double margin, double unseen_weight,
                                    bool with_loss) {
  mc.validate();
  TripletGraph<T> tg;
  auto& g = tg.g;
  const auto trunk = build_trunk(g, mc);

  const int proj_w = g.param("proj_w", TensorT<T>({mc.pooled_dim() + mc.feature_count,
                                                   mc.embed_dim}));
  const int proj_b = g.param("proj_b", TensorT<T>({mc.embed_dim}));
  const int proj = g.dense(trunk.out, proj_w, proj_b);
  tg.anchor = g.l2_normalize(proj);
  g.name_node(tg.anchor, "anchor");

  if (!with_loss) return tg;

  const int lab_table = g.param("lab_table", TensorT<T>({mc.lab_count + 1, mc.embed_dim}));
  const int pos_ids = g.int_input("pos_ids");
  const int neg_ids = g.int_input("neg_ids");
  const int unseen_ids = g.int_input("unseen_ids");

  const int pos = g.l2_normalize(g.embedding_lookup(lab_table, pos_ids));
  const int neg = g.l2_normalize(g.embedding_lookup(lab_table, neg_ids));
  const int unseen = g.l2_normalize(g.embedding_lookup(lab_table, unseen_ids));

  tg.sim_ap = g.row_dot(tg.anchor, pos);
  g.name_node(tg.sim_ap, "sim_ap");
  tg.sim_an = g.row_dot(tg.anchor, neg);
  g.name_node(tg.sim_an, "sim_an");
  tg.sim_au = g.row_dot(tg.anchor, unseen);
  g.name_node(tg.sim_au, "sim_au");

  // mean(max(0, m - sim_ap + sim_an)) + unseen_weight * same against the
  // unseen row
  const int hinge_neg = g.relu(g.add_scalar(g.sub(tg.sim_an, tg.sim_ap), margin));
  const int hinge_unseen = g.relu(g.add_scalar(g.sub(tg.sim_au, tg.sim_ap), margin));
  tg.loss = g.add(g.mean(hinge_neg), g.scale(g.mean(hinge_unseen), unseen_weight));
  g.name_node(tg.loss, "loss");
  return tg;
}

template <typename T>
ClassifierGraph<T> build_classifier_graph(const ModelConfig& mc, bool with_loss) {
  mc.validate();
  ClassifierGraph<T> cg;
  auto& g = cg.g;
  const auto trunk = build_trunk(g, mc);

  const int hidden_w = g.param("hidden_w", TensorT<T>({mc.pooled_dim() + mc.feature_count,
                                                       mc.hidden_dim}));
  const int hidden_b = g.param("hidden_b", TensorT<T>({mc.hidden_dim}));
  const int hidden = g.relu(g.dense(trunk.out, hidden_w, hidden_b));

  const int out_w = g.param("out_w", TensorT<T>({mc.hidden_dim, mc.lab_count}));
  const int out_b = g.param("out_b", TensorT<T>({mc.lab_count}));
  cg.logits = g.dense(hidden, out_w, out_b);
  g.name_node(cg.logits, "logits");

  if (!with_loss) return cg;

  const int labels = g.int_input("labels");
  cg.loss = g.mean(g.softmax_xent(cg.logits, labels));
  g.name_node(cg.loss, "loss");
  return cg;
}

template <typename T>
void load_params(GraphT<T>& g, const std::vector<std::pair<std::string, Tensor>>& tensors) {
  for (const auto& [name, t] : tensors) {
    TensorT<T>& dst = g.param_value(name);
    if (dst.shape != t.shape) {
      throw ValidationError("parameter '" + name + "': shape " + shape_str(t.shape) +
                            " does not match graph shape " + shape_str(dst.shape));
    }
    dst = t.template cast<T>();
  }
}

template <typename T>
std::vector<std::pair<std::string, Tensor>> extract_params(
    GraphT<T>& g, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, Tensor>> out;
  for (const auto& name : names) {
    out.emplace_back(name, g.param_value(name).template cast<float>());
  }
  return out;
}

template <typename T>
void set_batch_inputs(GraphT<T>& g, const EncodedBatch& batch) {
  g.set_int_input("ids", batch.ids);
  g.set_int_input("true_len", batch.true_len);
  g.set_input("features", batch.features.cast<T>());
}

template <typename T>
void softmax_rows(TensorT<T>& logits) {
  const int64_t rows = logits.dim(0), classes = logits.dim(1);
  for (int64_t r = 0; r < rows; ++r) {
    T* row = logits.ptr() + r * classes;
    T mx = row[0];
    for (int64_t c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
    T sum = 0;
    for (int64_t c = 0; c < classes; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (int64_t c = 0; c < classes; ++c) row[c] /= sum;
  }
}

template struct TripletGraph<float>;
template struct TripletGraph<double>;
template struct ClassifierGraph<float>;
template struct ClassifierGraph<double>;
template TripletGraph<float> build_triplet_graph<float>(const ModelConfig&, double, double, bool);
template TripletGraph<double> build_triplet_graph<double>(const ModelConfig&, double, double,
                                                          bool);
template ClassifierGraph<float> build_classifier_graph<float>(const ModelConfig&, bool);
template ClassifierGraph<double> build_classifier_graph<double>(const ModelConfig&, bool);
template void load_params<float>(GraphT<float>&,
                                 const std::vector<std::pair<std::string, Tensor>>&);
template void load_params<double>(GraphT<double>&,
                                  const std::vector<std::pair<std::string, Tensor>>&);
template std::vector<std::pair<std::string, Tensor>> extract_params<float>(
    GraphT<float>&, const std::vector<std::string>&);
template std::vector<std::pair<std::string, Tensor>> extract_params<double>(
    GraphT<double>&, const std::vector<std::string>&);
template void set_batch_inputs<float>(GraphT<float>&, const EncodedBatch&);
template void set_batch_inputs<double>(GraphT<double>&, const EncodedBatch&);
template void softmax_rows<float>(Tensor&);
template void softmax_rows<double>(Tensor64&);

TripletEncoder::TripletEncoder(const TripletParams& p)
    : config_(p.config), tg_(build_triplet_graph<float>(p.config, p.config.margin, 1.0, false)) {
  load_params(tg_.g, named_tensors(p));
}

Tensor TripletEncoder::embed(const EncodedBatch& batch) {
  set_batch_inputs(tg_.g, batch);
  tg_.g.forward();
  return tg_.g.value(tg_.anchor);
}

ClassifierNet::ClassifierNet(const ClassifierParams& p)
    : config_(p.config), cg_(build_classifier_graph<float>(p.config, false)) {
  load_params(cg_.g, named_tensors(p));
}

Tensor ClassifierNet::probs(const EncodedBatch& batch) {
  set_batch_inputs(cg_.g, batch);
  cg_.g.forward();
  Tensor probs = cg_.g.value(cg_.logits);
  softmax_rows(probs);
  return probs;
}

Tensor embed_sequence(const TripletParams& p, const EncodedBatch& batch) {
  TripletEncoder enc(p);
  return enc.embed(batch);
}

Tensor lab_similarities(const TripletParams& p, const Tensor& seq_embeddings,
                        bool include_unseen) {
  if (seq_embeddings.rank() != 2 || seq_embeddings.dim(1) != p.config.embed_dim) {
    throw ValidationError("lab_similarities: embeddings must be B x embed_dim");
  }
  const int64_t rows = include_unseen ? p.config.lab_count + 1 : p.config.lab_count;
  for (int64_t r = 0; r < rows; ++r) {
    double s = 0;
    for (int64_t d = 0; d < p.config.embed_dim; ++d) {
      const double v = p.lab_table.at(r, d);
      s += v * v;
    }
    if (std::sqrt(s) < 1e-8) {
      throw NumericError("lab_similarities: lab row " + std::to_string(r) + " has zero norm");
    }
  }
  Tensor normalized({rows, p.config.embed_dim});
  kernels::l2norm_rows_forward(p.lab_table.ptr(), rows, p.config.embed_dim, normalized.ptr());
  Tensor sims({seq_embeddings.dim(0), rows});
  kernels::sim_matrix(seq_embeddings.ptr(), normalized.ptr(), seq_embeddings.dim(0), rows,
                      p.config.embed_dim, sims.ptr());
  return sims;
}

Tensor classifier_probs(const ClassifierParams& p, const EncodedBatch& batch) {
  ClassifierNet net(p);
  return net.probs(batch);
}

}  // namespace geat
