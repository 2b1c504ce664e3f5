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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geat/model.hpp"
#include "geat/rng.hpp"

using namespace geat;

namespace {

ModelConfig tiny_config(int64_t labs, int64_t features) {
  ModelConfig mc;
  mc.vocab_size = 6;  // base tokenizer
  mc.max_len = 32;
  mc.token_embed_dim = 8;
  mc.kernel_sizes = {2, 3};
  mc.filters_per_kernel = 6;
  mc.feature_count = features;
  mc.embed_dim = 10;
  mc.lab_count = labs;
  mc.hidden_dim = 12;
  return mc;
}

std::string random_dna(Rng& rng, size_t len) {
  static const char bases[] = "ACGT";
  std::string s(len, 'A');
  for (auto& c : s) c = bases[rng.bounded(4)];
  return s;
}

std::vector<DnaRecord> random_records(int n, int64_t features, Rng& rng) {
  std::vector<DnaRecord> recs;
  for (int i = 0; i < n; ++i) {
    DnaRecord rec;
    rec.id = "r" + std::to_string(i);
    rec.sequence = random_dna(rng, 10 + rng.bounded(30));
    rec.lab = 0;
    for (int64_t f = 0; f < features; ++f) {
      rec.features.push_back(static_cast<uint8_t>(rng.bounded(2)));
    }
    recs.push_back(std::move(rec));
  }
  return recs;
}

EncodedBatch batch_of(const std::vector<DnaRecord>& recs, const ModelConfig& mc) {
  const Tokenizer tok = train_bpe({"ACGT"}, 6);
  const std::vector<uint64_t> offsets(recs.size(), 0);
  return make_batch(tok, recs, offsets, mc);
}

}  // namespace

TEST_CASE("embed_sequence returns unit rows") {
  Rng rng(1);
  const ModelConfig mc = tiny_config(4, 3);
  const TripletParams p = init_triplet_params(mc, 11);
  const auto batch = batch_of(random_records(5, 3, rng), mc);
  const Tensor emb = embed_sequence(p, batch);
  REQUIRE(emb.shape == Shape{5, 10});
  for (int64_t r = 0; r < 5; ++r) {
    double s = 0;
    for (int64_t d = 0; d < 10; ++d) s += emb.at(r, d) * emb.at(r, d);
    CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("duplicate records embed identically") {
  Rng rng(2);
  const ModelConfig mc = tiny_config(4, 2);
  const TripletParams p = init_triplet_params(mc, 12);
  auto recs = random_records(1, 2, rng);
  recs.push_back(recs[0]);
  recs.back().id = "copy";
  const Tensor emb = embed_sequence(p, batch_of(recs, mc));
  for (int64_t d = 0; d < mc.embed_dim; ++d) CHECK(emb.at(0, d) == emb.at(1, d));
}

TEST_CASE("a single flipped feature bit changes the embedding") {
  Rng rng(3);
  const ModelConfig mc = tiny_config(4, 4);
  const TripletParams p = init_triplet_params(mc, 13);
  auto recs = random_records(1, 4, rng);
  recs.push_back(recs[0]);
  recs.back().id = "flip";
  recs.back().features[2] ^= 1;
  const Tensor emb = embed_sequence(p, batch_of(recs, mc));
  double diff = 0;
  for (int64_t d = 0; d < mc.embed_dim; ++d) diff += std::abs(emb.at(0, d) - emb.at(1, d));
  CHECK(diff > 0);
}

TEST_CASE("embedding is equivariant to batch permutation") {
  Rng rng(4);
  const ModelConfig mc = tiny_config(3, 2);
  const TripletParams p = init_triplet_params(mc, 14);
  auto recs = random_records(4, 2, rng);
  const Tensor forward_order = embed_sequence(p, batch_of(recs, mc));
  std::vector<DnaRecord> reversed(recs.rbegin(), recs.rend());
  const Tensor reverse_order = embed_sequence(p, batch_of(reversed, mc));
  for (int64_t r = 0; r < 4; ++r) {
    for (int64_t d = 0; d < mc.embed_dim; ++d) {
      CHECK(forward_order.at(r, d) == reverse_order.at(3 - r, d));
    }
  }
}

TEST_CASE("classifier probabilities form a distribution") {
  Rng rng(5);
  const ModelConfig mc = tiny_config(7, 3);
  const ClassifierParams p = init_classifier_params(mc, 15);
  const Tensor probs = classifier_probs(p, batch_of(random_records(4, 3, rng), mc));
  REQUIRE(probs.shape == Shape{4, 7});
  for (int64_t r = 0; r < 4; ++r) {
    double sum = 0;
    for (int64_t c = 0; c < 7; ++c) {
      CHECK(probs.at(r, c) > 0.0f);
      CHECK(probs.at(r, c) < 1.0f);
      sum += probs.at(r, c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("a single lab gets probability one") {
  Rng rng(6);
  const ModelConfig mc = tiny_config(1, 2);
  const ClassifierParams p = init_classifier_params(mc, 16);
  const Tensor probs = classifier_probs(p, batch_of(random_records(3, 2, rng), mc));
  for (int64_t r = 0; r < 3; ++r) CHECK(probs.at(r, 0) == 1.0f);
}

TEST_CASE("zeroed output layer yields uniform probabilities") {
  Rng rng(7);
  const ModelConfig mc = tiny_config(5, 2);
  ClassifierParams p = init_classifier_params(mc, 17);
  p.out_w.fill(0);
  p.out_b.fill(0);
  const Tensor probs = classifier_probs(p, batch_of(random_records(2, 2, rng), mc));
  for (int64_t r = 0; r < 2; ++r) {
    for (int64_t c = 0; c < 5; ++c) {
      CHECK(probs.at(r, c) == doctest::Approx(0.2).epsilon(1e-6));
    }
  }
}

TEST_CASE("lab similarities follow cosine geometry") {
  ModelConfig mc = tiny_config(2, 0);
  mc.embed_dim = 2;
  TripletParams p = init_triplet_params(mc, 18);
  p.lab_table = Tensor({3, 2}, {1, 0, 0, 1, 0.5f, 0.5f});

  const float inv_sqrt2 = 1.0f / std::sqrt(2.0f);
  const Tensor emb({2, 2}, {1, 0, inv_sqrt2, inv_sqrt2});
  const Tensor sims = lab_similarities(p, emb, /*include_unseen=*/false);
  REQUIRE(sims.shape == Shape{2, 2});
  CHECK(sims.at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));    // identical direction
  CHECK(sims.at(0, 1) == doctest::Approx(0.0).epsilon(1e-6));    // orthogonal
  CHECK(sims.at(1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-6));

  const Tensor with_unseen = lab_similarities(p, emb, /*include_unseen=*/true);
  CHECK(with_unseen.shape == Shape{2, 3});
}

TEST_CASE("similarities are invariant to positive rescaling of lab rows") {
  Rng rng(8);
  const ModelConfig mc = tiny_config(6, 2);
  TripletParams p = init_triplet_params(mc, 19);
  const auto batch = batch_of(random_records(3, 2, rng), mc);
  const Tensor emb = embed_sequence(p, batch);
  const Tensor before = lab_similarities(p, emb, true);

  for (int64_t d = 0; d < mc.embed_dim; ++d) p.lab_table.at(2, d) *= 37.5f;
  const Tensor after = lab_similarities(p, emb, true);
  for (int64_t i = 0; i < before.size(); ++i) {
    CHECK(after.at(i) == doctest::Approx(before.at(i)).epsilon(1e-6));
    CHECK(after.at(i) <= 1.0 + 1e-6);
    CHECK(after.at(i) >= -1.0 - 1e-6);
  }
}

TEST_CASE("lab similarities reject zero-norm rows") {
  const ModelConfig mc = tiny_config(2, 0);
  TripletParams p = init_triplet_params(mc, 20);
  for (int64_t d = 0; d < mc.embed_dim; ++d) p.lab_table.at(1, d) = 0;
  const Tensor emb({1, mc.embed_dim});
  CHECK_THROWS_AS(lab_similarities(p, emb, false), NumericError);
}

TEST_CASE("feature width mismatches are rejected") {
  Rng rng(9);
  const ModelConfig mc = tiny_config(3, 4);
  auto recs = random_records(2, 3, rng);  // three bits instead of four
  CHECK_THROWS_AS(batch_of(recs, mc), ValidationError);
}

TEST_CASE("model config validation catches bad settings") {
  ModelConfig mc = tiny_config(3, 2);
  mc.embed_dim = 1;
  CHECK_THROWS_AS(mc.validate(), ValidationError);
  mc = tiny_config(3, 2);
  mc.kernel_sizes = {4, 4};
  CHECK_THROWS_AS(mc.validate(), ValidationError);
  mc = tiny_config(3, 2);
  mc.kernel_sizes = {40};
  mc.max_len = 10;
  CHECK_THROWS_AS(mc.validate(), ValidationError);
}

TEST_CASE("batches are trimmed but short sequences still pool correctly") {
  const ModelConfig mc = tiny_config(2, 0);
  const TripletParams p = init_triplet_params(mc, 21);
  // length-1 sequence alongside a long one: width must cover the kernel
  std::vector<DnaRecord> recs{{"short", "A", {}, 0}, {"long", std::string(30, 'G'), {}, 0}};
  const auto batch = batch_of(recs, mc);
  CHECK(batch.ids.dim(1) <= mc.max_len);
  const Tensor emb = embed_sequence(p, batch);
  CHECK(emb.all_finite());

  // alone, the short sequence gets the minimal width
  std::vector<DnaRecord> only_short{recs[0]};
  const auto small = batch_of(only_short, mc);
  CHECK(small.ids.dim(1) == mc.max_kernel());
  const Tensor emb2 = embed_sequence(p, small);
  for (int64_t d = 0; d < mc.embed_dim; ++d) CHECK(emb2.at(0, d) == emb.at(0, d));
}
