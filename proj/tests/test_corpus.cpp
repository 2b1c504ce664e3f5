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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "geat/corpus.hpp"

using namespace geat;

namespace {

std::string write_temp(const char* name, const std::string& content) {
  const std::string path = std::string("/tmp/geat_corpus_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

Dataset small_dataset() {
  const auto path = write_temp("small.csv",
                               "id,sequence,lab_id,f0,f1,f2\n"
                               "r1,ACGT,X,1,0,1\n"
                               "r2,GGTA,Y,0,1,0\n");
  Dataset ds = load_dataset(path);
  std::remove(path.c_str());
  return ds;
}

}  // namespace

TEST_CASE("load_dataset builds vocab in first-appearance order") {
  const Dataset ds = small_dataset();
  CHECK(ds.size() == 2);
  CHECK(ds.lab_count() == 2);
  CHECK(ds.feature_count == 3);
  CHECK(ds.lab_vocab.names == std::vector<std::string>{"X", "Y"});
  CHECK(ds.lab_vocab.unseen_index() == 2);
  CHECK(ds.records[0].lab == 0);
  CHECK(ds.records[1].lab == 1);
  CHECK(ds.records[0].features == std::vector<uint8_t>{1, 0, 1});
}

TEST_CASE("load_dataset reports the offending character") {
  const auto path = write_temp("badchar.csv",
                               "id,sequence,lab_id,f0\n"
                               "r1,ACGU,X,1\n");
  CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("'U'"), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_dataset rejects duplicate ids") {
  const auto path = write_temp("dup.csv",
                               "id,sequence,lab_id,f0\n"
                               "r1,ACGT,X,1\n"
                               "r1,GGGG,Y,0\n");
  CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("duplicate"), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_dataset reports the row of a column-count mismatch") {
  const auto path = write_temp("cols.csv",
                               "id,sequence,lab_id,f0,f1\n"
                               "r1,ACGT,X,1,0\n"
                               "r2,GGTA,Y,1\n");
  CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("row 2"), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_dataset rejects non-binary features and bad headers") {
  const auto bad_bit = write_temp("bit.csv", "id,sequence,lab_id,f0\nr1,ACGT,X,2\n");
  CHECK_THROWS_AS(load_dataset(bad_bit), ValidationError);
  std::remove(bad_bit.c_str());

  const auto bad_header = write_temp("hdr.csv", "sequence,id,lab_id,f0\nACGT,r1,X,1\n");
  CHECK_THROWS_AS(load_dataset(bad_header), ValidationError);
  std::remove(bad_header.c_str());

  CHECK_THROWS_AS(load_dataset("/nonexistent/ds.csv"), IoError);
}

TEST_CASE("dataset CSV round-trips") {
  const Dataset ds = make_synthetic(4, 6, 8, 60, 0.1, 99);
  const std::string path = "/tmp/geat_corpus_test_rt.csv";
  save_dataset(path, ds);
  CHECK(load_dataset(path) == ds);
  std::remove(path.c_str());
}

TEST_CASE("lab vocab sidecar round-trips") {
  LabVocab vocab;
  vocab.intern("alpha");
  vocab.intern("beta");
  const std::string path = "/tmp/geat_corpus_test_vocab.txt";
  save_lab_vocab(path, vocab);
  CHECK(load_lab_vocab(path) == vocab);
  std::remove(path.c_str());
}

TEST_CASE("split_stratified gives 8/1/1 on ten records") {
  Dataset ds;
  ds.feature_count = 1;
  ds.lab_vocab.intern("only");
  for (int i = 0; i < 10; ++i) {
    ds.records.push_back({"r" + std::to_string(i), "ACGT", {1}, 0});
  }
  const auto [train, val, test] = split_stratified(ds, 0.8, 0.1, 0.1, 7);
  CHECK(train.size() == 8);
  CHECK(val.size() == 1);
  CHECK(test.size() == 1);
}

TEST_CASE("split_stratified is deterministic and partitions the input") {
  const Dataset ds = make_synthetic(5, 9, 6, 50, 0.0, 3);
  const auto a = split_stratified(ds, 0.6, 0.2, 0.2, 7);
  const auto b = split_stratified(ds, 0.6, 0.2, 0.2, 7);
  for (int part = 0; part < 3; ++part) CHECK(a[part] == b[part]);

  std::multiset<std::string> in_ids, out_ids;
  for (const auto& rec : ds.records) in_ids.insert(rec.id);
  for (const auto& part : a) {
    for (const auto& rec : part.records) out_ids.insert(rec.id);
  }
  CHECK(in_ids == out_ids);  // disjoint union == input (ids are unique)
}

TEST_CASE("labs with fewer than 3 records stay in train") {
  Dataset ds;
  ds.feature_count = 1;
  ds.lab_vocab.intern("tiny");
  ds.lab_vocab.intern("big");
  ds.records.push_back({"t1", "ACGT", {1}, 0});
  ds.records.push_back({"t2", "ACGT", {1}, 0});
  for (int i = 0; i < 9; ++i) {
    ds.records.push_back({"b" + std::to_string(i), "GGTA", {0}, 1});
  }
  const auto [train, val, test] = split_stratified(ds, 0.4, 0.3, 0.3, 1);
  int tiny_in_train = 0;
  for (const auto& rec : train.records) tiny_in_train += rec.lab == 0;
  CHECK(tiny_in_train == 2);
}

TEST_CASE("split_stratified validates fractions") {
  const Dataset ds = small_dataset();
  CHECK_THROWS_AS(split_stratified(ds, 0.5, 0.2, 0.2, 1), ValidationError);
  CHECK_THROWS_AS(split_stratified(Dataset{}, 0.8, 0.1, 0.1, 1), ValidationError);
}

TEST_CASE("make_synthetic produces the requested population") {
  const Dataset ds = make_synthetic(3, 5, 8, 60, 0.05, 1);
  CHECK(ds.size() == 15);
  CHECK(ds.lab_count() == 3);
  CHECK(ds.feature_count == 8);
  for (const auto& rec : ds.records) {
    CHECK(rec.sequence.size() == 60);
    for (char c : rec.sequence) CHECK(is_dna_char(c));
  }
}

TEST_CASE("make_synthetic is deterministic") {
  CHECK(make_synthetic(4, 4, 10, 80, 0.1, 42) == make_synthetic(4, 4, 10, 80, 0.1, 42));
}

TEST_CASE("features are the lab-index parity bits") {
  const Dataset ds = make_synthetic(6, 2, 6, 40, 0.0, 5);
  for (const auto& rec : ds.records) {
    for (int b = 0; b < 8; ++b) {
      CHECK(rec.features[static_cast<size_t>(b)] == ((rec.lab >> b) & 1));
    }
  }
}

TEST_CASE("noise-free synthetic data admits a perfect motif oracle") {
  const int n_labs = 3, per_lab = 6, motif_len = 12;
  const Dataset ds = make_synthetic(n_labs, per_lab, motif_len, 90, 0.0, 11);

  // Recover each lab's motif: a substring of its first record present in
  // every record of the lab.
  std::vector<std::string> motifs;
  for (int lab = 0; lab < n_labs; ++lab) {
    std::vector<const DnaRecord*> recs;
    for (const auto& rec : ds.records) {
      if (rec.lab == lab) recs.push_back(&rec);
    }
    std::string found;
    const std::string& first = recs[0]->sequence;
    for (size_t pos = 0; pos + motif_len <= first.size() && found.empty(); ++pos) {
      const std::string cand = first.substr(pos, motif_len);
      bool in_all = true;
      for (const auto* rec : recs) {
        if (rec->sequence.find(cand) == std::string::npos) {
          in_all = false;
          break;
        }
      }
      if (in_all) found = cand;
    }
    REQUIRE(!found.empty());
    motifs.push_back(found);
  }

  // The motif match attributes every record to its own lab and no other.
  for (const auto& rec : ds.records) {
    for (int lab = 0; lab < n_labs; ++lab) {
      const bool matches = rec.sequence.find(motifs[static_cast<size_t>(lab)]) != std::string::npos;
      CHECK(matches == (rec.lab == lab));
    }
  }
}

TEST_CASE("make_synthetic validates its arguments") {
  CHECK_THROWS_AS(make_synthetic(1, 5, 8, 60, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(make_synthetic(3, 5, 60, 60, 0.0, 1), ValidationError);
}

TEST_CASE("filter_labs keeps only the requested labs and reindexes") {
  const Dataset ds = make_synthetic(5, 3, 6, 40, 0.0, 2);
  const Dataset sub = filter_labs(ds, {"LAB_0003", "LAB_0001"});
  CHECK(sub.lab_count() == 2);
  CHECK(sub.size() == 6);
  CHECK(sub.lab_vocab.names == std::vector<std::string>{"LAB_0003", "LAB_0001"});
  for (const auto& rec : sub.records) {
    const auto& name = sub.lab_vocab.names[static_cast<size_t>(rec.lab)];
    CHECK((name == "LAB_0003" || name == "LAB_0001"));
  }
  CHECK_THROWS_AS(filter_labs(ds, {"LAB_9999"}), ValidationError);
}
