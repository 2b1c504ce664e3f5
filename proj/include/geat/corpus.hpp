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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geat/common.hpp"

namespace geat {

inline bool is_dna_char(char c) {
  return c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == 'N';
}

/// One DNA sequence with its binary phenotype features and lab label.
struct DnaRecord {
  std::string id;
  std::string sequence;            // over {A,C,G,T,N}, length >= 1
  std::vector<uint8_t> features;   // bit vector of dataset-wide width F
  int32_t lab = 0;                 // index into LabVocab, < lab count

  bool operator==(const DnaRecord&) const = default;
};

/// Lab identifiers in first-appearance order. Index L (one past the last
/// real lab) is reserved for the "unseen" lab embedding.
struct LabVocab {
  std::vector<std::string> names;

  int64_t count() const { return static_cast<int64_t>(names.size()); }
  int64_t unseen_index() const { return count(); }
  /// -1 when the name is unknown.
  int32_t index_of(const std::string& name) const;
  /// Adds the name if missing, returns its index.
  int32_t intern(const std::string& name);

  bool operator==(const LabVocab&) const = default;
};

struct Dataset {
  std::vector<DnaRecord> records;
  LabVocab lab_vocab;
  int64_t feature_count = 0;

  int64_t size() const { return static_cast<int64_t>(records.size()); }
  int64_t lab_count() const { return lab_vocab.count(); }

  bool operator==(const Dataset&) const = default;
};

/// Reads the dataset CSV `id,sequence,lab_id,f0..f{F-1}`. F is inferred from
/// the header; the lab vocabulary is built in first-appearance order.
Dataset load_dataset(const std::string& path);

/// Writes the same CSV format load_dataset reads.
void save_dataset(const std::string& path, const Dataset& ds);

/// Sidecar format: one lab name per line, line number = index.
void save_lab_vocab(const std::string& path, const LabVocab& vocab);
LabVocab load_lab_vocab(const std::string& path);

/// Per-lab proportional split. Labs with fewer than 3 records put everything
/// in train. Deterministic for a fixed seed.
std::array<Dataset, 3> split_stratified(const Dataset& ds, double ftrain, double fval,
                                        double ftest, uint64_t seed);

/// Desk-scale stand-in dataset: each lab gets a private motif planted at a
/// random position in otherwise uniform-random sequences, plus per-base
/// substitution noise. The 8 binary features are the low bits of the lab
/// index, so features carry real signal.
Dataset make_synthetic(int n_labs, int per_lab, int motif_len, int seq_len, double noise,
                       uint64_t seed);

/// Restricts a dataset to the named labs, rebuilding the vocabulary in the
/// order given. Useful for held-out-lab experiments.
Dataset filter_labs(const Dataset& ds, const std::vector<std::string>& keep);

}  // namespace geat
