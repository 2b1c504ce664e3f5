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

#include "geat/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "geat/csv.hpp"
#include "geat/rng.hpp"

namespace geat {

int32_t LabVocab::index_of(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int32_t>(i);
  }
  return -1;
}

int32_t LabVocab::intern(const std::string& name) {
  const int32_t idx = index_of(name);
  if (idx >= 0) return idx;
  names.push_back(name);
  return static_cast<int32_t>(names.size() - 1);
}

namespace {

void validate_sequence(const std::string& seq, const std::string& id, size_t row) {
  if (seq.empty()) {
    throw ValidationError("row " + std::to_string(row) + " (id " + id + "): empty sequence");
  }
  for (char c : seq) {
    if (!is_dna_char(c)) {
      throw ValidationError("row " + std::to_string(row) + " (id " + id +
                            "): invalid character '" + std::string(1, c) +
                            "' (alphabet is A,C,G,T,N)");
    }
  }
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ValidationError("dataset file has no header: " + path);

  const auto header = csv::split_line(lines[0]);
  if (header.size() < 3 || header[0] != "id" || header[1] != "sequence" ||
      header[2] != "lab_id") {
    throw ValidationError("dataset header must start with id,sequence,lab_id: " + path);
  }
  const int64_t feature_count = static_cast<int64_t>(header.size()) - 3;
  for (int64_t f = 0; f < feature_count; ++f) {
    if (header[static_cast<size_t>(3 + f)] != "f" + std::to_string(f)) {
      throw ValidationError("feature columns must be named f0..f" +
                            std::to_string(feature_count - 1) + ": " + path);
    }
  }

  Dataset ds;
  ds.feature_count = feature_count;
  std::unordered_set<std::string> seen_ids;
  for (size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto fields = csv::split_line(lines[row]);
    if (fields.size() != header.size()) {
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(fields.size()));
    }
    DnaRecord rec;
    rec.id = fields[0];
    rec.sequence = fields[1];
    validate_sequence(rec.sequence, rec.id, row);
    if (!seen_ids.insert(rec.id).second) {
      throw ValidationError("duplicate record id: " + rec.id);
    }
    rec.lab = ds.lab_vocab.intern(fields[2]);
    rec.features.reserve(static_cast<size_t>(feature_count));
    for (int64_t f = 0; f < feature_count; ++f) {
      const std::string& bit = fields[static_cast<size_t>(3 + f)];
      if (bit != "0" && bit != "1") {
        throw ValidationError("row " + std::to_string(row) + ": feature f" +
                              std::to_string(f) + " must be 0 or 1, got '" + bit + "'");
      }
      rec.features.push_back(bit == "1" ? 1 : 0);
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw ValidationError("dataset has no records: " + path);
  return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  auto out = csv::open_output(path);
  out << "id,sequence,lab_id";
  for (int64_t f = 0; f < ds.feature_count; ++f) out << ",f" << f;
  out << "\n";
  for (const auto& rec : ds.records) {
    out << rec.id << ',' << rec.sequence << ',' << ds.lab_vocab.names[static_cast<size_t>(rec.lab)];
    for (uint8_t bit : rec.features) out << ',' << (bit ? '1' : '0');
    out << "\n";
  }
}

void save_lab_vocab(const std::string& path, const LabVocab& vocab) {
  auto out = csv::open_output(path);
  for (const auto& name : vocab.names) out << name << "\n";
}

LabVocab load_lab_vocab(const std::string& path) {
  LabVocab vocab;
  for (auto& line : csv::read_lines(path)) {
    if (!line.empty()) vocab.names.push_back(line);
  }
  return vocab;
}

std::array<Dataset, 3> split_stratified(const Dataset& ds, double ftrain, double fval,
                                        double ftest, uint64_t seed) {
  if (ds.records.empty()) throw ValidationError("cannot split an empty dataset");
  if (ftrain <= 0 || fval < 0 || ftest < 0) {
    throw ValidationError("split fractions must be positive");
  }
  if (std::abs(ftrain + fval + ftest - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }

  std::vector<std::vector<int64_t>> by_lab(static_cast<size_t>(ds.lab_count()));
  for (int64_t i = 0; i < ds.size(); ++i) {
    by_lab[static_cast<size_t>(ds.records[static_cast<size_t>(i)].lab)].push_back(i);
  }

  std::array<Dataset, 3> out;
  for (auto& part : out) {
    part.lab_vocab = ds.lab_vocab;
    part.feature_count = ds.feature_count;
  }

  Rng rng(seed);
  for (size_t lab = 0; lab < by_lab.size(); ++lab) {
    auto idx = by_lab[lab];
    const int64_t n = static_cast<int64_t>(idx.size());
    Rng lab_rng = rng.split(static_cast<uint64_t>(lab));
    lab_rng.shuffle(idx);

    int64_t n_val = 0, n_test = 0;
    if (n >= 3) {
      n_val = static_cast<int64_t>(std::llround(static_cast<double>(n) * fval));
      n_test = static_cast<int64_t>(std::llround(static_cast<double>(n) * ftest));
      while (n_val + n_test > n - 1) {
        if (n_val >= n_test && n_val > 0) --n_val;
        else --n_test;
      }
    }
    const int64_t n_train = n - n_val - n_test;
    for (int64_t i = 0; i < n; ++i) {
      const auto& rec = ds.records[static_cast<size_t>(idx[static_cast<size_t>(i)])];
      if (i < n_train) out[0].records.push_back(rec);
      else if (i < n_train + n_val) out[1].records.push_back(rec);
      else out[2].records.push_back(rec);
    }
  }
  return out;
}

Dataset make_synthetic(int n_labs, int per_lab, int motif_len, int seq_len, double noise,
                       uint64_t seed) {
  if (n_labs < 2) throw ValidationError("make_synthetic needs at least 2 labs");
  if (motif_len >= seq_len) throw ValidationError("motif_len must be smaller than seq_len");
  if (motif_len < 1 || per_lab < 1) throw ValidationError("motif_len and per_lab must be positive");

  static const char kBases[4] = {'A', 'C', 'G', 'T'};
  Rng rng(seed);

  Dataset ds;
  ds.feature_count = 8;

  for (int lab = 0; lab < n_labs; ++lab) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "LAB_%04d", lab);
    ds.lab_vocab.intern(buf);

    Rng lab_rng = rng.split(static_cast<uint64_t>(lab));
    std::string motif(static_cast<size_t>(motif_len), 'A');
    for (auto& c : motif) c = kBases[lab_rng.bounded(4)];

    for (int r = 0; r < per_lab; ++r) {
      Rng rec_rng = lab_rng.split(static_cast<uint64_t>(r) + 1);
      DnaRecord rec;
      std::snprintf(buf, sizeof(buf), "L%03d_R%04d", lab, r);
      rec.id = buf;
      rec.lab = static_cast<int32_t>(lab);

      rec.sequence.resize(static_cast<size_t>(seq_len));
      for (auto& c : rec.sequence) c = kBases[rec_rng.bounded(4)];
      const size_t pos = static_cast<size_t>(rec_rng.bounded(static_cast<uint64_t>(seq_len - motif_len + 1)));
      std::copy(motif.begin(), motif.end(), rec.sequence.begin() + static_cast<int64_t>(pos));

      if (noise > 0.0) {
        for (auto& c : rec.sequence) {
          if (rec_rng.uniform() < noise) {
            // Substitute with one of the three other bases so the rate is exact.
            char alt = kBases[rec_rng.bounded(3)];
            if (alt == c) alt = kBases[3];
            c = alt;
          }
        }
      }

      rec.features.resize(8);
      for (int b = 0; b < 8; ++b) rec.features[static_cast<size_t>(b)] = static_cast<uint8_t>((lab >> b) & 1);
      ds.records.push_back(std::move(rec));
    }
  }
  return ds;
}

Dataset filter_labs(const Dataset& ds, const std::vector<std::string>& keep) {
  Dataset out;
  out.feature_count = ds.feature_count;
  std::unordered_map<int32_t, int32_t> remap;
  for (const auto& name : keep) {
    const int32_t old_idx = ds.lab_vocab.index_of(name);
    if (old_idx < 0) throw ValidationError("filter_labs: unknown lab " + name);
    remap[old_idx] = out.lab_vocab.intern(name);
  }
  for (const auto& rec : ds.records) {
    auto it = remap.find(rec.lab);
    if (it == remap.end()) continue;
    DnaRecord copy = rec;
    copy.lab = it->second;
    out.records.push_back(std::move(copy));
  }
  return out;
}

}  // namespace geat
