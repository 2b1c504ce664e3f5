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

#include "geat/tokenize.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <unordered_map>

#include "geat/csv.hpp"

namespace geat {

namespace {

constexpr int32_t kNId = 5;  // base token id of 'N'

int64_t pair_key(int32_t a, int32_t b) {
  return (static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b);
}

using PairCounts = std::unordered_map<int64_t, int64_t>;

// 'N' is an ambiguity symbol, not sequence content; pairs touching it are
// never merge candidates.
bool countable(int32_t a, int32_t b) { return a != kNId && b != kNId; }

void inc_pair(PairCounts& counts, int32_t a, int32_t b) {
  if (countable(a, b)) ++counts[pair_key(a, b)];
}

void dec_pair(PairCounts& counts, int32_t a, int32_t b) {
  if (!countable(a, b)) return;
  auto it = counts.find(pair_key(a, b));
  if (it != counts.end() && --it->second <= 0) counts.erase(it);
}

std::vector<int32_t> base_encode(const Tokenizer& tok, std::string_view seq) {
  std::vector<int32_t> ids;
  ids.reserve(seq.size());
  for (char c : seq) ids.push_back(tok.base_id(c));
  return ids;
}

// Merges every leftmost occurrence of (a,b) into z in one pass, keeping the
// global pair counts consistent with the rewritten sequence.
void apply_merge(std::vector<int32_t>& seq, int32_t a, int32_t b, int32_t z,
                 PairCounts& counts, std::vector<int32_t>& scratch) {
  bool present = false;
  for (size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] == a && seq[i + 1] == b) {
      present = true;
      break;
    }
  }
  if (!present) return;

  scratch.clear();
  scratch.reserve(seq.size());
  const size_t n = seq.size();
  size_t i = 0;
  while (i < n) {
    if (i + 1 < n && seq[i] == a && seq[i + 1] == b) {
      if (!scratch.empty()) {
        dec_pair(counts, scratch.back(), a);
        inc_pair(counts, scratch.back(), z);
      }
      if (i + 2 < n) {
        dec_pair(counts, b, seq[i + 2]);
        inc_pair(counts, z, seq[i + 2]);
      }
      dec_pair(counts, a, b);
      scratch.push_back(z);
      i += 2;
    } else {
      scratch.push_back(seq[i]);
      ++i;
    }
  }
  seq = scratch;
}

}  // namespace

Tokenizer::Tokenizer() {
  token_strings = {"<PAD>", "A", "C", "G", "T", "N"};
}

int32_t Tokenizer::base_id(char c) const {
  switch (c) {
    case 'A': return 1;
    case 'C': return 2;
    case 'G': return 3;
    case 'T': return 4;
    case 'N': return kNId;
    default:
      throw ValidationError("unknown character '" + std::string(1, c) +
                            "' (alphabet is A,C,G,T,N)");
  }
}

Tokenizer train_bpe(const std::vector<std::string>& corpus, int64_t vocab_size) {
  Tokenizer tok;
  const int64_t min_vocab = tok.vocab_size();  // bases + PAD
  if (vocab_size < min_vocab) {
    throw ValidationError("vocab_size must be at least " + std::to_string(min_vocab));
  }
  if (corpus.empty()) throw ValidationError("train_bpe needs a non-empty corpus");

  std::vector<std::vector<int32_t>> seqs;
  seqs.reserve(corpus.size());
  for (const auto& s : corpus) seqs.push_back(base_encode(tok, s));

  PairCounts counts;
  for (const auto& seq : seqs) {
    for (size_t i = 0; i + 1 < seq.size(); ++i) inc_pair(counts, seq[i], seq[i + 1]);
  }

  std::vector<int32_t> scratch;
  const int64_t target_merges = vocab_size - min_vocab;
  for (int64_t m = 0; m < target_merges; ++m) {
    int64_t best_count = 0;
    int32_t best_a = -1, best_b = -1;
    std::string best_concat;
    for (const auto& [key, count] : counts) {
      if (count < 2) continue;
      const auto a = static_cast<int32_t>(key >> 32);
      const auto b = static_cast<int32_t>(key & 0xffffffff);
      std::string concat = tok.token_strings[static_cast<size_t>(a)] +
                           tok.token_strings[static_cast<size_t>(b)];
      bool better = false;
      if (count > best_count) {
        better = true;
      } else if (count == best_count) {
        if (concat < best_concat) {
          better = true;
        } else if (concat == best_concat) {
          better = tok.token_strings[static_cast<size_t>(a)] <
                   tok.token_strings[static_cast<size_t>(best_a)];
        }
      }
      if (better) {
        best_count = count;
        best_a = a;
        best_b = b;
        best_concat = std::move(concat);
      }
    }
    if (best_count < 2) break;

    const auto z = static_cast<int32_t>(tok.token_strings.size());
    tok.token_strings.push_back(best_concat);
    tok.merges.emplace_back(best_a, best_b);
    for (auto& seq : seqs) apply_merge(seq, best_a, best_b, z, counts, scratch);
  }
  return tok;
}

std::vector<int32_t> encode(const Tokenizer& tok, std::string_view sequence) {
  if (sequence.empty()) throw ValidationError("cannot encode an empty sequence");
  std::vector<int32_t> ids = base_encode(tok, sequence);
  if (tok.merges.empty() || ids.size() < 2) return ids;

  // rank r + merged id per pair; earliest merge = lowest rank
  std::unordered_map<int64_t, std::pair<int32_t, int32_t>> lookup;
  lookup.reserve(tok.merges.size());
  const int32_t first_merge_id = static_cast<int32_t>(tok.vocab_size() - static_cast<int64_t>(tok.merges.size()));
  for (size_t r = 0; r < tok.merges.size(); ++r) {
    const auto [a, b] = tok.merges[r];
    lookup.emplace(pair_key(a, b),
                   std::make_pair(static_cast<int32_t>(r), first_merge_id + static_cast<int32_t>(r)));
  }

  const int64_t n = static_cast<int64_t>(ids.size());
  std::vector<int64_t> prev(static_cast<size_t>(n)), next(static_cast<size_t>(n));
  std::vector<bool> alive(static_cast<size_t>(n), true);
  for (int64_t i = 0; i < n; ++i) {
    prev[static_cast<size_t>(i)] = i - 1;
    next[static_cast<size_t>(i)] = i + 1 < n ? i + 1 : -1;
  }

  // Min-heap on (merge rank, position): earliest merge first, leftmost
  // occurrence first within a rank. Stale entries are skipped on pop.
  using Entry = std::pair<int32_t, int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto push_if_merge = [&](int64_t pos) {
    if (pos < 0) return;
    const int64_t np = next[static_cast<size_t>(pos)];
    if (np < 0) return;
    auto it = lookup.find(pair_key(ids[static_cast<size_t>(pos)], ids[static_cast<size_t>(np)]));
    if (it != lookup.end()) heap.emplace(it->second.first, pos);
  };
  for (int64_t i = 0; i + 1 < n; ++i) push_if_merge(i);

  while (!heap.empty()) {
    const auto [rank, pos] = heap.top();
    heap.pop();
    if (!alive[static_cast<size_t>(pos)]) continue;
    const int64_t np = next[static_cast<size_t>(pos)];
    if (np < 0) continue;
    auto it = lookup.find(pair_key(ids[static_cast<size_t>(pos)], ids[static_cast<size_t>(np)]));
    if (it == lookup.end() || it->second.first != rank) continue;  // stale

    ids[static_cast<size_t>(pos)] = it->second.second;
    alive[static_cast<size_t>(np)] = false;
    const int64_t nn = next[static_cast<size_t>(np)];
    next[static_cast<size_t>(pos)] = nn;
    if (nn >= 0) prev[static_cast<size_t>(nn)] = pos;

    push_if_merge(prev[static_cast<size_t>(pos)]);
    push_if_merge(pos);
  }

  std::vector<int32_t> out;
  out.reserve(ids.size());
  for (int64_t i = 0; i >= 0; i = next[static_cast<size_t>(i)]) {
    out.push_back(ids[static_cast<size_t>(i)]);
  }
  return out;
}

std::string decode(const Tokenizer& tok, std::span<const int32_t> ids) {
  std::string out;
  for (int32_t id : ids) {
    if (id == tok.pad_id()) throw ValidationError("cannot decode PAD");
    if (id < 0 || id >= tok.vocab_size()) {
      throw ValidationError("invalid token id " + std::to_string(id));
    }
    out += tok.token_strings[static_cast<size_t>(id)];
  }
  return out;
}

std::string circular_shift(std::string_view sequence, uint64_t offset) {
  if (sequence.empty()) return std::string();
  const size_t n = sequence.size();
  const size_t k = static_cast<size_t>(offset % n);
  std::string out;
  out.reserve(n);
  out.append(sequence.substr(n - k));
  out.append(sequence.substr(0, n - k));
  return out;
}

TokenSeq prepare_input(const Tokenizer& tok, const DnaRecord& record, uint64_t offset,
                       int64_t max_len) {
  if (max_len < 1) throw ValidationError("max_len must be positive");
  TokenSeq out;
  out.ids = encode(tok, circular_shift(record.sequence, offset));
  if (static_cast<int64_t>(out.ids.size()) > max_len) {
    out.ids.resize(static_cast<size_t>(max_len));
  }
  out.true_len = static_cast<int64_t>(out.ids.size());
  out.ids.resize(static_cast<size_t>(max_len), kPadId);
  return out;
}

void save_tokenizer(const std::string& path, const Tokenizer& tok) {
  auto out = csv::open_output(path);
  out << "GEAT-BPE v1\n" << kDnaAlphabet << "\n";
  for (const auto& [a, b] : tok.merges) {
    out << tok.token_strings[static_cast<size_t>(a)] << '\t'
        << tok.token_strings[static_cast<size_t>(b)] << "\n";
  }
}

Tokenizer load_tokenizer(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.size() < 2 || lines[0] != "GEAT-BPE v1") {
    throw IoError("not a GEAT-BPE v1 tokenizer file: " + path);
  }
  if (lines[1] != kDnaAlphabet) {
    throw IoError("unexpected alphabet '" + lines[1] + "' in " + path);
  }
  Tokenizer tok;
  std::unordered_map<std::string, int32_t> by_string;
  for (size_t i = 0; i < tok.token_strings.size(); ++i) {
    by_string[tok.token_strings[i]] = static_cast<int32_t>(i);
  }
  for (size_t ln = 2; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto tab = lines[ln].find('\t');
    if (tab == std::string::npos) {
      throw IoError("malformed merge on line " + std::to_string(ln + 1) + " of " + path);
    }
    const std::string left = lines[ln].substr(0, tab);
    const std::string right = lines[ln].substr(tab + 1);
    const auto lit = by_string.find(left);
    const auto rit = by_string.find(right);
    if (lit == by_string.end() || rit == by_string.end()) {
      throw IoError("merge on line " + std::to_string(ln + 1) +
                    " references an undefined token: " + path);
    }
    tok.merges.emplace_back(lit->second, rit->second);
    const std::string merged = left + right;
    by_string[merged] = static_cast<int32_t>(tok.token_strings.size());
    tok.token_strings.push_back(merged);
  }
  return tok;
}

}  // namespace geat
