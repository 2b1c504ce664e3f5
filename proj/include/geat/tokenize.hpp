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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geat/common.hpp"
#include "geat/corpus.hpp"

namespace geat {

inline constexpr int32_t kPadId = 0;
inline constexpr std::string_view kDnaAlphabet = "ACGTN";
inline constexpr int64_t kDefaultBpeVocab = 1001;

/// Greedy BPE vocabulary over the DNA alphabet. Token ids: 0 = PAD,
/// 1..5 = A,C,G,T,N, then one id per merge in training order.
struct Tokenizer {
  std::vector<std::string> token_strings;             // index = token id
  std::vector<std::pair<int32_t, int32_t>> merges;    // (left id, right id)

  Tokenizer();

  int64_t vocab_size() const { return static_cast<int64_t>(token_strings.size()); }
  int32_t pad_id() const { return kPadId; }
  int32_t base_id(char c) const;  // throws on non-ACGTN characters

  bool operator==(const Tokenizer&) const = default;
};

/// Repeatedly merges the globally most frequent adjacent pair until
/// vocab_size is reached or no pair occurs at least twice. Ties go to the
/// lexicographically smallest concatenated token string. Merges never span
/// an 'N'.
Tokenizer train_bpe(const std::vector<std::string>& corpus, int64_t vocab_size);

/// Applies merges in training order (earliest merge first, leftmost
/// occurrence first within a pass).
std::vector<int32_t> encode(const Tokenizer& tok, std::string_view sequence);

/// Inverse of encode on valid sequences. PAD and out-of-range ids are errors.
std::string decode(const Tokenizer& tok, std::span<const int32_t> ids);

/// Rotate right: the last (offset mod length) characters move to the front.
std::string circular_shift(std::string_view sequence, uint64_t offset);

/// Fixed-length model input: ids padded with PAD to max_len.
struct TokenSeq {
  std::vector<int32_t> ids;
  int64_t true_len = 0;
};

/// shift -> encode -> truncate to max_len -> pad.
TokenSeq prepare_input(const Tokenizer& tok, const DnaRecord& record, uint64_t offset,
                       int64_t max_len);

/// Text format: line 1 "GEAT-BPE v1", line 2 the alphabet, then one merge
/// per line as left<TAB>right in training order.
void save_tokenizer(const std::string& path, const Tokenizer& tok);
Tokenizer load_tokenizer(const std::string& path);

}  // namespace geat
