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

#include "geat/tensor.hpp"

namespace geat {

/// Inputs for one round of hard negative mining. The last lab_table row is
/// the unseen lab; it is never mined as a negative.
struct MiningBatch {
  IntTensor lab_indices;      // B positives, each < lab count L
  Tensor anchor_embeddings;   // B x E, rows unit-norm
  Tensor lab_table;           // (L+1) x E, not necessarily normalized
};

struct MiningResult {
  IntTensor negative_indices;   // B
  Tensor negative_embeddings;   // B x E, L2-normalized rows
};

/// Per anchor: mask the positive lab, L2-normalize the remaining real-lab
/// rows and return the lab with the highest cosine similarity (lowest index
/// on ties). Vectorized batch implementation.
MiningResult hard_negatives(const MiningBatch& batch);

/// Reference oracle: a per-anchor scalar loop over every lab. Semantics are
/// identical to hard_negatives by construction; the tests and the acceptance
/// suite compare the two exactly.
MiningResult brute_force_hardest(const MiningBatch& batch);

}  // namespace geat
