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

#include "geat/mining.hpp"

#include <cmath>

#include "geat/kernels.hpp"

namespace geat {

namespace {

void validate_batch(const MiningBatch& batch) {
  if (batch.lab_table.rank() != 2 || batch.anchor_embeddings.rank() != 2) {
    throw ValidationError("mining: lab_table and anchors must be rank 2");
  }
  const int64_t labs = batch.lab_table.dim(0) - 1;  // last row = unseen
  if (labs < 2) throw NumericError("mining: need at least 2 labs to pick a negative");
  const int64_t b = batch.anchor_embeddings.dim(0);
  const int64_t e = batch.anchor_embeddings.dim(1);
  if (batch.lab_table.dim(1) != e) throw ValidationError("mining: embedding dim mismatch");
  if (batch.lab_indices.size() != b) throw ValidationError("mining: one lab index per anchor");
  for (int32_t lab : batch.lab_indices.data) {
    if (lab < 0 || lab >= labs) {
      throw ValidationError("mining: positive lab index " + std::to_string(lab) +
                            " out of range [0," + std::to_string(labs) + ")");
    }
  }
  for (int64_t i = 0; i < b; ++i) {
    double s = 0;
    for (int64_t d = 0; d < e; ++d) {
      const double v = batch.anchor_embeddings.at(i, d);
      s += v * v;
    }
    if (std::abs(std::sqrt(s) - 1.0) > 1e-6) {
      throw ValidationError("mining: anchor " + std::to_string(i) + " is not unit-norm");
    }
  }
}

}  // namespace

MiningResult hard_negatives(const MiningBatch& batch) {
  validate_batch(batch);
  const int64_t labs = batch.lab_table.dim(0) - 1;
  const int64_t b = batch.anchor_embeddings.dim(0);
  const int64_t e = batch.anchor_embeddings.dim(1);

  Tensor normalized({labs, e});
  kernels::l2norm_rows_forward(batch.lab_table.ptr(), labs, e, normalized.ptr());

  Tensor sims({b, labs});
  kernels::sim_matrix(batch.anchor_embeddings.ptr(), normalized.ptr(), b, labs, e, sims.ptr());

  MiningResult out;
  out.negative_indices = IntTensor({b});
  out.negative_embeddings = Tensor({b, e});
#pragma omp parallel for
  for (int64_t i = 0; i < b; ++i) {
    const int32_t positive = batch.lab_indices.data[static_cast<size_t>(i)];
    int64_t best = -1;
    float best_sim = 0;
    for (int64_t j = 0; j < labs; ++j) {
      if (j == positive) continue;
      const float s = sims.at(i, j);
      if (best < 0 || s > best_sim) {
        best = j;
        best_sim = s;
      }
    }
    out.negative_indices.data[static_cast<size_t>(i)] = static_cast<int32_t>(best);
    std::copy_n(normalized.ptr() + best * e, e, out.negative_embeddings.ptr() + i * e);
  }
  return out;
}

MiningResult brute_force_hardest(const MiningBatch& batch) {
  validate_batch(batch);
  const int64_t labs = batch.lab_table.dim(0) - 1;
  const int64_t b = batch.anchor_embeddings.dim(0);
  const int64_t e = batch.anchor_embeddings.dim(1);

  MiningResult out;
  out.negative_indices = IntTensor({b});
  out.negative_embeddings = Tensor({b, e});
  std::vector<float> row(static_cast<size_t>(e));
  for (int64_t i = 0; i < b; ++i) {
    const int32_t positive = batch.lab_indices.data[static_cast<size_t>(i)];
    int64_t best = -1;
    float best_sim = 0;
    for (int64_t j = 0; j < labs; ++j) {
      if (j == positive) continue;
      float sq = 0;
      for (int64_t d = 0; d < e; ++d) {
        const float v = batch.lab_table.at(j, d);
        sq += v * v;
      }
      const float norm = std::sqrt(sq + static_cast<float>(kernels::kL2NormEps));
      for (int64_t d = 0; d < e; ++d) row[static_cast<size_t>(d)] = batch.lab_table.at(j, d) / norm;
      float s = 0;
      for (int64_t d = 0; d < e; ++d) {
        s += batch.anchor_embeddings.at(i, d) * row[static_cast<size_t>(d)];
      }
      if (best < 0 || s > best_sim) {
        best = j;
        best_sim = s;
        std::copy(row.begin(), row.end(), out.negative_embeddings.ptr() + i * e);
      }
    }
    out.negative_indices.data[static_cast<size_t>(i)] = static_cast<int32_t>(best);
  }
  return out;
}

}  // namespace geat
