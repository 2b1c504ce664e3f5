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
#include <utility>
#include <vector>

#include "geat/tensor.hpp"

namespace geat {

struct ClusterResult {
  int64_t k = 0;
  std::vector<int32_t> assignments;   // one cluster id per point
  Tensor centroids;                   // k x E
  double wcss = 0;                    // within-cluster sum of squared distances
  std::vector<double> iter_wcss;      // logged once per Lloyd iteration
};

/// k-means++ seeding followed by Lloyd iterations until assignments are
/// stable or max_iters is hit. An emptied cluster steals the point farthest
/// from its centroid. Deterministic per seed.
ClusterResult kmeans(const Tensor& points, int64_t k, uint64_t seed, int max_iters = 200);

struct ElbowResult {
  int64_t k = 0;
  std::vector<std::pair<int64_t, double>> curve;  // (k, best wcss)
};

/// Runs kmeans for each k in [k_min, k_max] (best of `restarts` seeded
/// restarts) and picks the k whose curve point lies farthest from the chord
/// joining the endpoints.
ElbowResult elbow_k(const Tensor& points, int64_t k_min, int64_t k_max, uint64_t seed,
                    int restarts = 5);

/// The chord-distance rule on an existing curve; lowest k wins ties.
int64_t pick_elbow(const std::vector<std::pair<int64_t, double>>& curve);

/// First two principal components (power iteration), N x 2. Component signs
/// are fixed so the largest-magnitude loading is positive.
Tensor pca_2d(const Tensor& points);

}  // namespace geat
