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
#include <set>

#include "geat/cluster.hpp"
#include "geat/rng.hpp"

using namespace geat;

namespace {

Tensor random_points(int64_t n, int64_t dim, Rng& rng, double scale = 1.0) {
  Tensor t({n, dim});
  for (auto& v : t.data) v = static_cast<float>(rng.normal() * scale);
  return t;
}

/// `centers` well-separated Gaussian blobs with per-blob spread sigma.
Tensor gaussian_blobs(int64_t centers, int64_t per_center, int64_t dim, double sigma,
                      Rng& rng) {
  Tensor t({centers * per_center, dim});
  for (int64_t c = 0; c < centers; ++c) {
    std::vector<double> mu(static_cast<size_t>(dim));
    for (auto& v : mu) v = rng.normal() * 10.0;
    for (int64_t i = 0; i < per_center; ++i) {
      for (int64_t d = 0; d < dim; ++d) {
        t.at(c * per_center + i, d) = static_cast<float>(mu[static_cast<size_t>(d)] + rng.normal() * sigma);
      }
    }
  }
  return t;
}

}  // namespace

TEST_CASE("k equal to N gives singleton clusters with zero wcss") {
  Rng rng(1);
  const Tensor pts = random_points(6, 4, rng);
  const ClusterResult res = kmeans(pts, 6, 3);
  CHECK(res.wcss == doctest::Approx(0.0));
  std::set<int32_t> distinct(res.assignments.begin(), res.assignments.end());
  CHECK(distinct.size() == 6);
}

TEST_CASE("duplicate point pairs are grouped exactly") {
  Tensor pts({4, 2}, {0, 0, 0, 0, 9, 9, 9, 9});
  const ClusterResult res = kmeans(pts, 2, 7);
  CHECK(res.wcss == doctest::Approx(0.0));
  CHECK(res.assignments[0] == res.assignments[1]);
  CHECK(res.assignments[2] == res.assignments[3]);
  CHECK(res.assignments[0] != res.assignments[2]);
}

TEST_CASE("wcss never increases across lloyd iterations") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int64_t n = 10 + static_cast<int64_t>(rng.bounded(40));
    const int64_t dim = 2 + static_cast<int64_t>(rng.bounded(6));
    const int64_t k = 1 + static_cast<int64_t>(rng.bounded(5));
    if (k > n) continue;
    const ClusterResult res = kmeans(random_points(n, dim, rng), k,
                                     rng.next_u64());
    for (size_t i = 1; i < res.iter_wcss.size(); ++i) {
      CHECK(res.iter_wcss[i] <= res.iter_wcss[i - 1] + 1e-9);
    }
    for (int32_t a : res.assignments) {
      CHECK(a >= 0);
      CHECK(a < k);
    }
  }
}

TEST_CASE("every cluster ends non-empty") {
  Rng rng(13);
  const Tensor pts = gaussian_blobs(2, 20, 3, 0.3, rng);
  const ClusterResult res = kmeans(pts, 6, 5);
  std::vector<int64_t> counts(6, 0);
  for (int32_t a : res.assignments) ++counts[static_cast<size_t>(a)];
  for (int64_t c : counts) CHECK(c > 0);
}

TEST_CASE("elbow recovers three planted clusters") {
  Rng rng(17);
  const Tensor pts = gaussian_blobs(3, 30, 5, 0.4, rng);
  const ElbowResult res = elbow_k(pts, 1, 8, 23, 5);
  CHECK(res.k == 3);
  REQUIRE(res.curve.size() == 8);
  // best-restart wcss is non-increasing in k
  for (size_t i = 1; i < res.curve.size(); ++i) {
    CHECK(res.curve[i].second <= res.curve[i - 1].second + 1e-6);
  }
}

TEST_CASE("a perfectly linear curve falls back to the smallest k") {
  std::vector<std::pair<int64_t, double>> curve;
  for (int64_t k = 1; k <= 6; ++k) curve.emplace_back(k, 100.0 - 10.0 * static_cast<double>(k));
  CHECK(pick_elbow(curve) == 1);
  CHECK(pick_elbow({{4, 7.0}}) == 4);
  CHECK_THROWS_AS(pick_elbow({}), ValidationError);
}

TEST_CASE("assignments survive a global rotation") {
  Rng rng(19);
  const int64_t n = 40, dim = 3;
  const Tensor pts = gaussian_blobs(4, 10, dim, 0.3, rng);

  // Householder reflection: orthogonal by construction
  std::vector<double> v(static_cast<size_t>(dim));
  double norm = 0;
  for (auto& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  Tensor rotated({n, dim});
  for (int64_t i = 0; i < n; ++i) {
    double dot = 0;
    for (int64_t d = 0; d < dim; ++d) dot += pts.at(i, d) * v[static_cast<size_t>(d)];
    for (int64_t d = 0; d < dim; ++d) {
      rotated.at(i, d) = static_cast<float>(pts.at(i, d) - 2.0 * dot * v[static_cast<size_t>(d)]);
    }
  }

  const ClusterResult a = kmeans(pts, 4, 77);
  const ClusterResult b = kmeans(rotated, 4, 77);
  CHECK(a.assignments == b.assignments);
}

TEST_CASE("kmeans validates its inputs") {
  Rng rng(23);
  const Tensor pts = random_points(5, 3, rng);
  CHECK_THROWS_AS(kmeans(pts, 6, 1), ValidationError);
  CHECK_THROWS_AS(kmeans(pts, 0, 1), ValidationError);
  Tensor bad = pts;
  bad.at(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(kmeans(bad, 2, 1), NumericError);
  CHECK_THROWS_AS(elbow_k(pts, 1, 9, 1), ValidationError);
}

TEST_CASE("kmeans is deterministic per seed") {
  Rng rng(29);
  const Tensor pts = random_points(30, 4, rng);
  const ClusterResult a = kmeans(pts, 4, 123);
  const ClusterResult b = kmeans(pts, 4, 123);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids.data == b.centroids.data);
  CHECK(a.wcss == b.wcss);
}

TEST_CASE("pca projects onto the two dominant directions") {
  Rng rng(31);
  const int64_t n = 60;
  Tensor pts({n, 4});
  for (int64_t i = 0; i < n; ++i) {
    const double big = rng.normal() * 10.0;
    const double mid = rng.normal() * 3.0;
    pts.at(i, 0) = static_cast<float>(big);
    pts.at(i, 1) = static_cast<float>(mid);
    pts.at(i, 2) = static_cast<float>(rng.normal() * 0.1);
    pts.at(i, 3) = static_cast<float>(rng.normal() * 0.1);
  }
  const Tensor proj = pca_2d(pts);
  REQUIRE(proj.shape == Shape{n, 2});
  double var_x = 0, var_y = 0;
  for (int64_t i = 0; i < n; ++i) {
    var_x += proj.at(i, 0) * proj.at(i, 0);
    var_y += proj.at(i, 1) * proj.at(i, 1);
  }
  CHECK(var_x > var_y);
  CHECK(var_y > 0);
  CHECK(pca_2d(pts).data == proj.data);  // deterministic
}
