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

#include "geat/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "geat/kernels.hpp"
#include "geat/rng.hpp"

namespace geat {

namespace {

double sq_dist(const float* a, const float* b, int64_t dim) {
  double d2 = 0;
  for (int64_t d = 0; d < dim; ++d) {
    const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
    d2 += diff * diff;
  }
  return d2;
}

Tensor kmeanspp_init(const Tensor& points, int64_t k, Rng& rng) {
  const int64_t n = points.dim(0), dim = points.dim(1);
  Tensor centroids({k, dim});
  std::vector<double> best_d2(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<size_t>(n), false);

  int64_t first = static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(n)));
  std::copy_n(points.ptr() + first * dim, dim, centroids.ptr());
  chosen[static_cast<size_t>(first)] = true;

  for (int64_t c = 1; c < k; ++c) {
    const float* prev = centroids.ptr() + (c - 1) * dim;
    double total = 0;
    for (int64_t i = 0; i < n; ++i) {
      best_d2[static_cast<size_t>(i)] =
          std::min(best_d2[static_cast<size_t>(i)], sq_dist(points.ptr() + i * dim, prev, dim));
      total += best_d2[static_cast<size_t>(i)];
    }
    int64_t pick = -1;
    if (total > 0) {
      const double r = rng.uniform() * total;
      double cum = 0;
      for (int64_t i = 0; i < n; ++i) {
        cum += best_d2[static_cast<size_t>(i)];
        if (cum >= r) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;  // guard against rounding at the tail
    }
    if (pick < 0 || chosen[static_cast<size_t>(pick)]) {
      // all remaining distances are zero (duplicate points): take the first
      // unchosen point
      pick = -1;
      for (int64_t i = 0; i < n; ++i) {
        if (!chosen[static_cast<size_t>(i)]) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    std::copy_n(points.ptr() + pick * dim, dim, centroids.ptr() + c * dim);
    chosen[static_cast<size_t>(pick)] = true;
  }
  return centroids;
}

}  // namespace

ClusterResult kmeans(const Tensor& points, int64_t k, uint64_t seed, int max_iters) {
  if (points.rank() != 2) throw ValidationError("kmeans: points must be N x E");
  const int64_t n = points.dim(0), dim = points.dim(1);
  if (k < 1) throw ValidationError("kmeans: k must be positive");
  if (k > n) {
    throw ValidationError("kmeans: k = " + std::to_string(k) + " exceeds " +
                          std::to_string(n) + " points");
  }
  if (!points.all_finite()) throw NumericError("kmeans: non-finite points");

  Rng rng(seed);
  ClusterResult result;
  result.k = k;
  result.centroids = kmeanspp_init(points, k, rng);
  result.assignments.assign(static_cast<size_t>(n), 0);

  std::vector<int32_t> assign(static_cast<size_t>(n), -1);
  Tensor dist2({n});
  std::vector<int64_t> counts(static_cast<size_t>(k), 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    kernels::kmeans_assign(points.ptr(), n, dim, result.centroids.ptr(), k, assign.data(),
                           dist2.ptr());

    std::fill(counts.begin(), counts.end(), int64_t{0});
    for (int64_t i = 0; i < n; ++i) ++counts[static_cast<size_t>(assign[static_cast<size_t>(i)])];
    for (int64_t c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) continue;
      // steal the point farthest from its centroid (donor must keep a point)
      int64_t far = -1;
      for (int64_t i = 0; i < n; ++i) {
        if (counts[static_cast<size_t>(assign[static_cast<size_t>(i)])] < 2) continue;
        if (far < 0 || dist2.at(i) > dist2.at(far)) far = i;
      }
      if (far < 0) continue;
      --counts[static_cast<size_t>(assign[static_cast<size_t>(far)])];
      assign[static_cast<size_t>(far)] = static_cast<int32_t>(c);
      ++counts[static_cast<size_t>(c)];
      dist2.at(far) = 0;
    }

    // centroid update: mean of members, accumulated in double
    std::vector<double> acc(static_cast<size_t>(k * dim), 0.0);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t c = assign[static_cast<size_t>(i)];
      for (int64_t d = 0; d < dim; ++d) {
        acc[static_cast<size_t>(c * dim + d)] += points.at(i, d);
      }
    }
    for (int64_t c = 0; c < k; ++c) {
      for (int64_t d = 0; d < dim; ++d) {
        result.centroids.at(c, d) = static_cast<float>(
            acc[static_cast<size_t>(c * dim + d)] / static_cast<double>(counts[static_cast<size_t>(c)]));
      }
    }

    double wcss = 0;
    for (int64_t i = 0; i < n; ++i) {
      wcss += sq_dist(points.ptr() + i * dim,
                      result.centroids.ptr() + static_cast<int64_t>(assign[static_cast<size_t>(i)]) * dim,
                      dim);
    }
    result.iter_wcss.push_back(wcss);

    const bool stable =
        std::equal(assign.begin(), assign.end(), result.assignments.begin()) && iter > 0;
    result.assignments.assign(assign.begin(), assign.end());
    if (stable) break;
  }

  result.wcss = result.iter_wcss.back();
  return result;
}

ElbowResult elbow_k(const Tensor& points, int64_t k_min, int64_t k_max, uint64_t seed,
                    int restarts) {
  if (k_min < 1) throw ValidationError("elbow_k: k_min must be at least 1");
  if (k_max < k_min) throw ValidationError("elbow_k: k_max must be >= k_min");
  if (k_max > points.dim(0)) throw ValidationError("elbow_k: k_max exceeds point count");
  if (restarts < 1) throw ValidationError("elbow_k: restarts must be positive");

  Rng root(seed);
  ElbowResult result;
  for (int64_t k = k_min; k <= k_max; ++k) {
    double best = std::numeric_limits<double>::infinity();
    const Rng k_rng = root.split(static_cast<uint64_t>(k));
    for (int r = 0; r < restarts; ++r) {
      const ClusterResult run = kmeans(points, k, k_rng.split(static_cast<uint64_t>(r)).seed());
      best = std::min(best, run.wcss);
    }
    result.curve.emplace_back(k, best);
  }
  result.k = pick_elbow(result.curve);
  return result;
}

int64_t pick_elbow(const std::vector<std::pair<int64_t, double>>& curve) {
  if (curve.empty()) throw ValidationError("pick_elbow: empty curve");
  if (curve.size() == 1) return curve[0].first;

  const double x0 = static_cast<double>(curve.front().first), y0 = curve.front().second;
  const double x1 = static_cast<double>(curve.back().first), y1 = curve.back().second;
  const double chord = std::hypot(x1 - x0, y1 - y0);

  int64_t best_k = curve.front().first;
  double best_dist = 0;
  for (const auto& [k, wcss] : curve) {
    const double cross = (x1 - x0) * (y0 - wcss) - (static_cast<double>(k) - x0) * (y1 - y0);
    const double dist = chord > 0 ? std::abs(cross) / chord : 0.0;
    if (dist > best_dist) {
      best_dist = dist;
      best_k = k;
    }
  }
  return best_k;
}

Tensor pca_2d(const Tensor& points) {
  if (points.rank() != 2) throw ValidationError("pca_2d: points must be N x E");
  const int64_t n = points.dim(0), dim = points.dim(1);
  if (n < 2 || dim < 2) throw ValidationError("pca_2d: need at least 2 points and 2 dims");

  std::vector<double> mean(static_cast<size_t>(dim), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t d = 0; d < dim; ++d) mean[static_cast<size_t>(d)] += points.at(i, d);
  }
  for (auto& v : mean) v /= static_cast<double>(n);

  std::vector<double> centered(static_cast<size_t>(n * dim));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t d = 0; d < dim; ++d) {
      centered[static_cast<size_t>(i * dim + d)] = points.at(i, d) - mean[static_cast<size_t>(d)];
    }
  }

  std::vector<double> cov(static_cast<size_t>(dim * dim), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t a = 0; a < dim; ++a) {
      const double va = centered[static_cast<size_t>(i * dim + a)];
      for (int64_t b = 0; b < dim; ++b) {
        cov[static_cast<size_t>(a * dim + b)] += va * centered[static_cast<size_t>(i * dim + b)];
      }
    }
  }
  for (auto& v : cov) v /= static_cast<double>(n - 1);

  auto power_component = [&](std::vector<double>& c) {
    std::vector<double> v(static_cast<size_t>(dim));
    uint64_t sm = 0x5ca1ab1e;  // fixed deterministic start vector
    for (auto& x : v) x = static_cast<double>(splitmix64(sm) >> 11) * 0x1.0p-53 - 0.5;
    std::vector<double> next(static_cast<size_t>(dim));
    for (int it = 0; it < 300; ++it) {
      for (int64_t a = 0; a < dim; ++a) {
        double acc = 0;
        for (int64_t b = 0; b < dim; ++b) {
          acc += c[static_cast<size_t>(a * dim + b)] * v[static_cast<size_t>(b)];
        }
        next[static_cast<size_t>(a)] = acc;
      }
      double norm = 0;
      for (double x : next) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-300) break;
      for (int64_t a = 0; a < dim; ++a) v[static_cast<size_t>(a)] = next[static_cast<size_t>(a)] / norm;
    }
    // sign convention: largest-magnitude loading is positive
    int64_t arg = 0;
    for (int64_t a = 1; a < dim; ++a) {
      if (std::abs(v[static_cast<size_t>(a)]) > std::abs(v[static_cast<size_t>(arg)])) arg = a;
    }
    if (v[static_cast<size_t>(arg)] < 0) {
      for (auto& x : v) x = -x;
    }
    return v;
  };

  const auto v1 = power_component(cov);
  double lambda1 = 0;
  for (int64_t a = 0; a < dim; ++a) {
    double acc = 0;
    for (int64_t b = 0; b < dim; ++b) {
      acc += cov[static_cast<size_t>(a * dim + b)] * v1[static_cast<size_t>(b)];
    }
    lambda1 += v1[static_cast<size_t>(a)] * acc;
  }
  for (int64_t a = 0; a < dim; ++a) {
    for (int64_t b = 0; b < dim; ++b) {
      cov[static_cast<size_t>(a * dim + b)] -= lambda1 * v1[static_cast<size_t>(a)] * v1[static_cast<size_t>(b)];
    }
  }
  const auto v2 = power_component(cov);

  Tensor out({n, 2});
  for (int64_t i = 0; i < n; ++i) {
    double p1 = 0, p2 = 0;
    for (int64_t d = 0; d < dim; ++d) {
      p1 += centered[static_cast<size_t>(i * dim + d)] * v1[static_cast<size_t>(d)];
      p2 += centered[static_cast<size_t>(i * dim + d)] * v2[static_cast<size_t>(d)];
    }
    out.at(i, 0) = static_cast<float>(p1);
    out.at(i, 1) = static_cast<float>(p2);
  }
  return out;
}

}  // namespace geat
