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

#include "geat/ensemble.hpp"

#include <algorithm>
#include <unordered_map>

namespace geat {

namespace {

/// Positions are 1-based; rows = voters, columns indexed by lab id.
std::vector<std::vector<int64_t>> position_table(const std::vector<Ranking>& profile) {
  if (profile.empty()) throw ValidationError("ensemble: empty ranking profile");
  const size_t labs = profile[0].entries.size();
  if (labs == 0) throw ValidationError("ensemble: rankings are empty");

  std::vector<int32_t> reference;
  for (const auto& [lab, score] : profile[0].entries) reference.push_back(lab);
  std::sort(reference.begin(), reference.end());
  for (size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] != static_cast<int32_t>(i)) {
      throw ValidationError("ensemble: rankings must cover labs 0..L-1 exactly once");
    }
  }

  std::vector<std::vector<int64_t>> positions;
  for (const auto& r : profile) {
    if (r.entries.size() != labs) {
      throw ValidationError("ensemble: rankings cover different lab sets");
    }
    std::vector<int64_t> pos(labs, -1);
    for (size_t p = 0; p < r.entries.size(); ++p) {
      const int32_t lab = r.entries[p].first;
      if (lab < 0 || static_cast<size_t>(lab) >= labs || pos[static_cast<size_t>(lab)] >= 0) {
        throw ValidationError("ensemble: rankings cover different lab sets");
      }
      pos[static_cast<size_t>(lab)] = static_cast<int64_t>(p) + 1;
    }
    positions.push_back(std::move(pos));
  }
  return positions;
}

std::vector<double> borda_means(const std::vector<std::vector<int64_t>>& positions) {
  const size_t labs = positions[0].size();
  std::vector<double> mean(labs, 0.0);
  for (const auto& pos : positions) {
    for (size_t lab = 0; lab < labs; ++lab) mean[lab] += static_cast<double>(pos[lab]);
  }
  for (auto& v : mean) v /= static_cast<double>(positions.size());
  return mean;
}

}  // namespace

Ranking borda_aggregate(const std::vector<Ranking>& profile) {
  const auto positions = position_table(profile);
  const auto mean = borda_means(positions);

  std::vector<int32_t> order(mean.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    if (mean[static_cast<size_t>(a)] != mean[static_cast<size_t>(b)]) {
      return mean[static_cast<size_t>(a)] < mean[static_cast<size_t>(b)];
    }
    return a < b;
  });

  Ranking out;
  out.kind = "ensemble-borda";
  for (int32_t lab : order) out.entries.emplace_back(lab, -mean[static_cast<size_t>(lab)]);
  return out;
}

Ranking copeland_aggregate(const std::vector<Ranking>& profile) {
  const auto positions = position_table(profile);
  const int64_t labs = static_cast<int64_t>(positions[0].size());
  const auto mean = borda_means(positions);

  std::vector<int64_t> score(static_cast<size_t>(labs), 0);  // wins - losses
  for (int64_t a = 0; a < labs; ++a) {
    for (int64_t b = a + 1; b < labs; ++b) {
      int64_t a_wins = 0;
      for (const auto& pos : positions) {
        if (pos[static_cast<size_t>(a)] < pos[static_cast<size_t>(b)]) ++a_wins;
      }
      const int64_t b_wins = static_cast<int64_t>(positions.size()) - a_wins;
      if (a_wins > b_wins) {
        ++score[static_cast<size_t>(a)];
        --score[static_cast<size_t>(b)];
      } else if (b_wins > a_wins) {
        --score[static_cast<size_t>(a)];
        ++score[static_cast<size_t>(b)];
      }
    }
  }

  std::vector<int32_t> order(static_cast<size_t>(labs));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    if (score[static_cast<size_t>(a)] != score[static_cast<size_t>(b)]) {
      return score[static_cast<size_t>(a)] > score[static_cast<size_t>(b)];
    }
    if (mean[static_cast<size_t>(a)] != mean[static_cast<size_t>(b)]) {
      return mean[static_cast<size_t>(a)] < mean[static_cast<size_t>(b)];
    }
    return a < b;
  });

  Ranking out;
  out.kind = "ensemble-copeland";
  for (int32_t lab : order) {
    out.entries.emplace_back(lab, static_cast<double>(score[static_cast<size_t>(lab)]));
  }
  return out;
}

}  // namespace geat
