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

#include <algorithm>
#include <numeric>
#include <set>

#include "geat/ensemble.hpp"
#include "geat/rng.hpp"

using namespace geat;

namespace {

Ranking from_order(const std::vector<int32_t>& order) {
  Ranking r;
  r.kind = "test";
  double score = static_cast<double>(order.size());
  for (int32_t lab : order) r.entries.emplace_back(lab, score--);
  return r;
}

std::vector<int32_t> order_of(const Ranking& r) {
  std::vector<int32_t> order;
  for (const auto& [lab, score] : r.entries) order.push_back(lab);
  return order;
}

std::vector<Ranking> random_profile(Rng& rng, int64_t labs, int64_t voters) {
  std::vector<int32_t> base(static_cast<size_t>(labs));
  std::iota(base.begin(), base.end(), 0);
  std::vector<Ranking> profile;
  for (int64_t v = 0; v < voters; ++v) {
    auto order = base;
    rng.shuffle(order);
    profile.push_back(from_order(order));
  }
  return profile;
}

/// Brute-force pairwise majority matrix: wins[a][b] = #voters placing a
/// above b.
std::vector<std::vector<int64_t>> pairwise_wins(const std::vector<Ranking>& profile,
                                                int64_t labs) {
  std::vector<std::vector<int64_t>> wins(static_cast<size_t>(labs),
                                         std::vector<int64_t>(static_cast<size_t>(labs), 0));
  for (const auto& r : profile) {
    std::vector<int64_t> pos(static_cast<size_t>(labs));
    for (size_t p = 0; p < r.entries.size(); ++p) {
      pos[static_cast<size_t>(r.entries[p].first)] = static_cast<int64_t>(p);
    }
    for (int64_t a = 0; a < labs; ++a) {
      for (int64_t b = 0; b < labs; ++b) {
        if (a != b && pos[static_cast<size_t>(a)] < pos[static_cast<size_t>(b)]) {
          ++wins[static_cast<size_t>(a)][static_cast<size_t>(b)];
        }
      }
    }
  }
  return wins;
}

// profile from the worked three-voter example
std::vector<Ranking> worked_example() {
  return {from_order({0, 1, 2}), from_order({1, 0, 2}), from_order({0, 2, 1})};
}

}  // namespace

TEST_CASE("borda reproduces the worked example") {
  const Ranking result = borda_aggregate(worked_example());
  CHECK(order_of(result) == std::vector<int32_t>{0, 1, 2});
  CHECK(result.kind == "ensemble-borda");
  CHECK(result.entries[0].second == doctest::Approx(-4.0 / 3.0));
  CHECK(result.entries[1].second == doctest::Approx(-2.0));
  CHECK(result.entries[2].second == doctest::Approx(-8.0 / 3.0));
}

TEST_CASE("copeland reproduces the worked example") {
  const Ranking result = copeland_aggregate(worked_example());
  CHECK(order_of(result) == std::vector<int32_t>{0, 1, 2});
  CHECK(result.kind == "ensemble-copeland");
  CHECK(result.entries[0].second == 2.0);
  CHECK(result.entries[1].second == 0.0);
  CHECK(result.entries[2].second == -2.0);
}

TEST_CASE("a single ranking aggregates to itself") {
  const Ranking voter = from_order({3, 0, 2, 1});
  CHECK(order_of(borda_aggregate({voter})) == order_of(voter));
  CHECK(order_of(copeland_aggregate({voter})) == order_of(voter));
}

TEST_CASE("unanimous profiles return the shared order") {
  const Ranking voter = from_order({2, 0, 1});
  const std::vector<Ranking> profile{voter, voter, voter};
  CHECK(order_of(borda_aggregate(profile)) == order_of(voter));
  const Ranking cope = copeland_aggregate(profile);
  CHECK(order_of(cope) == order_of(voter));
  CHECK(cope.entries[0].second == 2.0);  // first beats every other lab
}

TEST_CASE("both rules are anonymous and produce permutations") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t labs = 2 + static_cast<int64_t>(rng.bounded(7));
    const int64_t voters = 1 + static_cast<int64_t>(rng.bounded(5));
    auto profile = random_profile(rng, labs, voters);

    const Ranking borda = borda_aggregate(profile);
    const Ranking cope = copeland_aggregate(profile);

    std::set<int32_t> borda_labs, cope_labs;
    for (const auto& [lab, s] : borda.entries) borda_labs.insert(lab);
    for (const auto& [lab, s] : cope.entries) cope_labs.insert(lab);
    CHECK(borda_labs.size() == static_cast<size_t>(labs));
    CHECK(cope_labs.size() == static_cast<size_t>(labs));

    auto shuffled = profile;
    rng.shuffle(shuffled);
    CHECK(order_of(borda_aggregate(shuffled)) == order_of(borda));
    CHECK(order_of(copeland_aggregate(shuffled)) == order_of(cope));
  }
}

TEST_CASE("a condorcet winner always tops the copeland ranking") {
  Rng rng(5);
  int found = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t labs = 2 + static_cast<int64_t>(rng.bounded(7));
    const int64_t voters = 1 + static_cast<int64_t>(rng.bounded(5));
    const auto profile = random_profile(rng, labs, voters);
    const auto wins = pairwise_wins(profile, labs);

    int32_t condorcet = -1;
    for (int64_t a = 0; a < labs && condorcet < 0; ++a) {
      bool beats_all = true;
      for (int64_t b = 0; b < labs; ++b) {
        if (a == b) continue;
        if (2 * wins[static_cast<size_t>(a)][static_cast<size_t>(b)] <= voters) {
          beats_all = false;
          break;
        }
      }
      if (beats_all) condorcet = static_cast<int32_t>(a);
    }
    if (condorcet < 0) continue;
    ++found;
    CHECK(copeland_aggregate(profile).entries.front().first == condorcet);
  }
  CHECK(found > 20);  // the property must actually have been exercised
}

TEST_CASE("borda order matches a brute-force mean-position sort") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t labs = 2 + static_cast<int64_t>(rng.bounded(7));
    const int64_t voters = 1 + static_cast<int64_t>(rng.bounded(5));
    const auto profile = random_profile(rng, labs, voters);

    std::vector<double> mean(static_cast<size_t>(labs), 0);
    for (const auto& r : profile) {
      for (size_t p = 0; p < r.entries.size(); ++p) {
        mean[static_cast<size_t>(r.entries[p].first)] += static_cast<double>(p + 1);
      }
    }
    for (auto& v : mean) v /= static_cast<double>(voters);
    std::vector<int32_t> expected(static_cast<size_t>(labs));
    std::iota(expected.begin(), expected.end(), 0);
    std::stable_sort(expected.begin(), expected.end(), [&](int32_t a, int32_t b) {
      if (mean[static_cast<size_t>(a)] != mean[static_cast<size_t>(b)]) {
        return mean[static_cast<size_t>(a)] < mean[static_cast<size_t>(b)];
      }
      return a < b;
    });
    CHECK(order_of(borda_aggregate(profile)) == expected);
  }
}

TEST_CASE("mismatched lab sets are rejected") {
  const std::vector<Ranking> differing_sizes{from_order({0, 1, 2}), from_order({0, 1})};
  CHECK_THROWS_AS(borda_aggregate(differing_sizes), ValidationError);
  CHECK_THROWS_AS(copeland_aggregate(differing_sizes), ValidationError);

  // same size, different labs
  const std::vector<Ranking> differing_labs{from_order({0, 1, 2}), from_order({0, 1, 3})};
  CHECK_THROWS_AS(borda_aggregate(differing_labs), ValidationError);

  CHECK_THROWS_AS(borda_aggregate({}), ValidationError);
}
