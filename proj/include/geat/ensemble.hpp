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

#include <vector>

#include "geat/rank.hpp"

namespace geat {

/// Mean 1-based rank position per lab, best (lowest) mean first. Output
/// scores are negated mean positions so higher is still better.
Ranking borda_aggregate(const std::vector<Ranking>& profile);

/// Pairwise-majority wins minus losses; ties contribute nothing. Ties in
/// the Copeland score break by Borda mean position, then lab index.
Ranking copeland_aggregate(const std::vector<Ranking>& profile);

}  // namespace geat
