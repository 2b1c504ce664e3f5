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

#include "geat/graph.hpp"
#include "geat/tensor.hpp"

namespace geat {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment tensors are allocated lazily to match
/// the parameter shapes on the first step.
template <typename T>
struct AdamStateT {
  AdamConfig config;
  int64_t step = 0;
  std::vector<TensorT<T>> m, v;
};

using AdamState = AdamStateT<float>;

/// One update over an ordered parameter list. Shapes must line up between
/// params, grads and moments.
template <typename T>
void adam_step(const std::vector<TensorT<T>*>& params,
               const std::vector<const TensorT<T>*>& grads, AdamStateT<T>& state);

/// Updates every parameter of the graph from its current gradients.
template <typename T>
void adam_step(GraphT<T>& g, AdamStateT<T>& state);

}  // namespace geat
