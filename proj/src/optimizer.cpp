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

#include "geat/optimizer.hpp"

#include "geat/kernels.hpp"

namespace geat {

template <typename T>
void adam_step(const std::vector<TensorT<T>*>& params,
               const std::vector<const TensorT<T>*>& grads, AdamStateT<T>& state) {
  if (params.size() != grads.size()) {
    throw ValidationError("adam_step: params/grads size mismatch");
  }
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->shape);
      state.v.emplace_back(p->shape);
    }
  }
  if (state.m.size() != params.size()) {
    throw ValidationError("adam_step: state was initialized for a different parameter list");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape != grads[i]->shape || params[i]->shape != state.m[i].shape) {
      throw ValidationError("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
  }

  ++state.step;
  const auto& c = state.config;
  for (size_t i = 0; i < params.size(); ++i) {
    kernels::adam_update(params[i]->ptr(), grads[i]->ptr(), state.m[i].ptr(), state.v[i].ptr(),
                         params[i]->size(), state.step, static_cast<T>(c.lr),
                         static_cast<T>(c.beta1), static_cast<T>(c.beta2),
                         static_cast<T>(c.eps));
    if (!params[i]->all_finite()) {
      throw NumericError("adam_step: non-finite parameter values after update");
    }
  }
}

template <typename T>
void adam_step(GraphT<T>& g, AdamStateT<T>& state) {
  std::vector<TensorT<T>*> params;
  std::vector<const TensorT<T>*> grads;
  for (int id : g.param_ids()) {
    params.push_back(&g.param_value(g.node(id).name));
    grads.push_back(&g.grad(id));
  }
  adam_step(params, grads, state);
}

template void adam_step<float>(const std::vector<Tensor*>&, const std::vector<const Tensor*>&,
                               AdamStateT<float>&);
template void adam_step<double>(const std::vector<Tensor64*>&,
                                const std::vector<const Tensor64*>&, AdamStateT<double>&);
template void adam_step<float>(GraphT<float>&, AdamStateT<float>&);
template void adam_step<double>(GraphT<double>&, AdamStateT<double>&);

}  // namespace geat
