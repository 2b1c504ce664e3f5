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

// Dense compute kernels. geat::kernels holds the OpenMP implementations used
// by the graph engine; geat::kernels::serial holds plain-loop reference
// implementations kept for testing and benchmarking. Both variants perform
// the per-output-element arithmetic in the same order, so their results are
// bitwise identical for any thread count.
//
// Backward kernels accumulate (+=) into their gradient outputs; callers zero
// the buffers once per backward pass.

namespace geat::kernels {

#define GEAT_KERNEL_DECLS                                                                   \
  /* out[i,:] = table[ids[i],:] for n flattened positions */                                \
  template <typename T>                                                                     \
  void embedding_forward(const T* table, int64_t vocab, int64_t dim, const int32_t* ids,    \
                         int64_t n, T* out);                                                \
  template <typename T>                                                                     \
  void embedding_backward(const T* dout, const int32_t* ids, int64_t n, int64_t dim,        \
                          T* dtable);                                                       \
  /* y[b,t,c] over valid windows t < min(valid[b], t_in-k+1); the rest is zeroed */         \
  template <typename T>                                                                     \
  void conv1d_forward(const T* x, int64_t batch, int64_t t_in, int64_t d_in, const T* w,    \
                      int64_t k, int64_t c_out, const T* bias, const int32_t* valid, T* y); \
  template <typename T>                                                                     \
  void conv1d_backward(const T* x, const T* w, const T* dy, int64_t batch, int64_t t_in,    \
                       int64_t d_in, int64_t k, int64_t c_out, const int32_t* valid, T* dx, \
                       T* dw, T* db);                                                       \
  /* max over t < min(valid[b], t_win); ties keep the lowest t */                           \
  template <typename T>                                                                     \
  void maxpool_time_forward(const T* x, int64_t batch, int64_t t_win, int64_t channels,     \
                            const int32_t* valid, T* y, int32_t* argmax);                   \
  template <typename T>                                                                     \
  void maxpool_time_backward(const T* dy, const int32_t* argmax, int64_t batch,             \
                             int64_t t_win, int64_t channels, T* dx);                       \
  template <typename T>                                                                     \
  void dense_forward(const T* x, int64_t batch, int64_t d_in, const T* w, int64_t d_out,    \
                     const T* bias, T* y);                                                  \
  template <typename T>                                                                     \
  void dense_backward(const T* x, const T* w, const T* dy, int64_t batch, int64_t d_in,     \
                      int64_t d_out, T* dx, T* dw, T* db);                                  \
  template <typename T>                                                                     \
  void l2norm_rows_forward(const T* x, int64_t rows, int64_t dim, T* y);                    \
  template <typename T>                                                                     \
  void l2norm_rows_backward(const T* x, const T* dy, int64_t rows, int64_t dim, T* dx);     \
  /* sims[i,j] = dot(a[i,:], rows[j,:]) */                                                  \
  template <typename T>                                                                     \
  void sim_matrix(const T* a, const T* rows, int64_t batch, int64_t n_rows, int64_t dim,    \
                  T* sims);                                                                 \
  template <typename T>                                                                     \
  void adam_update(T* p, const T* g, T* m, T* v, int64_t n, int64_t step, T lr, T beta1,    \
                   T beta2, T eps);                                                         \
  /* assign[i] = nearest centroid (lowest index on ties), dist2[i] = its distance^2 */      \
  template <typename T>                                                                     \
  void kmeans_assign(const T* points, int64_t n, int64_t dim, const T* centroids,           \
                     int64_t k, int32_t* assign, T* dist2);

GEAT_KERNEL_DECLS

namespace serial {
GEAT_KERNEL_DECLS
}

#undef GEAT_KERNEL_DECLS

/// Epsilon inside the L2-normalize square root.
inline constexpr double kL2NormEps = 1e-12;

}  // namespace geat::kernels
