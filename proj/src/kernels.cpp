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

#include "geat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

// Every parallel loop below assigns each output element to exactly one
// thread and keeps the element's accumulation order fixed, so results are
// bitwise identical to the serial reference for any thread count.

namespace geat::kernels {

namespace {
template <typename T>
int64_t pool_limit(const int32_t* valid, int64_t b, int64_t t_win) {
  return std::min<int64_t>(valid[b], t_win);
}
}  // namespace

template <typename T>
void embedding_forward(const T* table, int64_t /*vocab*/, int64_t dim, const int32_t* ids,
                       int64_t n, T* out) {
#pragma omp parallel for
  for (int64_t i = 0; i < n; ++i) {
    std::memcpy(out + i * dim, table + static_cast<int64_t>(ids[i]) * dim,
                static_cast<size_t>(dim) * sizeof(T));
  }
}

template <typename T>
void embedding_backward(const T* dout, const int32_t* ids, int64_t n, int64_t dim, T* dtable) {
  // Parallel over embedding dims: each (row, d) slot is owned by one thread
  // and receives its adds in ascending i order.
#pragma omp parallel for
  for (int64_t d = 0; d < dim; ++d) {
    for (int64_t i = 0; i < n; ++i) {
      dtable[static_cast<int64_t>(ids[i]) * dim + d] += dout[i * dim + d];
    }
  }
}

template <typename T>
void conv1d_forward(const T* x, int64_t batch, int64_t t_in, int64_t d_in, const T* w,
                    int64_t k, int64_t c_out, const T* bias, const int32_t* valid, T* y) {
  const int64_t t_win = t_in - k + 1;
#pragma omp parallel for collapse(2)
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t t = 0; t < t_win; ++t) {
      T* yrow = y + (b * t_win + t) * c_out;
      if (t >= pool_limit<T>(valid, b, t_win)) {
        std::memset(yrow, 0, static_cast<size_t>(c_out) * sizeof(T));
        continue;
      }
      std::memcpy(yrow, bias, static_cast<size_t>(c_out) * sizeof(T));
      for (int64_t kk = 0; kk < k; ++kk) {
        const T* xrow = x + (b * t_in + t + kk) * d_in;
        const T* wk = w + kk * d_in * c_out;
        for (int64_t d = 0; d < d_in; ++d) {
          const T xv = xrow[d];
          const T* wrow = wk + d * c_out;
          for (int64_t c = 0; c < c_out; ++c) yrow[c] += xv * wrow[c];
        }
      }
    }
  }
}

template <typename T>
void conv1d_backward(const T* x, const T* w, const T* dy, int64_t batch, int64_t t_in,
                     int64_t d_in, int64_t k, int64_t c_out, const int32_t* valid, T* dx,
                     T* dw, T* db) {
  const int64_t t_win = t_in - k + 1;

#pragma omp parallel for
  for (int64_t c = 0; c < c_out; ++c) {
    T acc = 0;
    for (int64_t b = 0; b < batch; ++b) {
      const int64_t lim = pool_limit<T>(valid, b, t_win);
      for (int64_t t = 0; t < lim; ++t) acc += dy[(b * t_win + t) * c_out + c];
    }
    db[c] += acc;
  }

#pragma omp parallel for collapse(2)
  for (int64_t kk = 0; kk < k; ++kk) {
    for (int64_t d = 0; d < d_in; ++d) {
      T* dwrow = dw + (kk * d_in + d) * c_out;
      for (int64_t b = 0; b < batch; ++b) {
        const int64_t lim = pool_limit<T>(valid, b, t_win);
        for (int64_t t = 0; t < lim; ++t) {
          const T xv = x[(b * t_in + t + kk) * d_in + d];
          const T* dyrow = dy + (b * t_win + t) * c_out;
          for (int64_t c = 0; c < c_out; ++c) dwrow[c] += xv * dyrow[c];
        }
      }
    }
  }

#pragma omp parallel for
  for (int64_t b = 0; b < batch; ++b) {
    const int64_t lim = pool_limit<T>(valid, b, t_win);
    for (int64_t t = 0; t < lim; ++t) {
      const T* dyrow = dy + (b * t_win + t) * c_out;
      for (int64_t kk = 0; kk < k; ++kk) {
        const T* wk = w + kk * d_in * c_out;
        T* dxrow = dx + (b * t_in + t + kk) * d_in;
        for (int64_t d = 0; d < d_in; ++d) {
          const T* wrow = wk + d * c_out;
          T acc = 0;
          for (int64_t c = 0; c < c_out; ++c) acc += wrow[c] * dyrow[c];
          dxrow[d] += acc;
        }
      }
    }
  }
}

template <typename T>
void maxpool_time_forward(const T* x, int64_t batch, int64_t t_win, int64_t channels,
                          const int32_t* valid, T* y, int32_t* argmax) {
#pragma omp parallel for
  for (int64_t b = 0; b < batch; ++b) {
    T* yrow = y + b * channels;
    int32_t* arow = argmax + b * channels;
    const T* x0 = x + b * t_win * channels;
    std::memcpy(yrow, x0, static_cast<size_t>(channels) * sizeof(T));
    std::memset(arow, 0, static_cast<size_t>(channels) * sizeof(int32_t));
    const int64_t lim = pool_limit<T>(valid, b, t_win);
    for (int64_t t = 1; t < lim; ++t) {
      const T* xrow = x0 + t * channels;
      for (int64_t c = 0; c < channels; ++c) {
        if (xrow[c] > yrow[c]) {  // ties keep the earliest window
          yrow[c] = xrow[c];
          arow[c] = static_cast<int32_t>(t);
        }
      }
    }
  }
}

template <typename T>
void maxpool_time_backward(const T* dy, const int32_t* argmax, int64_t batch, int64_t t_win,
                           int64_t channels, T* dx) {
#pragma omp parallel for
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t c = 0; c < channels; ++c) {
      const int64_t t = argmax[b * channels + c];
      dx[(b * t_win + t) * channels + c] += dy[b * channels + c];
    }
  }
}

template <typename T>
void dense_forward(const T* x, int64_t batch, int64_t d_in, const T* w, int64_t d_out,
                   const T* bias, T* y) {
#pragma omp parallel for
  for (int64_t b = 0; b < batch; ++b) {
    T* yrow = y + b * d_out;
    std::memcpy(yrow, bias, static_cast<size_t>(d_out) * sizeof(T));
    const T* xrow = x + b * d_in;
    for (int64_t i = 0; i < d_in; ++i) {
      const T xv = xrow[i];
      const T* wrow = w + i * d_out;
      for (int64_t o = 0; o < d_out; ++o) yrow[o] += xv * wrow[o];
    }
  }
}

template <typename T>
void dense_backward(const T* x, const T* w, const T* dy, int64_t batch, int64_t d_in,
                    int64_t d_out, T* dx, T* dw, T* db) {
#pragma omp parallel for
  for (int64_t b = 0; b < batch; ++b) {
    const T* dyrow = dy + b * d_out;
    T* dxrow = dx + b * d_in;
    for (int64_t i = 0; i < d_in; ++i) {
      const T* wrow = w + i * d_out;
      T acc = 0;
      for (int64_t o = 0; o < d_out; ++o) acc += wrow[o] * dyrow[o];
      dxrow[i] += acc;
    }
  }

#pragma omp parallel for
  for (int64_t i = 0; i < d_in; ++i) {
    T* dwrow = dw + i * d_out;
    for (int64_t b = 0; b < batch; ++b) {
      const T xv = x[b * d_in + i];
      const T* dyrow = dy + b * d_out;
      for (int64_t o = 0; o < d_out; ++o) dwrow[o] += xv * dyrow[o];
    }
  }

  for (int64_t b = 0; b < batch; ++b) {
    const T* dyrow = dy + b * d_out;
    for (int64_t o = 0; o < d_out; ++o) db[o] += dyrow[o];
  }
}

template <typename T>
void l2norm_rows_forward(const T* x, int64_t rows, int64_t dim, T* y) {
#pragma omp parallel for
  for (int64_t r = 0; r < rows; ++r) {
    const T* xrow = x + r * dim;
    T* yrow = y + r * dim;
    T s = 0;
    for (int64_t d = 0; d < dim; ++d) s += xrow[d] * xrow[d];
    const T n = std::sqrt(s + static_cast<T>(kL2NormEps));
    for (int64_t d = 0; d < dim; ++d) yrow[d] = xrow[d] / n;
  }
}

template <typename T>
void l2norm_rows_backward(const T* x, const T* dy, int64_t rows, int64_t dim, T* dx) {
#pragma omp parallel for
  for (int64_t r = 0; r < rows; ++r) {
    const T* xrow = x + r * dim;
    const T* dyrow = dy + r * dim;
    T* dxrow = dx + r * dim;
    T s = 0, dot = 0;
    for (int64_t d = 0; d < dim; ++d) {
      s += xrow[d] * xrow[d];
      dot += xrow[d] * dyrow[d];
    }
    const T n = std::sqrt(s + static_cast<T>(kL2NormEps));
    const T n3 = n * n * n;
    for (int64_t d = 0; d < dim; ++d) dxrow[d] += dyrow[d] / n - xrow[d] * dot / n3;
  }
}

template <typename T>
void sim_matrix(const T* a, const T* rows, int64_t batch, int64_t n_rows, int64_t dim,
                T* sims) {
#pragma omp parallel for
  for (int64_t i = 0; i < batch; ++i) {
    const T* arow = a + i * dim;
    T* srow = sims + i * n_rows;
    for (int64_t j = 0; j < n_rows; ++j) {
      const T* rrow = rows + j * dim;
      T acc = 0;
      for (int64_t d = 0; d < dim; ++d) acc += arow[d] * rrow[d];
      srow[j] = acc;
    }
  }
}

template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, int64_t n, int64_t step, T lr, T beta1,
                 T beta2, T eps) {
  const T bc1 = static_cast<T>(1.0 - std::pow(static_cast<double>(beta1), static_cast<double>(step)));
  const T bc2 = static_cast<T>(1.0 - std::pow(static_cast<double>(beta2), static_cast<double>(step)));
#pragma omp parallel for
  for (int64_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1 - beta2) * g[i] * g[i];
    const T mhat = m[i] / bc1;
    const T vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

template <typename T>
void kmeans_assign(const T* points, int64_t n, int64_t dim, const T* centroids, int64_t k,
                   int32_t* assign, T* dist2) {
#pragma omp parallel for
  for (int64_t i = 0; i < n; ++i) {
    const T* p = points + i * dim;
    T best = 0;
    int32_t best_j = -1;
    for (int64_t j = 0; j < k; ++j) {
      const T* c = centroids + j * dim;
      T d2 = 0;
      for (int64_t d = 0; d < dim; ++d) {
        const T diff = p[d] - c[d];
        d2 += diff * diff;
      }
      if (best_j < 0 || d2 < best) {
        best = d2;
        best_j = static_cast<int32_t>(j);
      }
    }
    assign[i] = best_j;
    dist2[i] = best;
  }
}

#define GEAT_INSTANTIATE(T)                                                                  \
  template void embedding_forward<T>(const T*, int64_t, int64_t, const int32_t*, int64_t,   \
                                     T*);                                                    \
  template void embedding_backward<T>(const T*, const int32_t*, int64_t, int64_t, T*);      \
  template void conv1d_forward<T>(const T*, int64_t, int64_t, int64_t, const T*, int64_t,   \
                                  int64_t, const T*, const int32_t*, T*);                    \
  template void conv1d_backward<T>(const T*, const T*, const T*, int64_t, int64_t, int64_t, \
                                   int64_t, int64_t, const int32_t*, T*, T*, T*);            \
  template void maxpool_time_forward<T>(const T*, int64_t, int64_t, int64_t,                \
                                        const int32_t*, T*, int32_t*);                       \
  template void maxpool_time_backward<T>(const T*, const int32_t*, int64_t, int64_t,        \
                                         int64_t, T*);                                       \
  template void dense_forward<T>(const T*, int64_t, int64_t, const T*, int64_t, const T*,   \
                                 T*);                                                        \
  template void dense_backward<T>(const T*, const T*, const T*, int64_t, int64_t, int64_t,  \
                                  T*, T*, T*);                                               \
  template void l2norm_rows_forward<T>(const T*, int64_t, int64_t, T*);                     \
  template void l2norm_rows_backward<T>(const T*, const T*, int64_t, int64_t, T*);          \
  template void sim_matrix<T>(const T*, const T*, int64_t, int64_t, int64_t, T*);           \
  template void adam_update<T>(T*, const T*, T*, T*, int64_t, int64_t, T, T, T, T);         \
  template void kmeans_assign<T>(const T*, int64_t, int64_t, const T*, int64_t, int32_t*,   \
                                 T*);

GEAT_INSTANTIATE(float)
GEAT_INSTANTIATE(double)
#undef GEAT_INSTANTIATE

}  // namespace geat::kernels
