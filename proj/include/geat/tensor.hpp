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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "geat/common.hpp"

namespace geat {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

/// Dense row-major tensor.
template <typename T>
struct TensorT {
  Shape shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(Shape s) : shape(std::move(s)), data(static_cast<size_t>(shape_numel(shape)), T(0)) {}
  TensorT(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != shape_numel(shape)) {
      throw ValidationError("tensor data size does not match shape " + shape_str(shape));
    }
  }

  static TensorT zeros(Shape s) { return TensorT(std::move(s)); }
  static TensorT full(Shape s, T v) {
    TensorT t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int64_t dim(size_t i) const { return shape[i]; }
  int rank() const { return static_cast<int>(shape.size()); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& at(int64_t i) { return data[static_cast<size_t>(i)]; }
  T at(int64_t i) const { return data[static_cast<size_t>(i)]; }
  T& at(int64_t i, int64_t j) { return data[static_cast<size_t>(i * shape[1] + j)]; }
  T at(int64_t i, int64_t j) const { return data[static_cast<size_t>(i * shape[1] + j)]; }
  T& at(int64_t i, int64_t j, int64_t k) {
    return data[static_cast<size_t>((i * shape[1] + j) * shape[2] + k)];
  }
  T at(int64_t i, int64_t j, int64_t k) const {
    return data[static_cast<size_t>((i * shape[1] + j) * shape[2] + k)];
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    for (T v : data) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

/// Integer tensor for token ids, labels and valid lengths.
struct IntTensor {
  Shape shape;
  std::vector<int32_t> data;

  IntTensor() = default;
  explicit IntTensor(Shape s) : shape(std::move(s)), data(static_cast<size_t>(shape_numel(shape)), 0) {}
  IntTensor(Shape s, std::vector<int32_t> d) : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != shape_numel(shape)) {
      throw ValidationError("int tensor data size does not match shape " + shape_str(shape));
    }
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int64_t dim(size_t i) const { return shape[i]; }
  int32_t* ptr() { return data.data(); }
  const int32_t* ptr() const { return data.data(); }
};

}  // namespace geat
