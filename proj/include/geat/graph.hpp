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

#include <string>
#include <unordered_map>
#include <vector>

#include "geat/tensor.hpp"

namespace geat {

enum class OpKind {
  Input,
  IntInput,
  Param,
  Const,
  EmbeddingLookup,
  Conv1d,
  MaxOverTime,
  Dense,
  Relu,
  Concat,
  L2Normalize,
  RowDot,
  SoftmaxXent,
  Mean,
  Add,
  Sub,
  AddScalar,
  Scale,
};

const char* op_name(OpKind op);

/// Static computation graph with reverse-mode gradients. Nodes are appended
/// in topological order by construction; shapes are validated on every
/// forward pass, so the batch dimension may change between evaluations.
/// Evaluation of one graph is single-threaded at the node level; the heavy
/// per-node kernels fan out through OpenMP deterministically.
template <typename T>
class GraphT {
 public:
  struct Node {
    OpKind op;
    std::string name;
    std::vector<int> inputs;
    double attr = 0.0;       // AddScalar / Scale constant
    TensorT<T> value;
    TensorT<T> grad;
    IntTensor ivalue;        // IntInput payload
    TensorT<T> scratch;      // softmax probs
    IntTensor iscratch;      // maxpool argmax
  };

  // graph construction ------------------------------------------------------
  int input(const std::string& name);
  int int_input(const std::string& name);
  int param(const std::string& name, TensorT<T> init);
  int constant(TensorT<T> v);
  int embedding_lookup(int table, int ids);
  /// x (B,T,D) * w (K,D,C) + b (C) -> (B,T-K+1,C). Windows at positions
  /// past valid[b] are zeroed; pooling never reads them.
  int conv1d(int x, int w, int b, int valid);
  int max_over_time(int x, int valid);
  int dense(int x, int w, int b);
  int relu(int x);
  int concat(int a, int b);
  int l2_normalize(int x);
  int row_dot(int a, int b);
  int softmax_xent(int logits, int labels);
  int mean(int x);
  int add(int a, int b);
  int sub(int a, int b);
  int add_scalar(int x, double c);
  int scale(int x, double c);

  void name_node(int id, const std::string& name);

  // data access -------------------------------------------------------------
  void set_input(const std::string& name, TensorT<T> v);
  void set_int_input(const std::string& name, IntTensor v);
  bool has_node(const std::string& name) const;
  int node_id(const std::string& name) const;
  TensorT<T>& param_value(const std::string& name);
  const std::vector<int>& param_ids() const { return param_ids_; }
  std::vector<std::string> param_names() const;

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  const TensorT<T>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const TensorT<T>& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }

  // execution ---------------------------------------------------------------
  /// Forward pass over node ids in [lo, hi]; defaults to the whole graph.
  void forward(int lo = 0, int hi = -1);
  /// Zeroes all gradients, seeds d(loss)=1 and back-propagates. loss must be
  /// scalar.
  void backward(int loss);

  /// Spec-style entry point: set inputs, run forward, fetch named outputs.
  std::unordered_map<std::string, TensorT<T>> evaluate(
      const std::unordered_map<std::string, TensorT<T>>& inputs,
      const std::unordered_map<std::string, IntTensor>& int_inputs,
      const std::vector<std::string>& outputs);

  /// Forward + backward, returning gradients for the requested parameters.
  std::unordered_map<std::string, TensorT<T>> gradients(int loss,
                                                        const std::vector<std::string>& wrt);

 private:
  int add_node(OpKind op, std::vector<int> inputs, const std::string& name = "");
  void forward_node(int id);
  void backward_node(int id);
  void check_finite(int id) const;
  Node& mut(int id) { return nodes_[static_cast<size_t>(id)]; }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> by_name_;
  std::vector<int> param_ids_;
};

using Graph = GraphT<float>;
using Graph64 = GraphT<double>;

/// Central-difference check of every parameter gradient at the current
/// parameter values; 64-bit graphs only. Returns the max over coordinates of
/// |analytic - numeric| / max(1, |numeric|).
double grad_check(GraphT<double>& g, int loss, double h);

/// Same, applying `point` to the named parameters/inputs first.
double grad_check(GraphT<double>& g, int loss,
                  const std::unordered_map<std::string, Tensor64>& point, double h);

}  // namespace geat
