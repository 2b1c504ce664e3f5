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

#include "geat/graph.hpp"

#include <algorithm>
#include <cmath>

#include "geat/kernels.hpp"

namespace geat {

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::Input: return "input";
    case OpKind::IntInput: return "int_input";
    case OpKind::Param: return "param";
    case OpKind::Const: return "const";
    case OpKind::EmbeddingLookup: return "embedding_lookup";
    case OpKind::Conv1d: return "conv1d";
    case OpKind::MaxOverTime: return "max_over_time";
    case OpKind::Dense: return "dense";
    case OpKind::Relu: return "relu";
    case OpKind::Concat: return "concat";
    case OpKind::L2Normalize: return "l2_normalize";
    case OpKind::RowDot: return "row_dot";
    case OpKind::SoftmaxXent: return "softmax_xent";
    case OpKind::Mean: return "mean";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::AddScalar: return "add_scalar";
    case OpKind::Scale: return "scale";
  }
  return "?";
}

namespace {

[[noreturn]] void shape_error(const std::string& node, const std::string& what) {
  throw ValidationError("node '" + node + "': " + what);
}

}  // namespace

template <typename T>
int GraphT<T>::add_node(OpKind op, std::vector<int> inputs, const std::string& name) {
  for (int in : inputs) {
    if (in < 0 || in >= node_count()) throw ValidationError("graph: input node id out of range");
  }
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.name = name.empty() ? std::string(op_name(op)) + "#" + std::to_string(nodes_.size()) : name;
  nodes_.push_back(std::move(n));
  const int id = node_count() - 1;
  if (!name.empty()) name_node(id, name);
  return id;
}

template <typename T>
void GraphT<T>::name_node(int id, const std::string& name) {
  if (by_name_.count(name)) throw ValidationError("graph: duplicate node name '" + name + "'");
  by_name_[name] = id;
  mut(id).name = name;
}

template <typename T>
int GraphT<T>::input(const std::string& name) {
  return add_node(OpKind::Input, {}, name);
}

template <typename T>
int GraphT<T>::int_input(const std::string& name) {
  return add_node(OpKind::IntInput, {}, name);
}

template <typename T>
int GraphT<T>::param(const std::string& name, TensorT<T> init) {
  const int id = add_node(OpKind::Param, {}, name);
  mut(id).value = std::move(init);
  param_ids_.push_back(id);
  return id;
}

template <typename T>
int GraphT<T>::constant(TensorT<T> v) {
  const int id = add_node(OpKind::Const, {});
  mut(id).value = std::move(v);
  return id;
}

template <typename T>
int GraphT<T>::embedding_lookup(int table, int ids) {
  return add_node(OpKind::EmbeddingLookup, {table, ids});
}
template <typename T>
int GraphT<T>::conv1d(int x, int w, int b, int valid) {
  return add_node(OpKind::Conv1d, {x, w, b, valid});
}
template <typename T>
int GraphT<T>::max_over_time(int x, int valid) {
  return add_node(OpKind::MaxOverTime, {x, valid});
}
template <typename T>
int GraphT<T>::dense(int x, int w, int b) {
  return add_node(OpKind::Dense, {x, w, b});
}
template <typename T>
int GraphT<T>::relu(int x) {
  return add_node(OpKind::Relu, {x});
}
template <typename T>
int GraphT<T>::concat(int a, int b) {
  return add_node(OpKind::Concat, {a, b});
}
template <typename T>
int GraphT<T>::l2_normalize(int x) {
  return add_node(OpKind::L2Normalize, {x});
}
template <typename T>
int GraphT<T>::row_dot(int a, int b) {
  return add_node(OpKind::RowDot, {a, b});
}
template <typename T>
int GraphT<T>::softmax_xent(int logits, int labels) {
  return add_node(OpKind::SoftmaxXent, {logits, labels});
}
template <typename T>
int GraphT<T>::mean(int x) {
  return add_node(OpKind::Mean, {x});
}
template <typename T>
int GraphT<T>::add(int a, int b) {
  return add_node(OpKind::Add, {a, b});
}
template <typename T>
int GraphT<T>::sub(int a, int b) {
  return add_node(OpKind::Sub, {a, b});
}
template <typename T>
int GraphT<T>::add_scalar(int x, double c) {
  const int id = add_node(OpKind::AddScalar, {x});
  mut(id).attr = c;
  return id;
}
template <typename T>
int GraphT<T>::scale(int x, double c) {
  const int id = add_node(OpKind::Scale, {x});
  mut(id).attr = c;
  return id;
}

template <typename T>
bool GraphT<T>::has_node(const std::string& name) const {
  return by_name_.count(name) > 0;
}

template <typename T>
int GraphT<T>::node_id(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ValidationError("graph: no node named '" + name + "'");
  return it->second;
}

template <typename T>
void GraphT<T>::set_input(const std::string& name, TensorT<T> v) {
  Node& n = mut(node_id(name));
  if (n.op != OpKind::Input) throw ValidationError("'" + name + "' is not a float input");
  n.value = std::move(v);
}

template <typename T>
void GraphT<T>::set_int_input(const std::string& name, IntTensor v) {
  Node& n = mut(node_id(name));
  if (n.op != OpKind::IntInput) throw ValidationError("'" + name + "' is not an int input");
  n.ivalue = std::move(v);
}

template <typename T>
TensorT<T>& GraphT<T>::param_value(const std::string& name) {
  Node& n = mut(node_id(name));
  if (n.op != OpKind::Param) throw ValidationError("'" + name + "' is not a parameter");
  return n.value;
}

template <typename T>
std::vector<std::string> GraphT<T>::param_names() const {
  std::vector<std::string> names;
  names.reserve(param_ids_.size());
  for (int id : param_ids_) names.push_back(node(id).name);
  return names;
}

template <typename T>
void GraphT<T>::check_finite(int id) const {
  if (!node(id).value.all_finite()) {
    throw NumericError("non-finite values in node '" + node(id).name + "'");
  }
}

template <typename T>
void GraphT<T>::forward(int lo, int hi) {
  if (hi < 0) hi = node_count() - 1;
  for (int id = lo; id <= hi; ++id) {
    forward_node(id);
    if (node(id).op != OpKind::IntInput) check_finite(id);
  }
}

template <typename T>
void GraphT<T>::forward_node(int id) {
  Node& n = mut(id);
  auto in = [&](size_t i) -> const Node& { return node(n.inputs[i]); };

  switch (n.op) {
    case OpKind::Input:
      if (n.value.data.empty()) shape_error(n.name, "input was never set");
      break;
    case OpKind::IntInput:
      if (n.ivalue.data.empty()) shape_error(n.name, "int input was never set");
      break;
    case OpKind::Param:
    case OpKind::Const:
      break;

    case OpKind::EmbeddingLookup: {
      const auto& table = in(0).value;
      const auto& ids = in(1).ivalue;
      if (table.rank() != 2) shape_error(n.name, "table must be rank 2");
      const int64_t vocab = table.dim(0), dim = table.dim(1);
      for (int32_t idv : ids.data) {
        if (idv < 0 || idv >= vocab) {
          shape_error(n.name, "id " + std::to_string(idv) + " out of range [0," +
                                  std::to_string(vocab) + ")");
        }
      }
      Shape out_shape = ids.shape;
      out_shape.push_back(dim);
      n.value = TensorT<T>(out_shape);
      kernels::embedding_forward(table.ptr(), vocab, dim, ids.ptr(), ids.size(), n.value.ptr());
      break;
    }

    case OpKind::Conv1d: {
      const auto& x = in(0).value;
      const auto& w = in(1).value;
      const auto& b = in(2).value;
      const auto& valid = in(3).ivalue;
      if (x.rank() != 3 || w.rank() != 3) shape_error(n.name, "conv1d expects x (B,T,D), w (K,D,C)");
      const int64_t batch = x.dim(0), t_in = x.dim(1), d_in = x.dim(2);
      const int64_t k = w.dim(0), c_out = w.dim(2);
      if (w.dim(1) != d_in) shape_error(n.name, "kernel depth " + std::to_string(w.dim(1)) +
                                                    " != input depth " + std::to_string(d_in));
      if (b.size() != c_out) shape_error(n.name, "bias size mismatch");
      if (t_in < k) shape_error(n.name, "sequence shorter than kernel");
      if (valid.size() != batch) shape_error(n.name, "valid-length vector must have B entries");
      for (int32_t v : valid.data) {
        if (v < 1) shape_error(n.name, "valid lengths must be >= 1");
      }
      n.value = TensorT<T>({batch, t_in - k + 1, c_out});
      kernels::conv1d_forward(x.ptr(), batch, t_in, d_in, w.ptr(), k, c_out, b.ptr(),
                              valid.ptr(), n.value.ptr());
      break;
    }

    case OpKind::MaxOverTime: {
      const auto& x = in(0).value;
      const auto& valid = in(1).ivalue;
      if (x.rank() != 3) shape_error(n.name, "max_over_time expects (B,T,C)");
      const int64_t batch = x.dim(0), t_win = x.dim(1), channels = x.dim(2);
      if (valid.size() != batch) shape_error(n.name, "valid-length vector must have B entries");
      n.value = TensorT<T>({batch, channels});
      n.iscratch = IntTensor({batch, channels});
      kernels::maxpool_time_forward(x.ptr(), batch, t_win, channels, valid.ptr(),
                                    n.value.ptr(), n.iscratch.ptr());
      break;
    }

    case OpKind::Dense: {
      const auto& x = in(0).value;
      const auto& w = in(1).value;
      const auto& b = in(2).value;
      if (x.rank() != 2 || w.rank() != 2) shape_error(n.name, "dense expects x (B,I), w (I,O)");
      if (x.dim(1) != w.dim(0)) {
        shape_error(n.name, "x depth " + std::to_string(x.dim(1)) + " != w rows " +
                                std::to_string(w.dim(0)));
      }
      if (b.size() != w.dim(1)) shape_error(n.name, "bias size mismatch");
      n.value = TensorT<T>({x.dim(0), w.dim(1)});
      kernels::dense_forward(x.ptr(), x.dim(0), x.dim(1), w.ptr(), w.dim(1), b.ptr(),
                             n.value.ptr());
      break;
    }

    case OpKind::Relu: {
      const auto& x = in(0).value;
      n.value = TensorT<T>(x.shape);
      for (int64_t i = 0; i < x.size(); ++i) n.value.at(i) = x.at(i) > 0 ? x.at(i) : T(0);
      break;
    }

    case OpKind::Concat: {
      const auto& a = in(0).value;
      const auto& b = in(1).value;
      if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != b.dim(0)) {
        shape_error(n.name, "concat expects two rank-2 tensors with equal row counts");
      }
      const int64_t rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
      n.value = TensorT<T>({rows, ca + cb});
      for (int64_t r = 0; r < rows; ++r) {
        std::copy_n(a.ptr() + r * ca, ca, n.value.ptr() + r * (ca + cb));
        std::copy_n(b.ptr() + r * cb, cb, n.value.ptr() + r * (ca + cb) + ca);
      }
      break;
    }

    case OpKind::L2Normalize: {
      const auto& x = in(0).value;
      if (x.rank() != 2) shape_error(n.name, "l2_normalize expects rank 2");
      n.value = TensorT<T>(x.shape);
      kernels::l2norm_rows_forward(x.ptr(), x.dim(0), x.dim(1), n.value.ptr());
      break;
    }

    case OpKind::RowDot: {
      const auto& a = in(0).value;
      const auto& b = in(1).value;
      if (a.rank() != 2 || a.shape != b.shape) {
        shape_error(n.name, "row_dot expects two equal rank-2 tensors");
      }
      const int64_t rows = a.dim(0), dim = a.dim(1);
      n.value = TensorT<T>({rows});
      for (int64_t r = 0; r < rows; ++r) {
        T acc = 0;
        for (int64_t d = 0; d < dim; ++d) acc += a.at(r, d) * b.at(r, d);
        n.value.at(r) = acc;
      }
      break;
    }

    case OpKind::SoftmaxXent: {
      const auto& logits = in(0).value;
      const auto& labels = in(1).ivalue;
      if (logits.rank() != 2) shape_error(n.name, "softmax_xent expects (B,L) logits");
      const int64_t rows = logits.dim(0), classes = logits.dim(1);
      if (labels.size() != rows) shape_error(n.name, "labels must have B entries");
      for (int32_t l : labels.data) {
        if (l < 0 || l >= classes) shape_error(n.name, "label out of range");
      }
      n.value = TensorT<T>({rows});
      n.scratch = TensorT<T>(logits.shape);  // softmax probabilities
      for (int64_t r = 0; r < rows; ++r) {
        const T* lrow = logits.ptr() + r * classes;
        T mx = lrow[0];
        for (int64_t c = 1; c < classes; ++c) mx = std::max(mx, lrow[c]);
        T sum = 0;
        T* prow = n.scratch.ptr() + r * classes;
        for (int64_t c = 0; c < classes; ++c) {
          prow[c] = std::exp(lrow[c] - mx);
          sum += prow[c];
        }
        for (int64_t c = 0; c < classes; ++c) prow[c] /= sum;
        const T lse = std::log(sum) + mx;
        n.value.at(r) = lse - lrow[labels.data[static_cast<size_t>(r)]];
      }
      break;
    }

    case OpKind::Mean: {
      const auto& x = in(0).value;
      if (x.size() == 0) shape_error(n.name, "mean of an empty tensor");
      T acc = 0;
      for (int64_t i = 0; i < x.size(); ++i) acc += x.at(i);
      n.value = TensorT<T>(Shape{});
      n.value.at(0) = acc / static_cast<T>(x.size());
      break;
    }

    case OpKind::Add:
    case OpKind::Sub: {
      const auto& a = in(0).value;
      const auto& b = in(1).value;
      if (a.shape != b.shape) shape_error(n.name, "shape mismatch " + shape_str(a.shape) +
                                                      " vs " + shape_str(b.shape));
      n.value = TensorT<T>(a.shape);
      if (n.op == OpKind::Add) {
        for (int64_t i = 0; i < a.size(); ++i) n.value.at(i) = a.at(i) + b.at(i);
      } else {
        for (int64_t i = 0; i < a.size(); ++i) n.value.at(i) = a.at(i) - b.at(i);
      }
      break;
    }

    case OpKind::AddScalar: {
      const auto& x = in(0).value;
      n.value = TensorT<T>(x.shape);
      const T c = static_cast<T>(n.attr);
      for (int64_t i = 0; i < x.size(); ++i) n.value.at(i) = x.at(i) + c;
      break;
    }

    case OpKind::Scale: {
      const auto& x = in(0).value;
      n.value = TensorT<T>(x.shape);
      const T c = static_cast<T>(n.attr);
      for (int64_t i = 0; i < x.size(); ++i) n.value.at(i) = x.at(i) * c;
      break;
    }
  }
}

template <typename T>
void GraphT<T>::backward(int loss) {
  if (loss < 0 || loss >= node_count()) throw ValidationError("backward: bad loss node");
  if (node(loss).value.size() != 1) {
    throw ValidationError("backward: loss node '" + node(loss).name + "' is not scalar");
  }
  for (auto& n : nodes_) {
    n.grad = TensorT<T>(n.value.shape);  // zeroed
  }
  mut(loss).grad.at(0) = T(1);
  for (int id = loss; id >= 0; --id) backward_node(id);
}

template <typename T>
void GraphT<T>::backward_node(int id) {
  Node& n = mut(id);
  const auto& dy = n.grad;
  auto gin = [&](size_t i) -> TensorT<T>& { return mut(n.inputs[i]).grad; };
  auto vin = [&](size_t i) -> const TensorT<T>& { return node(n.inputs[i]).value; };

  switch (n.op) {
    case OpKind::Input:
    case OpKind::IntInput:
    case OpKind::Param:
    case OpKind::Const:
      break;

    case OpKind::EmbeddingLookup: {
      const auto& ids = node(n.inputs[1]).ivalue;
      const int64_t dim = vin(0).dim(1);
      kernels::embedding_backward(dy.ptr(), ids.ptr(), ids.size(), dim, gin(0).ptr());
      break;
    }

    case OpKind::Conv1d: {
      const auto& x = vin(0);
      const auto& w = vin(1);
      const auto& valid = node(n.inputs[3]).ivalue;
      kernels::conv1d_backward(x.ptr(), w.ptr(), dy.ptr(), x.dim(0), x.dim(1), x.dim(2),
                               w.dim(0), w.dim(2), valid.ptr(), gin(0).ptr(), gin(1).ptr(),
                               gin(2).ptr());
      break;
    }

    case OpKind::MaxOverTime: {
      const auto& x = vin(0);
      kernels::maxpool_time_backward(dy.ptr(), n.iscratch.ptr(), x.dim(0), x.dim(1), x.dim(2),
                                     gin(0).ptr());
      break;
    }

    case OpKind::Dense: {
      const auto& x = vin(0);
      const auto& w = vin(1);
      kernels::dense_backward(x.ptr(), w.ptr(), dy.ptr(), x.dim(0), x.dim(1), w.dim(1),
                              gin(0).ptr(), gin(1).ptr(), gin(2).ptr());
      break;
    }

    case OpKind::Relu: {
      const auto& x = vin(0);
      auto& dx = gin(0);
      for (int64_t i = 0; i < x.size(); ++i) {
        if (x.at(i) > 0) dx.at(i) += dy.at(i);
      }
      break;
    }

    case OpKind::Concat: {
      auto& da = gin(0);
      auto& db = gin(1);
      const int64_t rows = da.dim(0), ca = da.dim(1), cb = db.dim(1);
      for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < ca; ++c) da.at(r, c) += dy.at(r, c);
        for (int64_t c = 0; c < cb; ++c) db.at(r, c) += dy.at(r, ca + c);
      }
      break;
    }

    case OpKind::L2Normalize: {
      const auto& x = vin(0);
      kernels::l2norm_rows_backward(x.ptr(), dy.ptr(), x.dim(0), x.dim(1), gin(0).ptr());
      break;
    }

    case OpKind::RowDot: {
      const auto& a = vin(0);
      const auto& b = vin(1);
      auto& da = gin(0);
      auto& db = gin(1);
      const int64_t rows = a.dim(0), dim = a.dim(1);
      for (int64_t r = 0; r < rows; ++r) {
        const T g = dy.at(r);
        for (int64_t d = 0; d < dim; ++d) {
          da.at(r, d) += g * b.at(r, d);
          db.at(r, d) += g * a.at(r, d);
        }
      }
      break;
    }

    case OpKind::SoftmaxXent: {
      const auto& labels = node(n.inputs[1]).ivalue;
      auto& dlogits = gin(0);
      const int64_t rows = dlogits.dim(0), classes = dlogits.dim(1);
      for (int64_t r = 0; r < rows; ++r) {
        const T g = dy.at(r);
        const T* prow = n.scratch.ptr() + r * classes;
        T* drow = dlogits.ptr() + r * classes;
        for (int64_t c = 0; c < classes; ++c) drow[c] += g * prow[c];
        drow[labels.data[static_cast<size_t>(r)]] -= g;
      }
      break;
    }

    case OpKind::Mean: {
      auto& dx = gin(0);
      const T g = dy.at(0) / static_cast<T>(dx.size());
      for (int64_t i = 0; i < dx.size(); ++i) dx.at(i) += g;
      break;
    }

    case OpKind::Add: {
      auto& da = gin(0);
      auto& db = gin(1);
      for (int64_t i = 0; i < dy.size(); ++i) {
        da.at(i) += dy.at(i);
        db.at(i) += dy.at(i);
      }
      break;
    }

    case OpKind::Sub: {
      auto& da = gin(0);
      auto& db = gin(1);
      for (int64_t i = 0; i < dy.size(); ++i) {
        da.at(i) += dy.at(i);
        db.at(i) -= dy.at(i);
      }
      break;
    }

    case OpKind::AddScalar: {
      auto& dx = gin(0);
      for (int64_t i = 0; i < dy.size(); ++i) dx.at(i) += dy.at(i);
      break;
    }

    case OpKind::Scale: {
      auto& dx = gin(0);
      const T c = static_cast<T>(n.attr);
      for (int64_t i = 0; i < dy.size(); ++i) dx.at(i) += c * dy.at(i);
      break;
    }
  }
}

template <typename T>
std::unordered_map<std::string, TensorT<T>> GraphT<T>::evaluate(
    const std::unordered_map<std::string, TensorT<T>>& inputs,
    const std::unordered_map<std::string, IntTensor>& int_inputs,
    const std::vector<std::string>& outputs) {
  for (const auto& [name, v] : inputs) set_input(name, v);
  for (const auto& [name, v] : int_inputs) set_int_input(name, v);
  forward();
  std::unordered_map<std::string, TensorT<T>> out;
  for (const auto& name : outputs) out.emplace(name, value(node_id(name)));
  return out;
}

template <typename T>
std::unordered_map<std::string, TensorT<T>> GraphT<T>::gradients(
    int loss, const std::vector<std::string>& wrt) {
  forward();
  backward(loss);
  std::unordered_map<std::string, TensorT<T>> out;
  for (const auto& name : wrt) out.emplace(name, grad(node_id(name)));
  return out;
}

template class GraphT<float>;
template class GraphT<double>;

double grad_check(GraphT<double>& g, int loss, double h) {
  if (h < 1e-6 || h > 1e-3) throw ValidationError("grad_check: h must be in [1e-6, 1e-3]");
  g.forward();
  g.backward(loss);

  std::vector<Tensor64> analytic;
  for (int id : g.param_ids()) analytic.push_back(g.grad(id));

  double max_rel = 0.0;
  for (size_t p = 0; p < g.param_ids().size(); ++p) {
    const int id = g.param_ids()[p];
    Tensor64& theta = g.param_value(g.node(id).name);
    for (int64_t i = 0; i < theta.size(); ++i) {
      const double saved = theta.at(i);
      theta.at(i) = saved + h;
      g.forward();
      const double f_plus = g.value(loss).at(0);
      theta.at(i) = saved - h;
      g.forward();
      const double f_minus = g.value(loss).at(0);
      theta.at(i) = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double rel = std::abs(analytic[p].at(i) - numeric) / std::max(1.0, std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
  }
  g.forward();  // restore values at the unperturbed point
  return max_rel;
}

double grad_check(GraphT<double>& g, int loss,
                  const std::unordered_map<std::string, Tensor64>& point, double h) {
  for (const auto& [name, v] : point) {
    if (g.node(g.node_id(name)).op == OpKind::Param) {
      g.param_value(name) = v;
    } else {
      g.set_input(name, v);
    }
  }
  return grad_check(g, loss, h);
}

}  // namespace geat
