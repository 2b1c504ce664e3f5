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

#include <cmath>
#include <limits>

#include "geat/graph.hpp"
#include "geat/optimizer.hpp"
#include "geat/rng.hpp"

using namespace geat;

namespace {

Tensor64 random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor64 t(std::move(shape));
  for (auto& v : t.data) v = rng.normal() * scale;
  return t;
}

IntTensor random_ids(Shape shape, int64_t vocab, Rng& rng) {
  IntTensor t(std::move(shape));
  for (auto& v : t.data) v = static_cast<int32_t>(rng.bounded(static_cast<uint64_t>(vocab)));
  return t;
}

}  // namespace

TEST_CASE("dense with identity weights reproduces its input") {
  Graph64 g;
  const int x = g.input("x");
  Tensor64 w({2, 2});
  w.at(0, 0) = 1;
  w.at(1, 1) = 1;
  const int y = g.dense(x, g.param("w", w), g.param("b", Tensor64({2})));
  g.set_input("x", Tensor64({3, 2}, {1, 2, 3, 4, 5, 6}));
  g.forward();
  CHECK(g.value(y).data == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("relu clamps negatives") {
  Graph64 g;
  const int x = g.input("x");
  const int y = g.relu(x);
  g.set_input("x", Tensor64({2}, {-1, 2}));
  g.forward();
  CHECK(g.value(y).data == std::vector<double>{0, 2});
}

TEST_CASE("masked max pooling matches a brute-force max over valid windows") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t b = 1 + static_cast<int64_t>(rng.bounded(4));
    const int64_t t = 2 + static_cast<int64_t>(rng.bounded(10));
    const int64_t c = 1 + static_cast<int64_t>(rng.bounded(6));
    Graph64 g;
    const int x = g.input("x");
    const int valid = g.int_input("valid");
    const int y = g.max_over_time(x, valid);

    const Tensor64 xv = random_tensor({b, t, c}, rng);
    IntTensor lens({b});
    for (auto& v : lens.data) v = 1 + static_cast<int32_t>(rng.bounded(static_cast<uint64_t>(t + 2)));
    g.set_input("x", xv);
    g.set_int_input("valid", lens);
    g.forward();

    for (int64_t i = 0; i < b; ++i) {
      const int64_t lim = std::min<int64_t>(lens.data[static_cast<size_t>(i)], t);
      for (int64_t ch = 0; ch < c; ++ch) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int64_t w = 0; w < lim; ++w) mx = std::max(mx, xv.at(i, w, ch));
        CHECK(g.value(y).at(i, ch) == mx);
      }
    }
  }
}

TEST_CASE("gradient of sum of squares is 2x") {
  Graph64 g;
  const int x = g.param("x", Tensor64({1, 2}, {1, 2}));
  const int y = g.row_dot(x, x);
  const int loss = g.mean(y);
  const auto grads = g.gradients(loss, {"x"});
  CHECK(grads.at("x").at(0) == doctest::Approx(2.0));
  CHECK(grads.at("x").at(1) == doctest::Approx(4.0));
}

TEST_CASE("unused parameters get zero gradients of matching shape") {
  Graph64 g;
  const int x = g.param("x", Tensor64({1, 2}, {1, 2}));
  g.param("unused", Tensor64({3, 4}));
  const int loss = g.mean(g.row_dot(x, x));
  const auto grads = g.gradients(loss, {"unused"});
  CHECK(grads.at("unused").shape == Shape{3, 4});
  for (double v : grads.at("unused").data) CHECK(v == 0.0);
}

TEST_CASE("softmax cross-entropy equals -log softmax[label]") {
  Rng rng(5);
  Graph64 g;
  const int logits = g.param("logits", random_tensor({4, 7}, rng));
  const int labels = g.int_input("labels");
  const int loss_vec = g.softmax_xent(logits, labels);
  g.set_int_input("labels", random_ids({4}, 7, rng));
  g.forward();

  const auto& lv = g.value(g.node_id("logits"));
  const auto& labs = g.node(labels).ivalue;
  for (int64_t r = 0; r < 4; ++r) {
    double denom = 0;
    for (int64_t c = 0; c < 7; ++c) denom += std::exp(lv.at(r, c));
    const double expected = -std::log(std::exp(lv.at(r, labs.data[static_cast<size_t>(r)])) / denom);
    CHECK(g.value(loss_vec).at(r) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("l2 normalize produces unit rows") {
  Rng rng(9);
  Graph64 g;
  const int x = g.input("x");
  const int y = g.l2_normalize(x);
  g.set_input("x", random_tensor({5, 8}, rng, 3.0));
  g.forward();
  for (int64_t r = 0; r < 5; ++r) {
    double s = 0;
    for (int64_t d = 0; d < 8; ++d) s += g.value(y).at(r, d) * g.value(y).at(r, d);
    CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("grad check: dense + relu + mean") {
  Rng rng(21);
  Graph64 g;
  const int x = g.input("x");
  const int w = g.param("w", random_tensor({6, 4}, rng, 0.5));
  const int b = g.param("b", random_tensor({4}, rng, 0.1));
  const int loss = g.mean(g.relu(g.dense(x, w, b)));
  g.set_input("x", random_tensor({3, 6}, rng));
  CHECK(grad_check(g, loss, 1e-5) < 1e-5);
}

TEST_CASE("grad check: embedding + conv bank + max pool") {
  Rng rng(22);
  Graph64 g;
  const int table = g.param("table", random_tensor({9, 5}, rng, 0.5));
  const int ids = g.int_input("ids");
  const int valid = g.int_input("valid");
  const int emb = g.embedding_lookup(table, ids);
  const int w3 = g.param("w3", random_tensor({3, 5, 4}, rng, 0.4));
  const int b3 = g.param("b3", random_tensor({4}, rng, 0.1));
  const int w2 = g.param("w2", random_tensor({2, 5, 4}, rng, 0.4));
  const int b2 = g.param("b2", random_tensor({4}, rng, 0.1));
  const int pooled = g.concat(g.max_over_time(g.conv1d(emb, w3, b3, valid), valid),
                              g.max_over_time(g.conv1d(emb, w2, b2, valid), valid));
  const int loss = g.mean(pooled);

  g.set_int_input("ids", random_ids({2, 7}, 9, rng));
  g.set_int_input("valid", IntTensor({2}, {5, 7}));
  CHECK(grad_check(g, loss, 1e-5) < 1e-5);
}

TEST_CASE("grad check: l2 normalize + row dot") {
  Rng rng(23);
  Graph64 g;
  const int a = g.param("a", random_tensor({4, 6}, rng));
  const int b = g.param("b", random_tensor({4, 6}, rng));
  const int loss = g.mean(g.row_dot(g.l2_normalize(a), g.l2_normalize(b)));
  CHECK(grad_check(g, loss, 1e-5) < 1e-5);
}

TEST_CASE("grad check: softmax cross-entropy") {
  Rng rng(24);
  Graph64 g;
  const int logits = g.param("logits", random_tensor({5, 6}, rng));
  const int labels = g.int_input("labels");
  const int loss = g.mean(g.softmax_xent(logits, labels));
  g.set_int_input("labels", random_ids({5}, 6, rng));
  CHECK(grad_check(g, loss, 1e-5) < 1e-5);
}

TEST_CASE("grad check accepts an explicit evaluation point") {
  Rng rng(25);
  Graph64 g;
  const int x = g.param("x", Tensor64({2, 3}));
  const int loss = g.mean(g.relu(x));
  const std::unordered_map<std::string, Tensor64> point{{"x", random_tensor({2, 3}, rng)}};
  CHECK(grad_check(g, loss, point, 1e-5) < 1e-5);
  CHECK_THROWS_AS(grad_check(g, loss, 1e-2), ValidationError);  // h out of range
}

TEST_CASE("evaluate reports shape mismatches with the node name") {
  Graph64 g;
  const int x = g.input("x");
  const int w = g.param("w", Tensor64({3, 2}));
  const int y = g.dense(x, w, g.param("b", Tensor64({2})));
  g.name_node(y, "proj");
  g.set_input("x", Tensor64({1, 5}));
  CHECK_THROWS_WITH_AS(g.forward(), doctest::Contains("proj"), ValidationError);
}

TEST_CASE("evaluate flags non-finite values as numeric errors") {
  Graph64 g;
  const int x = g.input("x");
  g.relu(x);
  g.set_input("x", Tensor64({2}, {1.0, std::numeric_limits<double>::infinity()}));
  CHECK_THROWS_AS(g.forward(), NumericError);
}

TEST_CASE("backward requires a scalar loss") {
  Graph64 g;
  const int x = g.param("x", Tensor64({2, 2}, {1, 2, 3, 4}));
  const int y = g.relu(x);
  g.forward();
  CHECK_THROWS_AS(g.backward(y), ValidationError);
}

TEST_CASE("named evaluate returns the requested outputs") {
  Graph64 g;
  const int x = g.input("x");
  const int y = g.relu(x);
  g.name_node(y, "out");
  const auto outs = g.evaluate({{"x", Tensor64({2}, {-3, 4})}}, {}, {"out"});
  CHECK(outs.at("out").data == std::vector<double>{0, 4});
}

TEST_CASE("adam leaves parameters unchanged under zero gradients") {
  Tensor64 p({3}, {1, 2, 3});
  const Tensor64 g0({3});
  AdamStateT<double> state;
  adam_step<double>({&p}, {&g0}, state);
  CHECK(p.data == std::vector<double>{1, 2, 3});
}

TEST_CASE("first adam step moves a scalar by about lr") {
  Tensor64 p({1}, {1.0});
  const Tensor64 g1({1}, {1.0});
  AdamStateT<double> state;
  state.config.lr = 0.1;
  adam_step<double>({&p}, {&g1}, state);
  CHECK(p.at(0) == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("adam is deterministic and validates shapes") {
  Rng rng(31);
  Tensor64 p1 = random_tensor({4, 4}, rng), p2 = p1;
  const Tensor64 g1 = random_tensor({4, 4}, rng);
  AdamStateT<double> s1, s2;
  for (int i = 0; i < 5; ++i) {
    adam_step<double>({&p1}, {&g1}, s1);
    adam_step<double>({&p2}, {&g1}, s2);
  }
  CHECK(p1.data == p2.data);

  const Tensor64 bad({2, 2});
  CHECK_THROWS_AS((adam_step<double>({&p1}, {&bad}, s1)), ValidationError);
}
