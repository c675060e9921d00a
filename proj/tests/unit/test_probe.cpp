/* Copyright 2026 The roleprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <omp.h>

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "roleprobe/error.hpp"
#include "roleprobe/kernels.hpp"
#include "roleprobe/probe.hpp"
#include "roleprobe/random.hpp"
#include "test_util.hpp"

using namespace roleprobe;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (double& v : m.data) v = 2.0 * rng.uniform() - 1.0;
  return m;
}

// Points labeled by the sign of x0 + 0.5 x1, kept away from the boundary.
LabeledSet separable(std::size_t n, std::size_t d, std::uint64_t seed) {
  LabeledSet s;
  s.features = Matrix(n, d);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = s.features.row(i);
    double margin = 0.0;
    do {
      for (double& v : row) v = 2.0 * rng.uniform() - 1.0;
      margin = row[0] + 0.5 * row[1];
    } while (std::abs(margin) < 0.2);
    s.labels.push_back(margin > 0 ? 1 : 0);
  }
  return s;
}

double accuracy(const ProbeModel& m, const LabeledSet& s) {
  const BatchPrediction p = predict_batch(m, s.features);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ok += (p.label[i] == Role::kSubject) == (s.labels[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("a zero model predicts one half") {
  const ProbeModel m(5);
  CHECK(m.parameters().size() == 64 * 5 + 64 + 64 + 1);
  const std::vector<double> x{1, -2, 3, 0.5, 9};
  CHECK(forward(m, x) == 0.5);
  CHECK_THROWS_AS(forward(m, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("hand-computed forward pass") {
  ProbeModel m(2);
  // unit 0: h = relu(x0 - x1 + 0.5), unit 1: h = relu(2 x1), weights 1.5 and -1, b2 = 0.25
  m.w1()[0] = 1.0;
  m.w1()[1] = -1.0;
  m.b1()[0] = 0.5;
  m.w1()[3] = 2.0;
  m.w2()[0] = 1.5;
  m.w2()[1] = -1.0;
  m.b2() = 0.25;
  const std::vector<double> x{0.3, 0.1};
  const double z = 0.25 + 1.5 * (0.3 - 0.1 + 0.5) - 1.0 * 0.2;
  CHECK(std::abs(logit(m, x) - z) < 1e-12);
  CHECK(std::abs(forward(m, x) - 1.0 / (1.0 + std::exp(-z))) < 1e-12);
  // Negative pre-activations contribute nothing.
  const std::vector<double> y{-1.0, 0.0};
  CHECK(std::abs(logit(m, y) - 0.25) < 1e-12);
}

TEST_CASE("probability is monotone in b2 and stays in the open interval") {
  ProbeModel m = ProbeModel::initialized(3, 1);
  const std::vector<double> x{0.2, -0.4, 0.9};
  double last = 0.0;
  for (double b = -50; b <= 50; b += 0.5) {
    m.b2() = b;
    const double p = forward(m, x);
    CHECK(p >= last);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    last = p;
  }
  m.b2() = 1e6;
  CHECK(forward(m, x) < 1.0);
  CHECK(std::isfinite(bce_from_logit(1e6, 0)));
  CHECK(bce_from_logit(1e6, 1) == 0.0);
}

TEST_CASE("Glorot bounds") {
  const ProbeModel m = ProbeModel::initialized(16, 9);
  const double a1 = std::sqrt(6.0 / 80.0);
  const double a2 = std::sqrt(6.0 / 65.0);
  for (double w : m.w1()) CHECK(std::abs(w) <= a1);
  for (double w : m.w2()) CHECK(std::abs(w) <= a2);
  for (double b : m.b1()) CHECK(b == 0.0);
  CHECK(m.b2() == 0.0);
  CHECK(ProbeModel::initialized(16, 9) == m);
  CHECK(ProbeModel::initialized(16, 10) != m);
}

TEST_CASE("gradient check") {
  Rng rng(42);
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t d = 4 + rng.below(61);
    const ProbeModel m = ProbeModel::initialized(d, rng.next());
    std::vector<double> x(d);
    for (double& v : x) v = 2.0 * rng.uniform() - 1.0;
    const int label = static_cast<int>(rng.below(2));
    CHECK(gradient_check(m, x, label, 1e-5) < 1e-4);
  }
}

TEST_CASE("b2 gradient of the zero model is one half minus the label") {
  const ProbeModel m(3);
  Matrix xs(1, 3);
  xs.data = {0.1, 0.2, 0.3};
  for (int label : {0, 1}) {
    const std::vector<int> labels{label};
    const std::vector<std::size_t> rows{0};
    std::vector<double> g(m.parameters().size());
    kernels::reference::loss_and_gradient(m, xs, labels, rows, g);
    CHECK(g.back() == 0.5 - label);
    kernels::parallel::loss_and_gradient(m, xs, labels, rows, g);
    CHECK(g.back() == 0.5 - label);
  }
}

TEST_CASE("a coarse step makes the gradient check worse") {
  const ProbeModel m = ProbeModel::initialized(8, 3);
  std::vector<double> x{0.5, -0.3, 0.8, 0.1, -0.9, 0.4, 0.2, -0.6};
  CHECK(gradient_check(m, x, 1, 1e-1) > gradient_check(m, x, 1, 1e-5));
}

TEST_CASE("training separates a separable set") {
  const LabeledSet s = separable(200, 4, 5);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.2;
  const TrainResult r = train(ProbeModel::initialized(4, 1), s, cfg);
  CHECK(accuracy(r.model, s) == 1.0);
  CHECK(r.loss_history.size() == 200);
  CHECK(r.loss_history.back() < r.initial_loss);
}

TEST_CASE("constant labels drive the probability toward the label") {
  LabeledSet s;
  s.features = random_matrix(64, 3, 8);
  s.labels.assign(64, 1);
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.learning_rate = 0.5;
  const TrainResult r = train(ProbeModel::initialized(3, 2), s, cfg);
  for (double p : predict_batch(r.model, s.features).probability) CHECK(p > 0.95);
}

TEST_CASE("duplicating every example with doubled batches changes nothing") {
  const LabeledSet s = separable(40, 3, 12);
  LabeledSet twice;
  twice.features = Matrix(80, 3);
  for (std::size_t i = 0; i < 40; ++i) {
    for (int k = 0; k < 2; ++k) {
      std::copy(s.features.row(i).begin(), s.features.row(i).end(), twice.features.row(2 * i + k).begin());
      twice.labels.push_back(s.labels[i]);
    }
  }
  TrainConfig a;
  a.epochs = 5;
  a.batch_size = 8;
  TrainConfig b = a;
  b.batch_size = 16;
  b.shuffle_block = 2;
  const ProbeModel init = ProbeModel::initialized(3, 4);
  const TrainResult ra = train(init, s, a);
  const TrainResult rb = train(init, twice, b);
  const auto pa = ra.model.parameters();
  const auto pb = rb.model.parameters();
  for (std::size_t k = 0; k < pa.size(); ++k) CHECK(std::abs(pa[k] - pb[k]) < 1e-9);
}

TEST_CASE("flipping labels and output weights mirrors the probability") {
  const LabeledSet s = separable(64, 3, 2);
  LabeledSet flipped = s;
  for (int& y : flipped.labels) y = 1 - y;
  ProbeModel init = ProbeModel::initialized(3, 6);
  ProbeModel mirror = init;
  for (double& w : mirror.w2()) w = -w;
  TrainConfig cfg;
  cfg.epochs = 10;
  const TrainResult a = train(init, s, cfg);
  const TrainResult b = train(mirror, flipped, cfg);
  const auto pa = predict_batch(a.model, s.features).probability;
  const auto pb = predict_batch(b.model, s.features).probability;
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(std::abs(pa[i] + pb[i] - 1.0) < 1e-9);
}

TEST_CASE("predict_batch edge cases") {
  ProbeModel m(2);
  CHECK(predict_batch(m, Matrix(0, 2)).probability.empty());
  Matrix one(1, 2);
  const BatchPrediction p = predict_batch(m, one);
  REQUIRE(p.label.size() == 1);
  CHECK(p.probability[0] == 0.5);
  CHECK(p.label[0] == Role::kObject);  // ties are objects
  m.b2() = 1e-9;
  CHECK(predict_batch(m, one).label[0] == Role::kSubject);
  CHECK_THROWS_AS(predict_batch(m, Matrix(3, 4)), ShapeError);
}

TEST_CASE("training argument validation") {
  const LabeledSet s = separable(10, 2, 1);
  const ProbeModel m(2);
  TrainConfig cfg;
  CHECK_THROWS_AS(train(m, LabeledSet{Matrix(0, 2), {}}, cfg), ConfigError);
  CHECK_THROWS_AS(train(ProbeModel(3), s, cfg), ShapeError);
  cfg.shuffle_block = 3;
  CHECK_THROWS_AS(train(m, s, cfg), ConfigError);
  cfg.shuffle_block = 1;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(m, s, cfg), ConfigError);
  cfg.learning_rate = 1e300;
  LabeledSet big = s;
  for (double& v : big.features.data) v *= 1e300;
  CHECK_THROWS_AS(train(ProbeModel::initialized(2, 1), big, cfg), TrainingDivergedError);
}

TEST_CASE("training is deterministic and seeds matter") {
  const LabeledSet s = separable(64, 4, 3);
  TrainConfig cfg;
  cfg.epochs = 3;
  const ProbeModel init = ProbeModel::initialized(4, 1);
  CHECK(train(init, s, cfg).model == train(init, s, cfg).model);
  TrainConfig other = cfg;
  other.seed = 1;
  CHECK(train(init, s, other).model != train(init, s, cfg).model);
}

TEST_CASE("save and load return the float32 model") {
  testing::TempDir dir("probe");
  ProbeModel m = ProbeModel::initialized(5, 77);
  m.layer_name = "3";
  m.b1()[1] = 0.1;  // not representable in float32
  save_probe(m, TrainConfig{}, dir.path() / "p");
  const ProbeModel back = load_probe(dir.path() / "p");
  CHECK(back == quantized(m));
  CHECK(back != m);
  CHECK(back.layer_name == "3");
  CHECK(back.seed == 77);
  std::filesystem::resize_file(dir.path() / "p.bin", 12);
  CHECK_THROWS_AS(load_probe(dir.path() / "p"), CorruptArchiveError);
  CHECK_THROWS_AS(load_probe(dir.path() / "nothing"), IoError);
}

TEST_CASE("reference and parallel kernels agree bit for bit") {
  const ProbeModel m = ProbeModel::initialized(12, 5);
  const Matrix xs = random_matrix(300, 12, 4);
  std::vector<int> labels(300);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3 == 0);
  std::vector<std::size_t> rows(300);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> ga(m.parameters().size()), gb(ga.size());
  const double la = kernels::reference::loss_and_gradient(m, xs, labels, rows, ga);
  const double lb = kernels::parallel::loss_and_gradient(m, xs, labels, rows, gb);
  CHECK(la == lb);
  CHECK(ga == gb);
  std::vector<double> pa(300), pb(300);
  kernels::reference::forward_batch(m, xs, pa);
  kernels::parallel::forward_batch(m, xs, pb);
  CHECK(pa == pb);
}

TEST_CASE("parallel gradient is bitwise independent of the thread count") {
  const ProbeModel m = ProbeModel::initialized(10, 8);
  const Matrix xs = random_matrix(777, 10, 9);
  std::vector<int> labels(777);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  std::vector<std::size_t> rows(777);
  std::iota(rows.begin(), rows.end(), 0);
  const int saved = omp_get_max_threads();
  std::vector<std::vector<double>> grads;
  std::vector<double> losses;
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    std::vector<double> g(m.parameters().size());
    losses.push_back(kernels::parallel::loss_and_gradient(m, xs, labels, rows, g));
    grads.push_back(std::move(g));
  }
  omp_set_num_threads(saved);
  for (std::size_t t = 1; t < grads.size(); ++t) {
    CHECK(grads[t] == grads[0]);
    CHECK(losses[t] == losses[0]);
  }
}
