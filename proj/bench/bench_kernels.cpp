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

// Reference vs OpenMP probe kernels. Run with e.g. OMP_NUM_THREADS=4.
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "roleprobe/kernels.hpp"
#include "roleprobe/random.hpp"

namespace {

using namespace roleprobe;

struct Fixture {
  ProbeModel model;
  Matrix xs;
  std::vector<int> labels;
  std::vector<std::size_t> rows;
  std::vector<double> grad;
  std::vector<double> probs;

  Fixture(std::size_t n, std::size_t d) : model(ProbeModel::initialized(d, 1)), xs(n, d), labels(n), rows(n) {
    Rng rng(2);
    for (double& v : xs.data) v = rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
    std::iota(rows.begin(), rows.end(), 0);
    grad.resize(model.parameters().size());
    probs.resize(n);
  }
};

template <bool kParallel>
void BM_LossAndGradient(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    const double loss = kParallel
                            ? kernels::parallel::loss_and_gradient(f.model, f.xs, f.labels, f.rows, f.grad)
                            : kernels::reference::loss_and_gradient(f.model, f.xs, f.labels, f.rows, f.grad);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_Forward(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    if (kParallel) {
      kernels::parallel::forward_batch(f.model, f.xs, f.probs);
    } else {
      kernels::reference::forward_batch(f.model, f.xs, f.probs);
    }
    benchmark::DoNotOptimize(f.probs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// 32 is a training mini-batch, 1728 a full balanced set; 16 is the mock
// width and 768 a BERT-base hidden size.
const std::vector<std::vector<std::int64_t>> kShapes{{32, 1728, 8192}, {16, 768}};

BENCHMARK(BM_LossAndGradient<false>)->ArgsProduct(kShapes);
BENCHMARK(BM_LossAndGradient<true>)->ArgsProduct(kShapes);
BENCHMARK(BM_Forward<false>)->ArgsProduct(kShapes);
BENCHMARK(BM_Forward<true>)->ArgsProduct(kShapes);

}  // namespace

BENCHMARK_MAIN();
