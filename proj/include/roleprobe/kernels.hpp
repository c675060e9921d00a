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

// Batch kernels behind the probe. `reference` is the plain serial
// formulation kept as a test oracle; `parallel` is the OpenMP version used
// for training and evaluation.
//
// The parallel gradient runs rows first and then hidden units, each unit
// summing its parameters over rows in order. That is the reference order,
// so the two kernels agree bit for bit at any thread count.

#ifndef ROLEPROBE_KERNELS_HPP_
#define ROLEPROBE_KERNELS_HPP_

#include <cstddef>
#include <span>

#include "roleprobe/matrix.hpp"
#include "roleprobe/probe.hpp"

namespace roleprobe::kernels {

namespace reference {

void forward_batch(const ProbeModel& m, const Matrix& xs, std::span<double> probabilities);

// Mean BCE over `rows` of (xs, labels). When `gradient` is non-empty it
// receives the mean gradient (same layout as the model parameters).
double loss_and_gradient(const ProbeModel& m, const Matrix& xs, std::span<const int> labels,
                         std::span<const std::size_t> rows, std::span<double> gradient);

}  // namespace reference

namespace parallel {

// Below this many rows the loops run on the calling thread only.
inline constexpr std::size_t kMinParallelRows = 256;

void forward_batch(const ProbeModel& m, const Matrix& xs, std::span<double> probabilities);

double loss_and_gradient(const ProbeModel& m, const Matrix& xs, std::span<const int> labels,
                         std::span<const std::size_t> rows, std::span<double> gradient);

}  // namespace parallel

}  // namespace roleprobe::kernels

#endif  // ROLEPROBE_KERNELS_HPP_
