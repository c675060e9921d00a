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

#include "roleprobe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "roleprobe/error.hpp"

namespace roleprobe::kernels {
namespace {

void check_shapes(const ProbeModel& m, const Matrix& xs, std::span<const int> labels,
                  std::span<const std::size_t> rows, std::span<double> gradient) {
  if (xs.cols != m.dim()) {
    throw ShapeError("probe expects dim " + std::to_string(m.dim()) + ", got " +
                     std::to_string(xs.cols));
  }
  if (labels.size() != xs.rows) throw ShapeError("labels and features disagree in length");
  for (std::size_t r : rows) {
    if (r >= xs.rows) throw ShapeError("row index out of range");
  }
  if (!gradient.empty() && gradient.size() != m.parameters().size()) {
    throw ShapeError("gradient buffer has wrong size");
  }
}

}  // namespace

namespace reference {

void forward_batch(const ProbeModel& m, const Matrix& xs, std::span<double> probabilities) {
  if (xs.cols != m.dim()) throw ShapeError("probe input has wrong dimension");
  if (probabilities.size() != xs.rows) throw ShapeError("output buffer has wrong size");
  const std::size_t d = m.dim();
  for (std::size_t r = 0; r < xs.rows; ++r) {
    const auto x = xs.row(r);
    double z = m.b2();
    for (std::size_t u = 0; u < kHiddenUnits; ++u) {
      double h = m.b1()[u];
      for (std::size_t j = 0; j < d; ++j) h += m.w1()[u * d + j] * x[j];
      z += m.w2()[u] * std::max(h, 0.0);
    }
    probabilities[r] = std::clamp(sigmoid(z), std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  }
}

double loss_and_gradient(const ProbeModel& m, const Matrix& xs, std::span<const int> labels,
                         std::span<const std::size_t> rows, std::span<double> gradient) {
  check_shapes(m, xs, labels, rows, gradient);
  const std::size_t d = m.dim();
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double total = 0.0;
  std::vector<double> hidden(kHiddenUnits);
  for (std::size_t r : rows) {
    const auto x = xs.row(r);
    double z = m.b2();
    for (std::size_t u = 0; u < kHiddenUnits; ++u) {
      double h = m.b1()[u];
      for (std::size_t j = 0; j < d; ++j) h += m.w1()[u * d + j] * x[j];
      hidden[u] = h;
      z += m.w2()[u] * std::max(h, 0.0);
    }
    const int y = labels[r];
    total += bce_from_logit(z, y);
    if (gradient.empty()) continue;
    const double g = sigmoid(z) - y;
    const std::size_t b1_at = kHiddenUnits * d;
    const std::size_t w2_at = b1_at + kHiddenUnits;
    gradient[w2_at + kHiddenUnits] += g;
    for (std::size_t u = 0; u < kHiddenUnits; ++u) {
      const double active = hidden[u] > 0.0 ? 1.0 : 0.0;
      gradient[w2_at + u] += g * std::max(hidden[u], 0.0);
      gradient[b1_at + u] += g * m.w2()[u] * active;
      for (std::size_t j = 0; j < d; ++j) gradient[u * d + j] += g * m.w2()[u] * active * x[j];
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  for (double& g : gradient) g /= n;
  return total / n;
}

}  // namespace reference

namespace parallel {

void forward_batch(const ProbeModel& m, const Matrix& xs, std::span<double> probabilities) {
  if (xs.cols != m.dim()) throw ShapeError("probe input has wrong dimension");
  if (probabilities.size() != xs.rows) throw ShapeError("output buffer has wrong size");
  const double lo = std::nextafter(0.0, 1.0);
  const double hi = std::nextafter(1.0, 0.0);
  const std::size_t d = m.dim();
  const double* w1 = m.w1().data();
  const double* b1 = m.b1().data();
  const double* w2 = m.w2().data();
#pragma omp parallel for schedule(static) if (xs.rows >= kMinParallelRows)
  for (std::size_t r = 0; r < xs.rows; ++r) {
    const double* x = xs.row(r).data();
    double z = m.b2();
    for (std::size_t u = 0; u < kHiddenUnits; ++u) {
      const double* row = w1 + u * d;
      double h = b1[u];
      for (std::size_t j = 0; j < d; ++j) h += row[j] * x[j];
      z += w2[u] * std::max(h, 0.0);
    }
    probabilities[r] = std::clamp(sigmoid(z), lo, hi);
  }
}

double loss_and_gradient(const ProbeModel& m, const Matrix& xs, std::span<const int> labels,
                         std::span<const std::size_t> rows, std::span<double> gradient) {
  check_shapes(m, xs, labels, rows, gradient);
  const std::size_t n = rows.size();
  const std::size_t d = m.dim();
  const bool parallel = n >= kMinParallelRows;
  const auto w1 = m.w1();
  const auto b1 = m.b1();
  const auto w2 = m.w2();

  // Pass 1, over rows: pre-activations (unit-major), loss and output error.
  std::vector<double> pre(kHiddenUnits * n);
  std::vector<double> err(n);
  std::vector<double> loss(n);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = xs.row(rows[i]);
    double z = m.b2();
    for (std::size_t u = 0; u < kHiddenUnits; ++u) {
      const double* row = w1.data() + u * d;
      double a = b1[u];
      for (std::size_t j = 0; j < d; ++j) a += row[j] * x[j];
      pre[u * n + i] = a;
      z += w2[u] * std::max(a, 0.0);
    }
    const int y = labels[rows[i]];
    loss[i] = bce_from_logit(z, y);
    err[i] = sigmoid(z) - y;
  }
  double total = 0.0;
  for (double l : loss) total += l;
  const double count = static_cast<double>(std::max<std::size_t>(n, 1));
  if (gradient.empty()) return total / count;

  // Pass 2, over hidden units: every parameter sums its rows in order, the
  // same order as the reference kernel, whatever the thread count.
  double* g_w1 = gradient.data();
  double* g_b1 = g_w1 + kHiddenUnits * d;
  double* g_w2 = g_b1 + kHiddenUnits;
  double* g_b2 = g_w2 + kHiddenUnits;
  std::fill(gradient.begin(), gradient.end(), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t u = 0; u < kHiddenUnits; ++u) {
    double* row = g_w1 + u * d;
    const double* h_u = pre.data() + u * n;
    double gw2 = 0.0;
    double gb1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // Branch-free like the reference; inactive units add signed zeros.
      const double h = h_u[i];
      const double active = h > 0.0 ? 1.0 : 0.0;
      gw2 += err[i] * std::max(h, 0.0);
      const double delta = err[i] * w2[u] * active;
      gb1 += delta;
      const double* x = xs.row(rows[i]).data();
      for (std::size_t j = 0; j < d; ++j) row[j] += delta * x[j];
    }
    g_w2[u] = gw2;
    g_b1[u] = gb1;
  }
  for (double e : err) *g_b2 += e;
  for (double& g : gradient) g /= count;
  return total / count;
}

}  // namespace parallel

}  // namespace roleprobe::kernels
