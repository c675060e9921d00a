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

// Subject/object probe: p = sigmoid(w2 . relu(W1 x + b1) + b2), with 64
// hidden units, trained by plain mini-batch gradient descent on mean binary
// cross-entropy.

#ifndef ROLEPROBE_PROBE_HPP_
#define ROLEPROBE_PROBE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "roleprobe/clause.hpp"
#include "roleprobe/matrix.hpp"

namespace roleprobe {

inline constexpr std::size_t kHiddenUnits = 64;

// Parameters are stored flat in serialization order: W1 (row-major,
// kHiddenUnits x dim), b1, w2, b2.
class ProbeModel {
 public:
  ProbeModel() = default;
  // All-zero parameters.
  explicit ProbeModel(std::size_t dim);

  // W1, w2 ~ Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)); biases 0.
  static ProbeModel initialized(std::size_t dim, std::uint64_t seed);

  static std::size_t parameter_count(std::size_t dim) {
    return kHiddenUnits * dim + 2 * kHiddenUnits + 1;
  }

  std::size_t dim() const { return dim_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<const double> w1() const { return parameters().first(kHiddenUnits * dim_); }
  std::span<const double> b1() const { return parameters().subspan(kHiddenUnits * dim_, kHiddenUnits); }
  std::span<const double> w2() const {
    return parameters().subspan(kHiddenUnits * dim_ + kHiddenUnits, kHiddenUnits);
  }
  double b2() const { return params_.back(); }

  std::span<double> w1() { return parameters().first(kHiddenUnits * dim_); }
  std::span<double> b1() { return parameters().subspan(kHiddenUnits * dim_, kHiddenUnits); }
  std::span<double> w2() {
    return parameters().subspan(kHiddenUnits * dim_ + kHiddenUnits, kHiddenUnits);
  }
  double& b2() { return params_.back(); }

  bool all_finite() const;

  std::uint64_t seed = 0;
  std::string layer_name;

  bool operator==(const ProbeModel&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> params_;
};

// Rounds every parameter to float32, the storage precision of probe files.
ProbeModel quantized(ProbeModel m);

// Logit w2 . relu(W1 x + b1) + b2. Throws ShapeError on dimension mismatch.
double logit(const ProbeModel& m, std::span<const double> x);
// Probability of SUBJECT, kept strictly inside (0, 1).
double forward(const ProbeModel& m, std::span<const double> x);

double sigmoid(double z);
// Binary cross-entropy of sigmoid(z) against label in {0, 1}.
double bce_from_logit(double z, int label);

struct BatchPrediction {
  std::vector<double> probability;
  std::vector<Role> label;  // SUBJECT iff probability > 0.5
};

BatchPrediction predict_batch(const ProbeModel& m, const Matrix& xs);

struct LabeledSet {
  Matrix features;
  std::vector<int> labels;  // 1 = subject, 0 = object
  std::size_t size() const { return labels.size(); }
};

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  // Rows are shuffled in contiguous groups of this size.
  std::size_t shuffle_block = 1;
};

struct TrainResult {
  ProbeModel model;
  double initial_loss = 0.0;
  std::vector<double> loss_history;  // mean loss over the set after each epoch
};

TrainResult train(ProbeModel init, const LabeledSet& data, const TrainConfig& cfg);

// Max over parameters of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// with central differences of step eps.
double gradient_check(const ProbeModel& m, std::span<const double> x, int label, double eps);

// JSON manifest <stem>.json plus float32 blob <stem>.bin.
void save_probe(const ProbeModel& m, const TrainConfig& cfg, const std::filesystem::path& stem);
ProbeModel load_probe(const std::filesystem::path& stem);

}  // namespace roleprobe

#endif  // ROLEPROBE_PROBE_HPP_
