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

#include "roleprobe/probe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "roleprobe/error.hpp"
#include "roleprobe/kernels.hpp"
#include "roleprobe/random.hpp"

namespace roleprobe {

ProbeModel::ProbeModel(std::size_t dim) : dim_(dim), params_(parameter_count(dim), 0.0) {}

ProbeModel ProbeModel::initialized(std::size_t dim, std::uint64_t seed) {
  ProbeModel m(dim);
  m.seed = seed;
  Rng rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(dim + kHiddenUnits));
  for (double& w : m.w1()) w = (2.0 * rng.uniform() - 1.0) * a1;
  const double a2 = std::sqrt(6.0 / static_cast<double>(kHiddenUnits + 1));
  for (double& w : m.w2()) w = (2.0 * rng.uniform() - 1.0) * a2;
  return m;
}

bool ProbeModel::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

ProbeModel quantized(ProbeModel m) {
  for (double& v : m.parameters()) v = static_cast<double>(static_cast<float>(v));
  return m;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_from_logit(double z, int label) {
  // softplus(z) - label * z
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - static_cast<double>(label) * z;
}

double logit(const ProbeModel& m, std::span<const double> x) {
  const std::size_t d = m.dim();
  if (x.size() != d) {
    throw ShapeError("probe expects dim " + std::to_string(d) + ", got " + std::to_string(x.size()));
  }
  const auto w1 = m.w1();
  const auto b1 = m.b1();
  const auto w2 = m.w2();
  double z = m.b2();
  for (std::size_t u = 0; u < kHiddenUnits; ++u) {
    const double* row = w1.data() + u * d;
    double h = b1[u];
    for (std::size_t j = 0; j < d; ++j) h += row[j] * x[j];
    z += w2[u] * std::max(h, 0.0);
  }
  return z;
}

double forward(const ProbeModel& m, std::span<const double> x) {
  return std::clamp(sigmoid(logit(m, x)), std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

BatchPrediction predict_batch(const ProbeModel& m, const Matrix& xs) {
  BatchPrediction out;
  out.probability.resize(xs.rows);
  if (xs.rows == 0) return out;
  kernels::parallel::forward_batch(m, xs, out.probability);
  out.label.reserve(xs.rows);
  for (double p : out.probability) out.label.push_back(p > 0.5 ? Role::kSubject : Role::kObject);
  return out;
}

TrainResult train(ProbeModel init, const LabeledSet& data, const TrainConfig& cfg) {
  const std::size_t n = data.size();
  if (n == 0) throw ConfigError("training set is empty");
  if (data.features.rows != n) throw ShapeError("features and labels disagree in length");
  if (data.features.cols != init.dim()) throw ShapeError("training vectors do not match probe dim");
  if (cfg.epochs < 0 || cfg.batch_size == 0 || cfg.shuffle_block == 0) {
    throw ConfigError("invalid training configuration");
  }
  if (n % cfg.shuffle_block != 0) throw ConfigError("set size not divisible by shuffle_block");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");

  TrainResult result;
  result.model = std::move(init);
  ProbeModel& m = result.model;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> grad(m.parameters().size());
  result.initial_loss = kernels::parallel::loss_and_gradient(m, data.features, data.labels, all, {});

  Rng rng(cfg.seed);
  std::vector<std::size_t> blocks(n / cfg.shuffle_block);
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(blocks.begin(), blocks.end(), 0);
    rng.shuffle(blocks.begin(), blocks.end());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t k = 0; k < cfg.shuffle_block; ++k) {
        order[b * cfg.shuffle_block + k] = blocks[b] * cfg.shuffle_block + k;
      }
    }
    std::size_t batch = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      const double loss = kernels::parallel::loss_and_gradient(
          m, data.features, data.labels, std::span(order).subspan(start, len), grad);
      if (!std::isfinite(loss)) throw TrainingDivergedError(epoch, batch + 1);
      auto params = m.parameters();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
    }
    const double epoch_loss =
        kernels::parallel::loss_and_gradient(m, data.features, data.labels, all, {});
    if (!std::isfinite(epoch_loss)) throw TrainingDivergedError(epoch, batch);
    result.loss_history.push_back(epoch_loss);
  }
  return result;
}

double gradient_check(const ProbeModel& m, std::span<const double> x, int label, double eps) {
  if (x.size() != m.dim()) throw ShapeError("gradient_check input has wrong dimension");
  Matrix xs(1, m.dim());
  std::copy(x.begin(), x.end(), xs.data.begin());
  const std::vector<int> labels{label};
  const std::vector<std::size_t> rows{0};
  std::vector<double> analytic(m.parameters().size());
  kernels::reference::loss_and_gradient(m, xs, labels, rows, analytic);

  ProbeModel probe = m;
  auto params = probe.parameters();
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + eps;
    const double up = bce_from_logit(logit(probe, x), label);
    params[k] = saved - eps;
    const double down = bce_from_logit(logit(probe, x), label);
    params[k] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = std::abs(analytic[k] - numeric) /
                       std::max(1e-8, std::abs(analytic[k]) + std::abs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

void save_probe(const ProbeModel& m, const TrainConfig& cfg, const std::filesystem::path& stem) {
  std::filesystem::path blob = stem;
  blob += ".bin";
  std::filesystem::path manifest_path = stem;
  manifest_path += ".json";
  const nlohmann::json manifest = {
      {"format_version", 1},
      {"layer_name", m.layer_name},
      {"d", m.dim()},
      {"hidden_units", kHiddenUnits},
      {"seed", m.seed},
      {"cfg",
       {{"epochs", cfg.epochs},
        {"learning_rate", cfg.learning_rate},
        {"batch_size", cfg.batch_size},
        {"seed", cfg.seed}}},
      {"params_file", blob.filename().string()}};
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + manifest_path.string());
    out << manifest.dump(1) << '\n';
  }
  std::vector<float> values(m.parameters().size());
  std::transform(m.parameters().begin(), m.parameters().end(), values.begin(),
                 [](double v) { return static_cast<float>(v); });
  static_assert(std::endian::native == std::endian::little,
                "probe blobs are written in native order");
  std::ofstream out(blob, std::ios::binary);
  if (!out) throw IoError("cannot write " + blob.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw IoError("write failed for " + blob.string());
}

ProbeModel load_probe(const std::filesystem::path& stem) {
  std::filesystem::path manifest_path = stem;
  manifest_path += ".json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchiveError("probe manifest " + manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format_version", 0) != 1) throw VersionError("unsupported probe format");
  if (manifest.value("hidden_units", std::size_t{0}) != kHiddenUnits) {
    throw CorruptArchiveError("probe hidden width must be " + std::to_string(kHiddenUnits));
  }
  ProbeModel m(manifest.at("d").get<std::size_t>());
  m.layer_name = manifest.at("layer_name").get<std::string>();
  m.seed = manifest.at("seed").get<std::uint64_t>();
  const auto blob = manifest_path.parent_path() / manifest.at("params_file").get<std::string>();
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(blob, ec);
  if (ec || bytes != m.parameters().size() * sizeof(float)) {
    throw CorruptArchiveError("probe parameter file " + blob.string() + " has the wrong size");
  }
  std::vector<float> values(m.parameters().size());
  std::ifstream bin(blob, std::ios::binary);
  bin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!bin) throw CorruptArchiveError("short read from " + blob.string());
  std::copy(values.begin(), values.end(), m.parameters().begin());
  if (!m.all_finite()) throw CorruptArchiveError("probe parameters are not finite");
  return m;
}

}  // namespace roleprobe
