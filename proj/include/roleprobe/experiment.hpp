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

// Experiment orchestration: noun instances, balanced probe-training sets,
// layerwise probes, the prototypicality split and the three experiment
// runners.

#ifndef ROLEPROBE_EXPERIMENT_HPP_
#define ROLEPROBE_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleprobe/align.hpp"
#include "roleprobe/archive.hpp"
#include "roleprobe/clause.hpp"
#include "roleprobe/conllu.hpp"
#include "roleprobe/matrix.hpp"
#include "roleprobe/perturb.hpp"
#include "roleprobe/probe.hpp"
#include "roleprobe/report.hpp"

namespace roleprobe {

inline constexpr std::size_t kDefaultCap = 864;
inline constexpr double kPrototypicalityThreshold = 0.5;
inline constexpr int kDefaultMaxDisplacement = 2;

struct ExperimentConfig {
  std::size_t cap = kDefaultCap;
  // Kept for the config echo; the split always uses the probe's p > 0.5 rule.
  double threshold = kPrototypicalityThreshold;
  int max_displacement = kDefaultMaxDisplacement;
  std::uint64_t seed = 0;
  // epochs / learning_rate / batch_size; the seed is derived per layer.
  TrainConfig train;
  // Layers to train and evaluate; empty means all. "static" is always added.
  std::vector<std::string> layers;
};

void validate(const ExperimentConfig& cfg);
nlohmann::json config_echo(const ExperimentConfig& cfg);

// A treebank together with the archive holding its embeddings.
struct Corpus {
  std::string name;
  std::vector<Sentence> sentences;
  EmbeddingArchive archive;
};

// Which token of which sentence to collect, and its gold role.
struct Target {
  std::size_t sentence = 0;  // position in the sentence list
  int token = 0;             // 1-based
  Role role = Role::kNeither;
};

// Every SUBJECT/OBJECT token from label_roles, in sentence then token order.
std::vector<Target> role_targets(std::span<const Sentence> sentences);

struct NounInstance {
  std::string sentence_id;
  int token_index = 0;
  Role role = Role::kNeither;
  std::string form;
  std::string lemma;
  std::string upos;
};

// Pooled vectors for a list of targets. features[l] has one row per
// instance for layer_names[l].
struct InstanceTable {
  std::vector<std::string> layer_names;
  std::size_t dim = 0;
  std::vector<NounInstance> instances;
  std::vector<Matrix> features;

  std::size_t size() const { return instances.size(); }
  std::size_t layer(std::string_view name) const;
};

// Layers named by cfg.layers (archive order, "static" first), or all.
std::vector<std::string> selected_layers(const EmbeddingArchive& archive,
                                         std::span<const std::string> wanted);

// Throws MissingSentenceError when a sentence is absent from the archive and
// AlignmentError when its stored text differs from the reconstruction.
InstanceTable collect_instances(std::span<const Sentence> sentences,
                                const EmbeddingArchive& archive, std::span<const Target> targets,
                                std::span<const std::string> layers);

struct TrainingSelection {
  // Instance rows, subjects first then objects.
  std::vector<std::size_t> rows;
  std::size_t per_class = 0;
  std::size_t subjects_available = 0;
  std::size_t objects_available = 0;
};

// Seeded shuffle of each class, truncated to min(cap, class sizes). Throws
// InsufficientDataError when either class is empty.
TrainingSelection select_balanced(const InstanceTable& table, std::size_t cap,
                                  std::uint64_t seed);
LabeledSet labeled_set(const InstanceTable& table, std::size_t layer,
                       const TrainingSelection& selection);

// The balanced set for one layer of a corpus.
LabeledSet build_training_set(const Corpus& corpus, std::string_view layer, std::size_t cap,
                              std::uint64_t seed);

struct ProbeSet {
  std::vector<std::string> layer_names;
  std::vector<ProbeModel> probes;
  std::vector<double> initial_loss;
  std::vector<std::vector<double>> loss_history;
  // Sentence ids that contributed training rows, sorted.
  std::vector<std::string> training_ids;
  std::size_t per_class = 0;
  std::map<std::string, std::size_t> upos_counts;
  std::string corpus_name;
  std::string model_name;
  // Shared settings; each layer's shuffle seed is shuffle_seed(layer).
  TrainConfig train_config;
  std::uint64_t seed = 0;

  const ProbeModel& at(std::string_view layer) const;
  std::uint64_t shuffle_seed(std::string_view layer) const;
};

// Probe file stem for a layer inside a probe directory.
std::filesystem::path probe_stem(const std::filesystem::path& dir, std::string_view layer);
// probes.json, training_sentences.json and one manifest/blob pair per layer.
void save_probe_set(const ProbeSet& set, const std::filesystem::path& dir);
ProbeSet load_probe_set(const std::filesystem::path& dir);

ProbeSet train_layerwise_probes(const Corpus& train, const ExperimentConfig& cfg);

// Fingerprint of a probe's stored (float32) parameters.
std::uint64_t probe_hash(const ProbeModel& m);

// prototypical[i] iff the static probe's hard label equals the gold role.
std::vector<bool> split_prototypicality(const ProbeModel& static_probe, const Matrix& features,
                                        std::span<const NounInstance> instances);

// Throws ConfigError when an evaluation sentence was used for training.
void require_disjoint(const ProbeSet& probes, std::span<const Sentence> eval);

ExperimentReport run_experiment1(const ProbeSet& probes, const Corpus& eval,
                                 const ExperimentConfig& cfg);

// One pair per eligible clause of every sentence.
std::vector<SwappedPair> build_swap_pairs(std::span<const Sentence> sentences);

// `swapped` holds embeddings of every pair's swapped sentence; originals are
// read from eval.archive.
ExperimentReport run_experiment2(const ProbeSet& probes, const Corpus& eval,
                                 std::span<const SwappedPair> pairs,
                                 const EmbeddingArchive& swapped, const ExperimentConfig& cfg);

struct Experiment3Result {
  ProbeSet probes;
  ExperimentReport report;
};

// Both corpora already scrambled (see scramble_corpus) and embedded.
Experiment3Result run_experiment3(const Corpus& scrambled_train,
                                  const Corpus& scrambled_eval, const ExperimentConfig& cfg);

// Clause and role table of a treebank, as written by the extract command.
nlohmann::json extraction_table(std::span<const Sentence> sentences);

}  // namespace roleprobe

#endif  // ROLEPROBE_EXPERIMENT_HPP_
