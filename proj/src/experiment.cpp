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

#include "roleprobe/experiment.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "roleprobe/error.hpp"
#include "roleprobe/parallel.hpp"
#include "roleprobe/random.hpp"

namespace roleprobe {
namespace {

std::vector<Role> gold_roles(const InstanceTable& table) {
  std::vector<Role> out;
  out.reserve(table.size());
  for (const NounInstance& inst : table.instances) out.push_back(inst.role);
  return out;
}

// p(SUBJECT) for every instance at every layer of `table`, parallel over
// layers.
std::vector<std::vector<double>> probabilities(const ProbeSet& probes, const InstanceTable& table) {
  std::vector<std::vector<double>> out(table.layer_names.size());
  parallel_for(out.size(), [&](std::size_t l) {
    out[l] = predict_batch(probes.at(table.layer_names[l]), table.features[l]).probability;
  });
  return out;
}

std::map<std::string, std::size_t> upos_counts(const InstanceTable& table,
                                               std::span<const std::size_t> rows) {
  std::map<std::string, std::size_t> out;
  for (std::size_t r : rows) ++out[table.instances[r].upos];
  return out;
}

std::map<std::string, std::size_t> upos_counts(const InstanceTable& table) {
  std::vector<std::size_t> all(table.size());
  std::iota(all.begin(), all.end(), 0);
  return upos_counts(table, all);
}

nlohmann::json probe_provenance(const ProbeSet& probes) {
  nlohmann::json hashes = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  for (std::size_t l = 0; l < probes.layer_names.size(); ++l) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(probe_hash(probes.probes[l])));
    hashes[probes.layer_names[l]] = buf;
    seeds[probes.layer_names[l]] = probes.probes[l].seed;
  }
  return {{"training_treebank", probes.corpus_name},
          {"training_sentences", probes.training_ids.size()},
          {"per_class", probes.per_class},
          {"training_upos_counts", probes.upos_counts},
          {"probe_hashes", hashes},
          {"probe_init_seeds", seeds},
          {"hidden_units", kHiddenUnits},
          {"activation", "relu"},
          {"output", "sigmoid"},
          {"loss", "binary_cross_entropy"},
          {"optimizer", "minibatch_gradient_descent"},
          {"init", "glorot_uniform, zero biases"}};
}

ExperimentReport prototypicality_report(std::string experiment, const ProbeSet& probes,
                                        const InstanceTable& table, const ExperimentConfig& cfg,
                                        const Corpus& eval) {
  const std::vector<bool> proto =
      split_prototypicality(probes.at("static"), table.features[table.layer("static")],
                            table.instances);
  std::vector<bool> non_proto(proto.size());
  std::transform(proto.begin(), proto.end(), non_proto.begin(), [](bool b) { return !b; });
  const std::vector<std::vector<bool>> membership{std::vector<bool>(proto.size(), true), proto,
                                                  non_proto};
  const std::vector<Role> gold = gold_roles(table);
  ExperimentReport r = aggregate_report(std::move(experiment), table.layer_names,
                                        {"all", "prototypical", "non_prototypical"}, membership,
                                        gold, probabilities(probes, table));
  r.config = config_echo(cfg);
  r.provenance = probe_provenance(probes);
  r.provenance["eval_treebank"] = eval.name;
  r.provenance["model"] = eval.archive.model_name;
  r.provenance["pooling"] = eval.archive.pooling;
  r.provenance["eval_sentences"] = eval.sentences.size();
  r.provenance["eval_instances"] = table.size();
  r.provenance["eval_upos_counts"] = upos_counts(table);
  r.provenance["prototypical_instances"] = std::count(proto.begin(), proto.end(), true);
  return r;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.cap < 1) throw ConfigError("per-class cap must be at least 1");
  if (cfg.max_displacement < 0) throw ConfigError("max displacement must be non-negative");
  if (cfg.threshold != kPrototypicalityThreshold) {
    throw ConfigError("the prototypicality threshold is fixed at 0.5");
  }
  if (cfg.train.epochs < 0) throw ConfigError("epochs must be non-negative");
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  return {{"cap", cfg.cap},
          {"threshold", cfg.threshold},
          {"max_displacement", cfg.max_displacement},
          {"seed", cfg.seed},
          {"epochs", cfg.train.epochs},
          {"learning_rate", cfg.train.learning_rate},
          {"batch_size", cfg.train.batch_size},
          {"layers", cfg.layers}};
}

std::vector<Target> role_targets(std::span<const Sentence> sentences) {
  std::vector<Target> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& [index, role] : label_roles(sentences[s])) {
      if (role != Role::kNeither) out.push_back({s, index, role});
    }
  }
  return out;
}

std::size_t InstanceTable::layer(std::string_view name) const {
  return layer_position(layer_names, name);
}

std::vector<std::string> selected_layers(const EmbeddingArchive& archive,
                                         std::span<const std::string> wanted) {
  if (wanted.empty()) return archive.layer_names;
  std::set<std::string> keep(wanted.begin(), wanted.end());
  keep.insert("static");
  for (const std::string& w : keep) layer_position(archive.layer_names, w);  // throws if unknown
  std::vector<std::string> out;
  for (const std::string& name : archive.layer_names) {
    if (keep.count(name)) out.push_back(name);
  }
  return out;
}

InstanceTable collect_instances(std::span<const Sentence> sentences,
                                const EmbeddingArchive& archive, std::span<const Target> targets,
                                std::span<const std::string> layers) {
  InstanceTable table;
  table.layer_names.assign(layers.begin(), layers.end());
  table.dim = static_cast<std::size_t>(archive.dim);
  std::vector<std::size_t> positions;
  for (const std::string& name : layers) positions.push_back(layer_position(archive.layer_names, name));
  const Pooling pooling = parse_pooling(archive.pooling);

  std::vector<std::vector<std::size_t>> by_sentence(sentences.size());
  table.instances.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Target& t = targets[i];
    if (t.sentence >= sentences.size()) throw ConfigError("target refers to a missing sentence");
    const Sentence& s = sentences[t.sentence];
    if (t.token < 1 || t.token > static_cast<int>(s.size())) {
      throw ConfigError("target token out of range in " + s.id);
    }
    const Token& tok = s.token(t.token);
    table.instances.push_back({s.id, t.token, t.role, tok.form, tok.lemma, tok.upos});
    by_sentence[t.sentence].push_back(i);
  }
  table.features.assign(layers.size(), Matrix(targets.size(), table.dim));

  const auto index = index_by_id(archive);
  parallel_for(sentences.size(), [&](std::size_t s) {
    if (by_sentence[s].empty()) return;
    const Sentence& sent = sentences[s];
    const auto it = index.find(sent.id);
    if (it == index.end()) throw MissingSentenceError(sent.id);
    const SentenceEmbeddings& emb = archive.sentences[it->second];
    if (emb.text != sent.text) {
      throw AlignmentError("archive text for '" + sent.id + "' differs from the treebank text");
    }
    const Alignment alignment = align_subwords(token_spans(sent), emb.subword_spans);
    const TokenVectors vectors = pool_token_vectors(archive, emb, alignment, pooling);
    for (std::size_t row : by_sentence[s]) {
      const auto token = static_cast<std::size_t>(table.instances[row].token_index - 1);
      for (std::size_t l = 0; l < positions.size(); ++l) {
        const auto v = vectors.at(positions[l], token);
        std::copy(v.begin(), v.end(), table.features[l].row(row).begin());
      }
    }
  });
  return table;
}

TrainingSelection select_balanced(const InstanceTable& table, std::size_t cap,
                                  std::uint64_t seed) {
  std::vector<std::size_t> subjects, objects;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.instances[i].role == Role::kSubject) subjects.push_back(i);
    if (table.instances[i].role == Role::kObject) objects.push_back(i);
  }
  if (subjects.empty() || objects.empty()) {
    throw InsufficientDataError("cannot build a balanced training set", subjects.size(),
                                objects.size());
  }
  Rng subject_rng(derive_seed(seed, "balance/subject"));
  Rng object_rng(derive_seed(seed, "balance/object"));
  subject_rng.shuffle(subjects.begin(), subjects.end());
  object_rng.shuffle(objects.begin(), objects.end());
  TrainingSelection sel;
  sel.subjects_available = subjects.size();
  sel.objects_available = objects.size();
  sel.per_class = std::min({cap, subjects.size(), objects.size()});
  sel.rows.assign(subjects.begin(), subjects.begin() + static_cast<std::ptrdiff_t>(sel.per_class));
  sel.rows.insert(sel.rows.end(), objects.begin(),
                  objects.begin() + static_cast<std::ptrdiff_t>(sel.per_class));
  return sel;
}

LabeledSet labeled_set(const InstanceTable& table, std::size_t layer,
                       const TrainingSelection& selection) {
  LabeledSet set;
  set.features = Matrix(selection.rows.size(), table.dim);
  set.labels.reserve(selection.rows.size());
  for (std::size_t k = 0; k < selection.rows.size(); ++k) {
    const std::size_t row = selection.rows[k];
    const auto src = table.features[layer].row(row);
    std::copy(src.begin(), src.end(), set.features.row(k).begin());
    set.labels.push_back(table.instances[row].role == Role::kSubject ? 1 : 0);
  }
  return set;
}

LabeledSet build_training_set(const Corpus& corpus, std::string_view layer, std::size_t cap,
                              std::uint64_t seed) {
  const std::vector<std::string> layers{std::string(layer)};
  const std::vector<Target> targets = role_targets(corpus.sentences);
  const InstanceTable table = collect_instances(corpus.sentences, corpus.archive, targets, layers);
  return labeled_set(table, 0, select_balanced(table, cap, seed));
}

const ProbeModel& ProbeSet::at(std::string_view layer) const {
  return probes.at(layer_position(layer_names, layer));
}

std::uint64_t ProbeSet::shuffle_seed(std::string_view layer) const {
  return derive_seed(seed, "shuffle/" + std::string(layer));
}

std::filesystem::path probe_stem(const std::filesystem::path& dir, std::string_view layer) {
  return dir / ("layer_" + std::string(layer));
}

void save_probe_set(const ProbeSet& set, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < set.layer_names.size(); ++l) {
    TrainConfig tc = set.train_config;
    tc.seed = set.shuffle_seed(set.layer_names[l]);
    save_probe(set.probes[l], tc, probe_stem(dir, set.layer_names[l]));
    layers.push_back({{"layer_name", set.layer_names[l]},
                      {"stem", probe_stem(dir, set.layer_names[l]).filename().string()},
                      {"initial_loss", set.initial_loss[l]},
                      {"loss_history", set.loss_history[l]}});
  }
  const nlohmann::json index = {{"format_version", 1},
                                {"corpus", set.corpus_name},
                                {"model_name", set.model_name},
                                {"seed", set.seed},
                                {"per_class", set.per_class},
                                {"upos_counts", set.upos_counts},
                                {"epochs", set.train_config.epochs},
                                {"learning_rate", set.train_config.learning_rate},
                                {"batch_size", set.train_config.batch_size},
                                {"layers", layers}};
  auto write = [](const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(1) << '\n';
  };
  write(dir / "probes.json", index);
  write(dir / "training_sentences.json", set.training_ids);
}

ProbeSet load_probe_set(const std::filesystem::path& dir) {
  auto read = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptArchiveError(path.string() + ": " + e.what());
    }
  };
  const nlohmann::json index = read(dir / "probes.json");
  if (index.value("format_version", 0) != 1) throw VersionError("unsupported probe set format");
  ProbeSet set;
  try {
    set.corpus_name = index.at("corpus").get<std::string>();
    set.model_name = index.at("model_name").get<std::string>();
    set.seed = index.at("seed").get<std::uint64_t>();
    set.per_class = index.at("per_class").get<std::size_t>();
    set.upos_counts = index.at("upos_counts").get<std::map<std::string, std::size_t>>();
    set.train_config.epochs = index.at("epochs").get<int>();
    set.train_config.learning_rate = index.at("learning_rate").get<double>();
    set.train_config.batch_size = index.at("batch_size").get<std::size_t>();
    for (const auto& layer : index.at("layers")) {
      set.layer_names.push_back(layer.at("layer_name").get<std::string>());
      set.probes.push_back(load_probe(dir / layer.at("stem").get<std::string>()));
      set.initial_loss.push_back(layer.at("initial_loss").get<double>());
      set.loss_history.push_back(layer.at("loss_history").get<std::vector<double>>());
    }
    set.training_ids = read(dir / "training_sentences.json").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchiveError("probe set " + dir.string() + ": " + e.what());
  }
  if (std::find(set.layer_names.begin(), set.layer_names.end(), "static") == set.layer_names.end()) {
    throw CorruptArchiveError("probe set " + dir.string() + " has no static probe");
  }
  return set;
}

ProbeSet train_layerwise_probes(const Corpus& train, const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<std::string> layers = selected_layers(train.archive, cfg.layers);
  const std::vector<Target> targets = role_targets(train.sentences);
  const InstanceTable table = collect_instances(train.sentences, train.archive, targets, layers);
  const TrainingSelection sel = select_balanced(table, cfg.cap, cfg.seed);

  ProbeSet out;
  out.layer_names = layers;
  out.corpus_name = train.name;
  out.model_name = train.archive.model_name;
  out.per_class = sel.per_class;
  out.train_config = cfg.train;
  out.seed = cfg.seed;
  out.upos_counts = upos_counts(table, sel.rows);
  std::set<std::string> ids;
  for (std::size_t r : sel.rows) ids.insert(table.instances[r].sentence_id);
  out.training_ids.assign(ids.begin(), ids.end());

  out.probes.resize(layers.size());
  out.initial_loss.resize(layers.size());
  out.loss_history.resize(layers.size());
  parallel_for(layers.size(), [&](std::size_t l) {
    const LabeledSet data = labeled_set(table, l, sel);
    TrainConfig tc = cfg.train;
    tc.seed = out.shuffle_seed(layers[l]);
    ProbeModel init = ProbeModel::initialized(table.dim, derive_seed(cfg.seed, "init/" + layers[l]));
    init.layer_name = layers[l];
    TrainResult result = roleprobe::train(std::move(init), data, tc);
    out.probes[l] = quantized(std::move(result.model));
    out.initial_loss[l] = result.initial_loss;
    out.loss_history[l] = std::move(result.loss_history);
  });
  return out;
}

std::uint64_t probe_hash(const ProbeModel& m) {
  std::string bytes;
  bytes.reserve(m.parameters().size() * sizeof(float));
  for (double v : m.parameters()) {
    const float f = static_cast<float>(v);
    char buf[sizeof(float)];
    std::memcpy(buf, &f, sizeof(float));
    bytes.append(buf, sizeof(float));
  }
  return fnv1a64(bytes);
}

std::vector<bool> split_prototypicality(const ProbeModel& static_probe, const Matrix& features,
                                        std::span<const NounInstance> instances) {
  if (features.rows != instances.size()) throw ShapeError("one static vector per instance required");
  const BatchPrediction pred = predict_batch(static_probe, features);
  std::vector<bool> out(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    out[i] = pred.label[i] == instances[i].role;
  }
  return out;
}

void require_disjoint(const ProbeSet& probes, std::span<const Sentence> eval) {
  const std::unordered_set<std::string> used(probes.training_ids.begin(), probes.training_ids.end());
  for (const Sentence& s : eval) {
    if (used.count(s.id)) {
      throw ConfigError("evaluation sentence '" + s.id + "' was used to train the probes");
    }
  }
}

ExperimentReport run_experiment1(const ProbeSet& probes, const Corpus& eval,
                                 const ExperimentConfig& cfg) {
  validate(cfg);
  require_disjoint(probes, eval.sentences);
  const std::vector<Target> targets = role_targets(eval.sentences);
  const InstanceTable table =
      collect_instances(eval.sentences, eval.archive, targets, probes.layer_names);
  return prototypicality_report("exp1", probes, table, cfg, eval);
}

std::vector<SwappedPair> build_swap_pairs(std::span<const Sentence> sentences) {
  std::vector<SwappedPair> out;
  for (const Sentence& s : sentences) {
    for (const ClauseInstance& c : find_transitive_clauses(s)) {
      if (c.swap_eligible) out.push_back(swap_arguments(s, c));
    }
  }
  return out;
}

ExperimentReport run_experiment2(const ProbeSet& probes, const Corpus& eval,
                                 std::span<const SwappedPair> pairs,
                                 const EmbeddingArchive& swapped, const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<Sentence> originals, swaps;
  originals.reserve(pairs.size());
  swaps.reserve(pairs.size());
  for (const SwappedPair& p : pairs) {
    originals.push_back(p.original);
    swaps.push_back(p.swapped);
  }
  require_disjoint(probes, originals);

  // Per pair: original subject, original object, then in the swapped
  // sentence the moved-in subject and the moved-in object. Gold is
  // positional.
  std::vector<Target> original_targets, swapped_targets;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    original_targets.push_back({i, pairs[i].clause.subj_index, Role::kSubject});
    original_targets.push_back({i, pairs[i].clause.obj_index, Role::kObject});
    swapped_targets.push_back({i, pairs[i].obj_new_index, Role::kSubject});
    swapped_targets.push_back({i, pairs[i].subj_new_index, Role::kObject});
  }
  const InstanceTable orig =
      collect_instances(originals, eval.archive, original_targets, probes.layer_names);
  const InstanceTable swap = collect_instances(swaps, swapped, swapped_targets, probes.layer_names);

  const auto p_orig = probabilities(probes, orig);
  const auto p_swap = probabilities(probes, swap);
  const std::size_t n = orig.size();
  std::vector<std::vector<double>> p_all(p_orig.size());
  for (std::size_t l = 0; l < p_orig.size(); ++l) {
    p_all[l] = p_orig[l];
    p_all[l].insert(p_all[l].end(), p_swap[l].begin(), p_swap[l].end());
  }
  std::vector<Role> gold = gold_roles(orig);
  const std::vector<Role> gold_swap = gold_roles(swap);
  gold.insert(gold.end(), gold_swap.begin(), gold_swap.end());
  std::vector<bool> in_orig(2 * n, false), in_swap(2 * n, false);
  std::fill(in_orig.begin(), in_orig.begin() + static_cast<std::ptrdiff_t>(n), true);
  std::fill(in_swap.begin() + static_cast<std::ptrdiff_t>(n), in_swap.end(), true);
  const std::vector<std::vector<bool>> membership{std::vector<bool>(2 * n, true), in_orig, in_swap};

  ExperimentReport r = aggregate_report("exp2", probes.layer_names, {"all", "original", "swapped"},
                                        membership, gold, p_all);
  r.config = config_echo(cfg);
  r.provenance = probe_provenance(probes);
  r.provenance["eval_treebank"] = eval.name;
  r.provenance["model"] = eval.archive.model_name;
  r.provenance["swap_model"] = swapped.model_name;
  r.provenance["pooling"] = eval.archive.pooling;
  r.provenance["pairs"] = pairs.size();
  r.provenance["prototypicality_filter"] = "none";
  nlohmann::json audit = nlohmann::json::array();
  for (const SwappedPair& p : pairs) {
    audit.push_back({{"sentence_id", p.original.id},
                     {"swapped_id", p.swapped.id},
                     {"verb", p.original.token(p.clause.verb_index).form},
                     {"subject", p.original.token(p.clause.subj_index).form},
                     {"object", p.original.token(p.clause.obj_index).form},
                     {"original", p.original.text},
                     {"swapped", p.swapped.text}});
  }
  r.provenance["swapped_clauses"] = std::move(audit);
  return r;
}

Experiment3Result run_experiment3(const Corpus& scrambled_train,
                                  const Corpus& scrambled_eval, const ExperimentConfig& cfg) {
  validate(cfg);
  Experiment3Result out;
  out.probes = train_layerwise_probes(scrambled_train, cfg);
  require_disjoint(out.probes, scrambled_eval.sentences);
  const std::vector<Target> targets = role_targets(scrambled_eval.sentences);
  const InstanceTable table = collect_instances(scrambled_eval.sentences, scrambled_eval.archive,
                                                targets, out.probes.layer_names);
  out.report = prototypicality_report("exp3", out.probes, table, cfg, scrambled_eval);
  out.report.provenance["max_displacement"] = cfg.max_displacement;
  out.report.provenance["scrambles_per_sentence"] = 1;
  out.report.provenance["punctuation"] = "permuted with the other tokens";
  return out;
}

nlohmann::json extraction_table(std::span<const Sentence> sentences) {
  nlohmann::json out = nlohmann::json::array();
  for (const Sentence& s : sentences) {
    nlohmann::json clauses = nlohmann::json::array();
    for (const ClauseInstance& c : find_transitive_clauses(s)) {
      clauses.push_back({{"verb_index", c.verb_index},
                         {"subj_index", c.subj_index},
                         {"obj_index", c.obj_index},
                         {"verb", s.token(c.verb_index).form},
                         {"subject", s.token(c.subj_index).form},
                         {"object", s.token(c.obj_index).form},
                         {"swap_eligible", c.swap_eligible},
                         {"eligibility_failures", c.eligibility_failures}});
    }
    nlohmann::json roles = nlohmann::json::array();
    for (const auto& [index, role] : label_roles(s)) {
      if (role == Role::kNeither) continue;
      const Token& t = s.token(index);
      roles.push_back({{"index", index}, {"form", t.form}, {"upos", t.upos},
                       {"role", role_name(role)}});
    }
    out.push_back({{"id", s.id}, {"text", s.text}, {"clauses", clauses}, {"roles", roles}});
  }
  return out;
}

}  // namespace roleprobe
