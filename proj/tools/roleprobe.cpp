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

// Command-line front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roleprobe/archive.hpp"
#include "roleprobe/conllu.hpp"
#include "roleprobe/error.hpp"
#include "roleprobe/experiment.hpp"
#include "roleprobe/mock_embed.hpp"
#include "roleprobe/perturb.hpp"
#include "roleprobe/pipeline.hpp"
#include "roleprobe/random.hpp"
#include "roleprobe/report.hpp"
#include "roleprobe/synth.hpp"

namespace fs = std::filesystem;
using namespace roleprobe;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(1) + "\n"); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Corpus load_corpus(const std::string& treebank, const std::string& archive) {
  return {fs::path(treebank).filename().string(), read_conllu_file(treebank), read_archive(archive)};
}

struct Common {
  std::string treebank;
  std::string archive;
  std::string eval_treebank;
  std::string eval_archive;
  std::string probes;
  std::string out;
  std::size_t cap = kDefaultCap;
  int epochs = 20;
  std::uint64_t seed = 0;
  int max_displacement = kDefaultMaxDisplacement;
  std::string layer_names;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;

  ExperimentConfig config() const {
    ExperimentConfig cfg;
    cfg.cap = cap;
    cfg.seed = seed;
    cfg.max_displacement = max_displacement;
    cfg.train.epochs = epochs;
    cfg.train.learning_rate = learning_rate;
    cfg.train.batch_size = batch_size;
    cfg.layers = split_list(layer_names);
    return cfg;
  }
};

void add_training_flags(CLI::App* app, Common& c) {
  app->add_option("--cap", c.cap, "Per-class training cap")->capture_default_str();
  app->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  app->add_option("--seed", c.seed, "Global seed")->capture_default_str();
  app->add_option("--layer-names", c.layer_names,
                  "Comma-separated layers to use (static is always included)");
  app->add_option("--learning-rate", c.learning_rate)->capture_default_str();
  app->add_option("--batch-size", c.batch_size)->capture_default_str();
}

ProbeSet probes_for(const Common& c, const ExperimentConfig& cfg) {
  if (!c.probes.empty()) return load_probe_set(c.probes);
  if (c.treebank.empty() || c.archive.empty()) {
    throw ConfigError("give --probes, or --treebank and --archive to train probes");
  }
  return train_layerwise_probes(load_corpus(c.treebank, c.archive), cfg);
}

void print_summary(const ExperimentReport& r) {
  std::printf("%s\n%-8s", r.experiment.c_str(), "layer");
  for (const std::string& s : r.subsets) std::printf(" %18s", s.c_str());
  std::printf("\n");
  for (const std::string& layer : r.layer_names) {
    std::printf("%-8s", layer.c_str());
    for (const std::string& s : r.subsets) {
      std::printf(" %11.4f (n=%4zu)", r.value(layer, s, "all", "accuracy"), r.count(layer, s));
    }
    std::printf("\n");
  }
}

// Experiments written to one directory accumulate in its report.json.
void finish(const std::vector<ExperimentReport>& reports, const std::string& out) {
  const std::filesystem::path existing = std::filesystem::path(out) / "report.json";
  std::vector<ExperimentReport> all;
  if (std::filesystem::exists(existing)) all = read_reports(existing);
  emit_report(merge_reports(std::move(all), reports), out);
  for (const ExperimentReport& r : reports) print_summary(r);
  std::printf("reports written to %s\n", out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammatical-role probing toolkit"};
  app.require_subcommand(1);
  Common c;

  // extract
  auto* extract = app.add_subcommand("extract", "Treebank -> clause and role table (JSON)");
  extract->add_option("--treebank", c.treebank)->required();
  extract->add_option("--out", c.out)->required();
  extract->callback([&] {
    const auto sentences = read_conllu_file(c.treebank);
    write_json(c.out, {{"treebank", fs::path(c.treebank).filename().string()},
                       {"sentences", extraction_table(sentences)}});
  });

  // perturb swap|scramble
  auto* perturb = app.add_subcommand("perturb", "Build perturbed corpora");
  perturb->require_subcommand(1);
  auto* swap = perturb->add_subcommand("swap", "Swap subject and object of every eligible clause");
  swap->add_option("--treebank", c.treebank)->required();
  swap->add_option("--out", c.out, "Output directory")->required();
  swap->callback([&] {
    const auto pairs = build_swap_pairs(read_conllu_file(c.treebank));
    std::vector<Sentence> swapped;
    for (const SwappedPair& p : pairs) swapped.push_back(p.swapped);
    fs::create_directories(c.out);
    write_conllu_file(fs::path(c.out) / "swapped.conllu", swapped);
    write_json(fs::path(c.out) / "swapped.json", swap_sidecar(pairs));
    std::printf("%zu swapped sentences\n", pairs.size());
  });
  auto* scramble = perturb->add_subcommand("scramble", "Bounded local scramble, one per sentence");
  scramble->add_option("--treebank", c.treebank)->required();
  scramble->add_option("--out", c.out, "Output directory")->required();
  scramble->add_option("--max-displacement", c.max_displacement)->capture_default_str();
  scramble->add_option("--seed", c.seed)->capture_default_str();
  scramble->callback([&] {
    const auto sentences = read_conllu_file(c.treebank);
    const auto scrambles = scramble_corpus(sentences, c.max_displacement, c.seed);
    std::vector<Sentence> out;
    for (const ScrambledSentence& s : scrambles) out.push_back(s.scrambled);
    fs::create_directories(c.out);
    write_conllu_file(fs::path(c.out) / "scrambled.conllu", out);
    write_json(fs::path(c.out) / "scrambled.json",
               scramble_sidecar(scrambles, c.max_displacement, c.seed));
    std::printf("%zu scrambled sentences\n", out.size());
  });

  // mock-embed
  MockConfig mock;
  auto* mock_cmd = app.add_subcommand("mock-embed", "Treebank -> mock embedding archive");
  mock_cmd->add_option("--treebank", c.treebank)->required();
  mock_cmd->add_option("--out", c.out, "Archive directory")->required();
  mock_cmd->add_option("--dim", mock.dim)->capture_default_str();
  mock_cmd->add_option("--layers", mock.num_hidden_layers, "Hidden layers L")->capture_default_str();
  mock_cmd->add_option("--noise", mock.noise)->capture_default_str();
  mock_cmd->add_option("--seed", mock.seed)->capture_default_str();
  mock_cmd->callback([&] {
    const auto sentences = read_conllu_file(c.treebank);
    write_archive(mock_archive(sentences, mock), c.out);
    std::printf("%zu sentences embedded\n", sentences.size());
  });

  // import-archive
  auto* import = app.add_subcommand("import-archive", "Validate an externally produced archive");
  import->add_option("--archive", c.archive)->required();
  import->add_option("--treebank", c.treebank, "Also check texts and alignment against it");
  import->callback([&] {
    const EmbeddingArchive a = read_archive(c.archive);
    validate_archive(a);
    std::size_t checked = 0;
    if (!c.treebank.empty()) {
      const auto sentences = read_conllu_file(c.treebank);
      const auto targets = role_targets(sentences);
      const std::vector<std::string> layers{"static"};
      collect_instances(sentences, a, targets, layers);
      const auto index = index_by_id(a);
      for (const Sentence& s : sentences) {
        const auto it = index.find(s.id);
        if (it == index.end()) throw MissingSentenceError(s.id);
        const SentenceEmbeddings& e = a.sentences[it->second];
        if (e.text != s.text) throw AlignmentError("text mismatch for '" + s.id + "'");
        align_subwords(token_spans(s), e.subword_spans);
        ++checked;
      }
    }
    std::printf("archive ok: model %s, L=%d, d=%d, %zu sentences", a.model_name.c_str(),
                a.num_hidden_layers, a.dim, a.sentences.size());
    if (!c.treebank.empty()) std::printf(", %zu aligned to the treebank", checked);
    std::printf("\n");
  });

  // export-text
  auto* export_text = app.add_subcommand("export-text", "Treebank -> JSON lines {id, text}");
  export_text->add_option("--treebank", c.treebank)->required();
  export_text->add_option("--out", c.out)->required();
  export_text->callback([&] {
    std::string lines;
    for (const Sentence& s : read_conllu_file(c.treebank)) {
      lines += nlohmann::json{{"id", s.id}, {"text", s.text}}.dump() + "\n";
    }
    write_text(c.out, lines);
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Archives -> layerwise probe files");
  train_cmd->add_option("--treebank", c.treebank)->required();
  train_cmd->add_option("--archive", c.archive)->required();
  train_cmd->add_option("--out", c.out, "Probe directory")->required();
  add_training_flags(train_cmd, c);
  train_cmd->callback([&] {
    const ProbeSet set = train_layerwise_probes(load_corpus(c.treebank, c.archive), c.config());
    save_probe_set(set, c.out);
    std::printf("%zu probes, %zu per class\n", set.probes.size(), set.per_class);
  });

  // exp1
  auto* exp1 = app.add_subcommand("exp1", "Layerwise accuracy split by prototypicality");
  auto* exp2 = app.add_subcommand("exp2", "Swapped-pair evaluation with the Experiment 1 probes");
  auto* exp3 = app.add_subcommand("exp3", "Train and test on scrambled corpora");
  std::string swap_archive;
  for (auto* e : {exp1, exp2, exp3}) {
    e->add_option("--treebank", c.treebank, "Probe-training treebank");
    e->add_option("--archive", c.archive, "Probe-training archive");
    e->add_option("--eval-treebank", c.eval_treebank)->required();
    e->add_option("--eval-archive", c.eval_archive)->required();
    e->add_option("--out", c.out, "Report directory")->required();
    add_training_flags(e, c);
  }
  exp1->add_option("--probes", c.probes, "Probe directory from `train`");
  exp2->add_option("--probes", c.probes, "Probe directory from `train`");
  exp2->add_option("--swap-archive", swap_archive, "Archive of the swapped sentences")->required();
  exp3->add_option("--max-displacement", c.max_displacement)->capture_default_str();
  exp1->callback([&] {
    const ExperimentConfig cfg = c.config();
    const ProbeSet probes = probes_for(c, cfg);
    finish({run_experiment1(probes, load_corpus(c.eval_treebank, c.eval_archive), cfg)}, c.out);
  });
  exp2->callback([&] {
    const ExperimentConfig cfg = c.config();
    const ProbeSet probes = probes_for(c, cfg);
    const Corpus eval = load_corpus(c.eval_treebank, c.eval_archive);
    const auto pairs = build_swap_pairs(eval.sentences);
    finish({run_experiment2(probes, eval, pairs, read_archive(swap_archive), cfg)}, c.out);
  });
  exp3->callback([&] {
    if (c.treebank.empty() || c.archive.empty()) {
      throw ConfigError("exp3 trains fresh probes: give --treebank and --archive");
    }
    const ExperimentConfig cfg = c.config();
    Experiment3Result r = run_experiment3(load_corpus(c.treebank, c.archive),
                                          load_corpus(c.eval_treebank, c.eval_archive), cfg);
    finish({r.report}, c.out);
  });

  // report
  std::string report_in;
  bool no_svg = false;
  auto* report = app.add_subcommand("report", "Render report.json as CSV and charts");
  report->add_option("--in", report_in, "report.json")->required();
  report->add_option("--out", c.out, "Output directory")->required();
  report->add_flag("--no-svg", no_svg);
  report->callback([&] {
    const auto reports = read_reports(report_in);
    emit_report(reports, c.out, {true, false, !no_svg});
    for (const ExperimentReport& r : reports) print_summary(r);
  });

  // synth
  SynthConfig synth;
  std::uint64_t prior_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic annotated treebank");
  synth_cmd->add_option("--out", c.out)->required();
  synth_cmd->add_option("--sentences", synth.num_sentences)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--prefix", synth.id_prefix)->capture_default_str();
  synth_cmd->add_option("--variety", synth.variety)->capture_default_str();
  synth_cmd->add_option("--role-bias", synth.role_bias)->capture_default_str();
  synth_cmd->add_option("--prior-seed", prior_seed, "Mock seed whose lexical prior biases roles")
      ->capture_default_str();
  synth_cmd->callback([&] {
    MockConfig m;
    m.seed = prior_seed;
    write_conllu_file(c.out, mock_treebank(synth, m));
  });

  // mock-pipeline
  MockPipelineConfig pipeline;
  std::size_t sentences = 2000;
  auto* pipe = app.add_subcommand("mock-pipeline", "All three experiments on mock data");
  pipe->add_option("--out", c.out, "Report directory")->required();
  pipe->add_option("--sentences", sentences, "Total sentences, split evenly")->capture_default_str();
  pipe->add_option("--dim", pipeline.mock.dim)->capture_default_str();
  pipe->add_option("--layers", pipeline.mock.num_hidden_layers)->capture_default_str();
  pipe->add_option("--noise", pipeline.mock.noise)->capture_default_str();
  pipe->add_option("--mock-seed", pipeline.mock.seed)->capture_default_str();
  pipe->add_option("--max-displacement", c.max_displacement)->capture_default_str();
  add_training_flags(pipe, c);
  pipe->callback([&] {
    pipeline.experiment = c.config();
    pipeline.train_sentences = sentences / 2;
    pipeline.eval_sentences = sentences - sentences / 2;
    const MockPipelineResult r = run_mock_pipeline(pipeline);
    save_probe_set(r.probes, fs::path(c.out) / "probes");
    finish(r.reports, c.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
