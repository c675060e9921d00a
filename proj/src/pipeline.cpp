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

#include "roleprobe/pipeline.hpp"

#include "roleprobe/random.hpp"

namespace roleprobe {

std::vector<Sentence> mock_treebank(const SynthConfig& synth, const MockConfig& mock) {
  const std::uint64_t seed = mock.seed;
  return synthesize_corpus(synth, [seed](std::string_view lemma) { return lexical_prior(lemma, seed); });
}

MockPipelineResult run_mock_pipeline(const MockPipelineConfig& cfg) {
  validate(cfg.mock);
  validate(cfg.experiment);
  const std::uint64_t seed = cfg.experiment.seed;
  MockPipelineResult out;

  SynthConfig train_synth = cfg.synth;
  train_synth.num_sentences = cfg.train_sentences;
  train_synth.seed = derive_seed(seed, "synth/train");
  train_synth.id_prefix = "train";
  SynthConfig eval_synth = cfg.synth;
  eval_synth.num_sentences = cfg.eval_sentences;
  eval_synth.seed = derive_seed(seed, "synth/eval");
  eval_synth.id_prefix = "eval";

  out.train = {"mock-train", mock_treebank(train_synth, cfg.mock), {}};
  out.eval = {"mock-eval", mock_treebank(eval_synth, cfg.mock), {}};
  out.train.archive = mock_archive(out.train.sentences, cfg.mock);
  out.eval.archive = mock_archive(out.eval.sentences, cfg.mock);

  out.probes = train_layerwise_probes(out.train, cfg.experiment);
  out.reports.push_back(run_experiment1(out.probes, out.eval, cfg.experiment));

  out.pairs = build_swap_pairs(out.eval.sentences);
  std::vector<Sentence> swapped;
  swapped.reserve(out.pairs.size());
  for (const SwappedPair& p : out.pairs) swapped.push_back(p.swapped);
  const EmbeddingArchive swap_archive = mock_archive(swapped, cfg.mock);
  out.reports.push_back(
      run_experiment2(out.probes, out.eval, out.pairs, swap_archive, cfg.experiment));

  const std::uint64_t scramble_seed = derive_seed(seed, "scramble");
  auto scrambled = [&](const Corpus& c, const char* name) {
    Corpus s{name, {}, {}};
    for (ScrambledSentence& sc : scramble_corpus(c.sentences, cfg.experiment.max_displacement,
                                                 scramble_seed)) {
      s.sentences.push_back(std::move(sc.scrambled));
    }
    s.archive = mock_archive(s.sentences, cfg.mock);
    return s;
  };
  const Corpus train_scrambled = scrambled(out.train, "mock-train-scrambled");
  const Corpus eval_scrambled = scrambled(out.eval, "mock-eval-scrambled");
  Experiment3Result e3 = run_experiment3(train_scrambled, eval_scrambled, cfg.experiment);
  out.scrambled_probes = std::move(e3.probes);
  out.reports.push_back(std::move(e3.report));

  nlohmann::json mock = {{"dim", cfg.mock.dim},
                         {"num_hidden_layers", cfg.mock.num_hidden_layers},
                         {"seed", cfg.mock.seed},
                         {"noise", cfg.mock.noise},
                         {"train_sentences", cfg.train_sentences},
                         {"eval_sentences", cfg.eval_sentences},
                         {"role_bias", cfg.synth.role_bias},
                         {"short_rate", cfg.synth.short_rate},
                         {"variety", cfg.synth.variety}};
  for (ExperimentReport& r : out.reports) r.provenance["mock"] = mock;
  return out;
}

}  // namespace roleprobe
