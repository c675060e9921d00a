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

// The self-contained mock pipeline: synthesize train/eval treebanks, embed
// them with the mock model, run all three experiments.

#ifndef ROLEPROBE_PIPELINE_HPP_
#define ROLEPROBE_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roleprobe/experiment.hpp"
#include "roleprobe/mock_embed.hpp"
#include "roleprobe/synth.hpp"

namespace roleprobe {

struct MockPipelineConfig {
  MockConfig mock;
  // num_sentences / seed / id_prefix are filled per split.
  SynthConfig synth;
  std::size_t train_sentences = 1000;
  std::size_t eval_sentences = 1000;
  ExperimentConfig experiment;
};

struct MockPipelineResult {
  Corpus train;
  Corpus eval;
  ProbeSet probes;           // Experiment 1, reused by Experiment 2
  ProbeSet scrambled_probes;  // Experiment 3
  std::vector<SwappedPair> pairs;
  std::vector<ExperimentReport> reports;  // exp1, exp2, exp3
};

// Everything is derived from experiment.seed and mock.seed.
MockPipelineResult run_mock_pipeline(const MockPipelineConfig& cfg);

// Synthetic treebank whose nouns lean towards roles by the mock lexical
// prior.
std::vector<Sentence> mock_treebank(const SynthConfig& synth, const MockConfig& mock);

}  // namespace roleprobe

#endif  // ROLEPROBE_PIPELINE_HPP_
