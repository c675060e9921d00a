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

// Small annotated English corpora generated from templates. Used for the
// bundled test treebank and for the self-contained mock pipeline.

#ifndef ROLEPROBE_SYNTH_HPP_
#define ROLEPROBE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roleprobe/conllu.hpp"

namespace roleprobe {

struct NounEntry {
  std::string_view singular;
  std::string_view plural;
};

std::span<const NounEntry> synth_nouns();

// How strongly a noun lemma leans towards subjecthood, in [-1, 1].
using RolePrior = std::function<double(std::string_view lemma)>;

struct SynthConfig {
  std::size_t num_sentences = 1000;
  std::uint64_t seed = 0;
  std::string id_prefix = "synth";
  // Subject lemmas are drawn with weight sigmoid(role_bias * prior), objects
  // with sigmoid(-role_bias * prior). 0 makes lemma choice role-blind.
  double role_bias = 4.0;
  // Share of the short "Det N V Det N ." frame; the rest get adjectives.
  double short_rate = 0.3;
  double plural_rate = 0.2;
  // Object number copies the subject's, so every clause passes the number
  // filter.
  bool match_number = true;
  // Share of sentences drawn from the other constructions (pronoun subjects,
  // passives, intransitives, compounds, flat names, coordination,
  // contractions, causative xcomp, possessives).
  double variety = 0.0;
};

std::vector<Sentence> synthesize_corpus(const SynthConfig& cfg, const RolePrior& prior);

}  // namespace roleprobe

#endif  // ROLEPROBE_SYNTH_HPP_
