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

// Deterministic stand-in for a contextual embedding model.
//
// Coordinate 0 is a lexical prior in [-1, 1] hashed from the lemma and shared
// by every layer. Coordinate 1 is (layer / L) * r, where r is +1 for a token
// before its governing verb and -1 after it (0 for the static layer and layer
// "0"). The remaining coordinates are Gaussian noise scaled by `noise`; at the
// static layer the noise is keyed by lemma so the static space carries no
// positional information.

#ifndef ROLEPROBE_MOCK_EMBED_HPP_
#define ROLEPROBE_MOCK_EMBED_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "roleprobe/archive.hpp"
#include "roleprobe/conllu.hpp"

namespace roleprobe {

struct MockConfig {
  int dim = 16;
  int num_hidden_layers = 6;
  std::uint64_t seed = 0;
  double noise = 0.1;
};

void validate(const MockConfig& cfg);

double lexical_prior(std::string_view lemma, std::uint64_t seed);

// Lemma used for hashing: the lemma, or the lowercased form when absent.
std::string lexical_key(const Token& t);

// Index of the nearest VERB ancestor of token `index`, or 0 when none.
int governing_verb(const Sentence& s, int index);

// +1 before the governing verb, -1 after it, 0 without one (or for the verb).
int positional_sign(const Sentence& s, int index);

std::string mock_model_name(const MockConfig& cfg);

// One subword per token; spans equal the token spans.
SentenceEmbeddings mock_embed(const Sentence& s, const MockConfig& cfg);

EmbeddingArchive mock_archive(std::span<const Sentence> sentences, const MockConfig& cfg);

}  // namespace roleprobe

#endif  // ROLEPROBE_MOCK_EMBED_HPP_
