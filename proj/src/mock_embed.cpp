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

#include "roleprobe/mock_embed.hpp"

#include <cctype>
#include <cstdio>

#include "roleprobe/error.hpp"
#include "roleprobe/parallel.hpp"
#include "roleprobe/random.hpp"

namespace roleprobe {

void validate(const MockConfig& cfg) {
  if (cfg.dim < 3) throw ConfigError("mock embedder needs dim >= 3");
  if (cfg.num_hidden_layers < 1) throw ConfigError("mock embedder needs at least one layer");
  if (!(cfg.noise >= 0.0)) throw ConfigError("mock noise must be >= 0");
}

double lexical_prior(std::string_view lemma, std::uint64_t seed) {
  const std::uint64_t h = derive_seed(derive_seed(seed, "lexical-prior"), lemma);
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

std::string lexical_key(const Token& t) {
  if (!t.lemma.empty()) return t.lemma;
  std::string key = t.form;
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key;
}

int governing_verb(const Sentence& s, int index) {
  int cur = s.token(index).head;
  for (std::size_t steps = 0; cur != 0 && steps <= s.size(); ++steps) {
    const Token& t = s.token(cur);
    if (t.upos == "VERB") return cur;
    cur = t.head;
  }
  return 0;
}

int positional_sign(const Sentence& s, int index) {
  const int verb = governing_verb(s, index);
  if (verb == 0) return 0;
  return index < verb ? 1 : -1;
}

std::string mock_model_name(const MockConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "mock(d=%d,L=%d,seed=%llu,noise=%g)", cfg.dim,
                cfg.num_hidden_layers, static_cast<unsigned long long>(cfg.seed), cfg.noise);
  return buf;
}

SentenceEmbeddings mock_embed(const Sentence& s, const MockConfig& cfg) {
  validate(cfg);
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto layers = static_cast<std::size_t>(cfg.num_hidden_layers) + 2;
  const std::size_t m = s.size();
  SentenceEmbeddings out;
  out.id = s.id;
  out.text = s.text;
  out.values.assign(layers * m * d, 0.0F);
  const std::uint64_t static_stream = derive_seed(cfg.seed, "static-noise");
  const std::uint64_t sentence_stream = derive_seed(derive_seed(cfg.seed, "context-noise"), s.id);
  for (std::size_t t = 0; t < m; ++t) {
    const Token& tok = s.tokens[t];
    out.subword_spans.push_back(tok.char_span);
    const std::string key = lexical_key(tok);
    const auto prior = static_cast<float>(lexical_prior(key, cfg.seed));
    const int r = positional_sign(s, tok.index);
    for (std::size_t layer = 0; layer < layers; ++layer) {
      float* v = out.values.data() + (layer * m + t) * d;
      // layer 0 is "static", layer 1 is hidden layer "0"
      const double depth = layer == 0 ? 0.0 : static_cast<double>(layer - 1);
      v[0] = prior;
      v[1] = static_cast<float>(depth / cfg.num_hidden_layers * r);
      Rng rng(layer == 0 ? derive_seed(static_stream, key)
                         : derive_seed(sentence_stream, t * 4096 + layer));
      for (std::size_t i = 2; i < d; ++i) v[i] = static_cast<float>(rng.gaussian() * cfg.noise);
    }
  }
  return out;
}

EmbeddingArchive mock_archive(std::span<const Sentence> sentences, const MockConfig& cfg) {
  validate(cfg);
  EmbeddingArchive a;
  a.model_name = mock_model_name(cfg);
  a.num_hidden_layers = cfg.num_hidden_layers;
  a.dim = cfg.dim;
  a.pooling = "mean";
  a.layer_names = default_layer_names(cfg.num_hidden_layers);
  a.sentences.resize(sentences.size());
  parallel_for(sentences.size(), [&](std::size_t i) { a.sentences[i] = mock_embed(sentences[i], cfg); });
  return a;
}

}  // namespace roleprobe
