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

#include "roleprobe/align.hpp"

#include <algorithm>
#include <string>

#include "roleprobe/error.hpp"

namespace roleprobe {

Alignment align_subwords(std::span<const CharSpan> token_spans,
                         std::span<const CharSpan> subword_spans) {
  Alignment alignment(token_spans.size());
  std::size_t first = 0;  // first token that can still overlap
  for (std::size_t j = 0; j < subword_spans.size(); ++j) {
    const CharSpan sub = subword_spans[j];
    while (first < token_spans.size() && token_spans[first].end <= sub.start) ++first;
    std::size_t best = token_spans.size();
    std::size_t best_overlap = 0;
    for (std::size_t t = first; t < token_spans.size() && token_spans[t].start < sub.end; ++t) {
      const std::size_t lo = std::max(sub.start, token_spans[t].start);
      const std::size_t hi = std::min(sub.end, token_spans[t].end);
      const std::size_t overlap = hi > lo ? hi - lo : 0;
      if (overlap > best_overlap) {
        best = t;
        best_overlap = overlap;
      }
    }
    if (best < token_spans.size()) alignment[best].push_back(j);
  }
  for (std::size_t t = 1; t < token_spans.size(); ++t) {
    if (alignment[t].empty() && token_spans[t] == token_spans[t - 1]) {
      alignment[t] = alignment[t - 1];
    }
  }
  for (std::size_t t = 0; t < token_spans.size(); ++t) {
    if (alignment[t].empty()) {
      throw AlignmentError("token " + std::to_string(t + 1) + " [" +
                           std::to_string(token_spans[t].start) + "," +
                           std::to_string(token_spans[t].end) +
                           ") overlaps no subword; text and tokenization disagree");
    }
  }
  return alignment;
}

std::string_view pooling_name(Pooling p) { return p == Pooling::kFirst ? "first" : "mean"; }

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "first") return Pooling::kFirst;
  throw ConfigError("unknown pooling '" + std::string(name) + "'");
}

TokenVectors pool_token_vectors(const EmbeddingArchive& archive, const SentenceEmbeddings& s,
                                const Alignment& alignment, Pooling pooling) {
  TokenVectors out;
  out.num_layers = archive.num_layers();
  out.num_tokens = alignment.size();
  out.dim = static_cast<std::size_t>(archive.dim);
  out.values.assign(out.num_layers * out.num_tokens * out.dim, 0.0);
  for (std::size_t layer = 0; layer < out.num_layers; ++layer) {
    for (std::size_t t = 0; t < out.num_tokens; ++t) {
      double* dst = out.values.data() + (layer * out.num_tokens + t) * out.dim;
      const auto& subs = alignment[t];
      const std::size_t used = pooling == Pooling::kFirst ? std::min<std::size_t>(1, subs.size())
                                                          : subs.size();
      for (std::size_t k = 0; k < used; ++k) {
        const auto v = archive.vector(s, layer, subs[k]);
        for (std::size_t i = 0; i < out.dim; ++i) dst[i] += v[i];
      }
      if (used > 1) {
        for (std::size_t i = 0; i < out.dim; ++i) dst[i] /= static_cast<double>(used);
      }
    }
  }
  return out;
}

std::vector<CharSpan> token_spans(const Sentence& s) {
  std::vector<CharSpan> spans;
  spans.reserve(s.tokens.size());
  for (const Token& t : s.tokens) spans.push_back(t.char_span);
  return spans;
}

}  // namespace roleprobe
