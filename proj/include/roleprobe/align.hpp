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

// Subword-to-token alignment by character-span overlap, and pooling of
// subword vectors into one vector per treebank token.

#ifndef ROLEPROBE_ALIGN_HPP_
#define ROLEPROBE_ALIGN_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "roleprobe/archive.hpp"
#include "roleprobe/conllu.hpp"

namespace roleprobe {

// alignment[t] lists the subword indices assigned to token t (0-based).
using Alignment = std::vector<std::vector<std::size_t>>;

// A subword goes to the token it overlaps most (ties to the earlier token);
// subwords overlapping nothing stay unassigned. Tokens that share an identical
// span (multiword fallback) share their subwords. Throws AlignmentError when
// a token receives no subword.
Alignment align_subwords(std::span<const CharSpan> token_spans,
                         std::span<const CharSpan> subword_spans);

enum class Pooling { kMean, kFirst };

std::string_view pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);

// Word-level vectors for one sentence, [layer][token][dim].
struct TokenVectors {
  std::size_t num_layers = 0;
  std::size_t num_tokens = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t layer, std::size_t token) const {
    return std::span<const double>(values).subspan((layer * num_tokens + token) * dim, dim);
  }
};

TokenVectors pool_token_vectors(const EmbeddingArchive& archive, const SentenceEmbeddings& s,
                                const Alignment& alignment, Pooling pooling);

// Token spans of a reconstructed sentence.
std::vector<CharSpan> token_spans(const Sentence& s);

}  // namespace roleprobe

#endif  // ROLEPROBE_ALIGN_HPP_
