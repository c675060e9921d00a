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

// On-disk embedding archive: a directory holding manifest.json plus one raw
// little-endian float32 file per sentence, shaped [layers][subwords][dim].

#ifndef ROLEPROBE_ARCHIVE_HPP_
#define ROLEPROBE_ARCHIVE_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "roleprobe/conllu.hpp"

namespace roleprobe {

inline constexpr int kArchiveFormatVersion = 1;

struct SentenceEmbeddings {
  std::string id;
  std::string text;
  std::vector<CharSpan> subword_spans;
  std::vector<float> values;  // [layers][subwords][dim], row-major

  std::size_t num_subwords() const { return subword_spans.size(); }
};

struct EmbeddingArchive {
  std::string model_name;
  int num_hidden_layers = 0;
  int dim = 0;
  std::string pooling = "mean";
  std::vector<std::string> layer_names;  // "static", "0", ..., "L"
  std::vector<SentenceEmbeddings> sentences;

  std::size_t num_layers() const { return static_cast<std::size_t>(num_hidden_layers) + 2; }

  // One subword vector of one sentence.
  std::span<const float> vector(const SentenceEmbeddings& s, std::size_t layer,
                                std::size_t subword) const;
};

std::vector<std::string> default_layer_names(int num_hidden_layers);

// Position of `name` in the layer list; throws ConfigError when absent.
std::size_t layer_position(std::span<const std::string> layer_names, std::string_view name);

// Index from sentence id to position; throws CorruptArchiveError on duplicates.
std::unordered_map<std::string, std::size_t> index_by_id(const EmbeddingArchive& a);

// Structural checks: layer names, shapes, spans inside text, finite values.
void validate_archive(const EmbeddingArchive& a);

void write_archive(const EmbeddingArchive& a, const std::filesystem::path& dir);
EmbeddingArchive read_archive(const std::filesystem::path& dir);

// Metadata equal and every float equal bit for bit.
bool bit_identical(const EmbeddingArchive& a, const EmbeddingArchive& b);

}  // namespace roleprobe

#endif  // ROLEPROBE_ARCHIVE_HPP_
