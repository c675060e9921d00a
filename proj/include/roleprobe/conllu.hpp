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

// CoNLL-U reader/writer and surface-text reconstruction.

#ifndef ROLEPROBE_CONLLU_HPP_
#define ROLEPROBE_CONLLU_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roleprobe {

// Half-open [start, end) byte range into a sentence's text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const CharSpan&) const = default;
};

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::map<std::string, std::string> feats;
  int head = 0;  // 0 = root
  std::string deprel;
  std::string deps;
  std::string misc;  // raw MISC column without SpaceAfter
  bool space_after = true;
  CharSpan char_span;

  // Feature value or empty string.
  std::string_view feat(std::string_view name) const;
  // Relation with any ":subtype" removed.
  std::string_view base_deprel() const;

  bool operator==(const Token&) const = default;
};

// Multiword token line such as "1-2  don't".
struct MultiwordRange {
  int first = 0;
  int last = 0;
  std::string form;
  std::string misc;
  bool space_after = true;

  bool operator==(const MultiwordRange&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  std::vector<MultiwordRange> ranges;
  // Comment lines other than sent_id/text, verbatim without the leading "#".
  std::vector<std::string> comments;
  // Value of "# text =" when present.
  std::optional<std::string> comment_text;
  // Filled by reconstruct_text.
  std::string text;

  std::size_t size() const { return tokens.size(); }
  // Token by 1-based index.
  const Token& token(int index) const { return tokens.at(index - 1); }
  Token& token(int index) { return tokens.at(index - 1); }
  // Range covering `index`, if any.
  const MultiwordRange* range_of(int index) const;
};

// Parses every sentence in `in`. `source` names the stream in errors and in
// synthetic sentence ids. Text is reconstructed for every sentence.
std::vector<Sentence> parse_conllu(std::istream& in,
                                   std::string_view source = "<stream>");
std::vector<Sentence> parse_conllu(std::string_view text,
                                   std::string_view source = "<string>");
std::vector<Sentence> read_conllu_file(const std::filesystem::path& path);

// Fills `text` and every token's `char_span`.
Sentence reconstruct_text(Sentence s);

void write_conllu(std::ostream& out, const Sentence& s);
void write_conllu(std::ostream& out, std::span<const Sentence> sentences);
std::string to_conllu(std::span<const Sentence> sentences);
void write_conllu_file(const std::filesystem::path& path,
                       std::span<const Sentence> sentences);

// Syntactic content only: ids, token fields and ranges.
bool same_structure(const Sentence& a, const Sentence& b);

}  // namespace roleprobe

#endif  // ROLEPROBE_CONLLU_HPP_
