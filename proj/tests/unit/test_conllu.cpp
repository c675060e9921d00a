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

#include <algorithm>

#include "doctest.h"
#include "roleprobe/conllu.hpp"
#include "roleprobe/error.hpp"
#include "test_util.hpp"

using namespace roleprobe;
using roleprobe::testing::data_path;

namespace {

const char* kMinimal =
    "1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tchef\tchef\tNOUN\t_\t_\t0\troot\t_\t_\n"
    "\n";

std::string line(const std::string& index, const std::string& form, const std::string& head,
                 const std::string& misc = "_") {
  return index + "\t" + form + "\t" + form + "\tX\t_\t_\t" + head + "\tdep\t_\t" + misc + "\n";
}

}  // namespace

TEST_CASE("minimal block parses with token 2 as root") {
  const auto s = parse_conllu(std::string_view(kMinimal));
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].size() == 2);
  CHECK(s[0].token(2).head == 0);
  CHECK(s[0].token(1).head == 2);
  CHECK(s[0].token(1).deprel == "det");
  CHECK(s[0].text == "The chef");
  CHECK(s[0].id == "<string>#1");
}

TEST_CASE("column count violations name the line") {
  const std::string text = "# sent_id = a\n" + line("1", "A", "0") +
                           "2\tb\tb\tX\t_\t_\t1\tdep\t_\n\n";
  try {
    parse_conllu(text, "bad.conllu");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.conllu:3") != std::string::npos);
  }
}

TEST_CASE("malformed indices and heads are rejected") {
  CHECK_THROWS_AS(parse_conllu(line("x", "A", "0") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "0") + line("1", "B", "1") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "0") + line("3", "B", "1") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "1") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "0") + line("2", "B", "7") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "0") + line("2", "B", "0") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "2") + line("2", "B", "1") + "\n"), ParseError);
  CHECK_THROWS_AS(parse_conllu(line("1", "A", "q") + "\n"), ParseError);
}

TEST_CASE("multiword range reconstructs from the range form") {
  const auto s = read_conllu_file(data_path("ud_sample.conllu"));
  REQUIRE(s.size() == 3);
  const Sentence& a = s[0];
  CHECK(a.id == "ud-1");
  REQUIRE(a.size() == 6);
  CHECK(a.token(2).form == "do");
  CHECK(a.token(3).form == "n't");
  REQUIRE(a.ranges.size() == 1);
  CHECK(a.ranges[0].form == "don't");
  CHECK(a.text == "I don't like onions.");
  CHECK(a.text == *a.comment_text);
  CHECK(a.token(2).char_span == CharSpan{2, 4});
  CHECK(a.token(3).char_span == CharSpan{4, 7});
  CHECK(a.comments == std::vector<std::string>{" newdoc id = sample"});
}

TEST_CASE("empty nodes are skipped") {
  const auto s = read_conllu_file(data_path("ud_sample.conllu"));
  const Sentence& b = s[1];
  CHECK(b.size() == 9);
  CHECK(b.token(9).form == ".");
  CHECK(b.text == "The chef chopped onions and the baker bread.");
  CHECK(b.text == *b.comment_text);
}

TEST_CASE("range parts that cannot be located share the range span") {
  const std::string text = "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n" + line("1", "de", "0") +
                           line("2", "el", "1") + line("3", "x", "1") + "\n";
  const auto s = parse_conllu(text);
  CHECK(s[0].text == "del x");
  CHECK(s[0].token(1).char_span == CharSpan{0, 3});
  CHECK(s[0].token(2).char_span == CharSpan{0, 3});
  CHECK(s[0].token(3).char_span == CharSpan{4, 5});
}

TEST_CASE("reconstruct_text joins forms with single spaces") {
  Sentence s;
  s.tokens.resize(2);
  s.tokens[0].index = 1;
  s.tokens[0].form = "The";
  s.tokens[1].index = 2;
  s.tokens[1].form = "chef";
  s = reconstruct_text(s);
  CHECK(s.text == "The chef");
  CHECK(s.tokens[0].char_span == CharSpan{0, 3});
  CHECK(s.tokens[1].char_span == CharSpan{4, 8});

  s.tokens[0].form = "Hi";
  s.tokens[0].space_after = false;
  s.tokens[1].form = ",";
  s = reconstruct_text(s);
  CHECK(s.text == "Hi,");
  CHECK(s.tokens[0].char_span == CharSpan{0, 2});
  CHECK(s.tokens[1].char_span == CharSpan{2, 3});
}

TEST_CASE("text comments agree with reconstruction over the bundled treebank") {
  const auto sentences = read_conllu_file(data_path("treebank200.conllu"));
  REQUIRE(sentences.size() == 200);
  std::size_t compared = 0;
  for (const Sentence& s : sentences) {
    if (!s.comment_text || !s.ranges.empty()) continue;
    CHECK(s.text == *s.comment_text);
    ++compared;
  }
  CHECK(compared > 150);
}

TEST_CASE("span invariants hold for every sentence") {
  auto sentences = read_conllu_file(data_path("treebank200.conllu"));
  const auto extra = read_conllu_file(data_path("ud_sample.conllu"));
  sentences.insert(sentences.end(), extra.begin(), extra.end());
  for (const Sentence& s : sentences) {
    std::vector<std::size_t> spans, forms;
    for (const Token& t : s.tokens) {
      CHECK(t.char_span.end > t.char_span.start);
      CHECK(t.char_span.end <= s.text.size());
      CHECK(s.text.substr(t.char_span.start, t.char_span.size()) == t.form);
      spans.push_back(t.char_span.size());
      forms.push_back(t.form.size());
    }
    std::sort(spans.begin(), spans.end());
    std::sort(forms.begin(), forms.end());
    CHECK(spans == forms);
    for (std::size_t i = 1; i < s.tokens.size(); ++i) {
      CHECK(s.tokens[i].char_span.start > s.tokens[i - 1].char_span.start);
      CHECK(s.tokens[i].char_span.start >= s.tokens[i - 1].char_span.end);
    }
  }
}

TEST_CASE("parse, write, parse is structurally idempotent") {
  for (const char* file : {"treebank200.conllu", "ud_sample.conllu", "worked_examples.conllu"}) {
    const auto first = read_conllu_file(data_path(file));
    const std::string written = to_conllu(first);
    const auto second = parse_conllu(written, file);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(same_structure(first[i], second[i]));
      CHECK(first[i].text == second[i].text);
    }
    CHECK(to_conllu(second) == written);
  }
}

TEST_CASE("features and misc survive the round trip") {
  const auto s = read_conllu_file(data_path("ud_sample.conllu"));
  CHECK(s[0].token(1).feat("Person") == "1");
  CHECK(s[0].token(5).feat("Number") == "Plur");
  CHECK_FALSE(s[0].token(5).space_after);
  CHECK(s[0].token(5).misc.empty());
  CHECK(s[1].token(1).deps == "2:det");
  CHECK(s[1].token(8).base_deprel() == "orphan");
  const auto again = parse_conllu(to_conllu(s));
  CHECK(again[1].comments == s[1].comments);
}
