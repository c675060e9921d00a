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

#include "roleprobe/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "roleprobe/error.hpp"

namespace roleprobe {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = s.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(begin));
      return out;
    }
    out.push_back(s.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, int& value) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool is_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string field(std::string_view s) {
  return s == "_" ? std::string() : std::string(s);
}

// Splits MISC into (remaining items, SpaceAfter flag).
std::pair<std::string, bool> parse_misc(std::string_view misc) {
  if (misc == "_" || misc.empty()) return {std::string(), true};
  bool space_after = true;
  std::string rest;
  for (std::string_view item : split(misc, '|')) {
    if (item == "SpaceAfter=No") {
      space_after = false;
      continue;
    }
    if (!rest.empty()) rest += '|';
    rest.append(item);
  }
  return {rest, space_after};
}

std::string compose_misc(const std::string& misc, bool space_after) {
  std::string out = misc;
  if (!space_after) {
    if (!out.empty()) out += '|';
    out += "SpaceAfter=No";
  }
  return out.empty() ? "_" : out;
}

class Parser {
 public:
  explicit Parser(std::string_view source) : source_(source) {}

  void line(std::string_view raw) {
    ++line_no_;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (trim(raw).empty()) {
      finish();
      return;
    }
    if (!open_) {
      open_ = true;
      start_line_ = line_no_;
    }
    if (raw.front() == '#') {
      comment(raw.substr(1));
      return;
    }
    token_line(raw);
  }

  std::vector<Sentence> done() {
    finish();
    return std::move(sentences_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(std::string(source_), line_no_, what);
  }

  void comment(std::string_view body) {
    std::string_view t = trim(body);
    const auto kv = [&](std::string_view key) -> std::optional<std::string_view> {
      if (t.substr(0, key.size()) != key) return std::nullopt;
      std::string_view rest = trim(t.substr(key.size()));
      if (rest.empty() || rest.front() != '=') return std::nullopt;
      return trim(rest.substr(1));
    };
    if (auto id = kv("sent_id")) {
      current_.id = std::string(*id);
    } else if (auto text = kv("text")) {
      current_.comment_text = std::string(*text);
    } else {
      current_.comments.emplace_back(body);
    }
  }

  void token_line(std::string_view raw) {
    const auto cols = split(raw, '\t');
    if (cols.size() != 10) {
      fail("expected 10 tab-separated columns, found " +
           std::to_string(cols.size()));
    }
    const std::string_view id = cols[0];
    if (const auto dash = id.find('-'); dash != std::string_view::npos) {
      MultiwordRange r;
      if (!parse_int(id.substr(0, dash), r.first) ||
          !parse_int(id.substr(dash + 1), r.last) || r.first < 1 ||
          r.last < r.first) {
        fail("malformed multiword range id '" + std::string(id) + "'");
      }
      r.form = std::string(cols[1]);
      std::tie(r.misc, r.space_after) = parse_misc(cols[9]);
      range_lines_.push_back(line_no_);
      current_.ranges.push_back(std::move(r));
      return;
    }
    if (const auto dot = id.find('.'); dot != std::string_view::npos) {
      if (!is_digits(id.substr(0, dot)) || !is_digits(id.substr(dot + 1))) {
        fail("malformed empty-node id '" + std::string(id) + "'");
      }
      return;  // empty nodes carry enhanced graphs only
    }
    Token t;
    if (!parse_int(id, t.index) || t.index < 1) {
      fail("non-numeric token index '" + std::string(id) + "'");
    }
    const int expected = static_cast<int>(current_.tokens.size()) + 1;
    if (t.index < expected) fail("duplicate token index " + std::to_string(t.index));
    if (t.index > expected) {
      fail("token index " + std::to_string(t.index) + " out of sequence (expected " +
           std::to_string(expected) + ")");
    }
    t.form = std::string(cols[1]);
    t.lemma = field(cols[2]);
    t.upos = field(cols[3]);
    t.xpos = field(cols[4]);
    if (cols[5] != "_") {
      for (std::string_view kv : split(cols[5], '|')) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos || eq == 0) {
          fail("malformed feature '" + std::string(kv) + "'");
        }
        t.feats.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      }
    }
    if (!parse_int(cols[6], t.head) || t.head < 0) {
      fail("non-numeric head '" + std::string(cols[6]) + "'");
    }
    if (t.head == t.index) fail("token " + std::to_string(t.index) + " is its own head");
    t.deprel = field(cols[7]);
    t.deps = field(cols[8]);
    std::tie(t.misc, t.space_after) = parse_misc(cols[9]);
    current_.tokens.push_back(std::move(t));
  }

  void finish() {
    if (!open_) return;
    open_ = false;
    if (current_.tokens.empty()) {
      if (!current_.ranges.empty()) fail("sentence has ranges but no tokens");
      current_ = Sentence();  // comment-only block
      range_lines_.clear();
      return;
    }
    const int n = static_cast<int>(current_.tokens.size());
    int roots = 0;
    for (const Token& t : current_.tokens) {
      if (t.head > n) {
        fail("head " + std::to_string(t.head) + " of token " +
             std::to_string(t.index) + " outside sentence");
      }
      roots += t.head == 0;
    }
    if (roots != 1) {
      fail("sentence starting at line " + std::to_string(start_line_) + " has " +
           std::to_string(roots) + " root tokens");
    }
    int covered = 0;
    for (std::size_t i = 0; i < current_.ranges.size(); ++i) {
      const MultiwordRange& r = current_.ranges[i];
      if (r.last > n || r.first <= covered) {
        throw ParseError(std::string(source_), range_lines_[i],
                         "multiword range " + std::to_string(r.first) + "-" +
                             std::to_string(r.last) + " overlaps or exceeds sentence");
      }
      covered = r.last;
    }
    ++ordinal_;
    if (current_.id.empty()) {
      current_.id = std::string(source_) + "#" + std::to_string(ordinal_);
    }
    sentences_.push_back(reconstruct_text(std::move(current_)));
    current_ = Sentence();
    range_lines_.clear();
  }

  std::string_view source_;
  std::size_t line_no_ = 0;
  std::size_t start_line_ = 0;
  std::size_t ordinal_ = 0;
  bool open_ = false;
  Sentence current_;
  std::vector<std::size_t> range_lines_;
  std::vector<Sentence> sentences_;
};

}  // namespace

std::string_view Token::feat(std::string_view name) const {
  const auto it = feats.find(std::string(name));
  return it == feats.end() ? std::string_view() : std::string_view(it->second);
}

std::string_view Token::base_deprel() const {
  const std::string_view d = deprel;
  return d.substr(0, d.find(':'));
}

const MultiwordRange* Sentence::range_of(int index) const {
  for (const MultiwordRange& r : ranges) {
    if (index >= r.first && index <= r.last) return &r;
  }
  return nullptr;
}

std::vector<Sentence> parse_conllu(std::istream& in, std::string_view source) {
  Parser parser(source);
  std::string raw;
  while (std::getline(in, raw)) parser.line(raw);
  return parser.done();
}

std::vector<Sentence> parse_conllu(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in, source);
}

std::vector<Sentence> read_conllu_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open treebank " + path.string());
  return parse_conllu(in, path.filename().string());
}

Sentence reconstruct_text(Sentence s) {
  s.text.clear();
  const int n = static_cast<int>(s.tokens.size());
  std::size_t next_range = 0;
  for (int i = 1; i <= n;) {
    if (next_range < s.ranges.size() && s.ranges[next_range].first == i) {
      const MultiwordRange& r = s.ranges[next_range++];
      const std::size_t start = s.text.size();
      s.text += r.form;
      const std::size_t end = s.text.size();
      // Locate each part inside the range form; if any part is missing the
      // whole range span is shared by all parts.
      std::vector<CharSpan> parts;
      std::size_t cursor = 0;
      for (int j = r.first; j <= r.last; ++j) {
        const std::string& form = s.token(j).form;
        const std::size_t at = form.empty() ? std::string::npos : r.form.find(form, cursor);
        if (at == std::string::npos) {
          parts.clear();
          break;
        }
        parts.push_back({start + at, start + at + form.size()});
        cursor = at + form.size();
      }
      for (int j = r.first; j <= r.last; ++j) {
        s.token(j).char_span =
            parts.empty() ? CharSpan{start, end} : parts[static_cast<std::size_t>(j - r.first)];
      }
      if (r.last < n && r.space_after) s.text += ' ';
      i = r.last + 1;
      continue;
    }
    Token& t = s.token(i);
    const std::size_t start = s.text.size();
    s.text += t.form;
    t.char_span = {start, s.text.size()};
    if (i < n && t.space_after) s.text += ' ';
    ++i;
  }
  return s;
}

void write_conllu(std::ostream& out, const Sentence& s) {
  out << "# sent_id = " << s.id << '\n';
  for (const std::string& c : s.comments) out << '#' << c << '\n';
  out << "# text = " << (s.text.empty() ? reconstruct_text(s).text : s.text) << '\n';
  const auto blank = [](const std::string& v) -> const std::string& {
    static const std::string underscore = "_";
    return v.empty() ? underscore : v;
  };
  std::size_t next_range = 0;
  for (const Token& t : s.tokens) {
    if (next_range < s.ranges.size() && s.ranges[next_range].first == t.index) {
      const MultiwordRange& r = s.ranges[next_range++];
      out << r.first << '-' << r.last << '\t' << r.form << "\t_\t_\t_\t_\t_\t_\t_\t"
          << compose_misc(r.misc, r.space_after) << '\n';
    }
    std::string feats;
    for (const auto& [k, v] : t.feats) {
      if (!feats.empty()) feats += '|';
      feats += k + "=" + v;
    }
    out << t.index << '\t' << t.form << '\t' << blank(t.lemma) << '\t' << blank(t.upos)
        << '\t' << blank(t.xpos) << '\t' << blank(feats) << '\t' << t.head << '\t'
        << blank(t.deprel) << '\t' << blank(t.deps) << '\t'
        << compose_misc(t.misc, t.space_after) << '\n';
  }
  out << '\n';
}

void write_conllu(std::ostream& out, std::span<const Sentence> sentences) {
  for (const Sentence& s : sentences) write_conllu(out, s);
}

std::string to_conllu(std::span<const Sentence> sentences) {
  std::ostringstream out;
  write_conllu(out, sentences);
  return out.str();
}

void write_conllu_file(const std::filesystem::path& path,
                       std::span<const Sentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_conllu(out, sentences);
  if (!out) throw IoError("write failed for " + path.string());
}

bool same_structure(const Sentence& a, const Sentence& b) {
  if (a.id != b.id || a.ranges != b.ranges || a.tokens.size() != b.tokens.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    Token x = a.tokens[i];
    Token y = b.tokens[i];
    x.char_span = y.char_span = {};
    if (x != y) return false;
  }
  return true;
}

}  // namespace roleprobe
