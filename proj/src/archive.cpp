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

#include "roleprobe/archive.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "roleprobe/error.hpp"

namespace roleprobe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint32_t byteswap32(std::uint32_t x) {
  return (x >> 24) | ((x >> 8) & 0xff00U) | ((x << 8) & 0xff0000U) | (x << 24);
}

std::string data_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06zu.f32", i);
  return buf;
}

std::size_t expected_values(const EmbeddingArchive& a, std::size_t subwords) {
  return a.num_layers() * subwords * static_cast<std::size_t>(a.dim);
}

void write_floats(const fs::path& path, std::span<const float> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) {
      const auto bits = byteswap32(std::bit_cast<std::uint32_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<float> read_floats(const fs::path& path, std::size_t count) {
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) throw CorruptArchiveError("missing data file " + path.string());
  if (bytes != count * sizeof(float)) {
    throw CorruptArchiveError("data file " + path.string() + " has " + std::to_string(bytes) +
                              " bytes, manifest implies " +
                              std::to_string(count * sizeof(float)));
  }
  std::vector<float> values(count);
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw CorruptArchiveError("short read from " + path.string());
  if constexpr (std::endian::native != std::endian::little) {
    for (float& v : values) {
      v = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(v)));
    }
  }
  return values;
}

}  // namespace

std::span<const float> EmbeddingArchive::vector(const SentenceEmbeddings& s, std::size_t layer,
                                                std::size_t subword) const {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t offset = (layer * s.num_subwords() + subword) * d;
  return std::span<const float>(s.values).subspan(offset, d);
}

std::vector<std::string> default_layer_names(int num_hidden_layers) {
  std::vector<std::string> names{"static"};
  for (int l = 0; l <= num_hidden_layers; ++l) names.push_back(std::to_string(l));
  return names;
}

std::size_t layer_position(std::span<const std::string> layer_names, std::string_view name) {
  for (std::size_t i = 0; i < layer_names.size(); ++i) {
    if (layer_names[i] == name) return i;
  }
  throw ConfigError("unknown layer '" + std::string(name) + "'");
}

std::unordered_map<std::string, std::size_t> index_by_id(const EmbeddingArchive& a) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(a.sentences.size());
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    if (!index.emplace(a.sentences[i].id, i).second) {
      throw CorruptArchiveError("duplicate sentence id " + a.sentences[i].id);
    }
  }
  return index;
}

void validate_archive(const EmbeddingArchive& a) {
  if (a.num_hidden_layers < 0) throw CorruptArchiveError("negative num_hidden_layers");
  if (a.dim < 1) throw CorruptArchiveError("dim must be >= 1");
  if (a.layer_names != default_layer_names(a.num_hidden_layers)) {
    throw CorruptArchiveError("layer_names must be [static, 0, ..., " +
                              std::to_string(a.num_hidden_layers) + "]");
  }
  if (a.pooling != "mean" && a.pooling != "first") {
    throw CorruptArchiveError("unknown pooling '" + a.pooling + "'");
  }
  index_by_id(a);
  for (const SentenceEmbeddings& s : a.sentences) {
    if (s.values.size() != expected_values(a, s.num_subwords())) {
      throw CorruptArchiveError("sentence " + s.id + " holds " + std::to_string(s.values.size()) +
                                " values, expected " +
                                std::to_string(expected_values(a, s.num_subwords())));
    }
    std::size_t last_start = 0;
    for (const CharSpan& span : s.subword_spans) {
      if (span.start > span.end || span.end > s.text.size()) {
        throw CorruptArchiveError("sentence " + s.id + " has subword span [" +
                                  std::to_string(span.start) + "," + std::to_string(span.end) +
                                  ") outside its text");
      }
      if (span.start < last_start) {
        throw CorruptArchiveError("sentence " + s.id + " has subword spans out of order");
      }
      last_start = span.start;
    }
    for (float v : s.values) {
      if (!std::isfinite(v)) throw CorruptArchiveError("sentence " + s.id + " holds non-finite values");
    }
  }
}

void write_archive(const EmbeddingArchive& a, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create archive directory " + dir.string() + ": " + ec.message());
  json sentences = json::array();
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    const SentenceEmbeddings& s = a.sentences[i];
    if (s.values.size() != expected_values(a, s.num_subwords())) {
      throw ShapeError("sentence " + s.id + " has inconsistent shape");
    }
    json spans = json::array();
    for (const CharSpan& span : s.subword_spans) spans.push_back({span.start, span.end});
    const std::string file = data_file_name(i);
    sentences.push_back({{"id", s.id},
                         {"text", s.text},
                         {"num_subwords", s.num_subwords()},
                         {"subword_spans", std::move(spans)},
                         {"data_file", file}});
    write_floats(dir / file, s.values);
  }
  const json manifest = {{"format_version", kArchiveFormatVersion},
                         {"model_name", a.model_name},
                         {"num_hidden_layers", a.num_hidden_layers},
                         {"dim", a.dim},
                         {"pooling", a.pooling},
                         {"layer_names", a.layer_names},
                         {"sentences", std::move(sentences)}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(1) << '\n';
  if (!out) throw IoError("write failed for manifest in " + dir.string());
}

EmbeddingArchive read_archive(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw CorruptArchiveError("manifest is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (!manifest.contains("format_version")) throw CorruptArchiveError("manifest lacks format_version");
    const int version = manifest.at("format_version").get<int>();
    if (version != kArchiveFormatVersion) {
      throw VersionError("unsupported archive format_version " + std::to_string(version));
    }
    EmbeddingArchive a;
    a.model_name = manifest.at("model_name").get<std::string>();
    a.num_hidden_layers = manifest.at("num_hidden_layers").get<int>();
    a.dim = manifest.at("dim").get<int>();
    a.pooling = manifest.value("pooling", std::string("mean"));
    a.layer_names = manifest.at("layer_names").get<std::vector<std::string>>();
    if (a.num_hidden_layers < 0 || a.dim < 1 ||
        a.layer_names.size() != a.num_layers()) {
      throw CorruptArchiveError("manifest shape fields are inconsistent");
    }
    for (const json& js : manifest.at("sentences")) {
      SentenceEmbeddings s;
      s.id = js.at("id").get<std::string>();
      s.text = js.at("text").get<std::string>();
      for (const json& span : js.at("subword_spans")) {
        if (!span.is_array() || span.size() != 2) throw CorruptArchiveError("malformed subword span");
        s.subword_spans.push_back({span[0].get<std::size_t>(), span[1].get<std::size_t>()});
      }
      if (js.at("num_subwords").get<std::size_t>() != s.subword_spans.size()) {
        throw CorruptArchiveError("sentence " + s.id + " num_subwords disagrees with its spans");
      }
      s.values = read_floats(dir / js.at("data_file").get<std::string>(),
                             expected_values(a, s.num_subwords()));
      a.sentences.push_back(std::move(s));
    }
    return a;
  } catch (const json::exception& e) {
    throw CorruptArchiveError("malformed manifest: " + std::string(e.what()));
  }
}

bool bit_identical(const EmbeddingArchive& a, const EmbeddingArchive& b) {
  if (a.model_name != b.model_name || a.num_hidden_layers != b.num_hidden_layers ||
      a.dim != b.dim || a.pooling != b.pooling || a.layer_names != b.layer_names ||
      a.sentences.size() != b.sentences.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    const SentenceEmbeddings& x = a.sentences[i];
    const SentenceEmbeddings& y = b.sentences[i];
    if (x.id != y.id || x.text != y.text || x.subword_spans != y.subword_spans ||
        x.values.size() != y.values.size()) {
      return false;
    }
    if (!x.values.empty() &&
        std::memcmp(x.values.data(), y.values.data(), x.values.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace roleprobe
