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

#include "roleprobe/perturb.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "json.hpp"

#include "roleprobe/error.hpp"
#include "roleprobe/parallel.hpp"
#include "roleprobe/random.hpp"

namespace roleprobe {

bool is_permutation(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

int max_displacement(const Permutation& perm) {
  int worst = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    worst = std::max(worst, std::abs(perm[i] - static_cast<int>(i)));
  }
  return worst;
}

// Window state at position i: bit b set means target i - k + b is taken
// (targets below 0 count as taken). Leaving position i requires target i - k
// to be taken, since no later position can reach it.
BoundedPermutationSampler::BoundedPermutationSampler(int n, int k)
    : n_(n), k_(std::min(k, std::max(n - 1, 0))), unconstrained_(false) {
  if (n < 1) throw ConfigError("permutation length must be >= 1");
  if (k < 0) throw ConfigError("max displacement must be >= 0");
  if (k_ >= n_ - 1 && k_ > kMaxWindowRadius) {
    unconstrained_ = true;  // every permutation qualifies
    total_ = std::tgamma(static_cast<double>(n_) + 1.0);
    return;
  }
  if (k_ > kMaxWindowRadius) {
    throw ConfigError("max displacement " + std::to_string(k) +
                      " exceeds sampler limit " + std::to_string(kMaxWindowRadius));
  }
  const int width = 2 * k_ + 1;
  states_ = std::size_t{1} << width;
  table_.assign(static_cast<std::size_t>(n_ + 1) * states_, 0.0);
  for (std::size_t m = 0; m < states_; ++m) table_[static_cast<std::size_t>(n_) * states_ + m] = 1.0;
  double log_scale = 0.0;
  for (int i = n_ - 1; i >= 0; --i) {
    double row_max = 0.0;
    for (unsigned mask = 0; mask < states_; ++mask) {
      double ways = 0.0;
      for (int b = 0; b < width; ++b) {
        const int target = i - k_ + b;
        if (target < 0 || target >= n_ || (mask >> b) & 1U) continue;
        const unsigned taken = mask | (1U << b);
        if (!(taken & 1U)) continue;
        ways += completions(i + 1, taken >> 1);
      }
      table_[static_cast<std::size_t>(i) * states_ + mask] = ways;
      row_max = std::max(row_max, ways);
    }
    if (row_max > 1e200) {
      for (unsigned mask = 0; mask < states_; ++mask) {
        table_[static_cast<std::size_t>(i) * states_ + mask] /= row_max;
      }
      log_scale += std::log(row_max);
    }
  }
  const unsigned start = (1U << k_) - 1U;
  total_ = completions(0, start) * std::exp(log_scale);
}

Permutation BoundedPermutationSampler::sample(std::uint64_t seed) const {
  Rng rng(seed);
  Permutation perm(static_cast<std::size_t>(n_));
  if (unconstrained_) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    return perm;
  }
  const int width = 2 * k_ + 1;
  unsigned mask = (1U << k_) - 1U;
  for (int i = 0; i < n_; ++i) {
    double weights[2 * kMaxWindowRadius + 1] = {};
    double total = 0.0;
    for (int b = 0; b < width; ++b) {
      const int target = i - k_ + b;
      if (target < 0 || target >= n_ || (mask >> b) & 1U) continue;
      const unsigned taken = mask | (1U << b);
      if (!(taken & 1U)) continue;
      weights[b] = completions(i + 1, taken >> 1);
      total += weights[b];
    }
    double u = rng.uniform() * total;
    int chosen = -1;
    for (int b = 0; b < width; ++b) {
      if (weights[b] <= 0.0) continue;
      chosen = b;
      if (u < weights[b]) break;
      u -= weights[b];
    }
    perm[static_cast<std::size_t>(i)] = i - k_ + chosen;
    mask = (mask | (1U << chosen)) >> 1;
  }
  return perm;
}

Permutation sample_bounded_permutation(int n, int k, std::uint64_t seed) {
  return BoundedPermutationSampler(n, k).sample(seed);
}

SwappedPair swap_arguments(const Sentence& s, const ClauseInstance& c) {
  const Eligibility e = swap_eligibility(c, s);
  if (!e.eligible) {
    std::string what = "clause " + std::to_string(c.subj_index) + "/" +
                       std::to_string(c.verb_index) + "/" + std::to_string(c.obj_index) +
                       " of sentence " + s.id + " is not swap-eligible:";
    for (const std::string& f : e.failures) what += " " + f;
    throw PreconditionError(what, e.failures);
  }
  Sentence w = s;
  Token& a = w.token(c.subj_index);
  Token& b = w.token(c.obj_index);
  std::swap(a.form, b.form);
  std::swap(a.lemma, b.lemma);
  std::swap(a.upos, b.upos);
  std::swap(a.xpos, b.xpos);
  std::swap(a.feats, b.feats);
  std::erase_if(w.ranges, [&](const MultiwordRange& r) {
    const auto covers = [&](int i) { return i >= r.first && i <= r.last; };
    return covers(c.subj_index) || covers(c.obj_index);
  });
  w.id = s.id + "/swap/" + std::to_string(c.subj_index) + "-" + std::to_string(c.obj_index);
  w.comment_text.reset();
  SwappedPair pair;
  pair.original = s;
  pair.swapped = reconstruct_text(std::move(w));
  pair.clause = c;
  pair.subj_new_index = c.obj_index;
  pair.obj_new_index = c.subj_index;
  return pair;
}

ScrambledSentence scramble_local(const Sentence& s, int k, std::uint64_t seed) {
  const int n = static_cast<int>(s.size());
  ScrambledSentence out;
  out.original = s;
  out.seed = seed;
  out.permutation = sample_bounded_permutation(std::max(n, 1), k, seed);
  out.permutation.resize(static_cast<std::size_t>(n));
  Sentence w;
  w.id = s.id;
  w.comments = s.comments;
  w.tokens.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Token t = s.tokens[static_cast<std::size_t>(i)];
    const int to = out.permutation[static_cast<std::size_t>(i)];
    t.index = to + 1;
    t.head = t.head == 0 ? 0 : out.permutation[static_cast<std::size_t>(t.head - 1)] + 1;
    t.space_after = true;
    t.deps.clear();
    w.tokens[static_cast<std::size_t>(to)] = std::move(t);
  }
  out.scrambled = reconstruct_text(std::move(w));
  return out;
}

std::vector<ScrambledSentence> scramble_corpus(std::span<const Sentence> sentences, int k,
                                               std::uint64_t global_seed) {
  std::vector<ScrambledSentence> out(sentences.size());
  parallel_for(sentences.size(), [&](std::size_t i) {
    out[i] = scramble_local(sentences[i], k, derive_seed(global_seed, sentences[i].id));
  });
  return out;
}

namespace {

nlohmann::json token_map(const Sentence& perturbed, const std::vector<int>& original_index) {
  const auto roles = label_roles(perturbed);
  nlohmann::json tokens = nlohmann::json::array();
  for (const Token& t : perturbed.tokens) {
    tokens.push_back({{"index", t.index},
                      {"original_index", original_index[static_cast<std::size_t>(t.index - 1)]},
                      {"form", t.form},
                      {"role", role_name(roles.at(t.index))}});
  }
  return tokens;
}

}  // namespace

nlohmann::json swap_sidecar(std::span<const SwappedPair> pairs) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const SwappedPair& p : pairs) {
    std::vector<int> original(p.swapped.size());
    std::iota(original.begin(), original.end(), 1);
    original[static_cast<std::size_t>(p.clause.subj_index - 1)] = p.clause.obj_index;
    original[static_cast<std::size_t>(p.clause.obj_index - 1)] = p.clause.subj_index;
    sentences.push_back({{"id", p.swapped.id},
                         {"original_id", p.original.id},
                         {"text", p.swapped.text},
                         {"original_text", p.original.text},
                         {"clause",
                          {{"verb", p.clause.verb_index},
                           {"subj", p.clause.subj_index},
                           {"obj", p.clause.obj_index}}},
                         {"tokens", token_map(p.swapped, original)}});
  }
  return {{"format_version", 1}, {"kind", "swap"}, {"sentences", std::move(sentences)}};
}

nlohmann::json scramble_sidecar(std::span<const ScrambledSentence> scrambles, int k,
                                std::uint64_t global_seed) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const ScrambledSentence& s : scrambles) {
    std::vector<int> original(s.scrambled.size());
    for (std::size_t i = 0; i < s.permutation.size(); ++i) {
      original[static_cast<std::size_t>(s.permutation[i])] = static_cast<int>(i) + 1;
    }
    sentences.push_back({{"id", s.scrambled.id},
                         {"original_id", s.original.id},
                         {"text", s.scrambled.text},
                         {"seed", s.seed},
                         {"permutation", s.permutation},
                         {"tokens", token_map(s.scrambled, original)}});
  }
  return {{"format_version", 1},
          {"kind", "scramble"},
          {"max_displacement", k},
          {"seed", global_seed},
          {"punctuation", "permuted"},
          {"sentences", std::move(sentences)}};
}

}  // namespace roleprobe
