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

// Argument swaps and displacement-bounded local scrambles.

#ifndef ROLEPROBE_PERTURB_HPP_
#define ROLEPROBE_PERTURB_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "roleprobe/clause.hpp"
#include "roleprobe/conllu.hpp"

namespace roleprobe {

// perm[i] is the 0-based position that the token at 0-based position i moves
// to.
using Permutation = std::vector<int>;

bool is_permutation(const Permutation& perm);
int max_displacement(const Permutation& perm);

// Exact uniform sampler over permutations of n elements in which no element
// moves more than k positions. Completion counts are tabulated once per
// (n, k); sampling walks positions left to right choosing each target with
// probability proportional to the number of completions.
class BoundedPermutationSampler {
 public:
  // Largest k (after clamping to n - 1) supported by the counting table.
  static constexpr int kMaxWindowRadius = 10;

  BoundedPermutationSampler(int n, int k);

  int size() const { return n_; }
  int radius() const { return k_; }
  // Number of valid permutations (exact while it fits in a double mantissa).
  double count() const { return total_; }

  Permutation sample(std::uint64_t seed) const;

 private:
  double completions(int position, unsigned mask) const {
    return table_[static_cast<std::size_t>(position) * states_ + mask];
  }

  int n_;
  int k_;
  bool unconstrained_;
  std::size_t states_ = 0;
  std::vector<double> table_;  // rows rescaled to max 1 when large
  double total_ = 0.0;
};

Permutation sample_bounded_permutation(int n, int k, std::uint64_t seed);

struct SwappedPair {
  Sentence original;
  Sentence swapped;
  ClauseInstance clause;
  // Where the original subject and original object ended up in `swapped`.
  int subj_new_index = 0;
  int obj_new_index = 0;
};

// Exchanges the lexical content (form, lemma, tags, features) of the subject
// and object head tokens. The syntactic frame stays with the slot, so the
// word moved into subject position is the nsubj of the swapped sentence and
// dependents such as determiners keep modifying their slot. Throws
// PreconditionError with the failure list when the clause is not eligible.
SwappedPair swap_arguments(const Sentence& s, const ClauseInstance& c);

struct ScrambledSentence {
  Sentence original;
  Sentence scrambled;
  Permutation permutation;
  std::uint64_t seed = 0;
};

// Reorders tokens by a bounded permutation. Heads are re-indexed so every
// word keeps its relations (and therefore its gold role). The scrambled
// sentence keeps the original id; text uses single spaces.
ScrambledSentence scramble_local(const Sentence& s, int k, std::uint64_t seed);

// One scramble per sentence with seed derive_seed(global_seed, id).
std::vector<ScrambledSentence> scramble_corpus(std::span<const Sentence> sentences,
                                               int k, std::uint64_t global_seed);

// Sidecars mapping perturbed token indices back to original indices.
nlohmann::json swap_sidecar(std::span<const SwappedPair> pairs);
nlohmann::json scramble_sidecar(std::span<const ScrambledSentence> scrambles, int k,
                                std::uint64_t global_seed);

}  // namespace roleprobe

#endif  // ROLEPROBE_PERTURB_HPP_
