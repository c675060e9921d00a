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

// Transitive clause detection, gold role labels and swap eligibility.

#ifndef ROLEPROBE_CLAUSE_HPP_
#define ROLEPROBE_CLAUSE_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "roleprobe/conllu.hpp"

namespace roleprobe {

enum class Role { kNeither, kSubject, kObject };

std::string_view role_name(Role r);  // "neither" | "subject" | "object"
Role parse_role(std::string_view name);

// Filter names reported in ClauseInstance::eligibility_failures.
inline constexpr std::string_view kPosFilter = "pos_filter";
inline constexpr std::string_view kNumberFilter = "number_filter";
inline constexpr std::string_view kCompoundFlatFilter = "compound_flat_filter";

struct ClauseInstance {
  std::string sentence_id;
  int verb_index = 0;
  int subj_index = 0;
  int obj_index = 0;
  bool swap_eligible = false;
  std::vector<std::string> eligibility_failures;

  bool operator==(const ClauseInstance&) const = default;
};

struct Eligibility {
  bool eligible = false;
  std::vector<std::string> failures;
};

// UPOS NOUN or PROPN.
bool is_lexical_noun(const Token& t);

// Every (verb, nsubj, obj) triple; cross pairs when a verb has several of
// either. Relations match exactly: nsubj:pass and obj subtypes do not count.
// Eligibility fields are filled.
std::vector<ClauseInstance> find_transitive_clauses(const Sentence& s);

// Role per token index (1..n). Noun tokens that are nsubj/obj of a transitive
// verb get SUBJECT/OBJECT; a token with conflicting roles gets NEITHER.
std::map<int, Role> label_roles(const Sentence& s);

Eligibility swap_eligibility(const ClauseInstance& c, const Sentence& s);

}  // namespace roleprobe

#endif  // ROLEPROBE_CLAUSE_HPP_
