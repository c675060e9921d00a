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

#include "roleprobe/clause.hpp"

#include "roleprobe/error.hpp"

namespace roleprobe {
namespace {

bool touches_compound_or_flat(const Sentence& s, const Token& t) {
  const auto bad = [](std::string_view rel) { return rel == "compound" || rel == "flat"; };
  if (bad(t.base_deprel())) return true;
  for (const Token& other : s.tokens) {
    if (other.head == t.index && bad(other.base_deprel())) return true;
  }
  return false;
}

}  // namespace

std::string_view role_name(Role r) {
  switch (r) {
    case Role::kSubject:
      return "subject";
    case Role::kObject:
      return "object";
    case Role::kNeither:
      break;
  }
  return "neither";
}

Role parse_role(std::string_view name) {
  if (name == "subject") return Role::kSubject;
  if (name == "object") return Role::kObject;
  if (name == "neither") return Role::kNeither;
  throw ConfigError("unknown role '" + std::string(name) + "'");
}

bool is_lexical_noun(const Token& t) { return t.upos == "NOUN" || t.upos == "PROPN"; }

std::vector<ClauseInstance> find_transitive_clauses(const Sentence& s) {
  std::vector<ClauseInstance> out;
  for (const Token& verb : s.tokens) {
    std::vector<int> subjects;
    std::vector<int> objects;
    for (const Token& t : s.tokens) {
      if (t.head != verb.index) continue;
      if (t.deprel == "nsubj") subjects.push_back(t.index);
      if (t.deprel == "obj") objects.push_back(t.index);
    }
    for (int subj : subjects) {
      for (int obj : objects) {
        ClauseInstance c;
        c.sentence_id = s.id;
        c.verb_index = verb.index;
        c.subj_index = subj;
        c.obj_index = obj;
        Eligibility e = swap_eligibility(c, s);
        c.swap_eligible = e.eligible;
        c.eligibility_failures = std::move(e.failures);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::map<int, Role> label_roles(const Sentence& s) {
  std::map<int, Role> roles;
  std::map<int, bool> conflicted;
  for (const Token& t : s.tokens) roles[t.index] = Role::kNeither;
  const auto assign = [&](int index, Role r) {
    if (!is_lexical_noun(s.token(index))) return;
    Role& slot = roles[index];
    if (conflicted[index]) return;
    if (slot != Role::kNeither && slot != r) {
      slot = Role::kNeither;
      conflicted[index] = true;
      return;
    }
    slot = r;
  };
  for (const ClauseInstance& c : find_transitive_clauses(s)) {
    assign(c.subj_index, Role::kSubject);
    assign(c.obj_index, Role::kObject);
  }
  return roles;
}

Eligibility swap_eligibility(const ClauseInstance& c, const Sentence& s) {
  Eligibility e;
  const Token& subj = s.token(c.subj_index);
  const Token& obj = s.token(c.obj_index);
  if (!is_lexical_noun(subj) || !is_lexical_noun(obj)) {
    e.failures.emplace_back(kPosFilter);
  }
  const std::string_view ns = subj.feat("Number");
  const std::string_view no = obj.feat("Number");
  if (ns.empty() || no.empty() || ns != no) e.failures.emplace_back(kNumberFilter);
  if (touches_compound_or_flat(s, subj) || touches_compound_or_flat(s, obj)) {
    e.failures.emplace_back(kCompoundFlatFilter);
  }
  e.eligible = e.failures.empty();
  return e;
}

}  // namespace roleprobe
