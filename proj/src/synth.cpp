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

#include "roleprobe/synth.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "roleprobe/error.hpp"
#include "roleprobe/random.hpp"

namespace roleprobe {
namespace {

constexpr std::array<NounEntry, 60> kNouns{{
    {"chef", "chefs"},         {"onion", "onions"},       {"girl", "girls"},
    {"hand", "hands"},         {"teacher", "teachers"},   {"book", "books"},
    {"dog", "dogs"},           {"ball", "balls"},         {"farmer", "farmers"},
    {"apple", "apples"},       {"doctor", "doctors"},     {"letter", "letters"},
    {"boy", "boys"},           {"window", "windows"},     {"cat", "cats"},
    {"rope", "ropes"},         {"soldier", "soldiers"},   {"bridge", "bridges"},
    {"student", "students"},   {"chair", "chairs"},       {"mother", "mothers"},
    {"cup", "cups"},           {"pilot", "pilots"},       {"stone", "stones"},
    {"king", "kings"},         {"table", "tables"},       {"nurse", "nurses"},
    {"box", "boxes"},          {"painter", "painters"},   {"wall", "walls"},
    {"horse", "horses"},       {"key", "keys"},           {"child", "children"},
    {"door", "doors"},         {"writer", "writers"},     {"bottle", "bottles"},
    {"queen", "queens"},       {"shirt", "shirts"},       {"baker", "bakers"},
    {"bell", "bells"},         {"man", "men"},            {"plate", "plates"},
    {"woman", "women"},        {"tree", "trees"},         {"singer", "singers"},
    {"coat", "coats"},         {"wolf", "wolves"},        {"river", "rivers"},
    {"guard", "guards"},       {"lamp", "lamps"},         {"priest", "priests"},
    {"car", "cars"},           {"driver", "drivers"},     {"knife", "knives"},
    {"bird", "birds"},         {"map", "maps"},           {"judge", "judges"},
    {"ship", "ships"},         {"friend", "friends"},     {"storm", "storms"},
}};

struct VerbEntry {
  const char* lemma;
  const char* past;
  const char* participle;
};

constexpr std::array<VerbEntry, 20> kVerbs{{
    {"chop", "chopped", "chopped"}, {"see", "saw", "seen"},
    {"paint", "painted", "painted"}, {"follow", "followed", "followed"},
    {"lift", "lifted", "lifted"},   {"push", "pushed", "pushed"},
    {"find", "found", "found"},     {"carry", "carried", "carried"},
    {"watch", "watched", "watched"}, {"move", "moved", "moved"},
    {"break", "broke", "broken"},   {"clean", "cleaned", "cleaned"},
    {"hold", "held", "held"},       {"call", "called", "called"},
    {"help", "helped", "helped"},   {"visit", "visited", "visited"},
    {"admire", "admired", "admired"}, {"chase", "chased", "chased"},
    {"feed", "fed", "fed"},         {"wash", "washed", "washed"},
}};

constexpr std::array<VerbEntry, 6> kIntransitive{{
    {"sleep", "slept", "slept"}, {"laugh", "laughed", "laughed"},
    {"cry", "cried", "cried"},   {"wait", "waited", "waited"},
    {"smile", "smiled", "smiled"}, {"arrive", "arrived", "arrived"},
}};

constexpr std::array<const char*, 16> kAdjectives{
    "old", "young", "small", "large", "red", "quiet", "tall", "green",
    "heavy", "bright", "tired", "happy", "cold", "new", "dark", "brave"};

constexpr std::array<std::array<const char*, 2>, 6> kNames{{
    {"Barack", "Obama"}, {"Maria", "Lopez"}, {"John", "Smith"},
    {"Ada", "Lovelace"}, {"Ravi", "Patel"},  {"Anna", "Berg"},
}};

using Feats = std::map<std::string, std::string>;

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Tokens are appended in surface order; heads are patched once all indices
// are known.
class Builder {
 public:
  int add(std::string form, std::string lemma, std::string upos, std::string xpos, Feats feats,
          std::string deprel, int head = 0) {
    Token t;
    t.index = static_cast<int>(s_.tokens.size()) + 1;
    t.form = s_.tokens.empty() ? capitalized(std::move(form)) : std::move(form);
    t.lemma = std::move(lemma);
    t.upos = std::move(upos);
    t.xpos = std::move(xpos);
    t.feats = std::move(feats);
    t.head = head;
    t.deprel = std::move(deprel);
    s_.tokens.push_back(std::move(t));
    return s_.tokens.back().index;
  }
  Token& at(int index) { return s_.token(index); }
  void attach(int dependent, int head) { s_.token(dependent).head = head; }
  void range(int first, int last, std::string form) {
    s_.ranges.push_back({first, last, std::move(form), "", true});
  }
  int period(int head) {
    if (!s_.tokens.empty()) s_.tokens.back().space_after = false;
    return add(".", ".", "PUNCT", ".", {}, "punct", head);
  }
  Sentence finish(std::string id) {
    s_.id = std::move(id);
    Sentence out = reconstruct_text(std::move(s_));
    out.comment_text = out.text;
    return out;
  }

 private:
  Sentence s_;
};

class Generator {
 public:
  Generator(const SynthConfig& cfg, const RolePrior& prior) : cfg_(cfg), rng_(cfg.seed) {
    subj_weights_.reserve(kNouns.size());
    obj_weights_.reserve(kNouns.size());
    for (const NounEntry& n : kNouns) {
      const double p = prior ? prior(n.singular) : 0.0;
      subj_weights_.push_back(1.0 / (1.0 + std::exp(-cfg.role_bias * p)));
      obj_weights_.push_back(1.0 / (1.0 + std::exp(cfg.role_bias * p)));
    }
  }

  Sentence next(std::size_t ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "-%06zu", ordinal + 1);
    const std::string id = cfg_.id_prefix + buf;
    Builder b;
    if (cfg_.variety > 0.0 && rng_.uniform() < cfg_.variety) {
      variety(b);
    } else {
      basic(b, rng_.uniform() >= cfg_.short_rate, cfg_.match_number);
    }
    return b.finish(id);
  }

 private:
  struct Pair {
    std::size_t subj;
    std::size_t obj;
    bool subj_plural;
    bool obj_plural;
  };

  std::size_t weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = rng_.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (u < w[i]) return i;
      u -= w[i];
    }
    return w.size() - 1;
  }

  Pair arguments(bool match_number) {
    Pair p{};
    p.subj = weighted(subj_weights_);
    do {
      p.obj = weighted(obj_weights_);
    } while (p.obj == p.subj);
    p.subj_plural = rng_.uniform() < cfg_.plural_rate;
    p.obj_plural = match_number ? p.subj_plural : rng_.uniform() < cfg_.plural_rate;
    return p;
  }

  template <typename T, std::size_t N>
  const T& pick(const std::array<T, N>& items) {
    return items[rng_.below(N)];
  }

  // Determiner matching the number; sentence-initial casing is applied by
  // the builder.
  int determiner(Builder& b, bool plural, std::string_view next) {
    if (plural) {
      if (rng_.uniform() < 0.7) {
        return b.add("the", "the", "DET", "DT", {{"Definite", "Def"}, {"PronType", "Art"}}, "det");
      }
      return b.add("these", "this", "DET", "DT", {{"Number", "Plur"}, {"PronType", "Dem"}}, "det");
    }
    const double u = rng_.uniform();
    if (u < 0.5) {
      return b.add("the", "the", "DET", "DT", {{"Definite", "Def"}, {"PronType", "Art"}}, "det");
    }
    if (u < 0.85) {
      const bool vowel = !next.empty() && std::string_view("aeiou").find(next[0]) != std::string_view::npos;
      return b.add(vowel ? "an" : "a", "a", "DET", "DT", {{"Definite", "Ind"}, {"PronType", "Art"}},
                   "det");
    }
    return b.add("this", "this", "DET", "DT", {{"Number", "Sing"}, {"PronType", "Dem"}}, "det");
  }

  int noun(Builder& b, std::size_t entry, bool plural, const std::string& deprel, int head = 0) {
    const NounEntry& n = kNouns[entry];
    return b.add(std::string(plural ? n.plural : n.singular), std::string(n.singular), "NOUN",
                 plural ? "NNS" : "NN", {{"Number", plural ? "Plur" : "Sing"}}, deprel, head);
  }

  // Det (Adj) N, returning the noun index.
  int noun_phrase(Builder& b, std::size_t entry, bool plural, bool adjective,
                  const std::string& deprel) {
    const char* a = adjective ? pick(kAdjectives) : nullptr;
    const NounEntry& entry_forms = kNouns[entry];
    const int det = determiner(b, plural, a ? a : entry_forms.singular);
    int adj = 0;
    if (a) adj = b.add(a, a, "ADJ", "JJ", {{"Degree", "Pos"}}, "amod");
    const int n = noun(b, entry, plural, deprel);
    b.attach(det, n);
    if (adj) b.attach(adj, n);
    return n;
  }

  int verb(Builder& b, const VerbEntry& v, const std::string& deprel) {
    return b.add(v.past, v.lemma, "VERB", "VBD",
                 {{"Mood", "Ind"}, {"Tense", "Past"}, {"VerbForm", "Fin"}}, deprel);
  }

  int base_verb(Builder& b, const VerbEntry& v, const std::string& deprel) {
    return b.add(v.lemma, v.lemma, "VERB", "VB", {{"VerbForm", "Inf"}}, deprel);
  }

  // Det (Adj) N V Det (Adj) N
  int clause(Builder& b, bool adjectives, bool match_number, const std::string& verb_deprel) {
    const Pair p = arguments(match_number);
    const int s = noun_phrase(b, p.subj, p.subj_plural, adjectives, "nsubj");
    const int v = verb(b, pick(kVerbs), verb_deprel);
    const int o = noun_phrase(b, p.obj, p.obj_plural, adjectives, "obj");
    b.attach(s, v);
    b.attach(o, v);
    return v;
  }

  void basic(Builder& b, bool adjectives, bool match_number) {
    const int v = clause(b, adjectives, match_number, "root");
    b.period(v);
  }

  void variety(Builder& b) {
    const bool adj = rng_.uniform() < 0.5;
    switch (rng_.below(10)) {
      case 0: {  // pronoun subject
        static constexpr std::array<std::array<const char*, 2>, 3> kPronouns{
            {{"she", "Sing"}, {"he", "Sing"}, {"they", "Plur"}}};
        const auto& pr = pick(kPronouns);
        const Pair p = arguments(true);
        const int s = b.add(pr[0], pr[0], "PRON", "PRP",
                            {{"Case", "Nom"}, {"Number", pr[1]}, {"Person", "3"},
                             {"PronType", "Prs"}},
                            "nsubj");
        const int v = verb(b, pick(kVerbs), "root");
        const int o = noun_phrase(b, p.obj, p.obj_plural, adj, "obj");
        b.attach(s, v);
        b.attach(o, v);
        b.period(v);
        break;
      }
      case 1: {  // passive with agent
        const Pair p = arguments(true);
        const VerbEntry& ve = pick(kVerbs);
        const int s = noun_phrase(b, p.obj, p.obj_plural, adj, "nsubj:pass");
        const int aux = b.add(p.obj_plural ? "were" : "was", "be", "AUX", "VBD",
                              {{"Mood", "Ind"}, {"Tense", "Past"}, {"VerbForm", "Fin"}},
                              "aux:pass");
        const int v = b.add(ve.participle, ve.lemma, "VERB", "VBN",
                            {{"Tense", "Past"}, {"VerbForm", "Part"}, {"Voice", "Pass"}}, "root");
        const int by = b.add("by", "by", "ADP", "IN", {}, "case");
        const int agent = noun_phrase(b, p.subj, p.subj_plural, adj, "obl");
        b.attach(s, v);
        b.attach(aux, v);
        b.attach(by, agent);
        b.attach(agent, v);
        b.period(v);
        break;
      }
      case 2: {  // intransitive
        const Pair p = arguments(true);
        const int s = noun_phrase(b, p.subj, p.subj_plural, adj, "nsubj");
        const int v = verb(b, pick(kIntransitive), "root");
        b.attach(s, v);
        b.period(v);
        break;
      }
      case 3: {  // compound object
        const Pair p = arguments(true);
        const int s = noun_phrase(b, p.subj, p.subj_plural, adj, "nsubj");
        const int v = verb(b, pick(kVerbs), "root");
        std::size_t modifier = weighted(obj_weights_);
        if (modifier == p.obj) modifier = (modifier + 1) % kNouns.size();
        const int det = determiner(b, p.obj_plural, kNouns[modifier].singular);
        const int c = noun(b, modifier, false, "compound");
        const int o = noun(b, p.obj, p.obj_plural, "obj");
        b.attach(s, v);
        b.attach(det, o);
        b.attach(c, o);
        b.attach(o, v);
        b.period(v);
        break;
      }
      case 4: {  // flat name as subject
        const auto& name = pick(kNames);
        const Pair p = arguments(true);
        const int first = b.add(name[0], name[0], "PROPN", "NNP", {{"Number", "Sing"}}, "nsubj");
        const int last = b.add(name[1], name[1], "PROPN", "NNP", {{"Number", "Sing"}}, "flat:name");
        const int v = verb(b, pick(kVerbs), "root");
        const int o = noun_phrase(b, p.obj, false, adj, "obj");
        b.attach(last, first);
        b.attach(first, v);
        b.attach(o, v);
        b.period(v);
        break;
      }
      case 5: {  // coordinated clauses
        const int v1 = clause(b, adj, true, "root");
        const int cc = b.add("and", "and", "CCONJ", "CC", {}, "cc");
        const int v2 = clause(b, adj, true, "conj");
        b.attach(cc, v2);
        b.attach(v2, v1);
        b.period(v1);
        break;
      }
      case 6: {  // contracted negation
        const Pair p = arguments(true);
        const int s = noun_phrase(b, p.subj, p.subj_plural, adj, "nsubj");
        const int did = b.add("did", "do", "AUX", "VBD",
                              {{"Mood", "Ind"}, {"Tense", "Past"}, {"VerbForm", "Fin"}}, "aux");
        const int neg = b.add("n't", "not", "PART", "RB", {}, "advmod");
        b.range(did, neg, "didn't");
        const int v = base_verb(b, pick(kVerbs), "root");
        const int o = noun_phrase(b, p.obj, p.obj_plural, adj, "obj");
        b.attach(s, v);
        b.attach(did, v);
        b.attach(neg, v);
        b.attach(o, v);
        b.period(v);
        break;
      }
      case 7: {  // causative with xcomp
        const Pair p = arguments(true);
        const int s = noun_phrase(b, p.subj, p.subj_plural, adj, "nsubj");
        const int v = b.add("made", "make", "VERB", "VBD",
                            {{"Mood", "Ind"}, {"Tense", "Past"}, {"VerbForm", "Fin"}}, "root");
        const int o = noun_phrase(b, p.obj, p.obj_plural, adj, "obj");
        const int x = base_verb(b, pick(kIntransitive), "xcomp");
        b.attach(s, v);
        b.attach(o, v);
        b.attach(x, v);
        b.period(v);
        break;
      }
      case 8: {  // possessive object
        const Pair p = arguments(true);
        const int s = noun_phrase(b, p.subj, p.subj_plural, adj, "nsubj");
        const int v = verb(b, pick(kVerbs), "root");
        const char* poss = rng_.uniform() < 0.5 ? "her" : "his";
        const int pr = b.add(poss, poss == std::string_view("her") ? "she" : "he", "PRON", "PRP$",
                             {{"Poss", "Yes"}, {"PronType", "Prs"}}, "nmod:poss");
        const int o = noun(b, p.obj, p.obj_plural, "obj");
        b.attach(s, v);
        b.attach(pr, o);
        b.attach(o, v);
        b.period(v);
        break;
      }
      default:  // independent numbers
        basic(b, adj, false);
        break;
    }
  }

  const SynthConfig& cfg_;
  Rng rng_;
  std::vector<double> subj_weights_;
  std::vector<double> obj_weights_;
};

}  // namespace

std::span<const NounEntry> synth_nouns() { return kNouns; }

std::vector<Sentence> synthesize_corpus(const SynthConfig& cfg, const RolePrior& prior) {
  if (cfg.short_rate < 0.0 || cfg.short_rate > 1.0 || cfg.variety < 0.0 || cfg.variety > 1.0 ||
      cfg.plural_rate < 0.0 || cfg.plural_rate > 1.0) {
    throw ConfigError("synth rates must lie in [0, 1]");
  }
  Generator gen(cfg, prior);
  std::vector<Sentence> out;
  out.reserve(cfg.num_sentences);
  for (std::size_t i = 0; i < cfg.num_sentences; ++i) out.push_back(gen.next(i));
  return out;
}

}  // namespace roleprobe
