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

#include <cmath>
#include <set>

#include "doctest.h"
#include "roleprobe/error.hpp"
#include "roleprobe/experiment.hpp"
#include "roleprobe/pipeline.hpp"
#include "test_util.hpp"

using namespace roleprobe;
using roleprobe::testing::data_path;
using roleprobe::testing::TempDir;

namespace {

InstanceTable fake_table(std::size_t subjects, std::size_t objects) {
  InstanceTable t;
  t.layer_names = {"static"};
  t.dim = 1;
  t.features.emplace_back(subjects + objects, 1);
  for (std::size_t i = 0; i < subjects + objects; ++i) {
    NounInstance n;
    n.sentence_id = "s" + std::to_string(i);
    n.token_index = 1;
    n.role = i < subjects ? Role::kSubject : Role::kObject;
    t.instances.push_back(n);
    t.features[0].row(i)[0] = static_cast<double>(i);
  }
  return t;
}

MockPipelineConfig small_config() {
  MockPipelineConfig cfg;
  cfg.mock.dim = 8;
  cfg.mock.num_hidden_layers = 2;
  cfg.train_sentences = 300;
  cfg.eval_sentences = 200;
  cfg.experiment.seed = 3;
  return cfg;
}

// Shared across cases; the pipeline is deterministic.
const MockPipelineResult& small_run() {
  static const MockPipelineResult r = run_mock_pipeline(small_config());
  return r;
}

}  // namespace

TEST_CASE("balanced selection caps both classes") {
  const InstanceTable t = fake_table(1000, 900);
  const TrainingSelection big = select_balanced(t, 864, 1);
  CHECK(big.per_class == 864);
  CHECK(big.rows.size() == 1728);
  CHECK(big.subjects_available == 1000);
  CHECK(big.objects_available == 900);
  for (std::size_t k = 0; k < big.rows.size(); ++k) {
    CHECK(t.instances[big.rows[k]].role == (k < 864 ? Role::kSubject : Role::kObject));
  }
  CHECK(std::set<std::size_t>(big.rows.begin(), big.rows.end()).size() == big.rows.size());

  const TrainingSelection small = select_balanced(fake_table(10, 5), 864, 1);
  CHECK(small.per_class == 5);
  CHECK(small.rows.size() == 10);

  CHECK(select_balanced(t, 864, 1).rows == big.rows);
  CHECK(select_balanced(t, 864, 2).rows != big.rows);
  CHECK_THROWS_AS(select_balanced(fake_table(0, 5), 864, 1), InsufficientDataError);
  bool thrown = false;
  try {
    select_balanced(fake_table(4, 0), 864, 1);
  } catch (const InsufficientDataError& e) {
    thrown = true;
    CHECK(e.subjects() == 4);
    CHECK(e.objects() == 0);
  }
  CHECK(thrown);

  const LabeledSet set = labeled_set(t, 0, big);
  CHECK(set.size() == 1728);
  CHECK(std::count(set.labels.begin(), set.labels.end(), 1) == 864);
  CHECK(set.features.row(0)[0] == static_cast<double>(big.rows[0]));
}

TEST_CASE("role targets and instances") {
  const auto s = read_conllu_file(data_path("worked_examples.conllu"));
  const std::vector<Target> targets = role_targets(s);
  // chef/onion, girl/hand, art/painting + calligraphy is only conj
  REQUIRE(targets.size() >= 6);
  CHECK(targets[0].sentence == 0);
  CHECK(targets[0].role == Role::kSubject);
  MockConfig mock;
  mock.num_hidden_layers = 2;
  const EmbeddingArchive a = mock_archive(s, mock);
  const auto layers = selected_layers(a, {});
  CHECK(layers == default_layer_names(2));
  const InstanceTable t = collect_instances(s, a, targets, layers);
  CHECK(t.size() == targets.size());
  CHECK(t.instances[0].lemma == "chef");
  CHECK(t.features.size() == 4);
  CHECK(t.features[t.layer("1")].rows == targets.size());
  const std::vector<std::string> only{"2"};
  CHECK(selected_layers(a, only) == std::vector<std::string>{"static", "2"});
  const std::vector<std::string> bad{"9"};
  CHECK_THROWS_AS(selected_layers(a, bad), ConfigError);

  EmbeddingArchive missing = a;
  missing.sentences.pop_back();
  CHECK_THROWS_AS(collect_instances(s, missing, targets, layers), MissingSentenceError);
  EmbeddingArchive wrong_text = a;
  wrong_text.sentences[0].text += " ";
  CHECK_THROWS_AS(collect_instances(s, wrong_text, targets, layers), AlignmentError);
}

TEST_CASE("one probe per layer including static and layer 0") {
  const auto& r = small_run();
  CHECK(r.probes.probes.size() == 4);
  CHECK(r.probes.layer_names == default_layer_names(2));
  for (const ProbeModel& m : r.probes.probes) {
    CHECK(m == quantized(m));
    CHECK(m.dim() == 8);
  }
  CHECK(r.probes.loss_history[0].size() == 20);

  MockConfig deep;
  deep.num_hidden_layers = 12;
  SynthConfig synth;
  synth.num_sentences = 120;
  Corpus c{"deep", mock_treebank(synth, deep), {}};
  c.archive = mock_archive(c.sentences, deep);
  ExperimentConfig cfg;
  cfg.train.epochs = 1;
  const ProbeSet all = train_layerwise_probes(c, cfg);
  CHECK(all.probes.size() == 14);
  cfg.layers = {"7"};
  const ProbeSet some = train_layerwise_probes(c, cfg);
  REQUIRE(some.layer_names == std::vector<std::string>{"static", "7"});
  CHECK(probe_hash(some.at("7")) == probe_hash(all.at("7")));
  CHECK(some.at("7") == all.at("7"));
  CHECK(some.at("static") == all.at("static"));
}

TEST_CASE("probe sets round trip through disk") {
  TempDir dir("probes");
  const auto& r = small_run();
  save_probe_set(r.probes, dir.path());
  const ProbeSet back = load_probe_set(dir.path());
  CHECK(back.layer_names == r.probes.layer_names);
  CHECK(back.probes == r.probes.probes);
  CHECK(back.training_ids == r.probes.training_ids);
  CHECK(back.per_class == r.probes.per_class);
  CHECK(back.upos_counts == r.probes.upos_counts);
  CHECK(back.loss_history == r.probes.loss_history);
  std::filesystem::remove(dir.path() / "layer_1.bin");
  CHECK_THROWS_AS(load_probe_set(dir.path()), CorruptArchiveError);
}

TEST_CASE("prototypicality uses the static probe's hard label") {
  // A zero-weight probe with bias b2 outputs sigmoid(b2) everywhere.
  auto constant = [](double p) {
    ProbeModel m(1);
    m.b2() = std::log(p / (1.0 - p));
    return m;
  };
  std::vector<NounInstance> inst(2);
  inst[0].role = Role::kSubject;
  inst[1].role = Role::kObject;
  const Matrix xs(2, 1);
  CHECK(split_prototypicality(constant(0.9), xs, inst) == std::vector<bool>{true, false});
  CHECK(split_prototypicality(constant(0.3), xs, inst) == std::vector<bool>{false, true});
  // Exactly one half is an object prediction.
  CHECK(split_prototypicality(ProbeModel(1), xs, inst) == std::vector<bool>{false, true});
  CHECK_THROWS_AS(split_prototypicality(ProbeModel(1), Matrix(3, 1), inst), ShapeError);
}

TEST_CASE("experiment 1 subsets partition the instances") {
  const ExperimentReport& r = small_run().reports[0];
  CHECK(r.experiment == "exp1");
  CHECK(r.subsets == std::vector<std::string>{"all", "prototypical", "non_prototypical"});
  CHECK(r.rows.size() == 4 * 3 * 3 * 3);
  for (const std::string& layer : r.layer_names) {
    for (const char* role : {"all", "subject", "object"}) {
      const std::size_t n = r.count(layer, "all", role);
      const std::size_t np = r.count(layer, "prototypical", role);
      const std::size_t nn = r.count(layer, "non_prototypical", role);
      CHECK(np + nn == n);
      const double recombined = (r.value(layer, "prototypical", role, "accuracy") * np +
                                 r.value(layer, "non_prototypical", role, "accuracy") * nn) /
                                static_cast<double>(n);
      CHECK(std::abs(recombined - r.value(layer, "all", role, "accuracy")) < 1e-9);
    }
    CHECK(r.count(layer, "all", "subject") + r.count(layer, "all", "object") == r.count(layer, "all"));
  }
  CHECK(r.value("static", "prototypical", "all", "accuracy") == 1.0);
  CHECK(r.value("static", "non_prototypical", "all", "accuracy") == 0.0);
  CHECK(r.provenance.at("prototypical_instances").get<std::size_t>() ==
        r.count("static", "prototypical"));
}

TEST_CASE("evaluation sentences must not overlap training") {
  const auto& r = small_run();
  ExperimentConfig cfg = small_config().experiment;
  CHECK_THROWS_AS(run_experiment1(r.probes, r.train, cfg), ConfigError);
  cfg.threshold = 0.6;
  CHECK_THROWS_AS(run_experiment1(r.probes, r.eval, cfg), ConfigError);
}

TEST_CASE("swap pairs") {
  const auto s = read_conllu_file(data_path("worked_examples.conllu"));
  const auto pairs = build_swap_pairs(s);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1].original.id == "girl-hand");
  CHECK(pairs[1].swapped.token(pairs[1].obj_new_index).lemma == "hand");
  CHECK(pairs[2].swapped.token(pairs[2].obj_new_index).lemma == "painting");
  CHECK(pairs[2].swapped.token(pairs[2].subj_new_index).lemma == "art");
  const auto plural = parse_conllu(
      "# sent_id = n1\n"
      "1\tDogs\tdog\tNOUN\tNNS\tNumber=Plur\t2\tnsubj\t_\t_\n"
      "2\tchase\tchase\tVERB\tVBP\t_\t0\troot\t_\t_\n"
      "3\tthe\tthe\tDET\tDT\t_\t4\tdet\t_\t_\n"
      "4\tcat\tcat\tNOUN\tNN\tNumber=Sing\t2\tobj\t_\tSpaceAfter=No\n"
      "5\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_\n\n",
      "inline");
  CHECK(build_swap_pairs(plural).empty());
  CHECK(build_swap_pairs(s).size() == pairs.size());
}

TEST_CASE("experiment 2") {
  const auto& r = small_run();
  const ExperimentReport& e = r.reports[1];
  CHECK(e.experiment == "exp2");
  CHECK(e.count("static", "original") == e.count("static", "swapped"));
  CHECK(e.count("static", "original") == 2 * r.pairs.size());
  CHECK(e.count("static", "swapped", "subject") == r.pairs.size());
  // The static layer sees the same lemmas on both sides.
  CHECK(std::abs(e.value("static", "original", "subject", "mean_p_subject") -
                 e.value("static", "swapped", "object", "mean_p_subject")) < 1e-6);
  CHECK(std::abs(e.value("static", "original", "object", "mean_p_subject") -
                 e.value("static", "swapped", "subject", "mean_p_subject")) < 1e-6);
  CHECK(e.provenance.at("probe_hashes") == r.reports[0].provenance.at("probe_hashes"));
  CHECK(e.provenance.at("swapped_clauses").size() == r.pairs.size());

  std::vector<Sentence> swapped;
  for (const auto& p : r.pairs) swapped.push_back(p.swapped);
  MockConfig mock = small_config().mock;
  EmbeddingArchive partial = mock_archive(swapped, mock);
  partial.sentences.erase(partial.sentences.begin());
  CHECK_THROWS_AS(run_experiment2(r.probes, r.eval, r.pairs, partial, small_config().experiment),
                  MissingSentenceError);
}

TEST_CASE("experiment 3 with no displacement reproduces experiment 1") {
  MockPipelineConfig cfg = small_config();
  cfg.experiment.max_displacement = 0;
  const MockPipelineResult r = run_mock_pipeline(cfg);
  const ExperimentReport& e1 = r.reports[0];
  const ExperimentReport& e3 = r.reports[2];
  REQUIRE(e1.rows.size() == e3.rows.size());
  for (std::size_t i = 0; i < e1.rows.size(); ++i) {
    CHECK(e1.rows[i].value == e3.rows[i].value);
    CHECK(e1.rows[i].n == e3.rows[i].n);
  }
  CHECK(r.scrambled_probes.probes == r.probes.probes);
}

TEST_CASE("experiment 3 refuses overlapping corpora") {
  const auto& r = small_run();
  CHECK_THROWS_AS(run_experiment3(r.train, r.train, small_config().experiment), ConfigError);
}

TEST_CASE("reports") {
  const auto& r = small_run();
  const std::string csv = report_csv(r.reports);
  CHECK(csv.rfind("experiment,layer_name,subset,gold_role,metric,value,n\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == 1 + 3 * 108);
  for (const ExperimentReport& e : r.reports) CHECK(report_from_json(report_to_json(e)) == e);
  CHECK(report_csv(run_mock_pipeline(small_config()).reports) == csv);

  TempDir dir("report");
  emit_report(r.reports, dir.path());
  for (const char* f : {"report.csv", "report.json", "exp1.svg", "exp2.svg", "exp3.svg"}) {
    CHECK(std::filesystem::exists(dir.path() / f));
  }
  CHECK(testing::slurp(dir.path() / "report.csv") == csv);
  const auto back = read_reports(dir.path() / "report.json");
  REQUIRE(back.size() == 3);
  CHECK(back[2] == r.reports[2]);
  CHECK(report_svg(r.reports[0]).find("<svg") != std::string::npos);
}

TEST_CASE("an empty subset reports zero with n = 0") {
  const std::vector<std::vector<bool>> membership{{true, true}, {false, false}};
  const std::vector<Role> gold{Role::kSubject, Role::kObject};
  const std::vector<std::vector<double>> p{{0.8, 0.1}};
  const ExperimentReport r = aggregate_report("t", {"static"}, {"all", "none"}, membership, gold, p);
  CHECK(r.count("static", "none") == 0);
  CHECK(r.value("static", "none", "all", "accuracy") == 0.0);
  CHECK(r.value("static", "all", "all", "accuracy") == 1.0);
  CHECK(std::abs(r.value("static", "all", "all", "mean_p_subject") - 0.45) < 1e-15);
  // Macro averages the classes present.
  const std::vector<std::vector<double>> q{{0.8, 0.9}};
  const ExperimentReport m = aggregate_report("t", {"static"}, {"all", "none"}, membership, gold, q);
  CHECK(m.value("static", "all", "all", "macro_accuracy") == 0.5);
  CHECK(m.value("static", "all", "all", "accuracy") == 0.5);
}

TEST_CASE("extraction table") {
  const auto s = read_conllu_file(data_path("worked_examples.conllu"));
  const auto t = extraction_table(s);
  REQUIRE(t.size() == 3);
  CHECK(t[0].at("id") == "chef-onion");
  CHECK(t[0].at("clauses").size() == 1);
  CHECK(t[0].at("clauses")[0].at("swap_eligible") == true);
  CHECK(t[0].at("roles")[0].at("role") == "subject");
}

TEST_CASE("synthetic corpora survive a CoNLL-U round trip") {
  SynthConfig cfg;
  cfg.num_sentences = 200;
  cfg.variety = 1.0;
  const auto s = mock_treebank(cfg, MockConfig{});
  const auto back = parse_conllu(to_conllu(s), "synth");
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(same_structure(back[i], s[i]));
    CHECK(back[i].text == s[i].text);
  }
}

TEST_CASE("merging reports replaces experiments by name") {
  const auto& r = small_run();
  std::vector<ExperimentReport> first{r.reports[1]};
  ExperimentReport stale = r.reports[0];
  stale.rows.at(0).value = -1.0;
  first.push_back(stale);
  const std::vector<ExperimentReport> fresh{r.reports[0], r.reports[2]};
  const auto merged = merge_reports(first, fresh);
  REQUIRE(merged.size() == 3);
  CHECK(merged[0] == r.reports[0]);
  CHECK(merged[1] == r.reports[1]);
  CHECK(merged[2] == r.reports[2]);
}
