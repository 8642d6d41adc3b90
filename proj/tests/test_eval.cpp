#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symlog/evalharness.hpp"
#include "symlog/solver.hpp"
#include "testutil.hpp"

using namespace symlog;

namespace {

GroundedInstance gold_instance(const std::string& id, const std::string& domain, LogicClass cls,
                               int depth, const std::string& label) {
  GroundedInstance inst;
  inst.id = id;
  inst.domain = domain;
  inst.logic_type = cls;
  inst.depth = depth;
  for (int i = 0; i < depth; ++i) {
    ChainStep s;
    s.index = i;
    s.rule_id = "MP";
    s.conclusion = mk_atom("p" + std::to_string(i));
    inst.chain.steps.push_back(s);
    StepNl nl;
    nl.conclusion_nl = "step number " + std::to_string(i) + " holds";
    inst.step_nl.push_back(nl);
  }
  inst.question.type = QuestionType::TruthEval;
  inst.question.gold_label = label;
  return inst;
}

Prediction pred(const std::string& id, const std::string& answer,
                std::vector<std::string> steps = {}) {
  Prediction p;
  p.id = id;
  p.answer = answer;
  p.steps = std::move(steps);
  return p;
}

}  // namespace

TEST_CASE("score_answer label normalization") {
  CHECK(score_answer("true", "True", QuestionType::TruthEval));
  CHECK(score_answer("TRUE", "true", QuestionType::TruthEval));
  CHECK(!score_answer("Unknown", "False", QuestionType::TruthEval));
  CHECK(score_answer("2", "2", QuestionType::MultipleChoice));
  CHECK(!score_answer("1", "2", QuestionType::MultipleChoice));
  CHECK(!score_answer("Unresolved", "2", QuestionType::MultipleChoice));
  CHECK(!score_answer("unresolved", "True", QuestionType::TruthEval));
  CHECK_THROWS_AS(score_answer("maybe", "True", QuestionType::TruthEval), DataError);
  CHECK_THROWS_AS(score_answer("true", "perhaps", QuestionType::TruthEval), DataError);
}

TEST_CASE("rouge_l matches the hand-computed LCS values") {
  CHECK(rouge_l({"the cat sat"}, {"the cat"}) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(rouge_l({"identical steps here"}, {"identical steps here"}) == 1.0);
  CHECK(rouge_l({"alpha beta"}, {"gamma delta"}) == 0.0);
  CHECK(rouge_l({}, {}) == 1.0);
  // Extra steps on either side score zero at their index.
  CHECK(rouge_l({"a b", "c d"}, {"a b"}) == doctest::Approx(0.5));
  CHECK(rouge_l({"a b"}, {"a b", "c d"}) == doctest::Approx(0.5));
}

TEST_CASE("rouge_l F-measure is symmetric in pred/gold swap") {
  Rng rng(99);
  const char* words[] = {"red", "green", "blue", "van", "stops", "turns", "fast", "slow"};
  for (int i = 0; i < 500; ++i) {
    auto mk = [&]() {
      std::string s;
      std::size_t n = 1 + rng.below(7);
      for (std::size_t k = 0; k < n; ++k) {
        s += words[rng.below(8)];
        s += ' ';
      }
      return s;
    };
    std::vector<std::string> a = {mk(), mk()};
    std::vector<std::string> b = {mk(), mk()};
    double ab = rouge_l(a, b);
    double ba = rouge_l(b, a);
    CHECK(ab == doctest::Approx(ba));  // P and R swap, F invariant
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("aggregate_report computes cells, buckets and means") {
  std::vector<GroundedInstance> gold = {
      gold_instance("a", "traffic", LogicClass::PL, 2, "True"),
      gold_instance("b", "traffic", LogicClass::PL, 5, "False"),
      gold_instance("c", "science", LogicClass::NM, 8, "Unknown"),
  };
  std::vector<Prediction> preds = {
      pred("a", "True", {"step number 0 holds", "step number 1 holds"}),
      pred("b", "True"),
      pred("c", "Unknown"),
  };
  EvalReport r = aggregate_report(preds, gold);
  CHECK(r.total == 3);
  CHECK(r.correct == 2);
  CHECK(r.accuracy == doctest::Approx(100.0 * 2 / 3));
  CHECK(r.by_domain.at("traffic").count == 2);
  CHECK(r.by_domain.at("traffic").correct == 1);
  CHECK(r.by_domain_logic.at("traffic|PL").accuracy() == doctest::Approx(50.0));
  CHECK(r.by_depth_bucket.at("2-3").accuracy() == doctest::Approx(100.0));
  CHECK(r.by_depth_bucket.at("4-5").accuracy() == doctest::Approx(0.0));
  CHECK(r.by_depth_bucket.at("8-9").accuracy() == doctest::Approx(100.0));
  CHECK(r.records[0].rouge_l == doctest::Approx(1.0));

  // Bucket counts sum to the record count.
  int total = 0;
  for (const auto& [k, c] : r.by_depth_bucket) {
    (void)k;
    total += c.count;
  }
  CHECK(total == r.total);

  // Weighted bucket accuracies average back to the overall accuracy.
  double weighted = 0;
  for (const auto& [k, c] : r.by_depth_bucket) {
    (void)k;
    weighted += c.accuracy() * c.count;
  }
  CHECK(weighted / r.total == doctest::Approx(r.accuracy));
}

TEST_CASE("dangling prediction ids are an error") {
  std::vector<GroundedInstance> gold = {gold_instance("a", "traffic", LogicClass::PL, 2, "True")};
  CHECK_THROWS_AS(aggregate_report({pred("zzz", "True")}, gold), DataError);
}

TEST_CASE("self-scoring gold chains yields perfect scores") {
  std::vector<GroundedInstance> gold;
  std::vector<Prediction> preds;
  for (int i = 0; i < 6; ++i) {
    GroundedInstance g = gold_instance("id" + std::to_string(i), "traffic", LogicClass::PL,
                                       2 + i, i % 2 ? "True" : "False");
    Prediction p;
    p.id = g.id;
    p.answer = g.question.gold_label;
    for (const auto& nl : g.step_nl) p.steps.push_back(nl.conclusion_nl);
    gold.push_back(std::move(g));
    preds.push_back(std::move(p));
  }
  EvalReport r = aggregate_report(preds, gold);
  CHECK(r.accuracy == doctest::Approx(100.0));
  CHECK(r.mean_rouge_l == doctest::Approx(1.0));
  CHECK(r.mean_jaccard == doctest::Approx(1.0));
}

TEST_CASE("empty cells render as a dash in the table") {
  std::vector<GroundedInstance> gold = {gold_instance("a", "traffic", LogicClass::PL, 2, "True")};
  EvalReport r = aggregate_report({pred("a", "True")}, gold);
  std::string table = report_to_table(r);
  CHECK(table.find("—") != std::string::npos);  // FOL/NM columns are empty
  CHECK(table.find("traffic") != std::string::npos);
  CHECK(table.find("100.0") != std::string::npos);
}

TEST_CASE("external scores are averaged into the report") {
  std::vector<GroundedInstance> gold = {
      gold_instance("a", "traffic", LogicClass::PL, 2, "True"),
      gold_instance("b", "traffic", LogicClass::PL, 2, "True"),
  };
  Prediction p1 = pred("a", "True");
  p1.external_scores["bert_score_f1"] = 0.8;
  Prediction p2 = pred("b", "True");
  p2.external_scores["bert_score_f1"] = 0.6;
  EvalReport r = aggregate_report({p1, p2}, gold);
  CHECK(r.external_means.at("bert_score_f1") == doctest::Approx(0.7));
  json j = report_to_json(r);
  CHECK(j.at("external_means").at("bert_score_f1").get<double>() == doctest::Approx(0.7));
}

TEST_CASE("prediction_from_json reads answers, traces and external scores") {
  json j = {{"id", "x"},
            {"answer", 2},
            {"trace", {{{"text", "first"}, {"conclusion_formal", "p1"}},
                       {{"conclusion_formal", "p2"}}}},
            {"external_scores", {{"roscoe", 0.5}}}};
  Prediction p = prediction_from_json(j);
  CHECK(p.id == "x");
  CHECK(p.answer == "2");
  REQUIRE(p.steps.size() == 2);
  CHECK(p.steps[0] == "first");
  CHECK(p.steps[1] == "p2");
  CHECK(p.external_scores.at("roscoe") == doctest::Approx(0.5));
}
