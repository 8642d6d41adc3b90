#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symlog/quality.hpp"
#include "testutil.hpp"

using namespace symlog;

namespace {

// Fixture instance whose step texts are fully controlled.
GroundedInstance fixture(const std::vector<std::string>& step_texts) {
  GroundedInstance inst;
  inst.id = "fixture";
  inst.domain = "general";
  inst.depth = static_cast<int>(step_texts.size());
  for (std::size_t i = 0; i < step_texts.size(); ++i) {
    ChainStep s;
    s.index = static_cast<int>(i);
    s.rule_id = "MP";
    s.conclusion = mk_atom("p" + std::to_string(i));
    inst.chain.steps.push_back(s);
    StepNl nl;
    nl.conclusion_nl = step_texts[i];
    inst.step_nl.push_back(nl);
  }
  return inst;
}

// Token lists with an exact target Jaccard n_inter / n_union.
std::pair<std::string, std::string> with_jaccard(int inter, int uni) {
  // |A| = inter + extra_a, |B| = inter + extra_b, union = inter+extra_a+extra_b
  int extra = uni - inter;
  int extra_a = extra / 2;
  int extra_b = extra - extra_a;
  std::string a, b;
  for (int i = 0; i < inter; ++i) a += "shared" + std::to_string(i) + " ";
  for (int i = 0; i < extra_a; ++i) a += "lefta" + std::to_string(i) + " ";
  for (int i = 0; i < inter; ++i) b += "shared" + std::to_string(i) + " ";
  for (int i = 0; i < extra_b; ++i) b += "rightb" + std::to_string(i) + " ";
  return {a, b};
}

}  // namespace

TEST_CASE("jaccard examples") {
  CHECK(jaccard("a b c", "a b d") == doctest::Approx(0.5));
  CHECK(jaccard("hello world", "hello world") == 1.0);
  CHECK(jaccard("alpha beta", "gamma delta") == 0.0);
  CHECK(jaccard("", "") == 1.0);
  CHECK(jaccard("...", "???") == 1.0);  // punctuation-only tokens vanish
  // Lowercasing, punctuation stripping, deduplication.
  CHECK(jaccard("The cat, the CAT!", "the cat") == 1.0);
}

TEST_CASE("jaccard is symmetric, reflexive and bounded (fuzz)") {
  Rng rng(8080);
  const std::string words = "abcdefgh";
  for (int i = 0; i < 3000; ++i) {
    auto mk = [&]() {
      std::string s;
      std::size_t n = rng.below(12);
      for (std::size_t k = 0; k < n; ++k) {
        s += words[rng.below(words.size())];
        s += rng.below(4) == 0 ? '.' : ' ';
      }
      return s;
    };
    std::string a = mk(), b = mk();
    double ab = jaccard(a, b), ba = jaccard(b, a);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(jaccard(a, a) == 1.0);
  }
}

TEST_CASE("filter boundary: exactly 0.5 accepted, strictly above rejected") {
  auto [a_half, b_half] = with_jaccard(2, 4);  // 0.5 exactly
  FilterDecision at_half = filter_instance(fixture({a_half, b_half}), nullptr);
  CHECK(at_half.accepted());

  auto [a51, b51] = with_jaccard(51, 100);  // 0.51 exactly
  CHECK(jaccard(a51, b51) == doctest::Approx(0.51));
  FilterDecision above = filter_instance(fixture({a51, b51}), nullptr);
  CHECK(!above.accepted());
  REQUIRE(!above.reasons.empty());
  CHECK(above.reasons[0].check == "lexical_similarity");
  CHECK(above.reasons[0].step_a == 0);
  CHECK(above.reasons[0].step_b == 1);
  CHECK(above.reasons[0].score == doctest::Approx(0.51));
}

TEST_CASE("filter rejects on a 0.6 pair and reports the offending steps") {
  FilterDecision d = filter_instance(fixture({"a b c d", "b c d e", "zz yy xx"}), nullptr);
  CHECK(!d.accepted());
  CHECK(d.reasons.size() == 1);
  CHECK(d.reasons[0].score == doctest::Approx(0.6));
}

TEST_CASE("plausibility skipped without a scorer, applied with one") {
  GroundedInstance inst = fixture({"the first step text here", "a wholly different sentence"});
  FilterDecision no_scorer = filter_instance(inst, nullptr);
  CHECK(no_scorer.accepted());
  CHECK(!no_scorer.plausibility_checked);

  RecordedScorer good({{"the first step text here", 0.9},
                       {"a wholly different sentence", 0.8}});
  FilterDecision ok = filter_instance(inst, &good);
  CHECK(ok.accepted());
  CHECK(ok.plausibility_checked);

  RecordedScorer bad({{"the first step text here", 0.9},
                      {"a wholly different sentence", 0.3}});
  FilterDecision rejected = filter_instance(inst, &bad);
  CHECK(!rejected.accepted());
  REQUIRE(!rejected.reasons.empty());
  CHECK(rejected.reasons[0].check == "plausibility");
  CHECK(rejected.reasons[0].step_a == 1);
  CHECK(rejected.reasons[0].score == doctest::Approx(0.3));

  // Boundary: exactly 0.5 passes (strictly below rejects).
  RecordedScorer boundary({{"the first step text here", 0.5},
                           {"a wholly different sentence", 0.5}});
  CHECK(filter_instance(inst, &boundary).accepted());
}

TEST_CASE("scorer transport failure marks the instance undecided") {
  GroundedInstance inst = fixture({"first text", "second text"});
  RecordedScorer partial({{"first text", 0.9}});  // second lookup fails
  FilterDecision d = filter_instance(inst, &partial);
  CHECK(d.status == FilterDecision::Status::Undecided);
  CHECK(!d.accepted());
  REQUIRE(!d.reasons.empty());
  CHECK(d.reasons.back().check == "scorer_failure");
}

TEST_CASE("recorded-scorer replay reproduces decisions bit-exactly") {
  GroundedInstance inst =
      fixture({"steady rain floods the underpass", "the depot reroutes its vans",
               "dispatch holds the late shift"});
  // First pass through a live scorer, recording via the cache.
  RecordedScorer live({{"steady rain floods the underpass", 0.73},
                       {"the depot reroutes its vans", 0.51},
                       {"dispatch holds the late shift", 0.49}});
  CachingScorer cache(&live);
  FilterDecision first = filter_instance(inst, &cache);

  RecordedScorer replay(cache.recorded());
  FilterDecision second = filter_instance(inst, &replay);

  CHECK(first.status == second.status);
  REQUIRE(first.reasons.size() == second.reasons.size());
  for (std::size_t i = 0; i < first.reasons.size(); ++i) {
    CHECK(first.reasons[i].check == second.reasons[i].check);
    CHECK(first.reasons[i].step_a == second.reasons[i].step_a);
    CHECK(first.reasons[i].step_b == second.reasons[i].step_b);
    CHECK(first.reasons[i].score == second.reasons[i].score);
  }
}

TEST_CASE("subprocess scorer speaks the line protocol") {
  // Score = 0.25 when the line contains "implausible", else 0.75.
  SubprocessScorer scorer(
      "while IFS= read -r line; do case \"$line\" in *implausible*) echo 0.25;; *) echo 0.75;; "
      "esac; done");
  auto a = scorer.score("a perfectly ordinary step");
  REQUIRE(a.has_value());
  CHECK(*a == doctest::Approx(0.75));
  auto b = scorer.score("an implausible leap of logic");
  REQUIRE(b.has_value());
  CHECK(*b == doctest::Approx(0.25));

  GroundedInstance inst = fixture({"an implausible leap of logic", "a normal line"});
  FilterDecision d = filter_instance(inst, &scorer);
  CHECK(!d.accepted());
  CHECK(d.reasons[0].check == "plausibility");
}

TEST_CASE("subprocess scorer failure is reported, not guessed") {
  SubprocessScorer broken("exit 0", /*timeout_ms=*/500);
  CHECK(!broken.score("anything").has_value());
}

TEST_CASE("filter requires at least two steps") {
  CHECK_THROWS_AS(filter_instance(fixture({"only one"}), nullptr), Error);
}
