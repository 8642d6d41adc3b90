#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symlog/pipeline.hpp"
#include "testutil.hpp"

using namespace symlog;

namespace {

GenConfig small_config(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.counts = {{"traffic", LogicClass::PL, 2, 6}, {"traffic", LogicClass::PL, 3, 4}};
  c.lexicon_paths["traffic"] = std::string(TEST_DATA_DIR) + "/lexicons/traffic.json";
  c.heuristic_rate = 0.0;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  json j = small_config(1).to_json();
  CHECK_NOTHROW(GenConfig::from_json(j));

  json bad_depth = j;
  bad_depth["counts"][0]["depth"] = 12;
  CHECK_THROWS_AS(GenConfig::from_json(bad_depth), ConfigError);

  json bad_ratio = j;
  bad_ratio["label_ratios"]["True"] = 0.9;
  CHECK_THROWS_AS(GenConfig::from_json(bad_ratio), ConfigError);

  json bad_threshold = j;
  bad_threshold["filter"]["lexical_threshold"] = 1.5;
  CHECK_THROWS_AS(GenConfig::from_json(bad_threshold), ConfigError);
}

TEST_CASE("generate produces the requested count, all sound, and is reproducible") {
  testutil::TempDir dir("gen");
  GenConfig c = small_config(4242);
  GenStats stats = generate_dataset(c, dir.path("a.jsonl"));
  CHECK(stats.requested == 10);
  CHECK(stats.accepted == 10);

  std::vector<GroundedInstance> instances = read_instances(dir.path("a.jsonl"));
  REQUIRE(instances.size() == 10);
  for (const auto& inst : instances) {
    CAPTURE(inst.id);
    CHECK(verify_chain(inst.chain).sound);
  }
  // Sorted by id.
  for (std::size_t i = 1; i < instances.size(); ++i) {
    CHECK(instances[i - 1].id < instances[i].id);
  }

  // Byte-identical rerun.
  generate_dataset(c, dir.path("b.jsonl"));
  CHECK(testutil::read_file(dir.path("a.jsonl")) == testutil::read_file(dir.path("b.jsonl")));

  // Manifest replay reproduces the bytes too.
  generate_from_manifest(dir.path("a.jsonl") + ".manifest.json", dir.path("c.jsonl"));
  CHECK(testutil::read_file(dir.path("a.jsonl")) == testutil::read_file(dir.path("c.jsonl")));
}

TEST_CASE("generate fails loudly when a domain has no lexicon") {
  GenConfig c = small_config(1);
  c.counts.push_back({"finance", LogicClass::PL, 2, 1});
  testutil::TempDir dir("nolex");
  CHECK_THROWS_AS(generate_dataset(c, dir.path("x.jsonl")), ConfigError);
}

TEST_CASE("label quotas keep shares near the configured ratios") {
  testutil::TempDir dir("labels");
  GenConfig c = small_config(7);
  c.counts = {{"traffic", LogicClass::PL, 2, 40}};
  c.truth_eval_ratio = 1.0;
  GenStats stats = generate_dataset(c, dir.path("x.jsonl"));
  int t = stats.label_histogram["True"], f = stats.label_histogram["False"],
      u = stats.label_histogram["Unknown"];
  CHECK(t + f + u == 40);
  CHECK(std::abs(t / 40.0 - 0.4) <= 0.1);
  CHECK(std::abs(f / 40.0 - 0.4) <= 0.1);
  CHECK(std::abs(u / 40.0 - 0.2) <= 0.1);
}

TEST_CASE("stats reports counts, lengths and histograms") {
  testutil::TempDir dir("stats");
  GenConfig c = small_config(11);
  generate_dataset(c, dir.path("x.jsonl"));
  json s = dataset_stats(dir.path("x.jsonl"));
  CHECK(s.at("instances").get<int>() == 10);
  CHECK(s.at("by_domain").at("traffic").get<int>() == 10);
  CHECK(s.at("by_logic").at("PL").get<int>() == 10);
  CHECK(s.at("by_depth").at("2").get<int>() == 6);
  CHECK(s.at("by_depth").at("3").get<int>() == 4);
  CHECK(s.at("context_length").at("min").get<int>() >= 35);
  CHECK(s.at("context_length").at("max").get<int>() <= 1484);
  double mean = s.at("context_length").at("mean").get<double>();
  CHECK(mean >= s.at("context_length").at("min").get<double>());
  CHECK(!s.at("rule_histogram").empty());
}

TEST_CASE("stats on an empty file renders null lengths") {
  testutil::TempDir dir("empty");
  testutil::write_file(dir.path("e.jsonl"), "");
  json s = dataset_stats(dir.path("e.jsonl"));
  CHECK(s.at("instances").get<int>() == 0);
  CHECK(s.at("context_length").at("mean").is_null());
}

TEST_CASE("stats reports malformed lines with their line number") {
  testutil::TempDir dir("bad");
  testutil::write_file(dir.path("bad.jsonl"), "{\"id\": \"x\"}\n");
  try {
    dataset_stats(dir.path("bad.jsonl"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 1") != std::string::npos);
  }
}

TEST_CASE("verify_file writes a report and counts unsound chains") {
  testutil::TempDir dir("verify");
  GenConfig c = small_config(13);
  generate_dataset(c, dir.path("x.jsonl"));
  VerifySummary s = verify_file(dir.path("x.jsonl"), dir.path("report.jsonl"));
  CHECK(s.total == 10);
  CHECK(s.unsound == 0);

  // Corrupt one conclusion; the report must flag it.
  std::vector<GroundedInstance> instances = read_instances(dir.path("x.jsonl"));
  json row = instance_to_json(instances[0]);
  row["chain"][0]["conclusion_formal"] = "p999";
  testutil::write_file(dir.path("corrupt.jsonl"), row.dump() + "\n");
  VerifySummary bad = verify_file(dir.path("corrupt.jsonl"), dir.path("report2.jsonl"));
  CHECK(bad.total == 1);
  CHECK(bad.unsound == 1);
}

TEST_CASE("solve_file + score_files close the loop at 100% on symbolic PL") {
  testutil::TempDir dir("loop");
  GenConfig c = small_config(17);
  generate_dataset(c, dir.path("gold.jsonl"));
  solve_file(dir.path("gold.jsonl"), dir.path("pred.jsonl"), {});
  EvalReport r = score_files(dir.path("gold.jsonl"), dir.path("pred.jsonl"),
                             dir.path("report.json"), dir.path("report.txt"));
  CHECK(r.total == 10);
  CHECK(r.accuracy == doctest::Approx(100.0));
  CHECK(!testutil::read_file(dir.path("report.json")).empty());
  CHECK(!testutil::read_file(dir.path("report.txt")).empty());
}

TEST_CASE("rules_dump reports the catalog with per-family counts") {
  json j = rules_dump();
  CHECK(j.at("counts_by_family").at("PL").get<int>() == 12);
  CHECK(j.at("counts_by_family").at("FOL").get<int>() == 13);
  CHECK(j.at("counts_by_family").at("MV").get<int>() == 7);
  CHECK(j.at("counts_by_family").at("NM").get<int>() == 8);
  CHECK(j.at("total").get<int>() == 40);
  CHECK(j.at("rules").size() == 40);
  // Schemas are emitted in concrete syntax and parse back.
  for (const auto& r : j.at("rules")) {
    for (const auto& p : r.at("premises")) CHECK_NOTHROW(parse_formula(p.get<std::string>()));
    CHECK_NOTHROW(parse_formula(r.at("conclusion").get<std::string>()));
  }
}

TEST_CASE("generation covers FOL and NM classes too") {
  testutil::TempDir dir("classes");
  GenConfig c = small_config(23);
  c.counts = {{"traffic", LogicClass::FOL, 3, 3}, {"traffic", LogicClass::NM, 3, 3}};
  c.heuristic_rate = 0.2;
  GenStats stats = generate_dataset(c, dir.path("x.jsonl"));
  CHECK(stats.accepted == 6);
  std::vector<GroundedInstance> instances = read_instances(dir.path("x.jsonl"));
  for (const auto& inst : instances) {
    CAPTURE(inst.id);
    CHECK(verify_chain(inst.chain).sound);
  }
  VerifySummary s = verify_file(dir.path("x.jsonl"), dir.path("r.jsonl"));
  CHECK(s.unsound == 0);
}
