#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symlog/evalharness.hpp"
#include "symlog/grounding.hpp"
#include "symlog/quality.hpp"
#include "symlog/solver.hpp"

namespace symlog {

struct CountSpec {
  std::string domain;
  LogicClass logic = LogicClass::PL;
  int depth = 2;
  int count = 0;
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::vector<CountSpec> counts;
  double true_ratio = 0.4, false_ratio = 0.4, unknown_ratio = 0.2;
  double truth_eval_ratio = 0.5;  // share of truth-eval questions
  double heuristic_rate = 0.1;
  std::map<std::string, std::string> lexicon_paths;  // domain -> file
  FilterConfig filter;
  // Plausibility scorer: "off", "command", or "http".
  std::string plausibility_mode = "off";
  std::string plausibility_command;
  std::string plausibility_host = "127.0.0.1";
  int plausibility_port = 0;
  std::string plausibility_path = "/score";
  int plausibility_timeout_ms = 5000;
  OracleLimits oracle;
  int context_min = 35, context_max = 1484;
  int max_attempts_per_instance = 60;
  std::map<std::string, double> rule_weights;

  json to_json() const;
  static GenConfig from_json(const json& j);  // validates; throws ConfigError
};

std::uint64_t config_hash(const GenConfig& config);

struct GenStats {
  int requested = 0;
  int accepted = 0;
  std::map<std::string, int> rejections;  // reason -> count
  std::map<std::string, int> rule_histogram;
  std::map<std::string, int> label_histogram;
};

// Generates exactly the requested number of accepted instances per cell
// (regenerating around filter rejections), writes them sorted by id as JSONL,
// and writes <out>.manifest.json with everything needed to reproduce the run
// byte for byte. OpenMP worker-pool over instances.
GenStats generate_dataset(const GenConfig& config, const std::string& out_path);

// Re-runs generation from a manifest produced by generate_dataset.
GenStats generate_from_manifest(const std::string& manifest_path, const std::string& out_path);

// Reads instance JSONL; throws DataError with the line number on bad input.
std::vector<GroundedInstance> read_instances(const std::string& path);
std::vector<Prediction> read_predictions(const std::string& path);

// Dataset statistics document (counts by domain/logic/depth/source, context
// length min/max/mean, rule histogram).
json dataset_stats(const std::string& instances_path);

struct VerifySummary {
  int total = 0;
  int unsound = 0;
};

// Verifies every chain; writes one report line per instance; returns counts.
VerifySummary verify_file(const std::string& instances_path, const std::string& report_path,
                          const OracleLimits& limits = {});

struct SolveFileOptions {
  int max_iterations = 20;
  std::string heuristic_command;  // empty = no provider
  std::set<LogicClass> classes;   // empty = per-instance class
  OracleLimits oracle;
};

void solve_file(const std::string& instances_path, const std::string& out_path,
                const SolveFileOptions& opts = {});

EvalReport score_files(const std::string& gold_path, const std::string& pred_path,
                       const std::string& report_json_path, const std::string& report_table_path);

// Rule catalog as a JSON document (schemas in concrete syntax, per-family
// counts), for documentation and fixtures.
json rules_dump();

}  // namespace symlog
