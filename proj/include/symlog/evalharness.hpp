#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symlog/grounding.hpp"

namespace symlog {

// One model prediction, as read from a predictions JSONL file.
struct Prediction {
  std::string id;
  std::string answer;              // label, option index, or "Unresolved"
  std::vector<std::string> steps;  // step texts from the trace
  std::map<std::string, double> external_scores;  // optional, merged into the report
};

struct EvalRecord {
  std::string id;
  std::string predicted;
  std::string gold;
  bool answer_correct = false;
  double rouge_l = 0.0;
  double jaccard = 0.0;
  std::map<std::string, double> external_scores;
};

// Case-insensitive label match for True/False/Unknown; index equality for
// multiple choice. Throws DataError on an unknown label string.
bool score_answer(const std::string& predicted, const std::string& gold, QuestionType type);

// Token-level LCS F-measure, steps aligned by index; unmatched steps score 0;
// two empty lists score 1.0.
double rouge_l(const std::vector<std::string>& pred_steps,
               const std::vector<std::string>& gold_steps);
// Same alignment, word-set Jaccard per pair.
double jaccard_steps(const std::vector<std::string>& pred_steps,
                     const std::vector<std::string>& gold_steps);

struct ReportCell {
  int count = 0;
  int correct = 0;
  double accuracy() const { return count == 0 ? 0.0 : 100.0 * correct / count; }
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  double accuracy = 0.0;
  double mean_rouge_l = 0.0;
  double mean_jaccard = 0.0;
  std::map<std::string, ReportCell> by_domain_logic;  // "domain|logic"
  std::map<std::string, ReportCell> by_domain;
  std::map<std::string, ReportCell> by_logic;
  std::map<std::string, ReportCell> by_depth_bucket;  // "2-3", "4-5", "6-7", "8-9"
  std::map<std::string, double> external_means;
  std::vector<EvalRecord> records;
};

// Joins records to instances (by id) and aggregates accuracy per domain,
// logic type, and depth bucket. Throws DataError on a dangling record id.
EvalReport aggregate_report(const std::vector<Prediction>& predictions,
                            const std::vector<GroundedInstance>& instances);

std::string depth_bucket(int depth);

json report_to_json(const EvalReport& report);
// Aligned plain-text table; empty cells render as an em-dash placeholder.
std::string report_to_table(const EvalReport& report);

Prediction prediction_from_json(const json& j);

}  // namespace symlog
