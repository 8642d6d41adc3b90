#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symlog/grounding.hpp"

namespace symlog {

// Word-set Jaccard similarity: lowercase, whitespace tokens, leading/trailing
// punctuation stripped, duplicates removed. Two empty token sets score 1.0.
double jaccard(const std::string& a, const std::string& b);
std::set<std::string> jaccard_tokens(const std::string& s);

// External plausibility scorer contract: one step string in, one score in
// [0,1] out. nullopt signals a transport failure.
class PlausibilityScorer {
 public:
  virtual ~PlausibilityScorer() = default;
  virtual std::optional<double> score(const std::string& step_text) = 0;
};

// Replays recorded scores; used to make filter decisions reproducible.
class RecordedScorer : public PlausibilityScorer {
 public:
  explicit RecordedScorer(std::map<std::string, double> scores) : scores_(std::move(scores)) {}
  std::optional<double> score(const std::string& step_text) override;

 private:
  std::map<std::string, double> scores_;
};

// Caches an inner scorer by step-string hash and records its answers.
class CachingScorer : public PlausibilityScorer {
 public:
  explicit CachingScorer(PlausibilityScorer* inner) : inner_(inner) {}
  std::optional<double> score(const std::string& step_text) override;
  const std::map<std::string, double>& recorded() const { return cache_; }

 private:
  PlausibilityScorer* inner_;
  std::map<std::string, double> cache_;
};

// Line-oriented subprocess scorer: the command is started once; each request
// writes one line of step text and reads one decimal line back.
class SubprocessScorer : public PlausibilityScorer {
 public:
  explicit SubprocessScorer(const std::string& command, int timeout_ms = 5000);
  ~SubprocessScorer() override;
  std::optional<double> score(const std::string& step_text) override;

 private:
  int in_fd_ = -1;   // child stdin (we write)
  int out_fd_ = -1;  // child stdout (we read)
  long pid_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

// HTTP scorer: POSTs the step text to the given endpoint, expects a decimal
// body back.
class HttpScorer : public PlausibilityScorer {
 public:
  HttpScorer(const std::string& host, int port, const std::string& path = "/score",
             int timeout_ms = 5000);
  std::optional<double> score(const std::string& step_text) override;

 private:
  std::string host_, path_;
  int port_;
  int timeout_ms_;
};

struct FilterConfig {
  double lexical_threshold = 0.5;       // reject strictly above
  double plausibility_threshold = 0.5;  // reject strictly below
};

struct FilterReason {
  std::string check;  // "lexical_similarity" | "plausibility" | "scorer_failure"
  int step_a = -1;
  int step_b = -1;
  double score = 0.0;
};

struct FilterDecision {
  enum class Status { Accepted, Rejected, Undecided };
  Status status = Status::Accepted;
  bool plausibility_checked = false;  // false = skipped (no scorer configured)
  std::vector<FilterReason> reasons;

  bool accepted() const { return status == Status::Accepted; }
};

// Lexical-similarity filter over every pair of step texts (a step's text is
// its conclusion rendering), then the optional plausibility check per step.
// Scorer transport failure marks the instance Undecided, never accepted.
FilterDecision filter_instance(const GroundedInstance& instance, PlausibilityScorer* scorer,
                               const FilterConfig& config = {});

}  // namespace symlog
