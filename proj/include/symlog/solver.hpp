#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symlog/grounding.hpp"
#include "symlog/oracle.hpp"

namespace symlog {

// Deterministic reasoning loop: iterative premise selection, reasoning-type
// identification, a formal or heuristic step, and a completion check. The
// internal rule engine replaces the paper-style neural reasoner; a pluggable
// HeuristicProvider supplies commonsense bridges when no rule applies.

class HeuristicProvider {
 public:
  struct Suggestion {
    FormulaPtr formula;
    std::string text;
  };

  virtual ~HeuristicProvider() = default;
  virtual std::optional<Suggestion> propose(const std::vector<FormulaPtr>& known,
                                            const std::vector<std::string>& known_nl,
                                            const FormulaPtr& goal) = 0;
};

// Line-oriented subprocess provider. Each request is one JSON line
// {"goal": "...", "known": ["...", ...]}; the reply is one JSON line, either
// {"formula": "...", "text": "..."} or {} to decline.
class SubprocessHeuristicProvider : public HeuristicProvider {
 public:
  explicit SubprocessHeuristicProvider(const std::string& command, int timeout_ms = 5000);
  ~SubprocessHeuristicProvider() override;
  std::optional<Suggestion> propose(const std::vector<FormulaPtr>& known,
                                    const std::vector<std::string>& known_nl,
                                    const FormulaPtr& goal) override;

 private:
  int in_fd_ = -1, out_fd_ = -1;
  long pid_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

struct SolverState {
  std::vector<FormulaPtr> known;      // root premises first, then derived facts
  std::set<std::string> known_keys;   // renders, for novelty checks
  std::vector<DefaultRule> defaults;  // travel alongside (NM instances)
  std::vector<ChainStep> trace;
  int root_count = 0;
  int iteration = 0;

  void add_root(const FormulaPtr& f);
  bool knows(const FormulaPtr& f) const;
};

namespace solver {

struct Selection {
  enum class Kind { Rule, HeuristicFallback };
  Kind kind = Kind::HeuristicFallback;
  RuleHit hit;  // valid when kind == Rule
};

// First applicable rule hit with a novel conclusion. Hits concluding one of
// the goal formulas are preferred; catalog/tuple order breaks ties.
Selection select_premises(const SolverState& state, const std::vector<FormulaPtr>& goals,
                          const std::set<LogicClass>& classes,
                          const std::vector<DefaultRule>& defaults);

StepType identify_type(const Selection& selection);

// Performs one reasoning step. Returns false when the loop must halt (no rule
// applies and the provider is absent or declines).
bool step(SolverState& state, const std::vector<FormulaPtr>& goals,
          const std::set<LogicClass>& classes, HeuristicProvider* provider);

struct SolveResult {
  std::string answer;            // True | False | Unknown | Unresolved | option index
  int answer_index = -1;         // multiple choice
  std::vector<ChainStep> trace;
  int iterations = 0;
};

struct SolveOptions {
  int max_iterations = 20;
  std::set<LogicClass> classes;  // empty = the instance's own class
  OracleLimits oracle;
};

SolveResult solve(const GroundedInstance& instance, HeuristicProvider* provider,
                  const SolveOptions& opts = {});

}  // namespace solver

}  // namespace symlog
