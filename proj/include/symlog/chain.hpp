#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symlog/rules.hpp"

namespace symlog {

enum class StepType { Symbolic, Heuristic };
enum class Provenance { Context, Image, Derived };

inline const char* kHeuristicRuleId = "HEURISTIC";

struct StepPremise {
  FormulaPtr formula;
  Provenance provenance = Provenance::Context;
  int derived_from = -1;  // producing step index when provenance == Derived
};

struct ChainStep {
  int index = 0;
  std::string rule_id;  // kHeuristicRuleId for heuristic steps
  StepType step_type = StepType::Symbolic;
  std::vector<StepPremise> premises;
  std::vector<DefaultRule> defaults;  // NM steps only
  FormulaPtr conclusion;
};

struct ReasoningChain {
  LogicClass logic_type = LogicClass::PL;
  std::vector<ChainStep> steps;
  // Externally supplied premises, deduplicated, in order of first use.
  std::vector<FormulaPtr> root_premises;
  std::vector<DefaultRule> root_defaults;

  int depth() const { return static_cast<int>(steps.size()); }
  FormulaPtr final_conclusion() const { return steps.empty() ? nullptr : steps.back().conclusion; }
};

struct ChainConfig {
  double heuristic_rate = 0.0;
  std::map<std::string, double> rule_weights;  // absent rules weigh 1.0
  int max_attempts = 200;
};

// Instantiates the given rule sequence with fresh symbols, threading each
// step's conclusion into the first matching premise slot of the next step.
// Throws CompositionError when adjacent rules are incompatible.
ReasoningChain compose_chain(const std::vector<std::string>& rule_sequence, std::uint64_t seed);

// Samples a compatible rule sequence of the requested class and depth
// (weighted by cfg.rule_weights), optionally injecting heuristic steps at
// interior positions, and instantiates it. Deterministic per seed.
ReasoningChain sample_chain(int depth, LogicClass logic_type, std::uint64_t seed,
                            const ChainConfig& cfg = {});

// True when every non-final conclusion is consumed by a later step and every
// root premise is used by some step.
bool chain_connected(const ReasoningChain& chain);

}  // namespace symlog
