#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symlog/chain.hpp"
#include "symlog/oracle.hpp"

namespace symlog {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Lexicons: per-domain natural-language material for grounding symbols.
// ---------------------------------------------------------------------------

struct BridgeTemplate {
  std::string conclusion;  // commonsense statement a heuristic step may land on
};

struct Lexicon {
  std::string domain;
  std::vector<std::string> propositions;
  std::map<int, std::vector<std::string>> predicates;  // arity -> templates with {0}..{arity-1}
  std::vector<std::string> constants;
  std::vector<std::string> visual_scenes;
  std::vector<BridgeTemplate> bridges;
};

Lexicon load_lexicon(const std::string& path);
Lexicon lexicon_from_json(const json& j, const std::string& where);

// ---------------------------------------------------------------------------
// Grounded instances
// ---------------------------------------------------------------------------

enum class QuestionType { TruthEval, MultipleChoice };

std::string to_string(QuestionType t);
QuestionType question_type_from_string(const std::string& s);

struct Question {
  QuestionType type = QuestionType::TruthEval;
  std::string text;
  FormulaPtr statement;  // truth-evaluation target
  std::vector<std::string> options;
  std::vector<FormulaPtr> options_formal;
  std::string gold_label;  // True | False | Unknown
  int gold_index = -1;     // multiple choice
};

struct StepNl {
  std::vector<std::string> premises_nl;
  std::string conclusion_nl;
};

struct GroundedInstance {
  std::string id;
  std::string domain;
  LogicClass logic_type = LogicClass::PL;
  int depth = 0;
  std::string image_ref;
  std::vector<std::string> visual_details;
  std::string context;
  ReasoningChain chain;
  std::vector<StepNl> step_nl;                  // aligned with chain.steps
  std::map<std::string, std::string> phrases;   // symbol -> phrase
  std::vector<int> image_roots;                 // indexes into chain.root_premises
  Question question;
};

struct GroundingOptions {
  int context_min = 35;
  int context_max = 1484;
  OracleLimits oracle;
};

// Instantiates a chain into a natural-language instance: bijective
// symbol-to-phrase assignment, image-borne premise selection (enforcing that
// the context alone leaves the conclusion undetermined), per-step renderings,
// and the context string. Deterministic per seed. Throws GroundingError when
// the lexicon is too small, no premise can carry the image, or the context
// falls outside the configured bounds.
GroundedInstance ground_chain(const ReasoningChain& chain, const Lexicon& lexicon,
                              std::uint64_t seed, const GroundingOptions& opts = {});

struct QuestionOptions {
  double true_ratio = 0.4;
  double false_ratio = 0.4;
  double unknown_ratio = 0.2;
  std::string forced_label;  // empty = draw from ratios
  int max_retries = 12;
  OracleLimits oracle;
};

// Fills instance.question. Truth evaluation uses the final conclusion, its
// negation, or a fresh oracle-certified undetermined statement; multiple
// choice builds one correct option and three oracle-certified non-entailed
// distractors. Deterministic per seed.
void generate_question(GroundedInstance& instance, const Lexicon& lexicon, QuestionType type,
                       std::uint64_t seed, const QuestionOptions& opts = {});

// Natural-language rendering of formulas / defaults under a phrase map.
std::string render_formula_nl(const FormulaPtr& f, const std::map<std::string, std::string>& phrases);
std::string render_default_nl(const DefaultRule& d, const std::map<std::string, std::string>& phrases);

// Gold entailment semantics for an instance: all premises (optionally minus
// the image-borne ones), defaults, and heuristic-step conclusions whose
// support survives are taken into account.
EntailmentVerdict instance_entails(const GroundedInstance& instance, const FormulaPtr& goal,
                                   bool include_image, const OracleLimits& limits = {});

// JSONL record (one instance per line) and its inverse.
json instance_to_json(const GroundedInstance& instance);
GroundedInstance instance_from_json(const json& j);

}  // namespace symlog
