#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symlog/chain.hpp"
#include "symlog/formula.hpp"

namespace symlog {

struct OracleLimits {
  int max_pl_atoms = 20;           // hard cap for truth-table entailment
  int max_fol_domain = 3;          // default finite-model bound
  long long max_search_nodes = 50'000'000;  // countermodel search budget
  int max_ground_instances = 1000;          // default-theory grounding cap
  int max_tracked_defaults = 62;            // relevant ground defaults (bitmask)
};

struct Valuation {
  std::map<std::string, bool> atoms;
};

// A finite first-order structure over domain {0, .., domain_size-1}.
struct FiniteStructure {
  int domain_size = 0;
  std::map<std::string, int> constants;
  // predicate -> (arity, truth table in row-major tuple order)
  std::map<std::string, std::pair<int, std::vector<bool>>> relations;

  std::string describe() const;
};

struct EntailmentVerdict {
  enum class Status { Entailed, NotEntailed, Undetermined };
  Status status = Status::Undetermined;
  int bound = 0;  // FOL: largest domain size checked
  std::optional<Valuation> valuation;        // propositional countermodel
  std::optional<FiniteStructure> structure;  // first-order countermodel
  std::string note;

  bool entailed() const { return status == Status::Entailed; }
  bool not_entailed() const { return status == Status::NotEntailed; }
};

// Evaluation of ground / closed formulas, used by tests to check that
// reported counterexamples actually are counterexamples.
bool eval_formula(const FormulaPtr& f, const Valuation& v);
bool eval_formula(const FormulaPtr& f, const FiniteStructure& s);

// Exhaustive truth-table entailment over propositional formulas (0-ary
// atoms). Throws CapExceededError above limits.max_pl_atoms. OpenMP-parallel;
// pl_entails_serial is the reference implementation kept for testing, both
// report the countermodel with the smallest valuation index.
EntailmentVerdict pl_entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                             const OracleLimits& limits = {});
EntailmentVerdict pl_entails_serial(const std::vector<FormulaPtr>& premises,
                                    const FormulaPtr& goal, const OracleLimits& limits = {});

// Entailment over quantifier-free closed formulas; distinct ground atoms act
// as propositional variables. Pruned search, no atom cap (node budget only).
EntailmentVerdict ground_entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                                 const OracleLimits& limits = {});

// Finite-model entailment: no structure with domain size 1..max_domain
// satisfies the premises and falsifies the goal. Countermodel search runs as
// a pruned depth-first sweep over constant assignments and relation bits;
// the semantics is identical to enumerating every structure up to the bound.
EntailmentVerdict fol_entails_finite(const std::vector<FormulaPtr>& premises,
                                     const FormulaPtr& goal, int max_domain,
                                     const OracleLimits& limits = {});

// Reference kernel: literally enumerates every structure (constants x all
// relation tables). Only usable for small signatures; OpenMP-parallel when
// `parallel` is set, serial otherwise. Kept for cross-checking and benchmarks.
EntailmentVerdict fol_entails_naive(const std::vector<FormulaPtr>& premises,
                                    const FormulaPtr& goal, int max_domain, bool parallel,
                                    const OracleLimits& limits = {});

// --------------------------------------------------------------------------
// Default logic (Reiter)
// --------------------------------------------------------------------------

struct DefaultTheory {
  std::vector<FormulaPtr> facts;       // closed, quantifier-free
  std::vector<FormulaPtr> hard_rules;  // closed; universals are grounded over the constants
  std::vector<DefaultRule> defaults;   // free variables range over the constants
};

struct Extension {
  std::vector<FormulaPtr> base;   // facts + ground hard rules
  std::vector<FormulaPtr> fired;  // consequents of generating defaults, firing order
  std::vector<int> generating;    // indices into the ground default list
  std::vector<std::string> literals;  // sorted renders of entailed ground literals

  bool contains(const FormulaPtr& f, const OracleLimits& limits = {}) const;
};

// All Reiter extensions, enumerated as closed successful processes with
// defaults applied in (priority, declaration order); when priorities are in
// use only priority-respecting extensions are returned. The first extension
// is the preferred one. Throws CapExceededError over the grounding caps.
std::vector<Extension> default_extensions(const DefaultTheory& theory,
                                          const std::vector<std::string>& constants,
                                          const OracleLimits& limits = {});

// Entailment in the preferred extension (gold semantics for NM instances).
EntailmentVerdict nm_preferred_entails(const DefaultTheory& theory,
                                       const std::vector<std::string>& constants,
                                       const FormulaPtr& goal, const OracleLimits& limits = {});

// Dispatches on content: defaults present -> preferred-extension entailment;
// quantifier-free -> ground truth tables; otherwise finite-model entailment.
EntailmentVerdict entails(const std::vector<FormulaPtr>& premises,
                          const std::vector<DefaultRule>& defaults, const FormulaPtr& goal,
                          const OracleLimits& limits = {});

// --------------------------------------------------------------------------
// Whole-chain verification
// --------------------------------------------------------------------------

struct StepVerdict {
  int index = 0;
  StepType step_type = StepType::Symbolic;
  bool rule_match_ok = false;
  bool entailment_ok = false;
  std::string note;

  bool sound() const {
    return step_type == StepType::Heuristic || (rule_match_ok && entailment_ok);
  }
};

struct VerificationReport {
  std::vector<StepVerdict> steps;
  bool sound = false;
  int failing_step = -1;
  std::string reason;
};

// Checks each symbolic step two ways: the rule pattern re-matches (premises
// and conclusion under one substitution) and the premises entail the
// conclusion under the class-appropriate oracle. Heuristic steps are recorded
// but never entailment-checked.
VerificationReport verify_chain(const ReasoningChain& chain, const OracleLimits& limits = {});

}  // namespace symlog
