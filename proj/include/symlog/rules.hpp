#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symlog/formula.hpp"

namespace symlog {

enum class LogicClass { PL, FOL, NM };
enum class RuleFamily { PL, FOL, MV, NM };

std::string to_string(LogicClass c);
std::string to_string(RuleFamily f);
LogicClass logic_class_from_string(const std::string& s);

// A non-monotonic rule is a default-theory template rather than a
// premises/conclusion schema: ground fact schemas, universally quantified
// hard-rule schemas, and default schemas over a free variable.
struct NmTemplate {
  std::vector<FormulaPtr> fact_schemas;
  std::vector<FormulaPtr> hard_rule_schemas;
  std::vector<DefaultRule> default_schemas;
};

struct RuleDirection {
  std::vector<FormulaPtr> premises;
  FormulaPtr conclusion;
};

struct RuleSchema {
  std::string id;
  LogicClass logic_class;
  RuleFamily family;
  // For NM rules these are fact schemas followed by hard-rule schemas, so the
  // formula premises stay addressable by index.
  std::vector<FormulaPtr> premise_schemas;
  FormulaPtr conclusion_schema;
  bool bidirectional = false;
  std::optional<NmTemplate> nm;

  bool is_nm() const { return nm.has_value(); }
  // Forward direction, plus the reversed one for bidirectional rules.
  std::vector<RuleDirection> directions() const;
};

class RuleCatalog {
 public:
  explicit RuleCatalog(std::vector<RuleSchema> rules);

  const std::vector<RuleSchema>& rules() const { return rules_; }
  const RuleSchema* get(const std::string& id) const;
  std::vector<const RuleSchema*> by_class(LogicClass c) const;
  std::vector<const RuleSchema*> by_family(RuleFamily f) const;
  // Position in catalog order; -1 if unknown.
  int index_of(const std::string& id) const;

 private:
  std::vector<RuleSchema> rules_;
};

// The built-in catalog, fixed order, constructed once.
const RuleCatalog& catalog();

// One way a rule applies to a premise pool.
struct RuleHit {
  std::string rule_id;
  std::vector<int> premise_indices;  // pool indices matched to premise schemas, in schema order
  std::vector<int> default_indices;  // NM: pool indices of matched defaults
  FormulaPtr conclusion;
};

// Applies one rule to exactly its premises (any order). Returns every
// conclusion obtainable, duplicates removed, deterministic order. For
// bidirectional rules both directions are attempted. Conclusion-only constant
// metavariables (UI, HS_F) are instantiated with each constant occurring in
// the matched premises, or the reserved constant `arb` when none occurs.
std::vector<FormulaPtr> apply_rule(const std::string& rule_id,
                                   const std::vector<FormulaPtr>& premises,
                                   const std::vector<DefaultRule>& defaults = {});

// Exhaustive enumeration over ordered tuples of distinct premise indices (up
// to the catalog's max premise arity, 3), ordered by (catalog order, tuple).
std::vector<RuleHit> applicable_rules(const std::vector<FormulaPtr>& premises,
                                      const std::set<LogicClass>& classes,
                                      const std::vector<DefaultRule>& defaults = {});

// True when the rule's premise schemas and conclusion schema match the given
// step under one consistent substitution (premises in any order). Used by
// chain verification.
bool rule_matches_step(const RuleSchema& rule, const std::vector<FormulaPtr>& premises,
                       const std::vector<DefaultRule>& defaults, const FormulaPtr& conclusion);

// Reserved constant used when a conclusion introduces an arbitrary individual.
inline const char* kArbitraryConstant = "arb";

}  // namespace symlog
