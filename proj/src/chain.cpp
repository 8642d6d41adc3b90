#include "symlog/chain.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "symlog/rng.hpp"

namespace symlog {

namespace {

struct Namer {
  int prop = 1, pred = 1, constant = 1, heur = 1;
  std::string next_prop() { return "p" + std::to_string(prop++); }
  std::string next_pred() { return "q" + std::to_string(pred++); }
  std::string next_const() { return "c" + std::to_string(constant++); }
  std::string next_heur() { return "h" + std::to_string(heur++); }
};

// Metavariables of a schema in first-occurrence order.
struct MetaVars {
  std::vector<std::string> formulas;
  std::vector<std::string> predicates;
  std::vector<std::string> terms;
};

void collect_metavars(const FormulaPtr& f, MetaVars& out) {
  auto add = [](std::vector<std::string>& v, const std::string& name) {
    if (std::find(v.begin(), v.end(), name) == v.end()) v.push_back(name);
  };
  switch (f->kind) {
    case Formula::Kind::MetaVar: add(out.formulas, f->label); break;
    case Formula::Kind::Atom:
      if (is_meta_name(f->label)) add(out.predicates, f->label);
      for (const Term& t : f->args) {
        if (t.kind == TermKind::Meta) add(out.terms, t.name);
      }
      break;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: collect_metavars(f->lhs, out); break;
    default:
      collect_metavars(f->lhs, out);
      collect_metavars(f->rhs, out);
      break;
  }
}

void collect_metavars(const DefaultRule& d, MetaVars& out) {
  collect_metavars(d.prerequisite, out);
  for (const auto& j : d.justifications) collect_metavars(j, out);
  collect_metavars(d.consequent, out);
}

// Constants in first-occurrence order across formulas.
std::vector<std::string> constants_in_order(const std::vector<FormulaPtr>& fs) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& f : fs) {
    std::set<std::string> cs;
    collect_constants(f, cs);
    // collect_constants is a set; re-walk for order.
    struct W {
      static void go(const FormulaPtr& f, std::vector<std::string>& out,
                     std::set<std::string>& seen) {
        switch (f->kind) {
          case Formula::Kind::Atom:
            for (const Term& t : f->args) {
              if (t.kind == TermKind::Constant && seen.insert(t.name).second) {
                out.push_back(t.name);
              }
            }
            break;
          case Formula::Kind::MetaVar: break;
          case Formula::Kind::Not:
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists: go(f->lhs, out, seen); break;
          default:
            go(f->lhs, out, seen);
            go(f->rhs, out, seen);
            break;
        }
      }
    };
    W::go(f, out, seen);
  }
  return out;
}

struct SlotMatch {
  int direction = 0;
  int slot = 0;
  Substitution subst;
};

// First (direction, slot) of the rule whose premise schema matches f.
std::optional<SlotMatch> thread_slot(const RuleSchema& rule, const FormulaPtr& f) {
  if (rule.is_nm()) {
    for (std::size_t i = 0; i < rule.nm->fact_schemas.size(); ++i) {
      Substitution s;
      if (match_schema_into(rule.nm->fact_schemas[i], f, s)) {
        return SlotMatch{0, static_cast<int>(i), s};
      }
    }
    return std::nullopt;
  }
  auto dirs = rule.directions();
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (std::size_t i = 0; i < dirs[d].premises.size(); ++i) {
      Substitution s;
      if (match_schema_into(dirs[d].premises[i], f, s)) {
        return SlotMatch{static_cast<int>(d), static_cast<int>(i), s};
      }
    }
  }
  return std::nullopt;
}

struct InstantiatedStep {
  std::vector<FormulaPtr> premises;
  std::vector<DefaultRule> defaults;
  FormulaPtr conclusion;
};

// Completes the substitution with fresh symbols and instantiates the step.
InstantiatedStep instantiate_rule(const RuleSchema& rule, Substitution subst, bool ground_style,
                                  Namer& namer) {
  MetaVars mv;
  std::vector<FormulaPtr> premise_schemas;
  FormulaPtr conclusion_schema;
  std::vector<DefaultRule> default_schemas;

  if (rule.is_nm()) {
    premise_schemas = rule.premise_schemas;
    conclusion_schema = rule.conclusion_schema;
    default_schemas = rule.nm->default_schemas;
    for (const auto& p : premise_schemas) collect_metavars(p, mv);
    for (const auto& d : default_schemas) collect_metavars(d, mv);
    collect_metavars(conclusion_schema, mv);
  } else {
    premise_schemas = rule.premise_schemas;
    conclusion_schema = rule.conclusion_schema;
    for (const auto& p : premise_schemas) collect_metavars(p, mv);
    collect_metavars(conclusion_schema, mv);
  }

  MetaVars premises_only;
  for (const auto& p : premise_schemas) collect_metavars(p, premises_only);
  for (const auto& d : default_schemas) collect_metavars(d, premises_only);

  for (const auto& m : mv.formulas) {
    if (subst.formulas.count(m)) continue;
    if (ground_style) {
      subst.formulas[m] =
          mk_atom(namer.next_pred(), {Term{TermKind::Constant, namer.next_const()}});
    } else {
      subst.formulas[m] = mk_atom(namer.next_prop());
    }
  }
  for (const auto& m : mv.predicates) {
    if (!subst.predicates.count(m)) subst.predicates[m] = namer.next_pred();
  }
  std::vector<std::string> deferred_terms;
  for (const auto& m : mv.terms) {
    if (subst.terms.count(m)) continue;
    bool in_premises = std::find(premises_only.terms.begin(), premises_only.terms.end(), m) !=
                       premises_only.terms.end();
    if (in_premises) {
      subst.terms[m] = Term{TermKind::Constant, namer.next_const()};
    } else {
      deferred_terms.push_back(m);  // conclusion-only: bound after premises exist
    }
  }

  InstantiatedStep out;
  for (const auto& p : premise_schemas) out.premises.push_back(apply_substitution(p, subst));
  for (const auto& d : default_schemas) out.defaults.push_back(apply_substitution(d, subst));

  if (!deferred_terms.empty()) {
    // Same convention as apply_rule: first constant of the premises, else arb.
    std::vector<std::string> consts = constants_in_order(out.premises);
    std::string chosen = consts.empty() ? kArbitraryConstant : consts.front();
    for (const auto& m : deferred_terms) subst.terms[m] = Term{TermKind::Constant, chosen};
  }
  out.conclusion = apply_substitution(conclusion_schema, subst);
  return out;
}

InstantiatedStep instantiate_threaded(const RuleSchema& rule, const FormulaPtr& threaded,
                                      bool ground_style, Namer& namer, const std::string& prev_id,
                                      int position) {
  std::optional<SlotMatch> slot = thread_slot(rule, threaded);
  if (!slot) {
    throw CompositionError("incompatible adjacency at step " + std::to_string(position) + ": " +
                           rule.id + " has no premise slot for the conclusion of " + prev_id);
  }
  if (rule.is_nm() || slot->direction == 0) {
    return instantiate_rule(rule, slot->subst, ground_style, namer);
  }
  // Reversed direction of a bidirectional rule: instantiate against a
  // one-off schema with premises/conclusion swapped.
  RuleSchema reversed = rule;
  reversed.premise_schemas = {rule.conclusion_schema};
  reversed.conclusion_schema = rule.premise_schemas.front();
  reversed.bidirectional = false;
  return instantiate_rule(reversed, slot->subst, ground_style, namer);
}

struct Entry {
  bool heuristic = false;
  std::string rule_id;
};

ReasoningChain compose_entries(const std::vector<Entry>& entries) {
  ReasoningChain chain;
  bool ground_style = false;
  std::map<LogicClass, int> class_count;
  for (const Entry& e : entries) {
    if (e.heuristic) continue;
    const RuleSchema* r = catalog().get(e.rule_id);
    if (!r) throw UnknownRuleError(e.rule_id);
    class_count[r->logic_class]++;
    if (r->logic_class != LogicClass::PL) ground_style = true;
  }
  {
    LogicClass best = LogicClass::PL;
    int best_count = -1;
    for (LogicClass c : {LogicClass::PL, LogicClass::FOL, LogicClass::NM}) {
      if (class_count.count(c) && class_count[c] > best_count) {
        best = c;
        best_count = class_count[c];
      }
    }
    chain.logic_type = best;
  }

  Namer namer;
  std::map<std::string, int> concluded_by;  // render -> step index
  std::map<std::string, int> root_index;    // render -> root list index
  FormulaPtr threaded;
  std::string prev_id = "(start)";

  auto classify_premise = [&](const FormulaPtr& f) {
    StepPremise p;
    p.formula = f;
    std::string key = render_formula(f);
    auto it = concluded_by.find(key);
    if (it != concluded_by.end()) {
      p.provenance = Provenance::Derived;
      p.derived_from = it->second;
      return p;
    }
    p.provenance = Provenance::Context;
    if (!root_index.count(key)) {
      root_index[key] = static_cast<int>(chain.root_premises.size());
      chain.root_premises.push_back(f);
    }
    return p;
  };

  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    ChainStep step;
    step.index = static_cast<int>(k);

    if (e.heuristic) {
      if (!threaded) {
        throw CompositionError("heuristic step cannot open a chain");
      }
      step.rule_id = kHeuristicRuleId;
      step.step_type = StepType::Heuristic;
      step.premises.push_back(classify_premise(threaded));
      if (ground_style) {
        std::vector<std::string> consts = constants_in_order({threaded});
        std::string c = consts.empty() ? namer.next_const() : consts.front();
        step.conclusion = mk_atom(namer.next_heur(), {Term{TermKind::Constant, c}});
      } else {
        step.conclusion = mk_atom(namer.next_heur());
      }
    } else {
      const RuleSchema* rule = catalog().get(e.rule_id);
      step.rule_id = rule->id;
      step.step_type = StepType::Symbolic;
      InstantiatedStep inst =
          threaded ? instantiate_threaded(*rule, threaded, ground_style, namer, prev_id,
                                          static_cast<int>(k))
                   : instantiate_rule(*rule, Substitution{}, ground_style, namer);
      for (const auto& p : inst.premises) step.premises.push_back(classify_premise(p));
      step.defaults = inst.defaults;
      step.conclusion = inst.conclusion;
      for (const auto& d : inst.defaults) {
        bool present = false;
        for (const auto& rd : chain.root_defaults) {
          if (equal(rd, d)) {
            present = true;
            break;
          }
        }
        if (!present) chain.root_defaults.push_back(d);
      }
      prev_id = rule->id;
    }

    concluded_by.emplace(render_formula(step.conclusion), step.index);
    threaded = step.conclusion;
    chain.steps.push_back(std::move(step));
  }
  return chain;
}

// --------------------------------------------------------------------------
// Compatibility tables for sequence sampling
// --------------------------------------------------------------------------

struct ClassTables {
  std::vector<std::string> ids;
  std::map<std::string, int> index;
  std::vector<std::vector<bool>> can_follow;  // [from][to]
  std::vector<bool> accepts_atom;
  std::vector<bool> good;  // has an infinite continuation within the class
};

FormulaPtr forward_conclusion(const RuleSchema& rule, bool ground_style) {
  Namer namer;
  return instantiate_rule(rule, Substitution{}, ground_style, namer).conclusion;
}

const ClassTables& tables_for(LogicClass cls) {
  static std::map<LogicClass, ClassTables> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(cls);
  if (it != cache.end()) return it->second;

  ClassTables t;
  bool ground_style = cls != LogicClass::PL;
  std::vector<const RuleSchema*> rules = catalog().by_class(cls);
  for (const auto* r : rules) {
    t.index[r->id] = static_cast<int>(t.ids.size());
    t.ids.push_back(r->id);
  }
  const int n = static_cast<int>(t.ids.size());
  t.can_follow.assign(n, std::vector<bool>(n, false));
  t.accepts_atom.assign(n, false);

  FormulaPtr probe = ground_style
                         ? mk_atom("h0", {Term{TermKind::Constant, "c0"}})
                         : mk_atom("h0");
  for (int i = 0; i < n; ++i) {
    const RuleSchema* from = rules[static_cast<std::size_t>(i)];
    t.accepts_atom[i] = thread_slot(*from, probe).has_value();
    FormulaPtr conclusion = forward_conclusion(*from, ground_style);
    for (int j = 0; j < n; ++j) {
      t.can_follow[i][j] =
          thread_slot(*rules[static_cast<std::size_t>(j)], conclusion).has_value();
    }
  }

  // good = greatest fixpoint of "has a good successor".
  t.good.assign(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!t.good[i]) continue;
      bool has = false;
      for (int j = 0; j < n && !has; ++j) has = t.can_follow[i][j] && t.good[j];
      if (!has) {
        t.good[i] = false;
        changed = true;
      }
    }
  }
  auto [pos, inserted] = cache.emplace(cls, std::move(t));
  (void)inserted;
  return pos->second;
}

std::optional<std::vector<Entry>> try_sample(int depth, LogicClass cls, Rng& rng,
                                             const ChainConfig& cfg) {
  const ClassTables& t = tables_for(cls);
  const int n = static_cast<int>(t.ids.size());
  std::vector<Entry> entries;
  int prev = -1;
  bool prev_heur = false;
  bool force_heur = false;

  auto weight_of = [&](int i) {
    auto it = cfg.rule_weights.find(t.ids[static_cast<std::size_t>(i)]);
    return it == cfg.rule_weights.end() ? 1.0 : it->second;
  };

  while (static_cast<int>(entries.size()) < depth) {
    int pos = static_cast<int>(entries.size());
    bool interior = pos > 0 && pos < depth - 1;
    if (force_heur || (interior && !prev_heur && rng.chance(cfg.heuristic_rate))) {
      if (!interior) return std::nullopt;  // forced bridge fell on a boundary
      entries.push_back(Entry{true, ""});
      prev_heur = true;
      force_heur = false;
      continue;
    }
    std::vector<int> candidates;
    std::vector<bool> needs_bridge;
    for (int i = 0; i < n; ++i) {
      bool reachable = pos == 0 || (prev_heur ? t.accepts_atom[i] : t.can_follow[prev][i]);
      if (!reachable) continue;
      if (pos == depth - 1) {
        candidates.push_back(i);
        needs_bridge.push_back(false);
      } else if (t.good[i]) {
        candidates.push_back(i);
        needs_bridge.push_back(false);
      } else if (cfg.heuristic_rate > 0 && pos < depth - 2) {
        candidates.push_back(i);
        needs_bridge.push_back(true);
      }
    }
    if (candidates.empty()) return std::nullopt;
    std::vector<double> weights;
    for (int c : candidates) weights.push_back(weight_of(c));
    std::size_t pick = rng.pick_weighted(weights);
    int chosen = candidates[pick];
    entries.push_back(Entry{false, t.ids[static_cast<std::size_t>(chosen)]});
    force_heur = needs_bridge[pick];
    prev = chosen;
    prev_heur = false;
  }
  return entries;
}

}  // namespace

ReasoningChain compose_chain(const std::vector<std::string>& rule_sequence, std::uint64_t seed) {
  (void)seed;  // instantiation is fully determined by the sequence
  if (rule_sequence.size() < 2 || rule_sequence.size() > 9) {
    throw CompositionError("rule sequence length must be within [2, 9], got " +
                           std::to_string(rule_sequence.size()));
  }
  std::vector<Entry> entries;
  for (const auto& id : rule_sequence) {
    entries.push_back(Entry{id == kHeuristicRuleId, id});
  }
  return compose_entries(entries);
}

ReasoningChain sample_chain(int depth, LogicClass logic_type, std::uint64_t seed,
                            const ChainConfig& cfg) {
  if (depth < 2 || depth > 9) {
    throw CompositionError("chain depth must be within [2, 9], got " + std::to_string(depth));
  }
  Rng rng(mix_seed(seed, 0x5eedc4a1));
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    std::optional<std::vector<Entry>> entries = try_sample(depth, logic_type, rng, cfg);
    if (!entries) continue;
    try {
      ReasoningChain chain = compose_entries(*entries);
      // Reject degenerate chains that re-derive a root premise or an earlier
      // conclusion (rewrite rules can flip back and forth).
      std::set<std::string> seen;
      for (const auto& r : chain.root_premises) seen.insert(render_formula(r));
      bool novel = true;
      for (const auto& s : chain.steps) {
        if (!seen.insert(render_formula(s.conclusion)).second) {
          novel = false;
          break;
        }
      }
      if (!novel) continue;
      chain.logic_type = logic_type;
      return chain;
    } catch (const CompositionError&) {
      continue;
    }
  }
  throw CompositionError("no compatible " + to_string(logic_type) + " rule sequence of depth " +
                         std::to_string(depth) + " found under the configured constraints");
}

bool chain_connected(const ReasoningChain& chain) {
  std::set<std::string> consumed;
  for (const ChainStep& step : chain.steps) {
    for (const StepPremise& p : step.premises) consumed.insert(render_formula(p.formula));
  }
  for (std::size_t i = 0; i + 1 < chain.steps.size(); ++i) {
    if (!consumed.count(render_formula(chain.steps[i].conclusion))) return false;
  }
  for (const auto& root : chain.root_premises) {
    if (!consumed.count(render_formula(root))) return false;
  }
  return true;
}

}  // namespace symlog
