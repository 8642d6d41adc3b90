#include "symlog/rules.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace symlog {

std::string to_string(LogicClass c) {
  switch (c) {
    case LogicClass::PL: return "PL";
    case LogicClass::FOL: return "FOL";
    case LogicClass::NM: return "NM";
  }
  return "?";
}

std::string to_string(RuleFamily f) {
  switch (f) {
    case RuleFamily::PL: return "PL";
    case RuleFamily::FOL: return "FOL";
    case RuleFamily::MV: return "MV";
    case RuleFamily::NM: return "NM";
  }
  return "?";
}

LogicClass logic_class_from_string(const std::string& s) {
  if (s == "PL") return LogicClass::PL;
  if (s == "FOL") return LogicClass::FOL;
  if (s == "NM") return LogicClass::NM;
  throw ConfigError("unknown logic class: " + s);
}

std::vector<RuleDirection> RuleSchema::directions() const {
  std::vector<RuleDirection> out;
  out.push_back({premise_schemas, conclusion_schema});
  if (bidirectional) {
    // All bidirectional rules are single-premise rewrites.
    out.push_back({{conclusion_schema}, premise_schemas.front()});
  }
  return out;
}

RuleCatalog::RuleCatalog(std::vector<RuleSchema> rules) : rules_(std::move(rules)) {}

const RuleSchema* RuleCatalog::get(const std::string& id) const {
  for (const auto& r : rules_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::vector<const RuleSchema*> RuleCatalog::by_class(LogicClass c) const {
  std::vector<const RuleSchema*> out;
  for (const auto& r : rules_) {
    if (r.logic_class == c) out.push_back(&r);
  }
  return out;
}

std::vector<const RuleSchema*> RuleCatalog::by_family(RuleFamily f) const {
  std::vector<const RuleSchema*> out;
  for (const auto& r : rules_) {
    if (r.family == f) out.push_back(&r);
  }
  return out;
}

int RuleCatalog::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

RuleSchema schema(std::string id, LogicClass cls, RuleFamily fam,
                  std::vector<std::string> premises, std::string conclusion,
                  bool bidirectional = false) {
  RuleSchema r;
  r.id = std::move(id);
  r.logic_class = cls;
  r.family = fam;
  for (const auto& p : premises) r.premise_schemas.push_back(parse_formula(p));
  r.conclusion_schema = parse_formula(conclusion);
  r.bidirectional = bidirectional;
  return r;
}

RuleSchema nm_schema(std::string id, std::vector<std::string> facts,
                     std::vector<std::string> hard_rules, std::vector<std::string> defaults,
                     std::string conclusion) {
  RuleSchema r;
  r.id = std::move(id);
  r.logic_class = LogicClass::NM;
  r.family = RuleFamily::NM;
  NmTemplate t;
  for (const auto& f : facts) t.fact_schemas.push_back(parse_formula(f));
  for (const auto& h : hard_rules) t.hard_rule_schemas.push_back(parse_formula(h));
  for (const auto& d : defaults) t.default_schemas.push_back(parse_default(d));
  r.premise_schemas = t.fact_schemas;
  r.premise_schemas.insert(r.premise_schemas.end(), t.hard_rule_schemas.begin(),
                           t.hard_rule_schemas.end());
  r.conclusion_schema = parse_formula(conclusion);
  r.nm = std::move(t);
  return r;
}

RuleCatalog build_catalog() {
  std::vector<RuleSchema> rs;

  // Propositional rules. Metavariables PHI/PSI/CHI/XI match arbitrary formulas.
  rs.push_back(schema("MP", LogicClass::PL, RuleFamily::PL, {"PHI -> PSI", "PHI"}, "PSI"));
  rs.push_back(schema("MT", LogicClass::PL, RuleFamily::PL, {"PHI -> PSI", "~PSI"}, "~PHI"));
  rs.push_back(schema("HS", LogicClass::PL, RuleFamily::PL, {"PHI -> PSI", "PSI -> CHI"},
                      "PHI -> CHI"));
  rs.push_back(schema("DS", LogicClass::PL, RuleFamily::PL, {"PHI | PSI", "~PHI"}, "PSI"));
  rs.push_back(schema("CD", LogicClass::PL, RuleFamily::PL,
                      {"PHI -> PSI", "CHI -> XI", "PHI | CHI"}, "PSI | XI"));
  rs.push_back(schema("DD", LogicClass::PL, RuleFamily::PL,
                      {"PHI -> PSI", "CHI -> XI", "~PSI | ~XI"}, "~PHI | ~CHI"));
  rs.push_back(schema("BD", LogicClass::PL, RuleFamily::PL,
                      {"PHI -> PSI", "CHI -> XI", "PHI | ~XI"}, "PSI | ~CHI"));
  rs.push_back(schema("CT", LogicClass::PL, RuleFamily::PL, {"PHI | PSI"}, "PSI | PHI", true));
  rs.push_back(schema("DMT", LogicClass::PL, RuleFamily::PL, {"~(PHI & PSI)"}, "~PHI | ~PSI",
                      true));
  rs.push_back(schema("CO", LogicClass::PL, RuleFamily::PL, {"PHI -> PSI", "PHI -> CHI"},
                      "PHI -> (PSI & CHI)"));
  rs.push_back(schema("IM", LogicClass::PL, RuleFamily::PL, {"PHI -> (PSI -> CHI)"},
                      "(PHI & PSI) -> CHI", true));
  rs.push_back(schema("MI", LogicClass::PL, RuleFamily::PL, {"PHI -> PSI"}, "~PHI | PSI", true));

  // First-order variants. P/Q/R/S are predicate metavariables, A/B constant
  // metavariables. MI has no first-order variant.
  rs.push_back(schema("MP_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. (P(x) -> Q(x))", "P(A)"}, "Q(A)"));
  rs.push_back(schema("MT_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. (P(x) -> Q(x))", "~Q(A)"}, "~P(A)"));
  rs.push_back(schema("HS_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. ((P(x) -> Q(x)) & (Q(x) -> R(x)))"}, "P(A) -> R(A)"));
  rs.push_back(schema("DS_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. (P(x) | Q(x))", "~P(A)"}, "Q(A)"));
  rs.push_back(schema("CD_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. ((P(x) -> Q(x)) & (R(x) -> S(x)))", "P(A) | R(A)"},
                      "Q(A) | S(A)"));
  rs.push_back(schema("DD_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. ((P(x) -> Q(x)) & (R(x) -> S(x)))", "~Q(A) | ~S(A)"},
                      "~P(A) | ~R(A)"));
  rs.push_back(schema("BD_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. ((P(x) -> Q(x)) & (R(x) -> S(x)))", "P(A) | ~S(A)"},
                      "Q(A) | ~R(A)"));
  rs.push_back(schema("CT_F", LogicClass::FOL, RuleFamily::FOL, {"forall x. (P(x) | Q(x))"},
                      "forall x. (Q(x) | P(x))", true));
  rs.push_back(schema("DMT_F", LogicClass::FOL, RuleFamily::FOL, {"~forall x. (P(x) & Q(x))"},
                      "exists x. (~P(x) | ~Q(x))", true));
  rs.push_back(schema("CO_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. ((P(x) -> Q(x)) & (P(x) -> R(x)))"},
                      "forall x. (P(x) -> (Q(x) & R(x)))"));
  rs.push_back(schema("IM_F", LogicClass::FOL, RuleFamily::FOL,
                      {"forall x. (P(x) -> (Q(x) -> R(x)))"},
                      "forall x. ((P(x) & Q(x)) -> R(x))", true));
  rs.push_back(schema("EG", LogicClass::FOL, RuleFamily::FOL, {"P(A)"}, "exists x. P(x)"));
  rs.push_back(schema("UI", LogicClass::FOL, RuleFamily::FOL, {"forall x. P(x)"}, "P(A)"));

  // Multi-variable first-order rules.
  rs.push_back(schema("MV1", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. forall y. ((P(x) & Q(x)) -> R(x, y))",
                       "exists u. exists v. (P(u) & ~R(u, v))"},
                      "exists y. ~Q(y)"));
  rs.push_back(schema("MV2", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. forall y. ((P(x) & Q(x)) -> ~S(x, y))",
                       "forall z. (R(z) -> P(z))", "R(A) & S(A, B)"},
                      "~Q(A)"));
  rs.push_back(schema("MV3", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. exists y. (P(x) -> Q(x, y))",
                       "forall u. forall v. ((Q(u, v) & R(u, v)) -> S(v))",
                       "exists z. (P(z) & forall w. R(z, w))"},
                      "exists w. S(w)"));
  rs.push_back(schema("MV4", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. forall y. forall z. (P(x, y, z) -> (Q(x, z) | R(y)))",
                       "exists u. exists v. exists w. (P(u, v, w) & ~Q(u, w))"},
                      "exists w. R(w)"));
  rs.push_back(schema("MV5", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. (P(x) -> exists y. R(y, x))", "P(A)"}, "exists z. R(z, A)"));
  rs.push_back(schema("MV6", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. forall y. (P(x, y) | Q(x, y))",
                       "exists u. exists v. ~Q(u, v)"},
                      "exists z. exists w. P(z, w)"));
  rs.push_back(schema("MV7", LogicClass::FOL, RuleFamily::MV,
                      {"forall x. forall y. (P(x, y) -> (Q(x) & R(y)))", "P(A, B)"},
                      "Q(A) & R(B)"));

  // Default-reasoning templates (Reiter semantics).
  rs.push_back(nm_schema("DRS", {"P(A)", "Q(A)"}, {},
                         {"P(x) : R(x) / R(x)", "Q(x) : ~R(x) / ~R(x)"}, "R(A)"));
  rs.push_back(nm_schema("DRI", {"P(A)", "S(A)"}, {}, {"P(x) : R(x) / R(x)"}, "R(A)"));
  rs.push_back(nm_schema("DRD", {"P(A)", "S(A)"}, {"forall x. (S(x) -> ~R(x))"},
                         {"P(x) : R(x) / R(x)"}, "~R(A)"));
  rs.push_back(nm_schema("DRO", {"P(A)", "T(B)"}, {}, {"P(x) : R(x) / R(x)"}, "R(A)"));
  rs.push_back(nm_schema("REI", {"P(A)"}, {}, {"P(x) : R(x) / R(x)"}, "R(A)"));
  rs.push_back(nm_schema("REII", {"P(A)"}, {},
                         {"P(x) : R(x) / R(x)", "P(x) : S(x) & ~R(x) / S(x)"}, "R(A)"));
  rs.push_back(nm_schema("REIII", {"P(A)"}, {},
                         {"P(x) : Q(x) / Q(x)", "Q(x) : R(x) / R(x)"}, "R(A)"));
  rs.push_back(nm_schema("RAP", {"P(A)", "Q(A)"}, {},
                         {"P(x) : R(x) / R(x)", "Q(x) : ~R(x) / ~R(x) @ 1"}, "R(A)"));

  return RuleCatalog(std::move(rs));
}

}  // namespace

const RuleCatalog& catalog() {
  static const RuleCatalog instance = build_catalog();
  return instance;
}

// --------------------------------------------------------------------------
// Rule application
// --------------------------------------------------------------------------

namespace {

// Term metavariables of the conclusion that no premise schema binds.
std::vector<std::string> free_conclusion_term_metas(const RuleDirection& dir) {
  std::set<std::string> premise_metas;
  auto collect_term_metas = [](const FormulaPtr& f, std::set<std::string>& out) {
    // walk atoms
    struct W {
      static void go(const FormulaPtr& f, std::set<std::string>& out) {
        switch (f->kind) {
          case Formula::Kind::Atom:
            for (const Term& t : f->args) {
              if (t.kind == TermKind::Meta) out.insert(t.name);
            }
            break;
          case Formula::Kind::MetaVar: break;
          case Formula::Kind::Not:
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists: go(f->lhs, out); break;
          default:
            go(f->lhs, out);
            go(f->rhs, out);
            break;
        }
      }
    };
    W::go(f, out);
  };
  for (const auto& p : dir.premises) collect_term_metas(p, premise_metas);
  std::set<std::string> conclusion_metas;
  collect_term_metas(dir.conclusion, conclusion_metas);
  std::vector<std::string> out;
  for (const auto& m : conclusion_metas) {
    if (!premise_metas.count(m)) out.push_back(m);
  }
  return out;
}

// Constants in order of first occurrence, scanning formulas left to right.
std::vector<std::string> constants_in_order(const std::vector<FormulaPtr>& fs) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  struct W {
    static void go(const FormulaPtr& f, std::vector<std::string>& out,
                   std::set<std::string>& seen) {
      switch (f->kind) {
        case Formula::Kind::Atom:
          for (const Term& t : f->args) {
            if (t.kind == TermKind::Constant && seen.insert(t.name).second) out.push_back(t.name);
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
  for (const auto& f : fs) W::go(f, out, seen);
  return out;
}

void emit_conclusions(const RuleDirection& dir, const Substitution& base,
                      const std::vector<FormulaPtr>& matched_premises,
                      std::vector<FormulaPtr>& out) {
  std::vector<std::string> free_metas = free_conclusion_term_metas(dir);
  std::vector<std::vector<Term>> choices;
  if (!free_metas.empty()) {
    std::vector<std::string> consts = constants_in_order(matched_premises);
    if (consts.empty()) consts.push_back(kArbitraryConstant);
    for (std::size_t i = 0; i < free_metas.size(); ++i) {
      std::vector<Term> terms;
      for (const auto& c : consts) terms.push_back(Term{TermKind::Constant, c});
      choices.push_back(std::move(terms));
    }
  }
  // Cross product over choices (in practice at most one free metavariable).
  std::vector<std::size_t> idx(free_metas.size(), 0);
  while (true) {
    Substitution s = base;
    for (std::size_t i = 0; i < free_metas.size(); ++i) s.terms[free_metas[i]] = choices[i][idx[i]];
    out.push_back(apply_substitution(dir.conclusion, s));
    std::size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++idx[k] < choices[k].size()) break;
      idx[k] = 0;
    }
    if (k == idx.size()) break;
  }
}

// Matches the direction's premise schemas against `premises` in the given
// index order; emits conclusions on success.
void try_order(const RuleDirection& dir, const std::vector<FormulaPtr>& premises,
               const std::vector<int>& order, std::vector<FormulaPtr>& out) {
  Substitution s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!match_schema_into(dir.premises[i], premises[order[i]], s)) return;
  }
  std::vector<FormulaPtr> matched;
  for (int i : order) matched.push_back(premises[i]);
  emit_conclusions(dir, s, matched, out);
}

void push_unique(std::vector<FormulaPtr>& out, const FormulaPtr& f) {
  for (const auto& g : out) {
    if (equal(g, f)) return;
  }
  out.push_back(f);
}

// NM: matches the template against the fact/hard premises (by permutation
// index order) and the default pool; emits the instantiated conclusion.
bool match_nm(const RuleSchema& rule, const std::vector<FormulaPtr>& premises,
              const std::vector<int>& order, const std::vector<DefaultRule>& defaults,
              std::vector<int>* default_indices_out, FormulaPtr* conclusion_out) {
  const NmTemplate& t = *rule.nm;
  Substitution s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!match_schema_into(rule.premise_schemas[i], premises[order[i]], s)) return false;
  }
  // Assign distinct pool defaults to the template's default schemas, in order.
  std::vector<int> chosen;
  std::vector<bool> used(defaults.size(), false);

  struct Rec {
    static bool go(const NmTemplate& t, std::size_t di, const std::vector<DefaultRule>& pool,
                   std::vector<bool>& used, Substitution& s, std::vector<int>& chosen) {
      if (di == t.default_schemas.size()) return true;
      const DefaultRule& ds = t.default_schemas[di];
      for (std::size_t k = 0; k < pool.size(); ++k) {
        if (used[k]) continue;
        const DefaultRule& cand = pool[k];
        if (cand.priority != ds.priority) continue;
        if (cand.justifications.size() != ds.justifications.size()) continue;
        Substitution saved = s;
        bool ok = match_schema_into(ds.prerequisite, cand.prerequisite, s) &&
                  match_schema_into(ds.consequent, cand.consequent, s);
        for (std::size_t j = 0; ok && j < ds.justifications.size(); ++j) {
          ok = match_schema_into(ds.justifications[j], cand.justifications[j], s);
        }
        if (ok) {
          used[k] = true;
          chosen.push_back(static_cast<int>(k));
          if (go(t, di + 1, pool, used, s, chosen)) return true;
          chosen.pop_back();
          used[k] = false;
        }
        s = saved;
      }
      return false;
    }
  };
  if (!Rec::go(t, 0, defaults, used, s, chosen)) return false;
  if (default_indices_out) *default_indices_out = chosen;
  if (conclusion_out) *conclusion_out = apply_substitution(rule.conclusion_schema, s);
  return true;
}

void ordered_tuples(int pool, int size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> tuple(size);
  std::vector<bool> used(pool, false);
  struct Rec {
    static void go(int pool, int size, int depth, std::vector<int>& tuple,
                   std::vector<bool>& used, const std::function<void(const std::vector<int>&)>& fn) {
      if (depth == size) {
        fn(tuple);
        return;
      }
      for (int i = 0; i < pool; ++i) {
        if (used[i]) continue;
        used[i] = true;
        tuple[depth] = i;
        go(pool, size, depth + 1, tuple, used, fn);
        used[i] = false;
      }
    }
  };
  Rec::go(pool, size, 0, tuple, used, fn);
}

}  // namespace

std::vector<FormulaPtr> apply_rule(const std::string& rule_id,
                                   const std::vector<FormulaPtr>& premises,
                                   const std::vector<DefaultRule>& defaults) {
  const RuleSchema* rule = catalog().get(rule_id);
  if (!rule) throw UnknownRuleError(rule_id);
  std::vector<FormulaPtr> out;
  if (rule->is_nm()) {
    if (premises.size() != rule->premise_schemas.size()) return out;
    ordered_tuples(static_cast<int>(premises.size()), static_cast<int>(premises.size()),
                   [&](const std::vector<int>& order) {
                     FormulaPtr conclusion;
                     if (match_nm(*rule, premises, order, defaults, nullptr, &conclusion)) {
                       push_unique(out, conclusion);
                     }
                   });
    return out;
  }
  for (const RuleDirection& dir : rule->directions()) {
    if (premises.size() != dir.premises.size()) continue;
    ordered_tuples(static_cast<int>(premises.size()), static_cast<int>(premises.size()),
                   [&](const std::vector<int>& order) {
                     std::vector<FormulaPtr> found;
                     try_order(dir, premises, order, found);
                     for (const auto& f : found) push_unique(out, f);
                   });
  }
  return out;
}

bool rule_matches_step(const RuleSchema& rule, const std::vector<FormulaPtr>& premises,
                       const std::vector<DefaultRule>& defaults, const FormulaPtr& conclusion) {
  if (premises.size() != rule.premise_schemas.size()) return false;
  bool ok = false;
  if (rule.is_nm()) {
    ordered_tuples(static_cast<int>(premises.size()), static_cast<int>(premises.size()),
                   [&](const std::vector<int>& order) {
                     if (ok) return;
                     FormulaPtr c;
                     if (match_nm(rule, premises, order, defaults, nullptr, &c) &&
                         equal(c, conclusion)) {
                       ok = true;
                     }
                   });
    return ok;
  }
  for (const RuleDirection& dir : rule.directions()) {
    if (dir.premises.size() != premises.size()) continue;
    ordered_tuples(static_cast<int>(premises.size()), static_cast<int>(premises.size()),
                   [&](const std::vector<int>& order) {
                     if (ok) return;
                     Substitution s;
                     for (std::size_t i = 0; i < order.size(); ++i) {
                       if (!match_schema_into(dir.premises[i], premises[order[i]], s)) return;
                     }
                     if (match_schema_into(dir.conclusion, conclusion, s)) ok = true;
                   });
    if (ok) return true;
  }
  return ok;
}

namespace {

// Slot-wise enumeration with early pruning: premise schemas are matched one
// by one, cutting dead branches. Successful tuples surface in the same
// lexicographic order plain tuple enumeration would produce.
void enumerate_slotwise(
    const std::vector<FormulaPtr>& schemas, const std::vector<FormulaPtr>& pool,
    const std::function<void(const std::vector<int>&, const Substitution&)>& emit) {
  if (schemas.size() > pool.size()) return;
  std::vector<int> chosen;
  std::vector<bool> used(pool.size(), false);
  Substitution s;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == schemas.size()) {
      emit(chosen, s);
      return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      Substitution saved = s;
      if (match_schema_into(schemas[k], pool[i], s)) {
        used[i] = true;
        chosen.push_back(static_cast<int>(i));
        rec(k + 1);
        chosen.pop_back();
        used[i] = false;
      }
      s = std::move(saved);
    }
  };
  rec(0);
}

bool match_nm_defaults(const NmTemplate& t, Substitution& s, const std::vector<DefaultRule>& pool,
                       std::vector<int>& chosen) {
  std::vector<bool> used(pool.size(), false);
  std::function<bool(std::size_t)> rec = [&](std::size_t di) -> bool {
    if (di == t.default_schemas.size()) return true;
    const DefaultRule& ds = t.default_schemas[di];
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (used[k]) continue;
      const DefaultRule& cand = pool[k];
      if (cand.priority != ds.priority) continue;
      if (cand.justifications.size() != ds.justifications.size()) continue;
      Substitution saved = s;
      bool ok = match_schema_into(ds.prerequisite, cand.prerequisite, s) &&
                match_schema_into(ds.consequent, cand.consequent, s);
      for (std::size_t j = 0; ok && j < ds.justifications.size(); ++j) {
        ok = match_schema_into(ds.justifications[j], cand.justifications[j], s);
      }
      if (ok) {
        used[k] = true;
        chosen.push_back(static_cast<int>(k));
        if (rec(di + 1)) return true;
        chosen.pop_back();
        used[k] = false;
      }
      s = std::move(saved);
    }
    return false;
  };
  return rec(0);
}

}  // namespace

std::vector<RuleHit> applicable_rules(const std::vector<FormulaPtr>& premises,
                                      const std::set<LogicClass>& classes,
                                      const std::vector<DefaultRule>& defaults) {
  std::vector<RuleHit> out;
  for (const RuleSchema& rule : catalog().rules()) {
    if (!classes.count(rule.logic_class)) continue;
    if (rule.is_nm()) {
      enumerate_slotwise(rule.premise_schemas, premises,
                         [&](const std::vector<int>& order, const Substitution& s) {
                           Substitution full = s;
                           std::vector<int> didx;
                           if (!match_nm_defaults(*rule.nm, full, defaults, didx)) return;
                           out.push_back(RuleHit{rule.id, order, didx,
                                                 apply_substitution(rule.conclusion_schema, full)});
                         });
      continue;
    }
    for (const RuleDirection& dir : rule.directions()) {
      enumerate_slotwise(dir.premises, premises,
                         [&](const std::vector<int>& order, const Substitution& s) {
                           std::vector<FormulaPtr> matched;
                           for (int i : order) matched.push_back(premises[i]);
                           std::vector<FormulaPtr> found;
                           emit_conclusions(dir, s, matched, found);
                           for (const auto& f : found) {
                             // Symmetric bidirectional rules (CT) yield the same
                             // hit from both directions; keep the first.
                             bool dup = false;
                             for (const auto& h : out) {
                               if (h.rule_id == rule.id && h.premise_indices == order &&
                                   equal(h.conclusion, f)) {
                                 dup = true;
                                 break;
                               }
                             }
                             if (!dup) out.push_back(RuleHit{rule.id, order, {}, f});
                           }
                         });
    }
  }
  return out;
}

}  // namespace symlog
