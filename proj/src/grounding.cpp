#include "symlog/grounding.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "symlog/rng.hpp"

namespace symlog {

std::string to_string(QuestionType t) {
  return t == QuestionType::TruthEval ? "truth_eval" : "multiple_choice";
}

QuestionType question_type_from_string(const std::string& s) {
  if (s == "truth_eval") return QuestionType::TruthEval;
  if (s == "multiple_choice") return QuestionType::MultipleChoice;
  throw DataError("unknown question type: " + s);
}

// ---------------------------------------------------------------------------
// Lexicon loading
// ---------------------------------------------------------------------------

namespace {

int max_slot(const std::string& tmpl) {
  int best = -1;
  for (std::size_t i = 0; i + 2 < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && std::isdigit(static_cast<unsigned char>(tmpl[i + 1])) &&
        tmpl[i + 2] == '}') {
      best = std::max(best, tmpl[i + 1] - '0');
    }
  }
  return best;
}

bool has_slot(const std::string& tmpl, int k) {
  std::string needle = "{" + std::to_string(k) + "}";
  return tmpl.find(needle) != std::string::npos;
}

std::string fill_template(const std::string& tmpl, const std::vector<std::string>& args) {
  std::string out = tmpl;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string needle = "{" + std::to_string(i) + "}";
    std::size_t pos;
    while ((pos = out.find(needle)) != std::string::npos) {
      out.replace(pos, needle.size(), args[i]);
    }
  }
  return out;
}

}  // namespace

Lexicon lexicon_from_json(const json& j, const std::string& where) {
  Lexicon lex;
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw LexiconError(where + ": missing field '" + std::string(key) + "'");
    return j.at(key);
  };
  lex.domain = need("domain").get<std::string>();
  for (const auto& p : need("propositions")) lex.propositions.push_back(p.get<std::string>());
  for (const auto& [arity_str, templates] : need("predicates").items()) {
    int arity = std::stoi(arity_str);
    if (arity < 1 || arity > 3) {
      throw LexiconError(where + ": predicates." + arity_str + ": arity must be 1..3");
    }
    std::vector<std::string> list;
    int pos = 0;
    for (const auto& t : templates) {
      std::string tmpl = t.get<std::string>();
      if (tmpl.empty()) {
        throw LexiconError(where + ": predicates." + arity_str + "[" + std::to_string(pos) +
                           "]: empty template");
      }
      for (int k = 0; k < arity; ++k) {
        if (!has_slot(tmpl, k)) {
          throw LexiconError(where + ": predicates." + arity_str + "[" + std::to_string(pos) +
                             "]: template missing slot {" + std::to_string(k) + "}");
        }
      }
      if (max_slot(tmpl) >= arity) {
        throw LexiconError(where + ": predicates." + arity_str + "[" + std::to_string(pos) +
                           "]: slot index exceeds arity");
      }
      list.push_back(tmpl);
      ++pos;
    }
    lex.predicates[arity] = std::move(list);
  }
  for (const auto& c : need("constants")) lex.constants.push_back(c.get<std::string>());
  for (const auto& v : need("visual_scenes")) lex.visual_scenes.push_back(v.get<std::string>());
  for (const auto& b : need("heuristic_bridges")) {
    lex.bridges.push_back(BridgeTemplate{b.at("conclusion").get<std::string>()});
  }
  if (lex.propositions.empty() || lex.constants.empty() || lex.visual_scenes.empty() ||
      lex.bridges.empty() || !lex.predicates.count(1) || !lex.predicates.count(2) ||
      !lex.predicates.count(3)) {
    throw LexiconError(where + ": lexicon must cover all symbol roles (propositions, predicates "
                       "of arity 1..3, constants, visual_scenes, heuristic_bridges)");
  }
  for (const auto& p : lex.propositions) {
    if (p.empty()) throw LexiconError(where + ": empty proposition phrase");
  }
  for (const auto& c : lex.constants) {
    if (c.empty()) throw LexiconError(where + ": empty constant phrase");
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError("cannot open lexicon file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw LexiconError(path + ": invalid JSON: " + e.what());
  }
  return lexicon_from_json(j, path);
}

// ---------------------------------------------------------------------------
// Natural-language rendering
// ---------------------------------------------------------------------------

namespace {

std::string phrase_for(const std::map<std::string, std::string>& phrases, const std::string& sym) {
  auto it = phrases.find(sym);
  if (it == phrases.end()) throw GroundingError("no phrase assigned to symbol " + sym);
  return it->second;
}

std::string term_phrase(const Term& t, const std::map<std::string, std::string>& phrases) {
  if (t.kind == TermKind::Variable) return t.name;
  return phrase_for(phrases, t.name);
}

}  // namespace

std::string render_formula_nl(const FormulaPtr& f,
                              const std::map<std::string, std::string>& phrases) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (f->args.empty()) return phrase_for(phrases, f->label);
      std::vector<std::string> args;
      for (const Term& t : f->args) args.push_back(term_phrase(t, phrases));
      return fill_template(phrase_for(phrases, f->label), args);
    }
    case Formula::Kind::MetaVar:
      throw GroundingError("cannot render schematic formula");
    case Formula::Kind::Not:
      return "it is not the case that " + render_formula_nl(f->lhs, phrases);
    case Formula::Kind::And:
      return render_formula_nl(f->lhs, phrases) + " and " + render_formula_nl(f->rhs, phrases);
    case Formula::Kind::Or:
      return "either " + render_formula_nl(f->lhs, phrases) + " or " +
             render_formula_nl(f->rhs, phrases);
    case Formula::Kind::Implies:
      return "if " + render_formula_nl(f->lhs, phrases) + ", then " +
             render_formula_nl(f->rhs, phrases);
    case Formula::Kind::Iff:
      return render_formula_nl(f->lhs, phrases) + " exactly when " +
             render_formula_nl(f->rhs, phrases);
    case Formula::Kind::ForAll:
      return "for every " + f->label + ", " + render_formula_nl(f->lhs, phrases);
    case Formula::Kind::Exists:
      return "there is some " + f->label + " such that " + render_formula_nl(f->lhs, phrases);
  }
  return "";
}

std::string render_default_nl(const DefaultRule& d,
                              const std::map<std::string, std::string>& phrases) {
  std::string out;
  if (d.priority > 0) out += "as a weaker rule, ";
  out += "typically, if " + render_formula_nl(d.prerequisite, phrases) + ", then " +
         render_formula_nl(d.consequent, phrases);
  bool normal = d.justifications.size() == 1 && equal(d.justifications[0], d.consequent);
  if (!normal) {
    out += ", assuming ";
    for (std::size_t i = 0; i < d.justifications.size(); ++i) {
      if (i) out += " and ";
      out += render_formula_nl(d.justifications[i], phrases);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbol collection and phrase assignment
// ---------------------------------------------------------------------------

namespace {

struct SymbolSet {
  std::vector<std::string> propositions;            // 0-ary atoms, first-use order
  std::vector<std::pair<std::string, int>> preds;   // name, arity
  std::vector<std::string> constants;
  std::vector<std::string> heuristic;               // h-prefixed symbols (any arity)
};

bool is_heuristic_symbol(const std::string& name) {
  return name.size() >= 2 && name[0] == 'h' &&
         std::isdigit(static_cast<unsigned char>(name[1]));
}

void collect_symbols_formula(const FormulaPtr& f, SymbolSet& out) {
  auto add_str = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (is_heuristic_symbol(f->label)) {
        add_str(out.heuristic, f->label);
      } else if (f->args.empty()) {
        add_str(out.propositions, f->label);
      } else {
        bool present = false;
        for (const auto& [n, a] : out.preds) {
          if (n == f->label) {
            present = true;
            (void)a;
            break;
          }
        }
        if (!present) out.preds.emplace_back(f->label, static_cast<int>(f->args.size()));
      }
      for (const Term& t : f->args) {
        if (t.kind == TermKind::Constant) add_str(out.constants, t.name);
      }
      break;
    }
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: collect_symbols_formula(f->lhs, out); break;
    default:
      collect_symbols_formula(f->lhs, out);
      collect_symbols_formula(f->rhs, out);
      break;
  }
}

SymbolSet collect_symbols(const ReasoningChain& chain) {
  SymbolSet out;
  for (const auto& r : chain.root_premises) collect_symbols_formula(r, out);
  for (const auto& d : chain.root_defaults) {
    collect_symbols_formula(d.prerequisite, out);
    for (const auto& j : d.justifications) collect_symbols_formula(j, out);
    collect_symbols_formula(d.consequent, out);
  }
  for (const auto& s : chain.steps) collect_symbols_formula(s.conclusion, out);
  return out;
}

std::string sentence_case(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

bool is_ground_literal(const FormulaPtr& f) {
  const FormulaPtr& body = f->kind == Formula::Kind::Not ? f->lhs : f;
  return body->kind == Formula::Kind::Atom && free_variables(body).empty();
}

// Premise formulas for gold-entailment queries: root premises (optionally
// without the image-borne ones) plus heuristic conclusions whose supporting
// premises are still derivable.
struct GoldSet {
  std::vector<FormulaPtr> premises;
  std::vector<DefaultRule> defaults;
};

GoldSet gold_set(const GroundedInstance& instance, bool include_image,
                 const OracleLimits& limits) {
  GoldSet g;
  std::set<int> image(instance.image_roots.begin(), instance.image_roots.end());
  for (std::size_t i = 0; i < instance.chain.root_premises.size(); ++i) {
    if (!include_image && image.count(static_cast<int>(i))) continue;
    g.premises.push_back(instance.chain.root_premises[i]);
  }
  g.defaults = instance.chain.root_defaults;

  // Grant heuristic conclusions whose premises survive, to a fixpoint.
  std::vector<const ChainStep*> pending;
  for (const auto& s : instance.chain.steps) {
    if (s.step_type == StepType::Heuristic) pending.push_back(&s);
  }
  bool changed = !pending.empty();
  std::set<int> granted;
  while (changed) {
    changed = false;
    for (const ChainStep* s : pending) {
      if (granted.count(s->index)) continue;
      bool ok = true;
      for (const StepPremise& p : s->premises) {
        if (!entails(g.premises, g.defaults, p.formula, limits).entailed()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        granted.insert(s->index);
        g.premises.push_back(s->conclusion);
        changed = true;
      }
    }
  }
  return g;
}

}  // namespace

EntailmentVerdict instance_entails(const GroundedInstance& instance, const FormulaPtr& goal,
                                   bool include_image, const OracleLimits& limits) {
  GoldSet g = gold_set(instance, include_image, limits);
  return entails(g.premises, g.defaults, goal, limits);
}

// ---------------------------------------------------------------------------
// ground_chain
// ---------------------------------------------------------------------------

GroundedInstance ground_chain(const ReasoningChain& chain, const Lexicon& lexicon,
                              std::uint64_t seed, const GroundingOptions& opts) {
  GroundedInstance g;
  g.domain = lexicon.domain;
  g.logic_type = chain.logic_type;
  g.depth = chain.depth();
  g.chain = chain;

  Rng rng(mix_seed(seed, "ground"));
  SymbolSet symbols = collect_symbols(chain);

  // Bijective phrase assignment: seeded shuffle per pool, drawn without
  // replacement so no two symbols of an instance share a phrase.
  auto assign = [&](const std::vector<std::string>& pool, const std::vector<std::string>& syms,
                    const std::string& role) {
    if (syms.size() > pool.size()) {
      throw GroundingError("insufficient distinct phrases for symbol count: role '" + role +
                           "' needs " + std::to_string(syms.size()) + ", lexicon '" +
                           lexicon.domain + "' has " + std::to_string(pool.size()));
    }
    std::vector<std::string> shuffled = pool;
    rng.shuffle(shuffled);
    for (std::size_t i = 0; i < syms.size(); ++i) g.phrases[syms[i]] = shuffled[i];
  };

  assign(lexicon.propositions, symbols.propositions, "proposition");
  assign(lexicon.constants, symbols.constants, "constant");
  for (int arity = 1; arity <= 3; ++arity) {
    std::vector<std::string> syms;
    for (const auto& [name, a] : symbols.preds) {
      if (a == arity) syms.push_back(name);
    }
    auto it = lexicon.predicates.find(arity);
    assign(it == lexicon.predicates.end() ? std::vector<std::string>{} : it->second, syms,
           "predicate/" + std::to_string(arity));
  }
  {
    std::vector<std::string> pool;
    for (const auto& b : lexicon.bridges) pool.push_back(b.conclusion);
    assign(pool, symbols.heuristic, "heuristic_bridge");
  }

  // Image-borne premise selection: the designated root premise moves out of
  // the context, and the remaining context must leave the final conclusion
  // undetermined both ways.
  FormulaPtr conclusion = chain.final_conclusion();
  // Prefer ground literals as image content, then any ground quantifier-free
  // premise, and only then rule-like formulas.
  std::vector<int> candidates;
  for (std::size_t i = 0; i < chain.root_premises.size(); ++i) {
    if (is_ground_literal(chain.root_premises[i])) candidates.push_back(static_cast<int>(i));
  }
  if (candidates.empty()) {
    for (std::size_t i = 0; i < chain.root_premises.size(); ++i) {
      const FormulaPtr& r = chain.root_premises[i];
      if (is_quantifier_free(r) && is_closed(r)) candidates.push_back(static_cast<int>(i));
    }
  }
  if (candidates.empty()) {
    for (std::size_t i = 0; i < chain.root_premises.size(); ++i) {
      candidates.push_back(static_cast<int>(i));
    }
  }
  rng.shuffle(candidates);
  bool placed = false;
  for (int cand : candidates) {
    g.image_roots = {cand};
    EntailmentVerdict pos = instance_entails(g, conclusion, /*include_image=*/false, opts.oracle);
    if (!pos.not_entailed()) continue;
    EntailmentVerdict neg =
        instance_entails(g, mk_not(conclusion), /*include_image=*/false, opts.oracle);
    if (!neg.not_entailed()) continue;
    placed = true;
    break;
  }
  if (!placed) {
    throw GroundingError("no root premise can carry the image for this chain");
  }
  {
    std::set<std::string> image_renders;
    for (int i : g.image_roots) image_renders.insert(render_formula(chain.root_premises[i]));
    for (auto& step : g.chain.steps) {
      for (auto& p : step.premises) {
        if (p.provenance == Provenance::Context &&
            image_renders.count(render_formula(p.formula))) {
          p.provenance = Provenance::Image;
        }
      }
    }
  }

  // Per-step renderings: formula premises first, then the step's defaults,
  // mirroring the serialized premises_formal order.
  for (const auto& step : g.chain.steps) {
    StepNl nl;
    for (const auto& p : step.premises) nl.premises_nl.push_back(render_formula_nl(p.formula, g.phrases));
    for (const auto& d : step.defaults) nl.premises_nl.push_back(render_default_nl(d, g.phrases));
    nl.conclusion_nl = render_formula_nl(step.conclusion, g.phrases);
    g.step_nl.push_back(std::move(nl));
  }

  // Visual details: one scene-setting line plus the image-borne premises.
  g.visual_details.push_back(
      lexicon.visual_scenes[rng.below(lexicon.visual_scenes.size())]);
  for (int i : g.image_roots) {
    g.visual_details.push_back(render_formula_nl(chain.root_premises[i], g.phrases));
  }

  // Context: root premises minus image-borne ones, then the default rules.
  {
    std::set<int> image(g.image_roots.begin(), g.image_roots.end());
    std::ostringstream ctx;
    bool first = true;
    for (std::size_t i = 0; i < chain.root_premises.size(); ++i) {
      if (image.count(static_cast<int>(i))) continue;
      if (!first) ctx << " ";
      ctx << sentence_case(render_formula_nl(chain.root_premises[i], g.phrases)) << ".";
      first = false;
    }
    for (const auto& d : chain.root_defaults) {
      if (!first) ctx << " ";
      ctx << sentence_case(render_default_nl(d, g.phrases)) << ".";
      first = false;
    }
    g.context = ctx.str();
  }
  if (static_cast<int>(g.context.size()) < opts.context_min ||
      static_cast<int>(g.context.size()) > opts.context_max) {
    throw GroundingError("context length " + std::to_string(g.context.size()) +
                         " outside configured bounds [" + std::to_string(opts.context_min) + ", " +
                         std::to_string(opts.context_max) + "]");
  }

  {
    std::ostringstream ref;
    ref << "img://" << lexicon.domain << "/" << std::hex << mix_seed(seed, "image-ref");
    g.image_ref = ref.str();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Question generation
// ---------------------------------------------------------------------------

namespace {

// A fresh statement symbol grounded with an unused phrase; used for Unknown
// targets and unrelated distractors.
FormulaPtr fresh_statement(GroundedInstance& g, const Lexicon& lexicon, Rng& rng,
                           int& statement_counter) {
  std::set<std::string> used;
  for (const auto& [sym, phrase] : g.phrases) {
    (void)sym;
    used.insert(phrase);
  }
  std::string name = "s" + std::to_string(statement_counter++);

  bool ground_style = false;
  SymbolSet symbols = collect_symbols(g.chain);
  ground_style = !symbols.preds.empty() || !symbols.constants.empty();

  if (!ground_style) {
    std::vector<std::string> pool = lexicon.propositions;
    rng.shuffle(pool);
    for (const auto& phrase : pool) {
      if (!used.count(phrase)) {
        g.phrases[name] = phrase;
        return mk_atom(name);
      }
    }
    throw GroundingError("lexicon exhausted while drawing a fresh proposition phrase");
  }
  std::vector<std::string> pool = lexicon.predicates.at(1);
  rng.shuffle(pool);
  std::string constant =
      symbols.constants.empty() ? std::string("c1") : symbols.constants.front();
  if (!g.phrases.count(constant)) g.phrases[constant] = lexicon.constants.front();
  for (const auto& tmpl : pool) {
    if (!used.count(tmpl)) {
      g.phrases[name] = tmpl;
      return mk_atom(name, {Term{TermKind::Constant, constant}});
    }
  }
  throw GroundingError("lexicon exhausted while drawing a fresh predicate phrase");
}

// Swaps one symbol of the conclusion for another instance symbol of the same
// role, producing a plausible-looking but wrong statement.
std::vector<FormulaPtr> misapplication_candidates(const GroundedInstance& g, Rng& rng) {
  FormulaPtr conclusion = g.chain.final_conclusion();
  SymbolSet symbols = collect_symbols(g.chain);
  std::vector<FormulaPtr> out;

  // Swap antecedent/consequent of an implication-shaped conclusion.
  if (conclusion->kind == Formula::Kind::Implies) {
    out.push_back(mk_implies(conclusion->rhs, conclusion->lhs));
  }

  auto rename_symbol = [](const FormulaPtr& f, const std::string& from,
                          const std::string& to) -> FormulaPtr {
    Substitution s;
    // Predicate renaming works through the predicates map only for
    // metavariables, so do a manual walk.
    struct W {
      static FormulaPtr go(const FormulaPtr& f, const std::string& from, const std::string& to) {
        switch (f->kind) {
          case Formula::Kind::Atom: {
            if (f->label == from) return mk_atom(to, f->args);
            return f;
          }
          case Formula::Kind::MetaVar: return f;
          case Formula::Kind::Not: return mk_not(go(f->lhs, from, to));
          case Formula::Kind::ForAll: return mk_forall(f->label, go(f->lhs, from, to));
          case Formula::Kind::Exists: return mk_exists(f->label, go(f->lhs, from, to));
          case Formula::Kind::And: return mk_and(go(f->lhs, from, to), go(f->rhs, from, to));
          case Formula::Kind::Or: return mk_or(go(f->lhs, from, to), go(f->rhs, from, to));
          case Formula::Kind::Implies:
            return mk_implies(go(f->lhs, from, to), go(f->rhs, from, to));
          default: return mk_iff(go(f->lhs, from, to), go(f->rhs, from, to));
        }
      }
    };
    (void)s;
    return W::go(f, from, to);
  };

  // Replace one proposition/predicate occurring in the conclusion with a
  // different instance symbol of the same role and arity.
  SymbolSet concl_syms;
  collect_symbols_formula(conclusion, concl_syms);
  for (const auto& from : concl_syms.propositions) {
    std::vector<std::string> others;
    for (const auto& p : symbols.propositions) {
      if (p != from) others.push_back(p);
    }
    rng.shuffle(others);
    for (const auto& to : others) out.push_back(rename_symbol(conclusion, from, to));
  }
  for (const auto& [from, arity] : concl_syms.preds) {
    std::vector<std::string> others;
    for (const auto& [p, a] : symbols.preds) {
      if (p != from && a == arity) others.push_back(p);
    }
    rng.shuffle(others);
    for (const auto& to : others) out.push_back(rename_symbol(conclusion, from, to));
  }
  return out;
}

}  // namespace

void generate_question(GroundedInstance& g, const Lexicon& lexicon, QuestionType type,
                       std::uint64_t seed, const QuestionOptions& opts) {
  Rng rng(mix_seed(seed, "question"));
  Question q;
  q.type = type;
  FormulaPtr conclusion = g.chain.final_conclusion();
  const std::string conclusion_nl = g.step_nl.back().conclusion_nl;
  int statement_counter = 1;

  auto certified_not_entailed = [&](const FormulaPtr& f) {
    return instance_entails(g, f, /*include_image=*/true, opts.oracle).not_entailed();
  };

  if (type == QuestionType::TruthEval) {
    std::string label = opts.forced_label;
    if (label.empty()) {
      double r = rng.unit();
      label = r < opts.true_ratio               ? "True"
              : r < opts.true_ratio + opts.false_ratio ? "False"
                                                       : "Unknown";
    }
    std::string statement_nl;
    if (label == "True") {
      q.statement = conclusion;
      statement_nl = conclusion_nl;
    } else if (label == "False") {
      q.statement = mk_not(conclusion);
      statement_nl = "it is not the case that " + conclusion_nl;
    } else {
      FormulaPtr fresh;
      bool ok = false;
      for (int attempt = 0; attempt < opts.max_retries && !ok; ++attempt) {
        fresh = fresh_statement(g, lexicon, rng, statement_counter);
        ok = certified_not_entailed(fresh) && certified_not_entailed(mk_not(fresh));
      }
      if (!ok) throw GroundingError("could not certify an Unknown statement");
      q.statement = fresh;
      statement_nl = render_formula_nl(fresh, g.phrases);
    }
    q.gold_label = label;
    q.text = "Given the image and the context, decide whether the following statement is true, "
             "false, or unknown: " +
             statement_nl + ".";
    g.question = q;
    return;
  }

  // Multiple choice: correct option plus three certified distractors.
  struct Option {
    FormulaPtr formula;
    std::string nl;
  };
  std::vector<Option> options;
  options.push_back({conclusion, conclusion_nl});

  // (a) negation of a derived intermediate step.
  {
    bool placed = false;
    std::vector<int> steps;
    for (int i = 0; i + 1 < static_cast<int>(g.chain.steps.size()); ++i) {
      if (g.chain.steps[static_cast<std::size_t>(i)].step_type == StepType::Symbolic) {
        steps.push_back(i);
      }
    }
    rng.shuffle(steps);
    for (int i : steps) {
      FormulaPtr cand = mk_not(g.chain.steps[static_cast<std::size_t>(i)].conclusion);
      if (equal(cand, conclusion)) continue;
      if (certified_not_entailed(cand)) {
        options.push_back(
            {cand, "it is not the case that " + g.step_nl[static_cast<std::size_t>(i)].conclusion_nl});
        placed = true;
        break;
      }
    }
    if (!placed) {
      FormulaPtr fresh = fresh_statement(g, lexicon, rng, statement_counter);
      if (!certified_not_entailed(fresh)) throw GroundingError("distractor certification failed");
      options.push_back({fresh, render_formula_nl(fresh, g.phrases)});
    }
  }

  // (b) rule misapplication on the final conclusion.
  {
    bool placed = false;
    int tried = 0;
    for (const FormulaPtr& cand : misapplication_candidates(g, rng)) {
      if (++tried > opts.max_retries) break;
      if (equal(cand, conclusion)) continue;
      bool dup = false;
      for (const auto& o : options) dup = dup || equal(o.formula, cand);
      if (dup) continue;
      if (certified_not_entailed(cand)) {
        options.push_back({cand, render_formula_nl(cand, g.phrases)});
        placed = true;
        break;
      }
    }
    if (!placed) {
      // No certifiable misapplication (tiny chains): fall back to a fresh
      // unrelated statement.
      FormulaPtr fresh = fresh_statement(g, lexicon, rng, statement_counter);
      if (!certified_not_entailed(fresh)) throw GroundingError("distractor certification failed");
      options.push_back({fresh, render_formula_nl(fresh, g.phrases)});
    }
  }

  // (c) unrelated lexicon statement.
  {
    FormulaPtr fresh;
    bool ok = false;
    for (int attempt = 0; attempt < opts.max_retries && !ok; ++attempt) {
      fresh = fresh_statement(g, lexicon, rng, statement_counter);
      bool dup = false;
      for (const auto& o : options) dup = dup || equal(o.formula, fresh);
      ok = !dup && certified_not_entailed(fresh);
    }
    if (!ok) throw GroundingError("distractor certification failed");
    options.push_back({fresh, render_formula_nl(fresh, g.phrases)});
  }

  std::vector<int> order = {0, 1, 2, 3};
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Option& o = options[static_cast<std::size_t>(order[i])];
    q.options.push_back(sentence_case(o.nl) + ".");
    q.options_formal.push_back(o.formula);
    if (order[i] == 0) q.gold_index = static_cast<int>(i);
  }
  q.text = "Given the image and the context, which of the following statements must be true?";
  g.question = q;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json instance_to_json(const GroundedInstance& g) {
  json j;
  j["id"] = g.id;
  j["domain"] = g.domain;
  j["logic_type"] = to_string(g.logic_type);
  j["depth"] = g.depth;
  j["image_ref"] = g.image_ref;
  j["visual_details"] = g.visual_details;
  j["context"] = g.context;
  j["question_type"] = to_string(g.question.type);
  j["question"] = g.question.text;
  j["question_formal"] =
      g.question.statement ? render_formula(g.question.statement) : std::string();
  j["options"] = g.question.options;
  json options_formal = json::array();
  for (const auto& f : g.question.options_formal) options_formal.push_back(render_formula(f));
  j["options_formal"] = options_formal;
  if (g.question.type == QuestionType::TruthEval) {
    j["answer"] = g.question.gold_label;
  } else {
    j["answer"] = g.question.gold_index;
  }
  json chain = json::array();
  for (std::size_t i = 0; i < g.chain.steps.size(); ++i) {
    const ChainStep& s = g.chain.steps[i];
    json step;
    step["index"] = s.index;
    step["rule_id"] = s.rule_id;
    step["step_type"] = s.step_type == StepType::Heuristic ? "heuristic" : "symbolic";
    step["premises_nl"] = i < g.step_nl.size() ? g.step_nl[i].premises_nl
                                               : std::vector<std::string>{};
    json premises_formal = json::array();
    for (const auto& p : s.premises) premises_formal.push_back(render_formula(p.formula));
    for (const auto& d : s.defaults) premises_formal.push_back(render_default(d));
    step["premises_formal"] = premises_formal;
    step["conclusion_nl"] = i < g.step_nl.size() ? g.step_nl[i].conclusion_nl : std::string();
    step["conclusion_formal"] = render_formula(s.conclusion);
    chain.push_back(step);
  }
  j["chain"] = chain;
  return j;
}

GroundedInstance instance_from_json(const json& j) {
  GroundedInstance g;
  try {
    g.id = j.at("id").get<std::string>();
    g.domain = j.at("domain").get<std::string>();
    g.logic_type = logic_class_from_string(j.at("logic_type").get<std::string>());
    g.depth = j.at("depth").get<int>();
    g.image_ref = j.at("image_ref").get<std::string>();
    for (const auto& v : j.at("visual_details")) g.visual_details.push_back(v.get<std::string>());
    g.context = j.at("context").get<std::string>();

    std::map<std::string, int> concluded_by;
    std::map<std::string, int> root_index;
    std::set<std::string> visual(g.visual_details.begin(), g.visual_details.end());

    for (const auto& js : j.at("chain")) {
      ChainStep step;
      StepNl nl;
      step.index = js.at("index").get<int>();
      step.rule_id = js.at("rule_id").get<std::string>();
      step.step_type = js.at("step_type").get<std::string>() == "heuristic"
                           ? StepType::Heuristic
                           : StepType::Symbolic;
      const auto& premises_formal = js.at("premises_formal");
      const auto& premises_nl = js.at("premises_nl");
      for (std::size_t i = 0; i < premises_formal.size(); ++i) {
        std::string text = premises_formal[i].get<std::string>();
        std::string text_nl =
            i < premises_nl.size() ? premises_nl[i].get<std::string>() : std::string();
        if (looks_like_default(text)) {
          DefaultRule d = parse_default(text);
          step.defaults.push_back(d);
          bool present = false;
          for (const auto& rd : g.chain.root_defaults) present = present || equal(rd, d);
          if (!present) g.chain.root_defaults.push_back(d);
          nl.premises_nl.push_back(text_nl);
          continue;
        }
        StepPremise p;
        p.formula = parse_formula(text);
        std::string key = render_formula(p.formula);
        auto it = concluded_by.find(key);
        if (it != concluded_by.end()) {
          p.provenance = Provenance::Derived;
          p.derived_from = it->second;
        } else {
          p.provenance = visual.count(text_nl) ? Provenance::Image : Provenance::Context;
          if (!root_index.count(key)) {
            root_index[key] = static_cast<int>(g.chain.root_premises.size());
            g.chain.root_premises.push_back(p.formula);
            if (p.provenance == Provenance::Image) {
              g.image_roots.push_back(root_index[key]);
            }
          }
        }
        step.premises.push_back(p);
        nl.premises_nl.push_back(text_nl);
      }
      step.conclusion = parse_formula(js.at("conclusion_formal").get<std::string>());
      nl.conclusion_nl = js.at("conclusion_nl").get<std::string>();
      concluded_by.emplace(render_formula(step.conclusion), step.index);
      g.chain.steps.push_back(std::move(step));
      g.step_nl.push_back(std::move(nl));
    }
    g.chain.logic_type = g.logic_type;

    Question q;
    q.type = question_type_from_string(j.at("question_type").get<std::string>());
    q.text = j.at("question").get<std::string>();
    std::string qf = j.value("question_formal", std::string());
    if (!qf.empty()) q.statement = parse_formula(qf);
    for (const auto& o : j.at("options")) q.options.push_back(o.get<std::string>());
    if (j.contains("options_formal")) {
      for (const auto& o : j.at("options_formal")) {
        q.options_formal.push_back(parse_formula(o.get<std::string>()));
      }
    }
    if (q.type == QuestionType::TruthEval) {
      q.gold_label = j.at("answer").get<std::string>();
    } else {
      q.gold_index = j.at("answer").get<int>();
    }
    g.question = std::move(q);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed instance record: ") + e.what());
  }
  return g;
}

}  // namespace symlog
