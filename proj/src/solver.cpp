#include "symlog/solver.hpp"

#include <algorithm>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace symlog {

void SolverState::add_root(const FormulaPtr& f) {
  std::string key = render_formula(f);
  if (known_keys.count(key)) return;
  known.push_back(f);
  known_keys.insert(key);
  root_count = static_cast<int>(known.size());
}

bool SolverState::knows(const FormulaPtr& f) const {
  return known_keys.count(render_formula(f)) > 0;
}

// --------------------------------------------------------------------------
// Subprocess heuristic provider
// --------------------------------------------------------------------------

SubprocessHeuristicProvider::SubprocessHeuristicProvider(const std::string& command,
                                                         int timeout_ms)
    : timeout_ms_(timeout_ms) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) throw Error("provider: pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw Error("provider: fork() failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  pid_ = pid;
}

SubprocessHeuristicProvider::~SubprocessHeuristicProvider() {
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
  if (pid_ > 0) {
    kill(static_cast<pid_t>(pid_), SIGTERM);
    int status = 0;
    waitpid(static_cast<pid_t>(pid_), &status, 0);
  }
}

std::optional<HeuristicProvider::Suggestion> SubprocessHeuristicProvider::propose(
    const std::vector<FormulaPtr>& known, const std::vector<std::string>& known_nl,
    const FormulaPtr& goal) {
  (void)known_nl;
  if (in_fd_ < 0 || out_fd_ < 0) throw Error("provider transport failure: not running");
  json req;
  req["goal"] = goal ? render_formula(goal) : "";
  json ks = json::array();
  for (const auto& f : known) ks.push_back(render_formula(f));
  req["known"] = ks;
  std::string line = req.dump() + "\n";
  const char* data = line.c_str();
  std::size_t remaining = line.size();
  while (remaining > 0) {
    ssize_t n = write(in_fd_, data, remaining);
    if (n <= 0) throw Error("provider transport failure: write failed");
    data += n;
    remaining -= static_cast<std::size_t>(n);
  }
  while (true) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      json j;
      try {
        j = json::parse(reply);
      } catch (const std::exception&) {
        throw Error("provider transport failure: bad reply");
      }
      if (!j.contains("formula")) return std::nullopt;
      Suggestion s;
      s.formula = parse_formula(j.at("formula").get<std::string>());
      s.text = j.value("text", std::string());
      return s;
    }
    struct pollfd pfd{out_fd_, POLLIN, 0};
    int r = poll(&pfd, 1, timeout_ms_);
    if (r <= 0) throw Error("provider transport failure: timeout");
    char chunk[512];
    ssize_t n = read(out_fd_, chunk, sizeof(chunk));
    if (n <= 0) throw Error("provider transport failure: closed");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// --------------------------------------------------------------------------
// Loop operations
// --------------------------------------------------------------------------

namespace solver {

namespace {

// ---------------------------------------------------------------------------
// Backward planner. Generator chains thread linearly: every step has at most
// one premise that is not an external premise. Inverting that shape gives a
// complete, deterministic derivation search: match a rule's conclusion schema
// against the subgoal, bind the remaining premise slots against the known
// pool, and recurse into at most one unresolved slot.
// ---------------------------------------------------------------------------

struct PlanStep {
  std::string rule_id;
  std::vector<FormulaPtr> premises;
  std::vector<DefaultRule> defaults;
  FormulaPtr conclusion;
};

int formula_size(const FormulaPtr& f) {
  if (!f) return 0;
  int n = 1;
  if (f->lhs) n += formula_size(f->lhs);
  if (f->rhs) n += formula_size(f->rhs);
  return n;
}

class BackwardPlanner {
 public:
  BackwardPlanner(const std::vector<FormulaPtr>& known, const std::vector<DefaultRule>& defaults,
                  const std::set<LogicClass>& classes, int depth_budget,
                  const OracleLimits& limits, std::map<std::string, bool>* shared_entail_cache)
      : known_(known), defaults_(defaults), classes_(classes), budget_(depth_budget),
        limits_(limits) {
    if (shared_entail_cache) entail_cache_ext_ = shared_entail_cache;
    for (const auto& f : known_) {
      known_keys_.insert(render_formula(f));
      max_known_size_ = std::max(max_known_size_, formula_size(f));
    }
  }

  // Sound pruning: a subgoal the premises do not entail can never be derived,
  // so the search only ever expands entailed formulas. For default theories
  // the preferred extension is computed once and reused.
  bool entailed(const FormulaPtr& f) {
    std::string key = render_formula(f);
    std::map<std::string, bool>& cache = entail_cache_ext_ ? *entail_cache_ext_ : entail_cache_;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    bool result = false;
    try {
      if (!defaults_.empty()) {
        if (!extension_ready_) {
          DefaultTheory t;
          for (const auto& p : known_) {
            if (is_quantifier_free(p)) {
              t.facts.push_back(p);
            } else {
              t.hard_rules.push_back(p);
            }
          }
          t.defaults = defaults_;
          std::vector<Extension> exts = default_extensions(t, {}, limits_);
          if (!exts.empty()) extension_ = std::move(exts.front());
          extension_ready_ = true;
        }
        result = extension_ && extension_->contains(f, limits_);
      } else {
        result = entails(known_, {}, f, limits_).entailed();
      }
    } catch (const Error&) {
      result = true;  // cannot decide: do not prune
    }
    cache.emplace(std::move(key), result);
    return result;
  }

  // One-step forward closure: conclusions derivable directly from the pool,
  // usable as plan leaves without recursion.
  void add_one_step(const std::string& key, PlanStep step) { one_step_.emplace(key, std::move(step)); }

  // Iterative deepening on plan length with a per-level node allowance: short
  // derivations surface first, and one expensive level cannot eat the whole
  // budget before deeper (often cheaper) levels get their turn.
  std::optional<std::vector<PlanStep>> prove(const FormulaPtr& goal) {
    long long total = 0;
    for (int b = 1; b <= budget_; ++b) {
      nodes_ = 0;
      node_cap_ = 500LL * b * b;
      std::vector<PlanStep> plan;
      bool tainted = false;
      if (prove_into(goal, b, plan, tainted)) return plan;
      total += nodes_;
      if (total > kNodeBudget) break;
    }
    return std::nullopt;
  }

 private:
  bool known_has(const std::string& key) const { return known_keys_.count(key) > 0; }

  // Appends the steps deriving `f` (if any are needed) to `plan`. `tainted`
  // is set when the search was cut by a cycle guard, in which case the
  // failure is context-dependent and must not be cached.
  bool prove_into(const FormulaPtr& f, int depth, std::vector<PlanStep>& plan, bool& tainted) {
    std::string key = render_formula(f);
    if (known_has(key)) return true;
    for (const auto& s : plan) {
      if (render_formula(s.conclusion) == key) return true;  // already planned
    }
    if (depth <= 0) return false;
    if (in_progress_.count(key)) {
      tainted = true;
      return false;
    }
    if (++nodes_ > node_cap_) {
      tainted = true;  // out of budget: failures past this point prove nothing
      return false;
    }
    if (!entailed(f)) return false;  // sound prune: underivable subgoal
    auto one = one_step_.find(key);
    if (one != one_step_.end()) {
      plan.push_back(one->second);
      return true;
    }
    auto memo = memo_.find(key);
    if (memo != memo_.end()) {
      for (const auto& s : memo->second) {
        bool present = false;
        for (const auto& p : plan) {
          present = present || render_formula(p.conclusion) == render_formula(s.conclusion);
        }
        if (!present) plan.push_back(s);
      }
      return true;
    }
    auto failed = failed_.find(key);
    if (failed != failed_.end() && depth <= failed->second) return false;

    in_progress_.insert(key);
    std::size_t mark = plan.size();
    bool sub_tainted = false;
    bool ok = search(f, depth, plan, sub_tainted);
    in_progress_.erase(key);
    if (ok) {
      memo_.emplace(key, std::vector<PlanStep>(plan.begin() + static_cast<long>(mark), plan.end()));
    } else {
      plan.resize(mark);
      if (sub_tainted) {
        tainted = true;  // context-dependent; do not cache
      } else {
        int& best = failed_[key];
        best = std::max(best, depth);
      }
    }
    return ok;
  }

  bool search(const FormulaPtr& f, int depth, std::vector<PlanStep>& plan, bool& tainted) {
    for (const RuleSchema& rule : catalog().rules()) {
      if (!classes_.count(rule.logic_class)) continue;
      if (rule.is_nm()) {
        if (search_nm(rule, f, depth, plan, tainted)) return true;
        continue;
      }
      for (const RuleDirection& dir : rule.directions()) {
        Substitution base;
        if (!match_schema_into(dir.conclusion, f, base)) continue;
        const int m = static_cast<int>(dir.premises.size());
        // recursive_slot == -1: every premise comes from the known pool.
        // Then recurse into later slots first; rules like MP keep their
        // structural premise in slot 0 and the more constrained one last.
        if (try_binding(rule.id, dir, base, -1, f, depth, plan, tainted)) return true;
        for (int recursive_slot = m - 1; recursive_slot >= 0; --recursive_slot) {
          if (try_binding(rule.id, dir, base, recursive_slot, f, depth, plan, tainted)) return true;
        }
      }
    }
    return false;
  }

  bool try_binding(const std::string& rule_id, const RuleDirection& dir, Substitution subst,
                   int recursive_slot, const FormulaPtr& goal, int depth,
                   std::vector<PlanStep>& plan, bool& tainted) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(dir.premises.size()); ++i) {
      if (i != recursive_slot) order.push_back(i);
    }
    return bind_slots(rule_id, dir, subst, order, 0, recursive_slot, goal, depth, plan, tainted);
  }

  bool bind_slots(const std::string& rule_id, const RuleDirection& dir, Substitution subst,
                  const std::vector<int>& order, std::size_t k, int recursive_slot,
                  const FormulaPtr& goal, int depth, std::vector<PlanStep>& plan,
                  bool& tainted) {
    if (k == order.size()) {
      std::vector<FormulaPtr> premises(dir.premises.size());
      for (std::size_t i = 0; i < dir.premises.size(); ++i) {
        FormulaPtr inst = apply_substitution(dir.premises[i], subst);
        if (contains_metavariables(inst)) return false;
        premises[i] = inst;
      }
      std::size_t mark = plan.size();
      if (recursive_slot >= 0) {
        const FormulaPtr& sub = premises[static_cast<std::size_t>(recursive_slot)];
        if (known_has(render_formula(sub))) {
          // Nothing to recurse into; the all-known case covers this binding.
          return false;
        }
        // Backward steps may grow a subgoal by at most one pool-sized piece;
        // anything larger cannot come from the composer's threading.
        if (formula_size(sub) > formula_size(goal) + max_known_size_ + 4) return false;
        if (!prove_into(sub, depth - 1, plan, tainted)) return false;
      }
      FormulaPtr conclusion = apply_substitution(dir.conclusion, subst);
      if (!equal(conclusion, goal)) {
        plan.resize(mark);
        return false;
      }
      plan.push_back(PlanStep{rule_id, premises, {}, conclusion});
      return true;
    }
    int slot = order[k];
    for (const auto& cand : known_) {
      Substitution saved = subst;
      if (match_schema_into(dir.premises[static_cast<std::size_t>(slot)], cand, subst)) {
        if (bind_slots(rule_id, dir, subst, order, k + 1, recursive_slot, goal, depth, plan,
                       tainted)) {
          return true;
        }
      }
      subst = std::move(saved);
    }
    return false;
  }

  bool search_nm(const RuleSchema& rule, const FormulaPtr& f, int depth,
                 std::vector<PlanStep>& plan, bool& tainted) {
    Substitution base;
    if (!match_schema_into(rule.conclusion_schema, f, base)) return false;
    const int m = static_cast<int>(rule.premise_schemas.size());
    for (int recursive_slot = -1; recursive_slot < m; ++recursive_slot) {
      // Only fact slots can be derived; hard-rule slots come from the pool.
      if (recursive_slot >= static_cast<int>(rule.nm->fact_schemas.size())) break;
      std::vector<int> order;
      for (int i = 0; i < m; ++i) {
        if (i != recursive_slot) order.push_back(i);
      }
      if (bind_nm_slots(rule, base, order, 0, recursive_slot, f, depth, plan, tainted)) return true;
    }
    return false;
  }

  bool bind_nm_slots(const RuleSchema& rule, Substitution subst, const std::vector<int>& order,
                     std::size_t k, int recursive_slot, const FormulaPtr& goal, int depth,
                     std::vector<PlanStep>& plan, bool& tainted) {
    if (k == order.size()) {
      // Match the template's defaults against the instance defaults.
      std::vector<int> chosen;
      if (!match_template_defaults(*rule.nm, subst, chosen)) return false;
      std::vector<FormulaPtr> premises(rule.premise_schemas.size());
      for (std::size_t i = 0; i < rule.premise_schemas.size(); ++i) {
        FormulaPtr inst = apply_substitution(rule.premise_schemas[i], subst);
        if (contains_metavariables(inst)) return false;
        premises[i] = inst;
      }
      std::size_t mark = plan.size();
      if (recursive_slot >= 0) {
        const FormulaPtr& sub = premises[static_cast<std::size_t>(recursive_slot)];
        if (known_has(render_formula(sub))) return false;
        if (!prove_into(sub, depth - 1, plan, tainted)) return false;
      }
      FormulaPtr conclusion = apply_substitution(rule.conclusion_schema, subst);
      if (!equal(conclusion, goal)) {
        plan.resize(mark);
        return false;
      }
      PlanStep step{rule.id, premises, {}, conclusion};
      for (int d : chosen) step.defaults.push_back(defaults_[static_cast<std::size_t>(d)]);
      plan.push_back(std::move(step));
      return true;
    }
    int slot = order[k];
    for (const auto& cand : known_) {
      Substitution saved = subst;
      if (match_schema_into(rule.premise_schemas[static_cast<std::size_t>(slot)], cand, subst)) {
        if (bind_nm_slots(rule, subst, order, k + 1, recursive_slot, goal, depth, plan,
                          tainted)) {
          return true;
        }
      }
      subst = std::move(saved);
    }
    return false;
  }

  bool match_template_defaults(const NmTemplate& t, Substitution& s, std::vector<int>& chosen) {
    std::vector<bool> used(defaults_.size(), false);
    std::function<bool(std::size_t)> rec = [&](std::size_t di) -> bool {
      if (di == t.default_schemas.size()) return true;
      const DefaultRule& ds = t.default_schemas[di];
      for (std::size_t k = 0; k < defaults_.size(); ++k) {
        if (used[k]) continue;
        const DefaultRule& cand = defaults_[k];
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

  const std::vector<FormulaPtr>& known_;
  std::set<std::string> known_keys_;
  const std::vector<DefaultRule>& defaults_;
  std::set<LogicClass> classes_;
  int budget_;
  OracleLimits limits_;
  int max_known_size_ = 0;
  long long nodes_ = 0;
  long long node_cap_ = 0;
  static constexpr long long kNodeBudget = 60000;
  std::map<std::string, PlanStep> one_step_;
  std::optional<Extension> extension_;
  bool extension_ready_ = false;
  std::map<std::string, bool> entail_cache_;
  std::map<std::string, bool>* entail_cache_ext_ = nullptr;
  std::map<std::string, std::vector<PlanStep>> memo_;
  std::map<std::string, int> failed_;  // key -> largest depth that failed cleanly
  std::set<std::string> in_progress_;
};

}  // namespace

Selection select_premises(const SolverState& state, const std::vector<FormulaPtr>& goals,
                          const std::set<LogicClass>& classes,
                          const std::vector<DefaultRule>& defaults) {
  std::vector<RuleHit> hits = applicable_rules(state.known, classes, defaults);
  const RuleHit* first_novel = nullptr;
  for (const RuleHit& h : hits) {
    if (state.knows(h.conclusion)) continue;
    for (const auto& g : goals) {
      if (equal(h.conclusion, g)) {
        Selection s;
        s.kind = Selection::Kind::Rule;
        s.hit = h;
        return s;
      }
    }
    if (!first_novel) first_novel = &h;
  }
  Selection s;
  if (first_novel) {
    s.kind = Selection::Kind::Rule;
    s.hit = *first_novel;
  } else {
    s.kind = Selection::Kind::HeuristicFallback;
  }
  return s;
}

StepType identify_type(const Selection& selection) {
  return selection.kind == Selection::Kind::Rule ? StepType::Symbolic : StepType::Heuristic;
}

bool step(SolverState& state, const std::vector<FormulaPtr>& goals,
          const std::set<LogicClass>& classes, HeuristicProvider* provider) {
  Selection sel = select_premises(state, goals, classes, state.defaults);
  if (identify_type(sel) == StepType::Symbolic) {
    ChainStep cs;
    cs.index = static_cast<int>(state.trace.size());
    cs.rule_id = sel.hit.rule_id;
    cs.step_type = StepType::Symbolic;
    for (int i : sel.hit.premise_indices) {
      StepPremise p;
      p.formula = state.known[static_cast<std::size_t>(i)];
      if (i >= state.root_count) {
        p.provenance = Provenance::Derived;
        p.derived_from = i - state.root_count;
      }
      cs.premises.push_back(p);
    }
    for (int d : sel.hit.default_indices) {
      cs.defaults.push_back(state.defaults[static_cast<std::size_t>(d)]);
    }
    cs.conclusion = sel.hit.conclusion;
    state.known.push_back(cs.conclusion);
    state.known_keys.insert(render_formula(cs.conclusion));
    state.trace.push_back(std::move(cs));
    return true;
  }
  if (!provider) return false;
  FormulaPtr goal = goals.empty() ? nullptr : goals.front();
  std::vector<std::string> nls;
  for (const auto& f : state.known) nls.push_back(render_formula(f));
  std::optional<HeuristicProvider::Suggestion> suggestion =
      provider->propose(state.known, nls, goal);
  if (!suggestion || !suggestion->formula) return false;
  if (state.knows(suggestion->formula)) return false;  // novelty check
  ChainStep cs;
  cs.index = static_cast<int>(state.trace.size());
  cs.rule_id = kHeuristicRuleId;
  cs.step_type = StepType::Heuristic;
  cs.conclusion = suggestion->formula;
  state.known.push_back(cs.conclusion);
  state.known_keys.insert(render_formula(cs.conclusion));
  state.trace.push_back(std::move(cs));
  return true;
}

SolveResult solve(const GroundedInstance& instance, HeuristicProvider* provider,
                  const SolveOptions& opts) {
  if (opts.max_iterations < 1) throw ConfigError("solve: max_iterations must be >= 1");
  SolverState state;
  for (const auto& r : instance.chain.root_premises) state.add_root(r);
  state.defaults = instance.chain.root_defaults;

  std::set<LogicClass> classes =
      opts.classes.empty() ? std::set<LogicClass>{instance.logic_type} : opts.classes;

  // Goal formulas: the statement and its negation (truth evaluation) or the
  // four options (multiple choice). Used for goal-first selection and the
  // completion check.
  std::vector<FormulaPtr> goals;
  const Question& q = instance.question;
  if (q.type == QuestionType::TruthEval) {
    if (!q.statement) throw DataError("instance lacks question_formal for truth_eval");
    goals.push_back(q.statement);
    // For a negated statement, deriving its body settles the answer through
    // the completion oracle; try that before the double negation.
    if (FormulaPtr body = negated_body(q.statement)) goals.push_back(body);
    goals.push_back(mk_not(q.statement));
  } else {
    if (q.options_formal.size() != q.options.size() || q.options_formal.empty()) {
      throw DataError("instance lacks options_formal for multiple_choice");
    }
    for (const auto& o : q.options_formal) goals.push_back(o);
  }

  SolveResult result;
  auto derived = [&]() {
    std::vector<FormulaPtr> k;
    for (const auto& t : state.trace) k.push_back(t.conclusion);
    return k;
  };
  // Completion check over the knowledge accumulated by the loop's own steps.
  auto check = [&]() -> bool {
    std::vector<FormulaPtr> k = derived();
    if (q.type == QuestionType::TruthEval) {
      if (entails(k, {}, q.statement, opts.oracle).entailed()) {
        result.answer = "True";
        return true;
      }
      if (entails(k, {}, mk_not(q.statement), opts.oracle).entailed()) {
        result.answer = "False";
        return true;
      }
      return false;
    }
    int entailed_count = 0;
    int index = -1;
    for (std::size_t i = 0; i < q.options_formal.size(); ++i) {
      if (entails(k, {}, q.options_formal[i], opts.oracle).entailed()) {
        ++entailed_count;
        index = static_cast<int>(i);
      }
    }
    if (entailed_count == 1) {
      result.answer_index = index;
      result.answer = std::to_string(index);
      return true;
    }
    return false;  // none or several: keep reasoning
  };

  auto append_planned = [&](const PlanStep& ps) {
    ChainStep cs;
    cs.index = static_cast<int>(state.trace.size());
    cs.rule_id = ps.rule_id;
    cs.step_type = StepType::Symbolic;
    for (const auto& premise : ps.premises) {
      StepPremise p;
      p.formula = premise;
      std::string key = render_formula(premise);
      for (std::size_t i = 0; i < state.known.size(); ++i) {
        if (render_formula(state.known[i]) == key) {
          if (static_cast<int>(i) >= state.root_count) {
            p.provenance = Provenance::Derived;
            p.derived_from = static_cast<int>(i) - state.root_count;
          }
          break;
        }
      }
      cs.premises.push_back(p);
    }
    cs.defaults = ps.defaults;
    cs.conclusion = ps.conclusion;
    state.known.push_back(cs.conclusion);
    state.known_keys.insert(render_formula(cs.conclusion));
    state.trace.push_back(std::move(cs));
  };

  // Main loop. Each iteration performs one reasoning step: preferably the
  // next step of a derivation planned backward from the targets (complete on
  // generator output; see the module notes), otherwise the greedy
  // select/identify/step path, falling back to the heuristic provider.
  if (!check()) {
    bool replan = true;
    std::vector<PlanStep> plan;
    std::size_t plan_pos = 0;
    std::map<std::string, bool> entail_cache;
    std::size_t cache_known = state.known.size();
    const bool nm = !state.defaults.empty();
    while (state.iteration < opts.max_iterations) {
      if (replan) {
        plan.clear();
        plan_pos = 0;
        if (state.known.size() > cache_known) {
          // Ground entailment is monotone in the premise set: negatives may
          // flip once knowledge grows, positives never do.
          for (auto it = entail_cache.begin(); it != entail_cache.end();) {
            if (it->second) {
              ++it;
            } else {
              it = entail_cache.erase(it);
            }
          }
          cache_known = state.known.size();
        }
        BackwardPlanner planner(state.known, state.defaults, classes,
                                opts.max_iterations - state.iteration, opts.oracle,
                                nm ? nullptr : &entail_cache);
        for (const RuleHit& hit : applicable_rules(state.known, classes, state.defaults)) {
          if (state.knows(hit.conclusion)) continue;
          PlanStep ps;
          ps.rule_id = hit.rule_id;
          for (int i : hit.premise_indices) {
            ps.premises.push_back(state.known[static_cast<std::size_t>(i)]);
          }
          for (int d : hit.default_indices) {
            ps.defaults.push_back(state.defaults[static_cast<std::size_t>(d)]);
          }
          ps.conclusion = hit.conclusion;
          planner.add_one_step(render_formula(hit.conclusion), std::move(ps));
        }
        for (const auto& target : goals) {
          if (auto found = planner.prove(target)) {
            plan = std::move(*found);
            break;
          }
        }
        replan = false;
      }
      bool done = false;
      if (plan_pos < plan.size()) {
        const PlanStep& ps = plan[plan_pos++];
        if (state.knows(ps.conclusion)) continue;
        ++state.iteration;
        append_planned(ps);
        done = check();
      } else {
        // No symbolic derivation reaches a target from here: that is the
        // point where commonsense has to bridge, so the provider is asked
        // before falling back to undirected rule application.
        bool advanced = false;
        if (provider) {
          FormulaPtr goal = goals.empty() ? nullptr : goals.front();
          std::vector<std::string> nls;
          for (const auto& f : state.known) nls.push_back(render_formula(f));
          std::optional<HeuristicProvider::Suggestion> suggestion =
              provider->propose(state.known, nls, goal);
          if (suggestion && suggestion->formula && !state.knows(suggestion->formula)) {
            ChainStep cs;
            cs.index = static_cast<int>(state.trace.size());
            cs.rule_id = kHeuristicRuleId;
            cs.step_type = StepType::Heuristic;
            cs.conclusion = suggestion->formula;
            state.known.push_back(cs.conclusion);
            state.known_keys.insert(render_formula(cs.conclusion));
            state.trace.push_back(std::move(cs));
            advanced = true;
          }
        }
        if (!advanced) {
          Selection sel = select_premises(state, goals, classes, state.defaults);
          if (sel.kind == Selection::Kind::Rule) {
            ChainStep cs;
            cs.index = static_cast<int>(state.trace.size());
            cs.rule_id = sel.hit.rule_id;
            cs.step_type = StepType::Symbolic;
            for (int i : sel.hit.premise_indices) {
              StepPremise p;
              p.formula = state.known[static_cast<std::size_t>(i)];
              if (i >= state.root_count) {
                p.provenance = Provenance::Derived;
                p.derived_from = i - state.root_count;
              }
              cs.premises.push_back(p);
            }
            for (int d : sel.hit.default_indices) {
              cs.defaults.push_back(state.defaults[static_cast<std::size_t>(d)]);
            }
            cs.conclusion = sel.hit.conclusion;
            state.known.push_back(cs.conclusion);
            state.known_keys.insert(render_formula(cs.conclusion));
            state.trace.push_back(std::move(cs));
            advanced = true;
          }
        }
        if (!advanced) break;  // halt: no rule applies and no bridge offered
        ++state.iteration;
        done = check();
        replan = true;  // knowledge changed outside the plan; plan again
      }
      if (done) break;
    }
  }
  result.iterations = state.iteration;
  result.trace = state.trace;
  if (result.answer.empty()) {
    result.answer = q.type == QuestionType::TruthEval ? "Unknown" : "Unresolved";
  }
  return result;
}

}  // namespace solver

}  // namespace symlog
