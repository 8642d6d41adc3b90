#include "symlog/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace symlog {

// --------------------------------------------------------------------------
// Atom indexing shared by the propositional evaluators. Atoms are keyed by
// their rendered form so ground first-order atoms ("r(a)") work as
// propositional variables too.
// --------------------------------------------------------------------------

namespace {

struct AtomIndex {
  std::vector<std::string> names;                      // index -> key, sorted
  std::unordered_map<const Formula*, int> node_index;  // atom node -> index

  int size() const { return static_cast<int>(names.size()); }
};

void collect_atom_keys(const FormulaPtr& f, std::set<std::string>& keys) {
  switch (f->kind) {
    case Formula::Kind::Atom: keys.insert(render_formula(f)); break;
    case Formula::Kind::MetaVar:
      throw Error("oracle applied to a schematic formula: " + render_formula(f));
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: collect_atom_keys(f->lhs, keys); break;
    default:
      collect_atom_keys(f->lhs, keys);
      collect_atom_keys(f->rhs, keys);
      break;
  }
}

void index_nodes(const FormulaPtr& f, const std::map<std::string, int>& by_name, AtomIndex& idx) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      idx.node_index[f.get()] = by_name.at(render_formula(f));
      break;
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: index_nodes(f->lhs, by_name, idx); break;
    default:
      index_nodes(f->lhs, by_name, idx);
      index_nodes(f->rhs, by_name, idx);
      break;
  }
}

AtomIndex build_atom_index(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal) {
  std::set<std::string> keys;
  for (const auto& p : premises) collect_atom_keys(p, keys);
  collect_atom_keys(goal, keys);
  AtomIndex idx;
  std::map<std::string, int> by_name;
  for (const auto& k : keys) {
    by_name.emplace(k, idx.size());
    idx.names.push_back(k);
  }
  for (const auto& p : premises) index_nodes(p, by_name, idx);
  index_nodes(goal, by_name, idx);
  return idx;
}

bool eval_mask(const FormulaPtr& f, const AtomIndex& idx, std::uint64_t mask) {
  switch (f->kind) {
    case Formula::Kind::Atom: return (mask >> idx.node_index.at(f.get())) & 1u;
    case Formula::Kind::Not: return !eval_mask(f->lhs, idx, mask);
    case Formula::Kind::And: return eval_mask(f->lhs, idx, mask) && eval_mask(f->rhs, idx, mask);
    case Formula::Kind::Or: return eval_mask(f->lhs, idx, mask) || eval_mask(f->rhs, idx, mask);
    case Formula::Kind::Implies:
      return !eval_mask(f->lhs, idx, mask) || eval_mask(f->rhs, idx, mask);
    case Formula::Kind::Iff: return eval_mask(f->lhs, idx, mask) == eval_mask(f->rhs, idx, mask);
    default: throw Error("eval_mask: unexpected node");
  }
}

// Kleene three-valued evaluation over a partial assignment (-1 unknown).
int eval3(const FormulaPtr& f, const AtomIndex& idx, const std::vector<signed char>& vals) {
  switch (f->kind) {
    case Formula::Kind::Atom: return vals[idx.node_index.at(f.get())];
    case Formula::Kind::Not: {
      int v = eval3(f->lhs, idx, vals);
      return v < 0 ? -1 : 1 - v;
    }
    case Formula::Kind::And: {
      int a = eval3(f->lhs, idx, vals);
      if (a == 0) return 0;
      int b = eval3(f->rhs, idx, vals);
      if (b == 0) return 0;
      return (a == 1 && b == 1) ? 1 : -1;
    }
    case Formula::Kind::Or: {
      int a = eval3(f->lhs, idx, vals);
      if (a == 1) return 1;
      int b = eval3(f->rhs, idx, vals);
      if (b == 1) return 1;
      return (a == 0 && b == 0) ? 0 : -1;
    }
    case Formula::Kind::Implies: {
      int a = eval3(f->lhs, idx, vals);
      if (a == 0) return 1;
      int b = eval3(f->rhs, idx, vals);
      if (b == 1) return 1;
      if (a == 1 && b == 0) return 0;
      return -1;
    }
    case Formula::Kind::Iff: {
      int a = eval3(f->lhs, idx, vals);
      int b = eval3(f->rhs, idx, vals);
      if (a < 0 || b < 0) return -1;
      return a == b ? 1 : 0;
    }
    default: throw Error("eval3: unexpected node");
  }
}

Valuation valuation_from_mask(const AtomIndex& idx, std::uint64_t mask) {
  Valuation v;
  for (int i = 0; i < idx.size(); ++i) v.atoms[idx.names[i]] = (mask >> i) & 1u;
  return v;
}

}  // namespace

bool eval_formula(const FormulaPtr& f, const Valuation& v) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto it = v.atoms.find(render_formula(f));
      if (it == v.atoms.end()) throw Error("valuation missing atom " + render_formula(f));
      return it->second;
    }
    case Formula::Kind::Not: return !eval_formula(f->lhs, v);
    case Formula::Kind::And: return eval_formula(f->lhs, v) && eval_formula(f->rhs, v);
    case Formula::Kind::Or: return eval_formula(f->lhs, v) || eval_formula(f->rhs, v);
    case Formula::Kind::Implies: return !eval_formula(f->lhs, v) || eval_formula(f->rhs, v);
    case Formula::Kind::Iff: return eval_formula(f->lhs, v) == eval_formula(f->rhs, v);
    default: throw Error("eval_formula: quantified formula evaluated against a valuation");
  }
}

// --------------------------------------------------------------------------
// Propositional truth-table entailment
// --------------------------------------------------------------------------

namespace {

EntailmentVerdict pl_entails_impl(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                                  const OracleLimits& limits, bool parallel) {
  for (const auto& p : premises) {
    if (!is_propositional(p)) throw Error("pl_entails: premise not propositional: " + render_formula(p));
  }
  if (!is_propositional(goal)) throw Error("pl_entails: goal not propositional: " + render_formula(goal));

  AtomIndex idx = build_atom_index(premises, goal);
  if (idx.size() > limits.max_pl_atoms) {
    throw CapExceededError("pl_entails: " + std::to_string(idx.size()) + " atoms exceeds cap of " +
                           std::to_string(limits.max_pl_atoms));
  }
  const std::uint64_t total = 1ULL << idx.size();
  std::int64_t best = -1;

  auto is_counter = [&](std::uint64_t mask) {
    for (const auto& p : premises) {
      if (!eval_mask(p, idx, mask)) return false;
    }
    return !eval_mask(goal, idx, mask);
  };

  if (parallel) {
    std::int64_t found = static_cast<std::int64_t>(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : found)
#endif
    for (std::int64_t m = 0; m < static_cast<std::int64_t>(total); ++m) {
      if (is_counter(static_cast<std::uint64_t>(m)) && m < found) found = m;
    }
    if (found < static_cast<std::int64_t>(total)) best = found;
  } else {
    for (std::uint64_t m = 0; m < total; ++m) {
      if (is_counter(m)) {
        best = static_cast<std::int64_t>(m);
        break;
      }
    }
  }

  EntailmentVerdict v;
  if (best >= 0) {
    v.status = EntailmentVerdict::Status::NotEntailed;
    v.valuation = valuation_from_mask(idx, static_cast<std::uint64_t>(best));
  } else {
    v.status = EntailmentVerdict::Status::Entailed;
  }
  return v;
}

}  // namespace

EntailmentVerdict pl_entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                             const OracleLimits& limits) {
  return pl_entails_impl(premises, goal, limits, /*parallel=*/true);
}

EntailmentVerdict pl_entails_serial(const std::vector<FormulaPtr>& premises,
                                    const FormulaPtr& goal, const OracleLimits& limits) {
  return pl_entails_impl(premises, goal, limits, /*parallel=*/false);
}

// --------------------------------------------------------------------------
// Ground entailment via pruned search (no atom cap)
// --------------------------------------------------------------------------

EntailmentVerdict ground_entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                                 const OracleLimits& limits) {
  for (const auto& p : premises) {
    if (!is_quantifier_free(p) || !is_closed(p)) {
      throw Error("ground_entails: premise not ground: " + render_formula(p));
    }
  }
  if (!is_quantifier_free(goal) || !is_closed(goal)) {
    throw Error("ground_entails: goal not ground: " + render_formula(goal));
  }
  AtomIndex idx = build_atom_index(premises, goal);
  std::vector<signed char> vals(idx.size(), -1);
  std::vector<FormulaPtr> constraints = premises;
  constraints.push_back(mk_not(goal));  // the Not wraps goal's already-indexed atoms
  long long nodes = 0;

  // All constraints must be satisfiable together; search assigns atoms in
  // sorted order, false first, pruning on any constraint going false.
  std::function<bool(int)> dfs = [&](int next) -> bool {
    if (++nodes > limits.max_search_nodes) {
      throw CapExceededError("ground_entails: search budget exceeded");
    }
    bool all_true = true;
    for (const auto& c : constraints) {
      int r = eval3(c, idx, vals);
      if (r == 0) return false;
      if (r < 0) all_true = false;
    }
    if (all_true) {
      for (int i = next; i < idx.size(); ++i) {
        if (vals[i] < 0) vals[i] = 0;
      }
      return true;
    }
    int var = next;
    while (var < idx.size() && vals[var] >= 0) ++var;
    if (var >= idx.size()) return false;
    for (signed char bit : {0, 1}) {
      vals[var] = bit;
      if (dfs(var + 1)) return true;
    }
    vals[var] = -1;
    return false;
  };

  EntailmentVerdict v;
  if (dfs(0)) {
    v.status = EntailmentVerdict::Status::NotEntailed;
    Valuation val;
    for (int i = 0; i < idx.size(); ++i) val.atoms[idx.names[i]] = vals[i] == 1;
    v.valuation = val;
  } else {
    v.status = EntailmentVerdict::Status::Entailed;
  }
  return v;
}

// --------------------------------------------------------------------------
// Finite-model entailment
// --------------------------------------------------------------------------

namespace {

struct Signature {
  std::vector<std::string> constants;                  // sorted
  std::vector<std::pair<std::string, int>> predicates; // sorted, (name, arity)

  static Signature of(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal) {
    std::set<std::string> consts;
    std::map<std::string, int> preds;
    for (const auto& p : premises) {
      collect_constants(p, consts);
      collect_predicates(p, preds);
      std::set<std::string> zero;
      collect_atoms(p, zero);
      for (const auto& z : zero) preds.emplace(z, 0);
    }
    collect_constants(goal, consts);
    collect_predicates(goal, preds);
    std::set<std::string> zero;
    collect_atoms(goal, zero);
    for (const auto& z : zero) preds.emplace(z, 0);

    Signature s;
    s.constants.assign(consts.begin(), consts.end());
    s.predicates.assign(preds.begin(), preds.end());
    return s;
  }
};

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Mutable structure under construction: -1 = undecided.
struct PartialStructure {
  int n = 0;
  const Signature* sig = nullptr;
  std::vector<int> const_val;                    // per constant, -1 unknown
  std::vector<std::vector<signed char>> tables;  // per predicate, -1 unknown

  int table_index(int pred, const std::vector<int>& tuple) const {
    int arity = sig->predicates[pred].second;
    int ix = 0;
    for (int i = 0; i < arity; ++i) ix = ix * n + tuple[i];
    return ix;
  }
};

int eval3_struct(const FormulaPtr& f, const PartialStructure& st,
                 std::map<std::string, int>& env) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      int pred = -1;
      for (std::size_t i = 0; i < st.sig->predicates.size(); ++i) {
        if (st.sig->predicates[i].first == f->label) {
          pred = static_cast<int>(i);
          break;
        }
      }
      std::vector<int> tuple;
      for (const Term& t : f->args) {
        int e = -1;
        if (t.kind == TermKind::Variable) {
          e = env.at(t.name);
        } else {
          int ci = static_cast<int>(std::lower_bound(st.sig->constants.begin(),
                                                     st.sig->constants.end(), t.name) -
                                    st.sig->constants.begin());
          e = st.const_val[ci];
        }
        if (e < 0) return -1;
        tuple.push_back(e);
      }
      return st.tables[pred][st.table_index(pred, tuple)];
    }
    case Formula::Kind::Not: {
      int v = eval3_struct(f->lhs, st, env);
      return v < 0 ? -1 : 1 - v;
    }
    case Formula::Kind::And: {
      int a = eval3_struct(f->lhs, st, env);
      if (a == 0) return 0;
      int b = eval3_struct(f->rhs, st, env);
      if (b == 0) return 0;
      return (a == 1 && b == 1) ? 1 : -1;
    }
    case Formula::Kind::Or: {
      int a = eval3_struct(f->lhs, st, env);
      if (a == 1) return 1;
      int b = eval3_struct(f->rhs, st, env);
      if (b == 1) return 1;
      return (a == 0 && b == 0) ? 0 : -1;
    }
    case Formula::Kind::Implies: {
      int a = eval3_struct(f->lhs, st, env);
      if (a == 0) return 1;
      int b = eval3_struct(f->rhs, st, env);
      if (b == 1) return 1;
      if (a == 1 && b == 0) return 0;
      return -1;
    }
    case Formula::Kind::Iff: {
      int a = eval3_struct(f->lhs, st, env);
      int b = eval3_struct(f->rhs, st, env);
      if (a < 0 || b < 0) return -1;
      return a == b ? 1 : 0;
    }
    case Formula::Kind::ForAll: {
      bool unknown = false;
      for (int e = 0; e < st.n; ++e) {
        env[f->label] = e;
        int v = eval3_struct(f->lhs, st, env);
        env.erase(f->label);
        if (v == 0) return 0;
        if (v < 0) unknown = true;
      }
      return unknown ? -1 : 1;
    }
    case Formula::Kind::Exists: {
      bool unknown = false;
      for (int e = 0; e < st.n; ++e) {
        env[f->label] = e;
        int v = eval3_struct(f->lhs, st, env);
        env.erase(f->label);
        if (v == 1) return 1;
        if (v < 0) unknown = true;
      }
      return unknown ? -1 : 0;
    }
    default: throw Error("eval3_struct: unexpected node");
  }
}

FiniteStructure freeze(const PartialStructure& st) {
  FiniteStructure out;
  out.domain_size = st.n;
  for (std::size_t i = 0; i < st.sig->constants.size(); ++i) {
    out.constants[st.sig->constants[i]] = std::max(0, st.const_val[i]);
  }
  for (std::size_t p = 0; p < st.sig->predicates.size(); ++p) {
    const auto& [name, arity] = st.sig->predicates[p];
    std::vector<bool> table(st.tables[p].size());
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = st.tables[p][i] == 1;
    out.relations[name] = {arity, table};
  }
  return out;
}

void check_fol_inputs(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                      int max_domain) {
  if (max_domain < 1 || max_domain > 4) {
    throw Error("fol entailment: max_domain must be within 1..4");
  }
  auto check = [](const FormulaPtr& f) {
    if (!is_closed(f)) throw Error("fol entailment: formula not closed: " + render_formula(f));
    std::map<std::string, int> preds;
    collect_predicates(f, preds);
    for (const auto& [name, arity] : preds) {
      if (arity > 3) {
        throw Error("fol entailment: predicate " + name + " has arity > 3");
      }
    }
  };
  for (const auto& p : premises) check(p);
  check(goal);
}

// Pruned countermodel search at one domain size. Returns true when a
// structure satisfying all premises and falsifying the goal exists. The
// search interleaves branching with failed-literal propagation: a relation
// bit whose one value already falsifies a constraint is forced to the other,
// which keeps quantified schemas like the multi-variable rules tractable.
bool find_countermodel(const std::vector<FormulaPtr>& premises, const FormulaPtr& goal,
                       const Signature& sig, int n, long long& budget,
                       FiniteStructure* out) {
  PartialStructure st;
  st.n = n;
  st.sig = &sig;
  st.const_val.assign(sig.constants.size(), -1);
  st.tables.resize(sig.predicates.size());
  for (std::size_t p = 0; p < sig.predicates.size(); ++p) {
    st.tables[p].assign(static_cast<std::size_t>(ipow(n, sig.predicates[p].second)), -1);
  }
  FormulaPtr neg_goal = mk_not(goal);
  std::vector<FormulaPtr> constraints = premises;
  constraints.push_back(neg_goal);

  auto charge = [&](long long amount) {
    budget -= amount;
    if (budget < 0) throw CapExceededError("fol countermodel search budget exceeded");
  };

  auto status = [&]() -> int {  // 0 pruned, 1 satisfied, -1 undecided
    std::map<std::string, int> env;
    bool all_true = true;
    for (const auto& c : constraints) {
      int r = eval3_struct(c, st, env);
      if (r == 0) return 0;
      if (r < 0) all_true = false;
    }
    return all_true ? 1 : -1;
  };

  const int n_consts = static_cast<int>(sig.constants.size());

  // Relation bits ordered by growing table size so tightly constrained
  // predicates are decided first.
  std::vector<std::pair<std::size_t, std::size_t>> bit_order;  // (pred, cell)
  {
    std::vector<std::size_t> preds(sig.predicates.size());
    for (std::size_t i = 0; i < preds.size(); ++i) preds[i] = i;
    std::stable_sort(preds.begin(), preds.end(), [&](std::size_t a, std::size_t b) {
      return st.tables[a].size() < st.tables[b].size();
    });
    for (std::size_t p : preds) {
      for (std::size_t c = 0; c < st.tables[p].size(); ++c) bit_order.emplace_back(p, c);
    }
  }

  struct Undo {
    std::vector<signed char*> slots;
    void mark(signed char* s) { slots.push_back(s); }
    void rollback() {
      for (auto it = slots.rbegin(); it != slots.rend(); ++it) **it = -1;
      slots.clear();
    }
  };

  // Forces bits whose one polarity already violates a constraint. Returns
  // false on conflict (both polarities fail).
  auto propagate = [&](Undo& undo) -> bool {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [p, c] : bit_order) {
        signed char& cell = st.tables[p][c];
        if (cell >= 0) continue;
        charge(2);
        cell = 0;
        bool zero_ok = status() != 0;
        cell = 1;
        bool one_ok = status() != 0;
        if (!zero_ok && !one_ok) {
          cell = -1;
          return false;
        }
        if (zero_ok == one_ok) {
          cell = -1;
          continue;
        }
        cell = zero_ok ? 0 : 1;
        undo.mark(&cell);
        changed = true;
      }
    }
    return true;
  };

  auto fill_rest = [&]() {
    for (auto& cv : st.const_val) {
      if (cv < 0) cv = 0;
    }
    for (auto& t : st.tables) {
      for (auto& b : t) {
        if (b < 0) b = 0;
      }
    }
  };

  std::function<bool()> dfs = [&]() -> bool {
    charge(1);
    Undo undo;
    if (!propagate(undo)) {
      undo.rollback();
      return false;
    }
    int s = status();
    if (s == 0) {
      undo.rollback();
      return false;
    }
    if (s == 1) {
      fill_rest();
      return true;
    }
    // Branch: first undecided constant, then first undecided relation bit.
    for (int c = 0; c < n_consts; ++c) {
      if (st.const_val[c] >= 0) continue;
      for (int e = 0; e < n; ++e) {
        st.const_val[c] = e;
        if (dfs()) return true;
      }
      st.const_val[c] = -1;
      undo.rollback();
      return false;
    }
    for (const auto& [p, cidx] : bit_order) {
      signed char& cell = st.tables[p][cidx];
      if (cell >= 0) continue;
      for (signed char b : {0, 1}) {
        cell = b;
        if (dfs()) return true;
      }
      cell = -1;
      undo.rollback();
      return false;
    }
    undo.rollback();
    return false;
  };

  if (dfs()) {
    if (out) *out = freeze(st);
    return true;
  }
  return false;
}

}  // namespace

std::string FiniteStructure::describe() const {
  std::ostringstream os;
  os << "domain {0..";
  os << domain_size - 1 << "}";
  for (const auto& [c, e] : constants) os << ", " << c << "=" << e;
  for (const auto& [name, rel] : relations) {
    const auto& [arity, table] = rel;
    os << ", " << name << "={";
    bool first = true;
    std::vector<int> tuple(arity, 0);
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table[i]) continue;
      std::size_t rest = i;
      for (int k = arity - 1; k >= 0; --k) {
        tuple[k] = static_cast<int>(rest % domain_size);
        rest /= domain_size;
      }
      if (!first) os << ",";
      first = false;
      os << "(";
      for (int k = 0; k < arity; ++k) os << (k ? "," : "") << tuple[k];
      os << ")";
    }
    os << "}";
  }
  return os.str();
}

bool eval_formula(const FormulaPtr& f, const FiniteStructure& s) {
  Signature sig;
  for (const auto& [c, e] : s.constants) {
    (void)e;
    sig.constants.push_back(c);
  }
  for (const auto& [name, rel] : s.relations) sig.predicates.emplace_back(name, rel.first);
  PartialStructure st;
  st.n = s.domain_size;
  st.sig = &sig;
  for (const auto& c : sig.constants) st.const_val.push_back(s.constants.at(c));
  for (const auto& [name, arity] : sig.predicates) {
    (void)arity;
    const auto& table = s.relations.at(name).second;
    std::vector<signed char> t(table.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = table[i] ? 1 : 0;
    st.tables.push_back(std::move(t));
  }
  std::map<std::string, int> env;
  int r = eval3_struct(f, st, env);
  if (r < 0) throw Error("eval_formula: structure incomplete for formula");
  return r == 1;
}

EntailmentVerdict fol_entails_finite(const std::vector<FormulaPtr>& premises,
                                     const FormulaPtr& goal, int max_domain,
                                     const OracleLimits& limits) {
  check_fol_inputs(premises, goal, max_domain);
  Signature sig = Signature::of(premises, goal);
  long long budget = limits.max_search_nodes;
  EntailmentVerdict v;
  v.bound = max_domain;
  try {
    for (int n = 1; n <= max_domain; ++n) {
      FiniteStructure counter;
      if (find_countermodel(premises, goal, sig, n, budget, &counter)) {
        v.status = EntailmentVerdict::Status::NotEntailed;
        v.structure = counter;
        v.bound = n;
        return v;
      }
    }
  } catch (const CapExceededError& e) {
    v.status = EntailmentVerdict::Status::Undetermined;
    v.note = e.what();
    return v;
  }
  v.status = EntailmentVerdict::Status::Entailed;
  v.note = "no countermodel up to domain size " + std::to_string(max_domain);
  return v;
}

EntailmentVerdict fol_entails_naive(const std::vector<FormulaPtr>& premises,
                                    const FormulaPtr& goal, int max_domain, bool parallel,
                                    const OracleLimits& limits) {
  check_fol_inputs(premises, goal, max_domain);
  Signature sig = Signature::of(premises, goal);
  EntailmentVerdict v;
  v.bound = max_domain;

  for (int n = 1; n <= max_domain; ++n) {
    long long bits = 0;
    for (const auto& [name, arity] : sig.predicates) {
      (void)name;
      bits += ipow(n, arity);
    }
    if (bits > 30) throw CapExceededError("fol_entails_naive: signature too large to enumerate");
    long long combos = ipow(n, static_cast<int>(sig.constants.size())) * (1LL << bits);
    if (combos > limits.max_search_nodes) {
      throw CapExceededError("fol_entails_naive: structure count exceeds budget");
    }

    auto decode = [&](long long index) {
      PartialStructure st;
      st.n = n;
      st.sig = &sig;
      long long rest = index;
      st.const_val.resize(sig.constants.size());
      for (std::size_t c = 0; c < sig.constants.size(); ++c) {
        st.const_val[c] = static_cast<int>(rest % n);
        rest /= n;
      }
      for (std::size_t p = 0; p < sig.predicates.size(); ++p) {
        long long cells = ipow(n, sig.predicates[p].second);
        std::vector<signed char> t(static_cast<std::size_t>(cells));
        for (long long i = 0; i < cells; ++i) {
          t[static_cast<std::size_t>(i)] = static_cast<signed char>(rest & 1);
          rest >>= 1;
        }
        st.tables.push_back(std::move(t));
      }
      return st;
    };

    auto is_counter = [&](long long index) {
      PartialStructure st = decode(index);
      std::map<std::string, int> env;
      for (const auto& p : premises) {
        if (eval3_struct(p, st, env) != 1) return false;
      }
      return eval3_struct(goal, st, env) == 0;
    };

    long long found = combos;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : found)
#endif
      for (long long i = 0; i < combos; ++i) {
        if (is_counter(i) && i < found) found = i;
      }
    } else {
      for (long long i = 0; i < combos; ++i) {
        if (is_counter(i)) {
          found = i;
          break;
        }
      }
    }
    if (found < combos) {
      v.status = EntailmentVerdict::Status::NotEntailed;
      v.structure = freeze(decode(found));
      v.bound = n;
      return v;
    }
  }
  v.status = EntailmentVerdict::Status::Entailed;
  v.note = "no countermodel up to domain size " + std::to_string(max_domain);
  return v;
}

// --------------------------------------------------------------------------
// Default logic
// --------------------------------------------------------------------------

namespace {

FormulaPtr instantiate(const FormulaPtr& f, const std::map<std::string, std::string>& binding) {
  Substitution s;
  for (const auto& [var, c] : binding) s.terms[var] = Term{TermKind::Constant, c};
  return apply_substitution(f, s);
}

// Expands universal/existential quantifiers over the constant list.
FormulaPtr ground_quantifiers(const FormulaPtr& f, const std::vector<std::string>& constants) {
  switch (f->kind) {
    case Formula::Kind::Atom: return f;
    case Formula::Kind::Not: {
      FormulaPtr b = ground_quantifiers(f->lhs, constants);
      return b == f->lhs ? f : mk_not(b);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff: {
      FormulaPtr l = ground_quantifiers(f->lhs, constants);
      FormulaPtr r = ground_quantifiers(f->rhs, constants);
      if (l == f->lhs && r == f->rhs) return f;
      switch (f->kind) {
        case Formula::Kind::And: return mk_and(l, r);
        case Formula::Kind::Or: return mk_or(l, r);
        case Formula::Kind::Implies: return mk_implies(l, r);
        default: return mk_iff(l, r);
      }
    }
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      bool universal = f->kind == Formula::Kind::ForAll;
      FormulaPtr acc = nullptr;
      for (const auto& c : constants) {
        Substitution s;
        s.terms[f->label] = Term{TermKind::Constant, c};
        FormulaPtr inst = ground_quantifiers(apply_substitution(f->lhs, s), constants);
        acc = !acc ? inst : (universal ? mk_and(acc, inst) : mk_or(acc, inst));
      }
      if (!acc) {
        // Empty domain never happens for theories with facts; fall back to a
        // neutral element so evaluation stays total.
        acc = universal ? mk_or(mk_atom("true_"), mk_not(mk_atom("true_")))
                        : mk_and(mk_atom("true_"), mk_not(mk_atom("true_")));
      }
      return acc;
    }
    default: throw Error("ground_quantifiers: schematic formula");
  }
}

struct GroundDefault {
  FormulaPtr prerequisite;
  std::vector<FormulaPtr> justifications;
  FormulaPtr consequent;
  int priority = 0;
  int decl_index = 0;
};

std::set<std::string> default_free_vars(const DefaultRule& d) {
  std::set<std::string> vars = free_variables(d.prerequisite);
  for (const auto& j : d.justifications) {
    auto v = free_variables(j);
    vars.insert(v.begin(), v.end());
  }
  auto v = free_variables(d.consequent);
  vars.insert(v.begin(), v.end());
  return vars;
}

void collect_formula_atom_keys(const FormulaPtr& f, std::set<std::string>& keys) {
  collect_atom_keys(f, keys);
}

bool ground_set_entails(const std::vector<FormulaPtr>& base, const FormulaPtr& goal,
                        const OracleLimits& limits) {
  return ground_entails(base, goal, limits).entailed();
}

}  // namespace

bool Extension::contains(const FormulaPtr& f, const OracleLimits& limits) const {
  std::vector<FormulaPtr> all = base;
  all.insert(all.end(), fired.begin(), fired.end());
  return ground_set_entails(all, f, limits);
}

std::vector<Extension> default_extensions(const DefaultTheory& theory,
                                          const std::vector<std::string>& constants,
                                          const OracleLimits& limits) {
  // Ground everything.
  std::vector<std::string> consts = constants;
  {
    std::set<std::string> cs(consts.begin(), consts.end());
    for (const auto& f : theory.facts) collect_constants(f, cs);
    for (const auto& f : theory.hard_rules) collect_constants(f, cs);
    for (const auto& d : theory.defaults) {
      collect_constants(d.prerequisite, cs);
      for (const auto& j : d.justifications) collect_constants(j, cs);
      collect_constants(d.consequent, cs);
    }
    consts.assign(cs.begin(), cs.end());
  }

  std::vector<FormulaPtr> base = theory.facts;
  for (const auto& h : theory.hard_rules) base.push_back(ground_quantifiers(h, consts));
  for (const auto& f : base) {
    if (!is_quantifier_free(f) || !is_closed(f)) {
      throw Error("default_extensions: non-ground base formula: " + render_formula(f));
    }
  }

  std::vector<GroundDefault> grounded;
  long long count = 0;
  for (std::size_t di = 0; di < theory.defaults.size(); ++di) {
    const DefaultRule& d = theory.defaults[di];
    std::set<std::string> var_set = default_free_vars(d);
    std::vector<std::string> vars(var_set.begin(), var_set.end());
    long long combos = vars.empty() ? 1 : ipow(static_cast<long long>(consts.size()),
                                               static_cast<int>(vars.size()));
    count += combos;
    if (count > limits.max_ground_instances) {
      throw CapExceededError("default_extensions: ground instance cap exceeded");
    }
    for (long long a = 0; a < combos; ++a) {
      std::map<std::string, std::string> binding;
      long long rest = a;
      for (const auto& v : vars) {
        binding[v] = consts[static_cast<std::size_t>(rest % consts.size())];
        rest /= static_cast<long long>(consts.size());
      }
      GroundDefault g;
      g.prerequisite = instantiate(d.prerequisite, binding);
      for (const auto& j : d.justifications) g.justifications.push_back(instantiate(j, binding));
      g.consequent = instantiate(d.consequent, binding);
      g.priority = d.priority;
      g.decl_index = static_cast<int>(di);
      grounded.push_back(std::move(g));
    }
  }

  // Relevance: keep only defaults whose prerequisite atoms are reachable from
  // the base atoms through consequents (syntactic over-approximation).
  std::set<std::string> reach;
  for (const auto& f : base) collect_formula_atom_keys(f, reach);
  std::vector<bool> relevant(grounded.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < grounded.size(); ++i) {
      if (relevant[i]) continue;
      std::set<std::string> pre;
      collect_formula_atom_keys(grounded[i].prerequisite, pre);
      bool ok = true;
      for (const auto& a : pre) {
        if (!reach.count(a)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        relevant[i] = true;
        std::set<std::string> cs2;
        collect_formula_atom_keys(grounded[i].consequent, cs2);
        for (const auto& a : cs2) {
          if (reach.insert(a).second) changed = true;
        }
        changed = true;
      }
    }
  }
  std::vector<GroundDefault> gd;
  for (std::size_t i = 0; i < grounded.size(); ++i) {
    if (relevant[i]) gd.push_back(grounded[i]);
  }
  // Deterministic application order: (priority, declaration, grounding).
  std::stable_sort(gd.begin(), gd.end(), [](const GroundDefault& a, const GroundDefault& b) {
    return a.priority < b.priority;
  });
  if (static_cast<int>(gd.size()) > limits.max_tracked_defaults) {
    throw CapExceededError("default_extensions: too many relevant ground defaults");
  }

  const bool priorities_in_use =
      std::any_of(gd.begin(), gd.end(), [](const GroundDefault& d) { return d.priority != 0; });

  // Atom universe for literal signatures.
  std::set<std::string> universe_keys;
  for (const auto& f : base) collect_formula_atom_keys(f, universe_keys);
  std::vector<FormulaPtr> universe_atoms;
  for (const auto& d : gd) {
    collect_formula_atom_keys(d.consequent, universe_keys);
    collect_formula_atom_keys(d.prerequisite, universe_keys);
  }
  // Parse the keys back into atoms (keys are canonical renders).
  for (const auto& k : universe_keys) universe_atoms.push_back(parse_formula(k));

  std::vector<Extension> extensions;
  std::set<std::string> seen_signatures;
  std::set<std::uint64_t> visited;

  auto applicable_now = [&](const std::vector<FormulaPtr>& s_set, const GroundDefault& d) {
    if (!ground_set_entails(s_set, d.prerequisite, limits)) return false;
    for (const auto& j : d.justifications) {
      if (ground_set_entails(s_set, mk_not(j), limits)) return false;
    }
    return true;
  };

  std::function<void(std::uint64_t, std::vector<int>&)> explore = [&](std::uint64_t mask,
                                                                      std::vector<int>& order) {
    std::vector<FormulaPtr> s_set = base;
    for (int i : order) s_set.push_back(gd[static_cast<std::size_t>(i)].consequent);

    std::vector<int> app;
    for (std::size_t i = 0; i < gd.size(); ++i) {
      if (mask & (1ULL << i)) continue;
      if (applicable_now(s_set, gd[i])) app.push_back(static_cast<int>(i));
    }
    if (priorities_in_use && !app.empty()) {
      int minp = gd[static_cast<std::size_t>(app[0])].priority;
      for (int i : app) minp = std::min(minp, gd[static_cast<std::size_t>(i)].priority);
      std::vector<int> filtered;
      for (int i : app) {
        if (gd[static_cast<std::size_t>(i)].priority == minp) filtered.push_back(i);
      }
      app = filtered;
    }
    if (app.empty()) {
      // Closed process; successful iff all justifications of applied defaults
      // are consistent with the final set.
      for (int i : order) {
        for (const auto& j : gd[static_cast<std::size_t>(i)].justifications) {
          if (ground_set_entails(s_set, mk_not(j), limits)) return;
        }
      }
      Extension e;
      e.base = base;
      for (int i : order) {
        e.fired.push_back(gd[static_cast<std::size_t>(i)].consequent);
        e.generating.push_back(i);
      }
      for (const auto& atom : universe_atoms) {
        if (ground_set_entails(s_set, atom, limits)) {
          e.literals.push_back(render_formula(atom));
        } else if (ground_set_entails(s_set, mk_not(atom), limits)) {
          e.literals.push_back("~" + render_formula(atom));
        }
      }
      std::sort(e.literals.begin(), e.literals.end());
      std::string sig;
      for (const auto& l : e.literals) sig += l + ";";
      if (seen_signatures.insert(sig).second) extensions.push_back(std::move(e));
      return;
    }
    for (int i : app) {
      std::uint64_t next = mask | (1ULL << i);
      if (!visited.insert(next).second) continue;
      order.push_back(i);
      explore(next, order);
      order.pop_back();
    }
  };

  std::vector<int> order;
  explore(0, order);
  return extensions;
}

EntailmentVerdict nm_preferred_entails(const DefaultTheory& theory,
                                       const std::vector<std::string>& constants,
                                       const FormulaPtr& goal, const OracleLimits& limits) {
  std::vector<Extension> exts = default_extensions(theory, constants, limits);
  EntailmentVerdict v;
  if (exts.empty()) {
    v.status = EntailmentVerdict::Status::NotEntailed;
    v.note = "theory has no extension";
    return v;
  }
  if (exts.front().contains(goal, limits)) {
    v.status = EntailmentVerdict::Status::Entailed;
    v.note = "holds in the preferred extension";
  } else {
    v.status = EntailmentVerdict::Status::NotEntailed;
    v.note = "absent from the preferred extension";
  }
  return v;
}

EntailmentVerdict entails(const std::vector<FormulaPtr>& premises,
                          const std::vector<DefaultRule>& defaults, const FormulaPtr& goal,
                          const OracleLimits& limits) {
  if (!defaults.empty()) {
    DefaultTheory t;
    for (const auto& p : premises) {
      if (is_quantifier_free(p)) {
        t.facts.push_back(p);
      } else {
        t.hard_rules.push_back(p);
      }
    }
    t.defaults = defaults;
    return nm_preferred_entails(t, {}, goal, limits);
  }
  bool ground = is_quantifier_free(goal) && is_closed(goal);
  for (const auto& p : premises) ground = ground && is_quantifier_free(p) && is_closed(p);
  if (ground) return ground_entails(premises, goal, limits);
  return fol_entails_finite(premises, goal, limits.max_fol_domain, limits);
}

// --------------------------------------------------------------------------
// Chain verification
// --------------------------------------------------------------------------

VerificationReport verify_chain(const ReasoningChain& chain, const OracleLimits& limits) {
  VerificationReport report;
  report.sound = true;
  for (const ChainStep& step : chain.steps) {
    StepVerdict v;
    v.index = step.index;
    v.step_type = step.step_type;
    if (step.step_type == StepType::Heuristic) {
      v.rule_match_ok = true;
      v.entailment_ok = true;
      v.note = "heuristic step, recorded but not entailment-checked";
      report.steps.push_back(v);
      continue;
    }

    // Structural check: derived premises must reference earlier steps.
    bool structure_ok = true;
    for (const StepPremise& p : step.premises) {
      if (p.provenance == Provenance::Derived) {
        if (p.derived_from < 0 || p.derived_from >= step.index ||
            p.derived_from >= static_cast<int>(chain.steps.size()) ||
            !equal(chain.steps[static_cast<std::size_t>(p.derived_from)].conclusion, p.formula)) {
          structure_ok = false;
          v.note = "derived premise does not match its producing step";
        }
      }
    }

    std::vector<FormulaPtr> premises;
    for (const StepPremise& p : step.premises) premises.push_back(p.formula);

    const RuleSchema* rule = catalog().get(step.rule_id);
    if (!rule) {
      v.rule_match_ok = false;
      v.note = "unknown rule id " + step.rule_id;
    } else {
      v.rule_match_ok =
          structure_ok && rule_matches_step(*rule, premises, step.defaults, step.conclusion);
      if (!v.rule_match_ok && v.note.empty()) v.note = "rule pattern does not match step";
    }

    if (rule && rule->is_nm()) {
      DefaultTheory t;
      for (const auto& p : premises) {
        if (is_quantifier_free(p)) {
          t.facts.push_back(p);
        } else {
          t.hard_rules.push_back(p);
        }
      }
      t.defaults = step.defaults;
      v.entailment_ok = nm_preferred_entails(t, {}, step.conclusion, limits).entailed();
      if (!v.entailment_ok && v.note.empty()) v.note = "conclusion not in preferred extension";
    } else {
      EntailmentVerdict e = entails(premises, {}, step.conclusion, limits);
      v.entailment_ok = e.entailed();
      if (!v.entailment_ok && v.note.empty()) {
        v.note = e.status == EntailmentVerdict::Status::Undetermined
                     ? "entailment undetermined: " + e.note
                     : "premises do not entail conclusion";
      }
    }

    if (!v.sound() && report.sound) {
      report.sound = false;
      report.failing_step = step.index;
      report.reason = !v.rule_match_ok ? "rule-match failed" : "entailment failed";
      if (!v.note.empty()) report.reason += ": " + v.note;
    }
    report.steps.push_back(v);
  }
  return report;
}

}  // namespace symlog
