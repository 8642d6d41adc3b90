#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symlog/errors.hpp"

namespace symlog {

// ---------------------------------------------------------------------------
// Terms
//
// Object-level names match [a-z][a-zA-Z0-9_]*. A term name starting with one
// of u,v,w,x,y,z is a variable; any other lowercase name is a constant.
// Uppercase names ([A-Z][A-Z0-9_]*) are schema metavariables and never occur
// in object-level sentences.
// ---------------------------------------------------------------------------

enum class TermKind { Variable, Constant, Meta };

struct Term {
  TermKind kind;
  std::string name;

  bool operator==(const Term& o) const { return kind == o.kind && name == o.name; }
  bool operator!=(const Term& o) const { return !(*this == o); }
};

bool is_variable_name(const std::string& name);
bool is_meta_name(const std::string& name);
bool is_object_name(const std::string& name);

// Classifies by name: uppercase -> Meta, u..z -> Variable, else Constant.
Term make_term(const std::string& name);

// ---------------------------------------------------------------------------
// Formulas
//
// Immutable shared tree. Atom with a lowercase label is an object-level
// proposition (no args) or predicate application; an Atom with an uppercase
// label is a predicate metavariable application; a MetaVar node is a formula
// metavariable (PHI, PSI, ...).
// ---------------------------------------------------------------------------

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind { Atom, MetaVar, Not, And, Or, Implies, Iff, ForAll, Exists };

  Kind kind;
  std::string label;       // Atom: predicate name; MetaVar: metavariable;
                           // ForAll/Exists: bound variable name
  std::vector<Term> args;  // Atom only
  FormulaPtr lhs, rhs;     // Not and quantifiers use lhs only

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_quantifier() const { return kind == Kind::ForAll || kind == Kind::Exists; }
  bool is_binary() const {
    return kind == Kind::And || kind == Kind::Or || kind == Kind::Implies || kind == Kind::Iff;
  }
};

FormulaPtr mk_atom(std::string name, std::vector<Term> args = {});
FormulaPtr mk_meta(std::string name);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_forall(std::string var, FormulaPtr body);
FormulaPtr mk_exists(std::string var, FormulaPtr body);

bool equal(const FormulaPtr& a, const FormulaPtr& b);
// Total order for deterministic containers; 0 iff structurally equal.
int compare(const FormulaPtr& a, const FormulaPtr& b);

// ---------------------------------------------------------------------------
// Default rules (Reiter): prerequisite : justifications / consequent.
// Components may contain free variables, implicitly ranging over the declared
// constants of the theory they belong to. Not a Formula connective; the
// semantics is extra-classical.
// ---------------------------------------------------------------------------

struct DefaultRule {
  FormulaPtr prerequisite;
  std::vector<FormulaPtr> justifications;  // non-empty
  FormulaPtr consequent;
  int priority = 0;  // lower = higher priority
};

bool equal(const DefaultRule& a, const DefaultRule& b);

// ---------------------------------------------------------------------------
// Parsing / printing
//
// Grammar (whitespace-insensitive):
//   iff     := implies ('<->' iff)?                 right-associative
//   implies := or ('->' implies)?                   right-associative
//   or      := and ('|' and)*                       left-associative
//   and     := unary ('&' unary)*                   left-associative
//   unary   := '~' unary | quant | primary
//   quant   := ('forall' | 'exists') VAR '.' iff    scope maximal to the right
//   primary := '(' iff ')' | NAME ('(' term (',' term)* ')')?
// Precedence: ~ > & > | > -> > <->.
// ---------------------------------------------------------------------------

// Parses a formula. All variables must be bound by a quantifier; metavariables
// are accepted. Throws ParseError / UnboundVariableError.
FormulaPtr parse_formula(const std::string& text);

// Parses `prereq : just1, just2 / conseq [@ priority]`. Free variables are
// allowed (they are the default's parameters).
DefaultRule parse_default(const std::string& text);

// True if the text looks like a default rule rather than a formula (contains
// the ':' ... '/' skeleton at top level).
bool looks_like_default(const std::string& text);

// Canonical text with minimal parentheses; parse_formula(render_formula(f))
// is structurally equal to f.
std::string render_formula(const FormulaPtr& f);
std::string render_default(const DefaultRule& d);

// ---------------------------------------------------------------------------
// Substitution and one-way schema matching
// ---------------------------------------------------------------------------

struct Substitution {
  std::map<std::string, FormulaPtr> formulas;     // formula metavar -> formula
  std::map<std::string, std::string> predicates;  // predicate metavar -> predicate name
  std::map<std::string, Term> terms;              // term metavar or variable -> term

  bool empty() const { return formulas.empty() && predicates.empty() && terms.empty(); }
};

// One-way syntactic match of a schema (with metavariables) against a concrete
// instance. Bound variable names must match exactly; no equivalence closure.
// Returns the unique most-general match, or nullopt.
std::optional<Substitution> match_schema(const FormulaPtr& schema, const FormulaPtr& instance);

// Extends `subst` in place; fails (returns false) on conflict.
bool match_schema_into(const FormulaPtr& schema, const FormulaPtr& instance, Substitution& subst);

struct BoundRename {
  std::string from, to;
};

// Capture-avoiding substitution. Metavariables not in the substitution are
// left in place. If a bound variable must be renamed to avoid capture, the
// rename is appended to *renames (when given).
FormulaPtr apply_substitution(const FormulaPtr& f, const Substitution& s,
                              std::vector<BoundRename>* renames = nullptr);

DefaultRule apply_substitution(const DefaultRule& d, const Substitution& s);

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

std::set<std::string> free_variables(const FormulaPtr& f);
bool is_closed(const FormulaPtr& f);
bool is_quantifier_free(const FormulaPtr& f);
// All atoms 0-ary and no quantifiers/metavariables.
bool is_propositional(const FormulaPtr& f);
bool contains_metavariables(const FormulaPtr& f);

// Distinct 0-ary atom labels / predicate name->arity map / constant names.
void collect_atoms(const FormulaPtr& f, std::set<std::string>& out);
void collect_predicates(const FormulaPtr& f, std::map<std::string, int>& out);
void collect_constants(const FormulaPtr& f, std::set<std::string>& out);

// Checks every predicate is used with one arity across the given formulas;
// returns the offending name if not.
std::optional<std::string> arity_conflict(const std::vector<FormulaPtr>& formulas);

// Strips an outer Not, or returns nullptr if f is not a negation.
FormulaPtr negated_body(const FormulaPtr& f);

}  // namespace symlog
