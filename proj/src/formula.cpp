#include "symlog/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace symlog {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string found, std::vector<std::string> expected)
    : Error("syntax error at byte " + std::to_string(offset) + ": found " + found +
            ", expected " + join(expected, " | ")),
      offset(offset),
      found(std::move(found)),
      expected(std::move(expected)) {}

UnboundVariableError::UnboundVariableError(std::size_t offset, const std::string& name)
    : Error("unbound variable '" + name + "' at byte " + std::to_string(offset)),
      offset(offset),
      name(name) {}

bool is_variable_name(const std::string& name) {
  return !name.empty() && name[0] >= 'u' && name[0] <= 'z';
}

bool is_meta_name(const std::string& name) {
  return !name.empty() && name[0] >= 'A' && name[0] <= 'Z';
}

bool is_object_name(const std::string& name) {
  if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

Term make_term(const std::string& name) {
  if (is_meta_name(name)) return Term{TermKind::Meta, name};
  if (is_variable_name(name)) return Term{TermKind::Variable, name};
  return Term{TermKind::Constant, name};
}

// --------------------------------------------------------------------------
// Factories
// --------------------------------------------------------------------------

namespace {

FormulaPtr node(Formula::Kind kind, std::string label, std::vector<Term> args, FormulaPtr lhs,
                FormulaPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->label = std::move(label);
  f->args = std::move(args);
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

}  // namespace

FormulaPtr mk_atom(std::string name, std::vector<Term> args) {
  if (is_meta_name(name) && args.empty()) return mk_meta(std::move(name));
  return node(Formula::Kind::Atom, std::move(name), std::move(args), nullptr, nullptr);
}

FormulaPtr mk_meta(std::string name) {
  return node(Formula::Kind::MetaVar, std::move(name), {}, nullptr, nullptr);
}

FormulaPtr mk_not(FormulaPtr f) {
  return node(Formula::Kind::Not, "", {}, std::move(f), nullptr);
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  return node(Formula::Kind::And, "", {}, std::move(a), std::move(b));
}

FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
  return node(Formula::Kind::Or, "", {}, std::move(a), std::move(b));
}

FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
  return node(Formula::Kind::Implies, "", {}, std::move(a), std::move(b));
}

FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) {
  return node(Formula::Kind::Iff, "", {}, std::move(a), std::move(b));
}

FormulaPtr mk_forall(std::string var, FormulaPtr body) {
  return node(Formula::Kind::ForAll, std::move(var), {}, std::move(body), nullptr);
}

FormulaPtr mk_exists(std::string var, FormulaPtr body) {
  return node(Formula::Kind::Exists, std::move(var), {}, std::move(body), nullptr);
}

// --------------------------------------------------------------------------
// Structural comparison
// --------------------------------------------------------------------------

namespace {

int cmp_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind) return a[i].kind < b[i].kind ? -1 : 1;
    int c = a[i].name.compare(b[i].name);
    if (c) return c < 0 ? -1 : 1;
  }
  return 0;
}

}  // namespace

int compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return 0;
  if (!a || !b) return !a ? -1 : 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  int c = a->label.compare(b->label);
  if (c) return c < 0 ? -1 : 1;
  c = cmp_terms(a->args, b->args);
  if (c) return c;
  c = compare(a->lhs, b->lhs);
  if (c) return c;
  return compare(a->rhs, b->rhs);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) { return compare(a, b) == 0; }

bool equal(const DefaultRule& a, const DefaultRule& b) {
  if (a.priority != b.priority) return false;
  if (!equal(a.prerequisite, b.prerequisite) || !equal(a.consequent, b.consequent)) return false;
  if (a.justifications.size() != b.justifications.size()) return false;
  for (std::size_t i = 0; i < a.justifications.size(); ++i) {
    if (!equal(a.justifications[i], b.justifications[i])) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// Lexer
// --------------------------------------------------------------------------

namespace {

enum class Tok {
  LParen,
  RParen,
  Comma,
  Dot,
  Tilde,
  Amp,
  Pipe,
  Arrow,
  DArrow,  // <->
  Colon,
  Slash,
  At,
  Ident,
  Number,
  End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::DArrow: return "'<->'";
    case Tok::Colon: return "':'";
    case Tok::Slash: return "'/'";
    case Tok::At: return "'@'";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t at = i;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", at}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", at}); ++i; continue;
      case ',': out.push_back({Tok::Comma, ",", at}); ++i; continue;
      case '.': out.push_back({Tok::Dot, ".", at}); ++i; continue;
      case '~': out.push_back({Tok::Tilde, "~", at}); ++i; continue;
      case '&': out.push_back({Tok::Amp, "&", at}); ++i; continue;
      case '|': out.push_back({Tok::Pipe, "|", at}); ++i; continue;
      case ':': out.push_back({Tok::Colon, ":", at}); ++i; continue;
      case '/': out.push_back({Tok::Slash, "/", at}); ++i; continue;
      case '@': out.push_back({Tok::At, "@", at}); ++i; continue;
      case '-':
        if (i + 1 < n && s[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", at});
          i += 2;
          continue;
        }
        throw ParseError(at, "'-'", {"'->'"});
      case '<':
        if (i + 2 < n && s[i + 1] == '-' && s[i + 2] == '>') {
          out.push_back({Tok::DArrow, "<->", at});
          i += 3;
          continue;
        }
        throw ParseError(at, "'<'", {"'<->'"});
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), at});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, s.substr(i, j - i), at});
      i = j;
      continue;
    }
    throw ParseError(at, "'" + std::string(1, c) + "'", {"formula token"});
  }
  out.push_back({Tok::End, "", n});
  return out;
}

// --------------------------------------------------------------------------
// Parser
// --------------------------------------------------------------------------

class Parser {
 public:
  Parser(const std::string& text, bool allow_free_vars)
      : tokens_(lex(text)), allow_free_vars_(allow_free_vars) {}

  FormulaPtr parse_full() {
    FormulaPtr f = parse_iff();
    expect(Tok::End);
    return f;
  }

  FormulaPtr parse_iff() {
    FormulaPtr left = parse_implies();
    if (peek().kind == Tok::DArrow) {
      advance();
      return mk_iff(left, parse_iff());
    }
    return left;
  }

  const Token& peek() const { return tokens_[pos_]; }
  void advance() { ++pos_; }

  void expect(Tok t) {
    if (peek().kind != t) fail({tok_name(t)});
    advance();
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.offset, found, std::move(expected));
  }

 private:
  FormulaPtr parse_implies() {
    FormulaPtr left = parse_or();
    if (peek().kind == Tok::Arrow) {
      advance();
      return mk_implies(left, parse_implies());
    }
    return left;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (peek().kind == Tok::Pipe) {
      advance();
      f = mk_or(f, parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (peek().kind == Tok::Amp) {
      advance();
      f = mk_and(f, parse_unary());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Tilde) {
      advance();
      return mk_not(parse_unary());
    }
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
      bool universal = t.text == "forall";
      advance();
      const Token& v = peek();
      if (v.kind != Tok::Ident) fail({"variable"});
      if (!is_variable_name(v.text) || is_meta_name(v.text)) {
        throw ParseError(v.offset, "'" + v.text + "'", {"variable (name starting with u..z)"});
      }
      std::string var = v.text;
      advance();
      expect(Tok::Dot);
      bound_.push_back(var);
      FormulaPtr body = parse_iff();  // quantifier scope extends maximally right
      bound_.pop_back();
      return universal ? mk_forall(var, body) : mk_exists(var, body);
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      FormulaPtr f = parse_iff();
      expect(Tok::RParen);
      return f;
    }
    if (t.kind != Tok::Ident) fail({"formula"});
    if (t.text == "forall" || t.text == "exists") fail({"formula"});
    std::string name = t.text;
    std::size_t name_off = t.offset;
    advance();
    if (!is_meta_name(name) && !is_object_name(name)) {
      throw ParseError(name_off, "'" + name + "'", {"identifier ([a-z][a-zA-Z0-9_]* or uppercase metavariable)"});
    }
    if (peek().kind != Tok::LParen) {
      if (is_meta_name(name)) return mk_meta(name);
      return mk_atom(name);
    }
    advance();
    std::vector<Term> args;
    while (true) {
      const Token& a = peek();
      if (a.kind != Tok::Ident) fail({"term"});
      Term term = make_term(a.text);
      if (term.kind == TermKind::Variable && !in_scope(a.text) && !allow_free_vars_) {
        throw UnboundVariableError(a.offset, a.text);
      }
      args.push_back(term);
      advance();
      if (peek().kind == Tok::Comma) {
        advance();
        continue;
      }
      expect(Tok::RParen);
      break;
    }
    return mk_atom(name, std::move(args));
  }

  bool in_scope(const std::string& v) const {
    return std::find(bound_.begin(), bound_.end(), v) != bound_.end();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
  bool allow_free_vars_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  Parser p(text, /*allow_free_vars=*/false);
  return p.parse_full();
}

DefaultRule parse_default(const std::string& text) {
  Parser p(text, /*allow_free_vars=*/true);
  DefaultRule d;
  d.prerequisite = p.parse_iff();
  p.expect(Tok::Colon);
  while (true) {
    d.justifications.push_back(p.parse_iff());
    if (p.peek().kind == Tok::Comma) {
      p.advance();
      continue;
    }
    break;
  }
  p.expect(Tok::Slash);
  d.consequent = p.parse_iff();
  if (p.peek().kind == Tok::At) {
    p.advance();
    if (p.peek().kind != Tok::Number) p.fail({"priority (non-negative integer)"});
    d.priority = std::stoi(p.peek().text);
    p.advance();
  }
  p.expect(Tok::End);
  return d;
}

bool looks_like_default(const std::string& text) {
  int depth = 0;
  bool saw_colon = false;
  for (char c : text) {
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (depth == 0 && c == ':') saw_colon = true;
    else if (depth == 0 && c == '/' && saw_colon) return true;
  }
  return false;
}

// --------------------------------------------------------------------------
// Renderer: minimal parentheses per the precedence table. Quantifiers print
// bare only in rightmost-spine positions (their scope extends maximally).
// --------------------------------------------------------------------------

namespace {

int level_of(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not: return 5;
    default: return 6;  // atoms, metavariables
  }
}

void render(const FormulaPtr& f, int min_level, bool open_right, std::string& out) {
  if (f->is_quantifier()) {
    if (!open_right) {
      out += '(';
      render(f, 0, true, out);
      out += ')';
      return;
    }
    out += f->kind == Formula::Kind::ForAll ? "forall " : "exists ";
    out += f->label;
    out += ". ";
    render(f->lhs, 0, true, out);
    return;
  }
  int lvl = level_of(f);
  bool parens = lvl < min_level;
  if (parens) {
    out += '(';
    min_level = 0;
    open_right = true;
  }
  switch (f->kind) {
    case Formula::Kind::Atom: {
      out += f->label;
      if (!f->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ", ";
          out += f->args[i].name;
        }
        out += ')';
      }
      break;
    }
    case Formula::Kind::MetaVar: out += f->label; break;
    case Formula::Kind::Not:
      out += '~';
      render(f->lhs, 5, false, out);
      break;
    case Formula::Kind::And:
      // left-associative: same-level left child stays bare, right child needs parens
      render(f->lhs, 4, false, out);
      out += " & ";
      render(f->rhs, 5, open_right, out);
      break;
    case Formula::Kind::Or:
      render(f->lhs, 3, false, out);
      out += " | ";
      render(f->rhs, 4, open_right, out);
      break;
    case Formula::Kind::Implies:
      render(f->lhs, 3, false, out);
      out += " -> ";
      render(f->rhs, 2, open_right, out);
      break;
    case Formula::Kind::Iff:
      render(f->lhs, 2, false, out);
      out += " <-> ";
      render(f->rhs, 1, open_right, out);
      break;
    default: break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string render_formula(const FormulaPtr& f) {
  std::string out;
  render(f, 0, true, out);
  return out;
}

std::string render_default(const DefaultRule& d) {
  std::string out = render_formula(d.prerequisite);
  out += " : ";
  for (std::size_t i = 0; i < d.justifications.size(); ++i) {
    if (i) out += ", ";
    out += render_formula(d.justifications[i]);
  }
  out += " / ";
  out += render_formula(d.consequent);
  if (d.priority != 0) out += " @ " + std::to_string(d.priority);
  return out;
}

// --------------------------------------------------------------------------
// Matching
// --------------------------------------------------------------------------

namespace {

bool match_term(const Term& schema, const Term& inst, Substitution& s) {
  if (schema.kind == TermKind::Meta) {
    auto it = s.terms.find(schema.name);
    if (it != s.terms.end()) return it->second == inst;
    s.terms.emplace(schema.name, inst);
    return true;
  }
  return schema == inst;
}

}  // namespace

bool match_schema_into(const FormulaPtr& schema, const FormulaPtr& instance, Substitution& s) {
  switch (schema->kind) {
    case Formula::Kind::MetaVar: {
      auto it = s.formulas.find(schema->label);
      if (it != s.formulas.end()) return equal(it->second, instance);
      s.formulas.emplace(schema->label, instance);
      return true;
    }
    case Formula::Kind::Atom: {
      if (instance->kind != Formula::Kind::Atom) return false;
      if (schema->args.size() != instance->args.size()) return false;
      if (is_meta_name(schema->label)) {
        auto it = s.predicates.find(schema->label);
        if (it != s.predicates.end()) {
          if (it->second != instance->label) return false;
        } else {
          s.predicates.emplace(schema->label, instance->label);
        }
      } else if (schema->label != instance->label) {
        return false;
      }
      for (std::size_t i = 0; i < schema->args.size(); ++i) {
        if (!match_term(schema->args[i], instance->args[i], s)) return false;
      }
      return true;
    }
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      if (instance->kind != schema->kind || instance->label != schema->label) return false;
      return match_schema_into(schema->lhs, instance->lhs, s);
    case Formula::Kind::Not:
      if (instance->kind != Formula::Kind::Not) return false;
      return match_schema_into(schema->lhs, instance->lhs, s);
    default:
      if (instance->kind != schema->kind) return false;
      return match_schema_into(schema->lhs, instance->lhs, s) &&
             match_schema_into(schema->rhs, instance->rhs, s);
  }
}

std::optional<Substitution> match_schema(const FormulaPtr& schema, const FormulaPtr& instance) {
  Substitution s;
  if (match_schema_into(schema, instance, s)) return s;
  return std::nullopt;
}

// --------------------------------------------------------------------------
// Substitution application
// --------------------------------------------------------------------------

namespace {

void free_vars_into(const FormulaPtr& f, std::vector<std::string>& bound,
                    std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const Term& t : f->args) {
        if (t.kind == TermKind::Variable &&
            std::find(bound.begin(), bound.end(), t.name) == bound.end()) {
          out.insert(t.name);
        }
      }
      break;
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      bound.push_back(f->label);
      free_vars_into(f->lhs, bound, out);
      bound.pop_back();
      break;
    case Formula::Kind::Not: free_vars_into(f->lhs, bound, out); break;
    default:
      free_vars_into(f->lhs, bound, out);
      free_vars_into(f->rhs, bound, out);
      break;
  }
}

// Renames free occurrences of `from` to `to`.
FormulaPtr rename_free(const FormulaPtr& f, const std::string& from, const std::string& to) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      bool touched = false;
      std::vector<Term> args = f->args;
      for (Term& t : args) {
        if (t.kind == TermKind::Variable && t.name == from) {
          t.name = to;
          touched = true;
        }
      }
      return touched ? mk_atom(f->label, std::move(args)) : f;
    }
    case Formula::Kind::MetaVar: return f;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      if (f->label == from) return f;  // shadowed
      FormulaPtr body = rename_free(f->lhs, from, to);
      if (body == f->lhs) return f;
      return f->kind == Formula::Kind::ForAll ? mk_forall(f->label, body)
                                              : mk_exists(f->label, body);
    }
    case Formula::Kind::Not: {
      FormulaPtr b = rename_free(f->lhs, from, to);
      return b == f->lhs ? f : mk_not(b);
    }
    default: {
      FormulaPtr l = rename_free(f->lhs, from, to);
      FormulaPtr r = rename_free(f->rhs, from, to);
      if (l == f->lhs && r == f->rhs) return f;
      switch (f->kind) {
        case Formula::Kind::And: return mk_and(l, r);
        case Formula::Kind::Or: return mk_or(l, r);
        case Formula::Kind::Implies: return mk_implies(l, r);
        default: return mk_iff(l, r);
      }
    }
  }
}

struct SubstCtx {
  const Substitution& s;
  std::vector<BoundRename>* renames;
  // Free variables of every replacement formula/term; a quantifier whose
  // bound name occurs here must be renamed before substituting underneath.
  std::set<std::string> incoming;
};

FormulaPtr subst(const FormulaPtr& f, SubstCtx& ctx, std::vector<std::string>& shadowed);

Term subst_term(const Term& t, const SubstCtx& ctx, const std::vector<std::string>& shadowed) {
  if (t.kind == TermKind::Meta) {
    auto it = ctx.s.terms.find(t.name);
    if (it != ctx.s.terms.end()) return it->second;
    return t;
  }
  if (t.kind == TermKind::Variable &&
      std::find(shadowed.begin(), shadowed.end(), t.name) == shadowed.end()) {
    auto it = ctx.s.terms.find(t.name);
    if (it != ctx.s.terms.end()) return it->second;
  }
  return t;
}

FormulaPtr subst(const FormulaPtr& f, SubstCtx& ctx, std::vector<std::string>& shadowed) {
  switch (f->kind) {
    case Formula::Kind::MetaVar: {
      auto it = ctx.s.formulas.find(f->label);
      if (it != ctx.s.formulas.end()) return it->second;
      return f;
    }
    case Formula::Kind::Atom: {
      std::string label = f->label;
      if (is_meta_name(label)) {
        auto it = ctx.s.predicates.find(label);
        if (it != ctx.s.predicates.end()) label = it->second;
      }
      std::vector<Term> args;
      args.reserve(f->args.size());
      for (const Term& t : f->args) args.push_back(subst_term(t, ctx, shadowed));
      return mk_atom(label, std::move(args));
    }
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      std::string var = f->label;
      FormulaPtr body = f->lhs;
      if (ctx.incoming.count(var)) {
        // A replacement carries this variable free: rename the binder with a
        // fresh numeric suffix before substituting underneath.
        std::set<std::string> body_free;
        std::vector<std::string> tmp;
        free_vars_into(body, tmp, body_free);
        std::string base = var;
        while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) {
          base.pop_back();
        }
        if (base.empty()) base = var;
        std::string fresh;
        for (int k = 1;; ++k) {
          fresh = base + std::to_string(k);
          if (!ctx.incoming.count(fresh) && !body_free.count(fresh) && fresh != var) break;
        }
        body = rename_free(body, var, fresh);
        if (ctx.renames) ctx.renames->push_back({var, fresh});
        var = fresh;
      }
      shadowed.push_back(var);
      FormulaPtr new_body = subst(body, ctx, shadowed);
      shadowed.pop_back();
      return f->kind == Formula::Kind::ForAll ? mk_forall(var, new_body)
                                              : mk_exists(var, new_body);
    }
    case Formula::Kind::Not: return mk_not(subst(f->lhs, ctx, shadowed));
    case Formula::Kind::And:
      return mk_and(subst(f->lhs, ctx, shadowed), subst(f->rhs, ctx, shadowed));
    case Formula::Kind::Or:
      return mk_or(subst(f->lhs, ctx, shadowed), subst(f->rhs, ctx, shadowed));
    case Formula::Kind::Implies:
      return mk_implies(subst(f->lhs, ctx, shadowed), subst(f->rhs, ctx, shadowed));
    case Formula::Kind::Iff:
      return mk_iff(subst(f->lhs, ctx, shadowed), subst(f->rhs, ctx, shadowed));
  }
  return f;
}

}  // namespace

FormulaPtr apply_substitution(const FormulaPtr& f, const Substitution& s,
                              std::vector<BoundRename>* renames) {
  SubstCtx ctx{s, renames, {}};
  for (const auto& [k, v] : s.formulas) {
    (void)k;
    std::set<std::string> fv = free_variables(v);
    ctx.incoming.insert(fv.begin(), fv.end());
  }
  for (const auto& [k, t] : s.terms) {
    (void)k;
    if (t.kind == TermKind::Variable) ctx.incoming.insert(t.name);
  }
  std::vector<std::string> shadowed;
  return subst(f, ctx, shadowed);
}

DefaultRule apply_substitution(const DefaultRule& d, const Substitution& s) {
  DefaultRule out;
  out.prerequisite = apply_substitution(d.prerequisite, s);
  for (const auto& j : d.justifications) out.justifications.push_back(apply_substitution(j, s));
  out.consequent = apply_substitution(d.consequent, s);
  out.priority = d.priority;
  return out;
}

// --------------------------------------------------------------------------
// Structural queries
// --------------------------------------------------------------------------

std::set<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_into(f, bound, out);
  return out;
}

bool is_closed(const FormulaPtr& f) { return free_variables(f).empty(); }

bool is_quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::MetaVar: return true;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: return false;
    case Formula::Kind::Not: return is_quantifier_free(f->lhs);
    default: return is_quantifier_free(f->lhs) && is_quantifier_free(f->rhs);
  }
}

bool is_propositional(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom: return f->args.empty() && !is_meta_name(f->label);
    case Formula::Kind::MetaVar: return false;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: return false;
    case Formula::Kind::Not: return is_propositional(f->lhs);
    default: return is_propositional(f->lhs) && is_propositional(f->rhs);
  }
}

bool contains_metavariables(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::MetaVar: return true;
    case Formula::Kind::Atom:
      if (is_meta_name(f->label)) return true;
      for (const Term& t : f->args) {
        if (t.kind == TermKind::Meta) return true;
      }
      return false;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::Not: return contains_metavariables(f->lhs);
    default: return contains_metavariables(f->lhs) || contains_metavariables(f->rhs);
  }
}

void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (f->args.empty()) out.insert(f->label);
      break;
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::Not: collect_atoms(f->lhs, out); break;
    default:
      collect_atoms(f->lhs, out);
      collect_atoms(f->rhs, out);
      break;
  }
}

void collect_predicates(const FormulaPtr& f, std::map<std::string, int>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (!f->args.empty()) out[f->label] = static_cast<int>(f->args.size());
      break;
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::Not: collect_predicates(f->lhs, out); break;
    default:
      collect_predicates(f->lhs, out);
      collect_predicates(f->rhs, out);
      break;
  }
}

void collect_constants(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const Term& t : f->args) {
        if (t.kind == TermKind::Constant) out.insert(t.name);
      }
      break;
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::Not: collect_constants(f->lhs, out); break;
    default:
      collect_constants(f->lhs, out);
      collect_constants(f->rhs, out);
      break;
  }
}

namespace {

void arity_walk(const FormulaPtr& f, std::map<std::string, int>& seen,
                std::optional<std::string>& conflict) {
  if (conflict) return;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto [it, inserted] = seen.emplace(f->label, static_cast<int>(f->args.size()));
      if (!inserted && it->second != static_cast<int>(f->args.size())) conflict = f->label;
      break;
    }
    case Formula::Kind::MetaVar: break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::Not: arity_walk(f->lhs, seen, conflict); break;
    default:
      arity_walk(f->lhs, seen, conflict);
      arity_walk(f->rhs, seen, conflict);
      break;
  }
}

}  // namespace

std::optional<std::string> arity_conflict(const std::vector<FormulaPtr>& formulas) {
  std::map<std::string, int> seen;
  std::optional<std::string> conflict;
  for (const auto& f : formulas) arity_walk(f, seen, conflict);
  return conflict;
}

FormulaPtr negated_body(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Not) return f->lhs;
  return nullptr;
}

}  // namespace symlog
