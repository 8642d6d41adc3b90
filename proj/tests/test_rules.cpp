#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symlog/oracle.hpp"
#include "symlog/rules.hpp"

using namespace symlog;

namespace {

std::vector<FormulaPtr> parse_all(const std::vector<std::string>& texts) {
  std::vector<FormulaPtr> out;
  for (const auto& t : texts) out.push_back(parse_formula(t));
  return out;
}

}  // namespace

TEST_CASE("catalog counts per family") {
  CHECK(catalog().by_family(RuleFamily::PL).size() == 12);
  CHECK(catalog().by_family(RuleFamily::FOL).size() == 13);
  CHECK(catalog().by_family(RuleFamily::MV).size() == 7);
  CHECK(catalog().by_family(RuleFamily::NM).size() == 8);
  CHECK(catalog().rules().size() == 40);
  CHECK(catalog().by_class(LogicClass::PL).size() == 12);
  CHECK(catalog().by_class(LogicClass::FOL).size() == 20);  // FOL variants + MV
  CHECK(catalog().by_class(LogicClass::NM).size() == 8);
}

TEST_CASE("catalog order is fixed and ids unique") {
  std::vector<std::string> expected_head = {"MP", "MT", "HS", "DS", "CD", "DD",
                                            "BD", "CT", "DMT", "CO", "IM", "MI"};
  for (std::size_t i = 0; i < expected_head.size(); ++i) {
    CHECK(catalog().rules()[i].id == expected_head[i]);
  }
  std::set<std::string> ids;
  for (const auto& r : catalog().rules()) ids.insert(r.id);
  CHECK(ids.size() == catalog().rules().size());
  CHECK(catalog().get("ZZZ") == nullptr);
}

TEST_CASE("MV5 schema matches its shape") {
  const RuleSchema* mv5 = catalog().get("MV5");
  REQUIRE(mv5 != nullptr);
  REQUIRE(mv5->premise_schemas.size() == 2);
  CHECK(render_formula(mv5->premise_schemas[0]) == "forall x. P(x) -> exists y. R(y, x)");
  CHECK(render_formula(mv5->premise_schemas[1]) == "P(A)");
  CHECK(render_formula(mv5->conclusion_schema) == "exists z. R(z, A)");
}

TEST_CASE("apply_rule examples") {
  auto mp = apply_rule("MP", parse_all({"rain -> wet", "rain"}));
  REQUIRE(mp.size() == 1);
  CHECK(render_formula(mp[0]) == "wet");

  auto ds = apply_rule("DS", parse_all({"p | q", "~p"}));
  REQUIRE(ds.size() == 1);
  CHECK(render_formula(ds[0]) == "q");

  CHECK(apply_rule("MT", parse_all({"p -> q", "p"})).empty());
  CHECK_THROWS_AS(apply_rule("ZZZ", parse_all({"p"})), UnknownRuleError);
}

TEST_CASE("bidirectional rules apply in both directions") {
  auto fwd = apply_rule("MI", parse_all({"p -> q"}));
  REQUIRE(fwd.size() == 1);
  CHECK(render_formula(fwd[0]) == "~p | q");
  auto rev = apply_rule("MI", parse_all({"~p | q"}));
  REQUIRE(rev.size() == 1);
  CHECK(render_formula(rev[0]) == "p -> q");
}

TEST_CASE("UI instantiates the reserved arbitrary constant") {
  auto ui = apply_rule("UI", parse_all({"forall x. p(x)"}));
  REQUIRE(ui.size() == 1);
  CHECK(render_formula(ui[0]) == "p(arb)");

  // With constants in the matched premises they are used instead.
  auto mp = apply_rule("MP_F", parse_all({"forall x. (p(x) -> q(x))", "p(a)"}));
  REQUIRE(mp.size() == 1);
  CHECK(render_formula(mp[0]) == "q(a)");
}

TEST_CASE("applicable_rules enumerates (rule, tuple, conclusion) hits") {
  std::vector<FormulaPtr> premises = parse_all({"p -> q", "p"});
  auto hits = applicable_rules(premises, {LogicClass::PL});
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].rule_id == "MP");
  CHECK(hits[0].premise_indices == std::vector<int>{0, 1});
  CHECK(render_formula(hits[0].conclusion) == "q");
  CHECK(hits[1].rule_id == "MI");
  CHECK(hits[1].premise_indices == std::vector<int>{0});
  CHECK(render_formula(hits[1].conclusion) == "~p | q");

  CHECK(applicable_rules({}, {LogicClass::PL}).empty());

  auto hs = applicable_rules(parse_all({"p -> q", "q -> r"}), {LogicClass::PL});
  bool found_hs = false;
  for (const auto& h : hs) {
    if (h.rule_id == "HS" && h.premise_indices == std::vector<int>{0, 1}) {
      found_hs = true;
      CHECK(render_formula(h.conclusion) == "p -> r");
    }
  }
  CHECK(found_hs);
}

TEST_CASE("applicable_rules output is deterministic and consistent with apply_rule") {
  std::vector<FormulaPtr> premises =
      parse_all({"p -> q", "p", "q -> r", "~r", "p | q", "~(p & q)"});
  auto a = applicable_rules(premises, {LogicClass::PL});
  auto b = applicable_rules(premises, {LogicClass::PL});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rule_id == b[i].rule_id);
    CHECK(a[i].premise_indices == b[i].premise_indices);
    CHECK(equal(a[i].conclusion, b[i].conclusion));
  }
  // Every hit's conclusion is reproduced by apply_rule on the same tuple.
  for (const auto& h : a) {
    std::vector<FormulaPtr> tuple;
    for (int i : h.premise_indices) tuple.push_back(premises[static_cast<std::size_t>(i)]);
    auto out = apply_rule(h.rule_id, tuple);
    bool found = false;
    for (const auto& f : out) found = found || equal(f, h.conclusion);
    CHECK(found);
  }
}

TEST_CASE("PL soundness: truth tables confirm every schema, both directions") {
  for (const RuleSchema* rule : catalog().by_class(LogicClass::PL)) {
    for (const RuleDirection& dir : rule->directions()) {
      // Instantiate each formula metavariable with a distinct fresh atom.
      Substitution s;
      int fresh = 0;
      std::vector<FormulaPtr> all = dir.premises;
      all.push_back(dir.conclusion);
      for (const auto& f : all) {
        struct W {
          static void go(const FormulaPtr& f, Substitution& s, int& fresh) {
            if (f->kind == Formula::Kind::MetaVar) {
              if (!s.formulas.count(f->label)) {
                s.formulas[f->label] = mk_atom("z" + std::to_string(fresh++));
              }
              return;
            }
            if (f->lhs) go(f->lhs, s, fresh);
            if (f->rhs) go(f->rhs, s, fresh);
          }
        };
        W::go(f, s, fresh);
      }
      std::vector<FormulaPtr> premises;
      for (const auto& p : dir.premises) premises.push_back(apply_substitution(p, s));
      FormulaPtr conclusion = apply_substitution(dir.conclusion, s);
      EntailmentVerdict v = pl_entails(premises, conclusion);
      CAPTURE(rule->id);
      CHECK(v.entailed());
    }
  }
}

TEST_CASE("NM schemas carry default templates") {
  const RuleSchema* drd = catalog().get("DRD");
  REQUIRE(drd != nullptr);
  REQUIRE(drd->is_nm());
  CHECK(drd->nm->fact_schemas.size() == 2);
  CHECK(drd->nm->hard_rule_schemas.size() == 1);
  CHECK(drd->nm->default_schemas.size() == 1);
  CHECK(render_formula(drd->conclusion_schema) == "~R(A)");

  const RuleSchema* rap = catalog().get("RAP");
  REQUIRE(rap != nullptr);
  CHECK(rap->nm->default_schemas[1].priority == 1);
}

TEST_CASE("NM rules apply against fact premises and a default pool") {
  std::vector<FormulaPtr> premises = parse_all({"bird(a)"});
  std::vector<DefaultRule> defaults = {parse_default("bird(x) : flies(x) / flies(x)")};
  auto out = apply_rule("REI", premises, defaults);
  REQUIRE(out.size() == 1);
  CHECK(render_formula(out[0]) == "flies(a)");

  auto hits = applicable_rules(premises, {LogicClass::NM}, defaults);
  REQUIRE(!hits.empty());
  CHECK(hits[0].rule_id == "REI");
  CHECK(hits[0].default_indices == std::vector<int>{0});
}

TEST_CASE("rule_matches_step validates premises and conclusion together") {
  const RuleSchema* mp = catalog().get("MP");
  CHECK(rule_matches_step(*mp, parse_all({"p -> q", "p"}), {}, parse_formula("q")));
  CHECK(!rule_matches_step(*mp, parse_all({"p -> q", "q"}), {}, parse_formula("p")));
}
