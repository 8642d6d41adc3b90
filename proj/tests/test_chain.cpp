#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symlog/chain.hpp"
#include "symlog/oracle.hpp"
#include "symlog/rng.hpp"

using namespace symlog;

namespace {

std::vector<std::string> root_renders(const ReasoningChain& chain) {
  std::vector<std::string> out;
  for (const auto& r : chain.root_premises) out.push_back(render_formula(r));
  return out;
}

}  // namespace

TEST_CASE("compose [MP, MP]") {
  ReasoningChain chain = compose_chain({"MP", "MP"}, 0);
  CHECK(chain.depth() == 2);
  CHECK(root_renders(chain) == std::vector<std::string>{"p1 -> p2", "p1", "p2 -> p3"});
  CHECK(render_formula(chain.steps[0].conclusion) == "p2");
  CHECK(render_formula(chain.steps[1].conclusion) == "p3");
  // Threaded premise is marked derived.
  bool has_derived = false;
  for (const auto& p : chain.steps[1].premises) {
    if (p.provenance == Provenance::Derived) {
      has_derived = true;
      CHECK(p.derived_from == 0);
      CHECK(render_formula(p.formula) == "p2");
    }
  }
  CHECK(has_derived);
  CHECK(verify_chain(chain).sound);
}

TEST_CASE("compose [HS, MP]") {
  ReasoningChain chain = compose_chain({"HS", "MP"}, 0);
  CHECK(root_renders(chain) == std::vector<std::string>{"p1 -> p2", "p2 -> p3", "p1"});
  CHECK(render_formula(chain.steps[0].conclusion) == "p1 -> p3");
  CHECK(render_formula(chain.steps[1].conclusion) == "p3");
  CHECK(verify_chain(chain).sound);
}

TEST_CASE("compose [MP, EG] grounds the propositional rule over predicates") {
  ReasoningChain chain = compose_chain({"MP", "EG"}, 0);
  REQUIRE(chain.depth() == 2);
  const FormulaPtr first = chain.steps[0].conclusion;
  CHECK(first->kind == Formula::Kind::Atom);
  CHECK(first->args.size() == 1);
  const FormulaPtr last = chain.steps[1].conclusion;
  CHECK(last->kind == Formula::Kind::Exists);
  CHECK(last->lhs->label == first->label);
  CHECK(verify_chain(chain).sound);
}

TEST_CASE("compose rejects incompatible adjacency") {
  CHECK_THROWS_AS(compose_chain({"MP", "UI"}, 0), CompositionError);
  try {
    compose_chain({"MP", "UI"}, 0);
  } catch (const CompositionError& e) {
    std::string msg = e.what();
    CHECK(msg.find("UI") != std::string::npos);
    CHECK(msg.find("MP") != std::string::npos);
  }
}

TEST_CASE("compose validates sequence length") {
  CHECK_THROWS_AS(compose_chain({"MP"}, 0), CompositionError);
  CHECK_THROWS_AS(compose_chain(std::vector<std::string>(10, "MP"), 0), CompositionError);
}

TEST_CASE("sample_chain determinism") {
  ChainConfig cfg;
  ReasoningChain a = sample_chain(2, LogicClass::PL, 7, cfg);
  ReasoningChain b = sample_chain(2, LogicClass::PL, 7, cfg);
  REQUIRE(a.depth() == b.depth());
  for (int i = 0; i < a.depth(); ++i) {
    CHECK(a.steps[i].rule_id == b.steps[i].rule_id);
    CHECK(equal(a.steps[i].conclusion, b.steps[i].conclusion));
  }
  bool differs = false;
  for (std::uint64_t seed = 8; seed < 16 && !differs; ++seed) {
    ReasoningChain c = sample_chain(2, LogicClass::PL, seed, cfg);
    differs = c.steps[0].rule_id != a.steps[0].rule_id ||
              c.steps[1].rule_id != a.steps[1].rule_id;
  }
  CHECK(differs);  // other seeds give other draws
}

TEST_CASE("sample_chain honors depth exactly") {
  ChainConfig cfg;
  for (int depth = 2; depth <= 9; ++depth) {
    ReasoningChain chain = sample_chain(depth, LogicClass::PL, 1000 + depth, cfg);
    CHECK(chain.depth() == depth);
  }
  CHECK(sample_chain(9, LogicClass::FOL, 5, cfg).depth() == 9);
  CHECK(sample_chain(9, LogicClass::NM, 5, cfg).depth() == 9);
  CHECK_THROWS_AS(sample_chain(1, LogicClass::PL, 5, cfg), CompositionError);
  CHECK_THROWS_AS(sample_chain(10, LogicClass::PL, 5, cfg), CompositionError);
}

TEST_CASE("sample_chain restricts rules to the requested class") {
  ChainConfig cfg;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ReasoningChain chain = sample_chain(3, LogicClass::FOL, seed, cfg);
    for (const auto& s : chain.steps) {
      if (s.step_type == StepType::Heuristic) continue;
      const RuleSchema* r = catalog().get(s.rule_id);
      REQUIRE(r != nullptr);
      CHECK(r->logic_class == LogicClass::FOL);
    }
  }
}

TEST_CASE("sampled chains verify sound across classes and depths") {
  ChainConfig cfg;
  cfg.heuristic_rate = 0.15;
  int checked = 0;
  for (LogicClass cls : {LogicClass::PL, LogicClass::FOL, LogicClass::NM}) {
    for (int depth = 2; depth <= 9; ++depth) {
      for (std::uint64_t k = 0; k < 8; ++k) {
        std::uint64_t seed = mix_seed(k * 100 + depth, to_string(cls));
        ReasoningChain chain = sample_chain(depth, cls, seed, cfg);
        VerificationReport rep = verify_chain(chain);
        CAPTURE(to_string(cls));
        CAPTURE(depth);
        CAPTURE(seed);
        CAPTURE(rep.reason);
        REQUIRE(rep.sound);
        CHECK(chain_connected(chain));
        ++checked;
      }
    }
  }
  CHECK(checked == 3 * 8 * 8);
}

TEST_CASE("root premises grow with depth and are all used") {
  ChainConfig cfg;
  ReasoningChain shallow = sample_chain(2, LogicClass::PL, 42, cfg);
  ReasoningChain deep = sample_chain(9, LogicClass::PL, 42, cfg);
  CHECK(deep.root_premises.size() > shallow.root_premises.size());
  CHECK(chain_connected(deep));
}

TEST_CASE("fresh symbols are injective unless threading shares them") {
  ReasoningChain chain = sample_chain(6, LogicClass::PL, 17, ChainConfig{});
  // Root premises are pairwise distinct by construction.
  std::set<std::string> seen;
  for (const auto& r : chain.root_premises) {
    CHECK(seen.insert(render_formula(r)).second);
  }
}

TEST_CASE("heuristic steps appear at interior positions and bridge terminal rules") {
  ChainConfig cfg;
  cfg.heuristic_rate = 0.5;
  int heuristic_steps = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    ReasoningChain chain = sample_chain(5, LogicClass::FOL, seed, cfg);
    for (const auto& s : chain.steps) {
      if (s.step_type == StepType::Heuristic) {
        ++heuristic_steps;
        CHECK(s.index > 0);
        CHECK(s.index < chain.depth() - 1);
        CHECK(s.rule_id == kHeuristicRuleId);
      }
    }
    CHECK(verify_chain(chain).sound);
  }
  CHECK(heuristic_steps > 0);
}

TEST_CASE("NM chains carry default rules and their conclusions hold in the preferred extension") {
  ReasoningChain chain = sample_chain(4, LogicClass::NM, 23, ChainConfig{});
  CHECK(!chain.root_defaults.empty());
  bool any_nm = false;
  for (const auto& s : chain.steps) {
    if (!s.defaults.empty()) any_nm = true;
  }
  CHECK(any_nm);
  CHECK(verify_chain(chain).sound);
}
