#include <doctest.h>

#include "coplan/ltl.hpp"
#include "support.hpp"

using namespace coplan::ltl;

TEST_CASE("parser: base case and quoted atoms") {
  CHECK(parse_ltl("true")->op == Op::True);
  auto f = parse_ltl("G F \"2-pi3\"");
  REQUIRE(f->op == Op::Always);
  REQUIRE(f->lhs->op == Op::Eventually);
  CHECK(f->lhs->lhs->op == Op::Atom);
  CHECK(f->lhs->lhs->name == "2-pi3");
}

TEST_CASE("parser: until binds its right operand") {
  auto f = parse_ltl("a U (b & X a)");
  auto g = mk_binary(Op::Until, mk_atom("a"), mk_binary(Op::And, mk_atom("b"), mk_unary(Op::Next, mk_atom("a"))));
  CHECK(structurally_equal(f, g));
}

TEST_CASE("parser: errors") {
  CHECK_THROWS_AS(parse_ltl("a &"), ParseError);
  CHECK_THROWS_AS(parse_ltl("(a"), ParseError);
  CHECK_THROWS_AS(parse_ltl("\"x"), ParseError);
  CHECK_THROWS_AS(parse_ltl("c", {"a", "b"}), ParseError);
  CHECK_NOTHROW(parse_ltl("a U b", {"a", "b"}));
}

TEST_CASE("printing round-trips") {
  for (auto& f : testsupport::nnf_corpus()) CHECK(structurally_equal(parse_ltl(to_string(f)), f));
  auto f = parse_ltl("(G !\"1-pi3\") & G(\"O1-pi1\" -> X \"O1-pi4\")");
  CHECK(structurally_equal(parse_ltl(to_string(f)), f));
}

TEST_CASE("nnf examples") {
  CHECK(structurally_equal(to_nnf(parse_ltl("!G a")), mk_binary(Op::Until, mk_true(), mk_unary(Op::Not, mk_atom("a")))));
  CHECK(structurally_equal(to_nnf(parse_ltl("a")), mk_atom("a")));
  CHECK(structurally_equal(to_nnf(parse_ltl("!(a U b)")),
                           mk_binary(Op::Release, mk_unary(Op::Not, mk_atom("a")), mk_unary(Op::Not, mk_atom("b")))));
}

TEST_CASE("nnf preserves meaning and shape") {
  auto words = testsupport::all_lassos({"a", "b"}, 2, 2);
  const char* fs[] = {"!(a U b)", "!(G F a -> F b)", "!X(a R !b)", "!(a -> X b) | !F(a & b)", "!G(a -> X F b)"};
  for (auto s : fs) {
    auto f = parse_ltl(s), g = to_nnf(f);
    CHECK(is_nnf(g));
    for (auto& w : words) CHECK(holds_on_lasso(f, w) == holds_on_lasso(g, w));
  }
}

TEST_CASE("oracle examples") {
  CHECK(holds_on_lasso(parse_ltl("F a"), {{{}}, {{"a"}}}));
  CHECK_FALSE(holds_on_lasso(parse_ltl("X a"), {{{"a"}}, {{}}}));
  CHECK_THROWS(holds_on_lasso(parse_ltl("a"), {{}, {}}));
}

TEST_CASE("true translates to the universal one-state automaton") {
  auto ba = translate_to_buchi(mk_true());
  REQUIRE(ba.num_states == 1);
  CHECK(ba.accepting[0]);
  REQUIRE(ba.transitions.size() == 1);
  CHECK(ba.transitions[0].from == 0);
  CHECK(ba.transitions[0].to == 0);
  CHECK(ba.transitions[0].label.empty());
  CHECK(accepts_lasso(ba, {{{"a"}}, {{}}}));
}

TEST_CASE("G a membership") {
  auto ba = translate_to_buchi(to_nnf(parse_ltl("G a")));
  CHECK(accepts_lasso(ba, {{}, {{"a"}}}));
  CHECK_FALSE(accepts_lasso(ba, {{{"a"}}, {{}}}));
}

TEST_CASE("translation agrees with both oracles on GF a and friends") {
  auto words = testsupport::all_lassos({"a", "b"}, 3, 3);
  for (auto s : {"G F a", "F G a", "a U (b & X a)", "G(a -> X F b)", "(G F a) & (F G !b)"}) {
    auto f = to_nnf(parse_ltl(s));
    auto ba = translate_to_buchi(f);
    for (auto& w : words) {
      bool want = testsupport::naive_holds(f, w);
      REQUIRE(holds_on_lasso(f, w) == want);
      REQUIRE(accepts_lasso(ba, w) == want);
    }
  }
}

TEST_CASE("no contradictory labels") {
  for (auto& f : testsupport::nnf_corpus()) {
    auto ba = translate_to_buchi(f);
    for (auto& t : ba.transitions)
      for (auto& l : t.label) CHECK(std::find(t.label.begin(), t.label.end(), Literal{l.atom, !l.positive}) == t.label.end());
  }
}

TEST_CASE("case i specification automaton") {
  auto f = parse_ltl(
      "(G !\"1-pi3\") & (G F \"2-pi3\") & (G F \"O1-pi1\") & G(\"O1-pi1\" -> X \"O1-pi4\") & (F \"O2-pi4\")");
  auto ba = translate_to_buchi(to_nnf(f));
  MESSAGE("case i BA: " << ba.num_states << " states, " << ba.num_transitions() << " transitions");
  CHECK(ba.num_states > 0);
  std::set<std::string> atoms = atoms_of(f);
  CHECK(atoms.size() == 5);
  Letter good2{"2-pi3"}, o1{"O1-pi1"}, o4{"O1-pi4", "O2-pi4"};
  CHECK(accepts_lasso(ba, {{}, {good2, o1, o4}}));
  Letter bad{"1-pi3", "2-pi3"};
  CHECK_FALSE(accepts_lasso(ba, {{bad}, {good2, o1, o4}}));
}
