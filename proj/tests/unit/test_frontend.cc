#include <doctest.h>

#include "hyrec/frontend.hh"
#include "support/testlang.hh"

using namespace hyrec;
using namespace hyrec::test;

TEST_CASE("div parses with the expected signature") {
  Program p = parse_program(kDivSource);
  REQUIRE(p.procedures.size() == 1);
  const Procedure& div = p.procedures[0];
  CHECK(div.name == "div");
  CHECK(div.params == std::vector<std::string>{"n", "d"});
  CHECK(div.outputs == std::vector<std::string>{"q"});
}

TEST_CASE("empty and malformed sources fail with positions") {
  CHECK_THROWS_AS(parse_program(""), ParseError);
  CHECK_THROWS_AS(parse_program("proc f( {"), ParseError);
  CHECK_THROWS_AS(parse_program("proc f() { x := 1; }"), ParseError);  // undeclared
  CHECK_THROWS_AS(parse_program("proc f() { call g(); }"), ParseError);
  try {
    parse_program("proc f() {\n  ?\n}");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("pretty print round-trips structurally") {
  for (const char* src : {kDivSource, kCtxSource}) {
    Program p = parse_program(src);
    Program q = parse_program(pretty_print(p));
    CHECK(pretty_print(p) == pretty_print(q));
  }
}

TEST_CASE("div grammar has the two D-productions shape") {
  Program prog = parse_program(kDivSource);
  CompiledProgram cp = compile_copies(prog, 1, {"div"});
  const Vpg& g = cp.grammars[0];
  CHECK(g.check_uniform());
  // the body nonterminal has exactly two alternatives: the base chain of
  // internals ending eps, and the chain through call div .. ret div
  auto words = vpg_enumerate(g, 10);
  // length 4: call assume(n<d) q:=0 ret
  bool base = false, rec = false;
  for (const Word& w : words) {
    if (w.size() == 4) base = true;
    if (w.size() == 9) rec = true;  // one recursion unrolled
    CHECK(is_well_matched(*cp.sigma, w));
  }
  CHECK(base);
  CHECK(rec);
}

TEST_CASE("straight-line body compiles to a single chain of internals") {
  Program prog = parse_program("proc f(x) returns (y) { y := x + 1; y := y * 2; }");
  CompiledProgram cp = compile_copies(prog, 1, {"f"});
  auto words = vpg_enumerate(cp.grammars[0], 10);
  REQUIRE(words.size() == 1);
  CHECK(words.begin()->size() == 4);  // call, two assigns, ret
}

TEST_CASE("copies get disjoint alphabets and renamed variables") {
  Program prog = parse_program(kDivSource);
  CompiledProgram cp = compile_copies(prog, 2, {"div", "div"});
  CHECK(cp.sigma->num_components() == 2);
  std::set<int> comps;
  for (LetterId a = 0; a < cp.sigma->size(); ++a) comps.insert(cp.sigma->component(a));
  CHECK(comps == std::set<int>{1, 2});
  CHECK(cp.components[0].vars == std::vector<std::string>{"d1", "n1", "q1"});
  CHECK(cp.components[1].vars == std::vector<std::string>{"d2", "n2", "q2"});
  // interleavings of the two grammars are well-nested by construction
  auto l1 = vpg_enumerate(cp.grammars[0], 4);
  auto l2 = vpg_enumerate(cp.grammars[1], 4);
  REQUIRE(!l1.empty());
  REQUIRE(!l2.empty());
  Word w = *l1.begin();
  w.insert(w.end(), l2.begin()->begin(), l2.begin()->end());
  CHECK(is_well_nested(*cp.sigma, w));
  // k = 1 is identity up to renaming
  CompiledProgram one = compile_copies(prog, 1, {"div"});
  CHECK(vpg_enumerate(one.grammars[0], 9).size() ==
        vpg_enumerate(cp.grammars[0], 9).size());
}

TEST_CASE("k = 3 matches the distributivity naming") {
  Program prog = parse_program(kDivSource);
  CompiledProgram cp = compile_copies(prog, 3, {"div", "div", "div"});
  CHECK(cp.components.size() == 3);
  CHECK(cp.components[2].vars == std::vector<std::string>{"d3", "n3", "q3"});
}

TEST_CASE("grammar runs are interprocedurally realizable") {
  Program prog = parse_program(kDivSource);
  CompiledProgram cp = compile_copies(prog, 1, {"div"});
  for (const Word& w : vpg_enumerate(cp.grammars[0], 14)) {
    // every call's matching return closes the same procedure
    MatchingRelation m = matching_of(*cp.sigma, w);
    for (int i = 0; i < static_cast<int>(w.size()); ++i) {
      if (cp.sigma->kind(w[i]) != LetterKind::Call) continue;
      REQUIRE(m.match[i] >= 0);
      const Statement& c = cp.payload(w[i]);
      const Statement& r = cp.payload(w[m.match[i]]);
      CHECK(r.kind == Statement::Kind::Ret);
      CHECK(c.proc == r.proc);
    }
  }
}

TEST_CASE("property files parse") {
  HyperProperty p = parse_property("k: 2\npre: (and (<= n1 n2) (= d1 d2))\npost: (<= q1 q2)\n");
  CHECK(p.k == 2);
  CHECK(p.pre == "(and (<= n1 n2) (= d1 d2))");
  CHECK(p.post == "(<= q1 q2)");
}

TEST_CASE("letters_of_procedures finds call and return letters per copy") {
  Program prog = parse_program(kCtxSource);
  CompiledProgram cp = compile_copies(prog, 2, {"main", "main"});
  auto ls = letters_of_procedures(cp, {"set"});
  CHECK(ls.size() == 4);  // call/ret for set in both copies
  for (LetterId a : ls) CHECK(cp.sigma->kind(a) != LetterKind::Internal);
}
