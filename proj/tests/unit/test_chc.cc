#include <doctest.h>

#include "hyrec/chc.hh"
#include "hyrec/reduction.hh"
#include "support/ground_chc.hh"
#include "support/testlang.hh"

using namespace hyrec;
using namespace hyrec::test;

namespace {

CompiledProgram div_copies(int k) {
  Program prog = parse_program(kDivSource);
  std::vector<std::string> entries(k, "div");
  return compile_copies(prog, k, entries);
}

Vpa div_lockstep_product(const CompiledProgram& cp) {
  std::map<int, Vpg> inputs;
  for (size_t i = 0; i < cp.grammars.size(); ++i)
    inputs.emplace(static_cast<int>(i) + 1, cp.grammars[i]);
  ReductionExpr expr =
      ReductionExpr::make_lockstep({1, 1}, {ReductionExpr::make_leaf(1),
                                            ReductionExpr::make_leaf(2)});
  EvalResult r = evaluate(expr, inputs, EvalMode::Aut);
  return *r.vpa;
}

}  // namespace

TEST_CASE("sexpr parse and print round trip") {
  Term t = parse_sexpr("(and (<= n1 n2) (= d1 d2))");
  CHECK(t.str() == "(and (<= n1 n2) (= d1 d2))");
  Term r = rename_syms(t, {{"n1", Term::S("n1!1")}});
  CHECK(r.str() == "(and (<= n1!1 n2) (= d1 d2))");
  CHECK_THROWS(parse_sexpr("(and (= a b)"));
}

TEST_CASE("nwa clause count equals transitions plus property clauses") {
  CompiledProgram cp = div_copies(2);
  Vpa prod = div_lockstep_product(cp);
  HyperProperty prop;
  prop.k = 2;
  prop.pre = "(and (<= n1 n2) (= d1 d2) (>= d1 1))";
  prop.post = "(<= q1 q2)";
  EncodeStats st;
  ChcSystem sys = encode_nwa(prod, cp, prop, true, &st);
  CHECK(st.clauses == st.transitions + st.initials + st.finals);
  CHECK(st.predicates > 0);
  CHECK(static_cast<int>(sys.clauses.size()) == st.clauses);
}

TEST_CASE("vpg clause count equals productions plus starts") {
  CompiledProgram cp = div_copies(2);
  std::map<int, Vpg> inputs{{1, cp.grammars[0]}, {2, cp.grammars[1]}};
  ReductionExpr expr = ReductionExpr::make_lockstep(
      {1, 1}, {ReductionExpr::make_leaf(1), ReductionExpr::make_leaf(2)});
  Vpg g = vpg_trim(*evaluate(expr, inputs, EvalMode::Direct).vpg);
  HyperProperty prop;
  prop.pre = "(and (<= n1 n2) (= d1 d2))";
  prop.post = "(<= q1 q2)";
  EncodeStats st;
  ChcSystem sys = encode_vpg(g, cp, prop, &st);
  CHECK(st.clauses ==
        static_cast<int>(g.productions().size()) + static_cast<int>(g.starts().size()));
  CHECK(st.predicates == g.num_nonterminals());
  (void)sys;
}

TEST_CASE("serialization is deterministic, HORN-tagged and well-formed") {
  CompiledProgram cp = div_copies(2);
  Vpa prod = div_lockstep_product(cp);
  HyperProperty prop;
  prop.pre = "(<= n1 n2)";
  prop.post = "(<= q1 q2)";
  ChcSystem sys = encode_nwa(prod, cp, prop);
  std::string a = emit_smtlib(sys);
  std::string b = emit_smtlib(encode_nwa(div_lockstep_product(cp), cp, prop));
  CHECK(a == b);
  CHECK(a.find("(set-logic HORN)") == 0);
  CHECK(a.find("(check-sat)") != std::string::npos);
  CHECK(a.find("declare-fun") != std::string::npos);
}

TEST_CASE("eps-only grammar proves reflexive properties") {
  // P over one trivial procedure: run = call f; ret f with y := x inside
  Program prog = parse_program("proc f(x) returns (y) { y := x; }");
  CompiledProgram cp = compile_copies(prog, 1, {"f"});
  HyperProperty prop;
  prop.pre = "true";
  prop.post = "(= y1 x1)";
  EncodeStats st;
  ChcSystem sys = encode_vpg(vpg_trim(cp.grammars[0]), cp, prop, &st);
  CHECK(ground_saturate(sys) == GroundStatus::Sat);
  // and the negation is refuted
  HyperProperty bad;
  bad.pre = "(= x1 1)";
  bad.post = "(= y1 2)";
  ChcSystem sys2 = encode_vpg(vpg_trim(cp.grammars[0]), cp, bad, &st);
  CHECK(ground_saturate(sys2) == GroundStatus::Unsat);
}

TEST_CASE("nwa encoding is exact on a tiny equality fixture") {
  Program prog = parse_program("proc f(x) returns (y) { y := x; }");
  CompiledProgram cp = compile_copies(prog, 1, {"f"});
  Vpa a = vpg_to_vpa(cp.grammars[0]);
  HyperProperty good;
  good.pre = "(= x1 2)";
  good.post = "(= y1 2)";
  CHECK(ground_saturate(encode_nwa(a, cp, good)) == GroundStatus::Sat);
  HyperProperty bad;
  bad.pre = "(= x1 2)";
  bad.post = "(= y1 1)";
  CHECK(ground_saturate(encode_nwa(a, cp, bad)) == GroundStatus::Unsat);
}

TEST_CASE("ghost variable: removing it flips the context-sensitive fixture") {
  // two call sites of set() with different arguments; the post needs the
  // return to flow back to the right site
  Program prog = parse_program(kCtxSource);
  CompiledProgram cp = compile_copies(prog, 1, {"main"});
  Vpa a = vpg_to_vpa(cp.grammars[0]);
  HyperProperty prop;
  prop.pre = "true";
  prop.post = "(and (= a1 1) (= b1 2))";
  ChcSystem with_ghost = encode_nwa(a, cp, prop, true);
  ChcSystem without = encode_nwa(a, cp, prop, false);
  CHECK(ground_saturate(with_ghost) == GroundStatus::Sat);
  CHECK(ground_saturate(without) == GroundStatus::Unsat);
}

TEST_CASE("baseline variants agree on a trivial k = 1 property") {
  Program prog = parse_program("proc f(x) returns (y) { y := x; }");
  HyperProperty prop;
  prop.k = 1;
  prop.pre = "(= x1 1)";
  prop.post = "(= y1 1)";
  for (auto v : {BaselineVariant::SeqComposition, BaselineVariant::DirectNoCopies,
                 BaselineVariant::DirectCopies}) {
    ChcSystem sys = encode_baseline(prog, {"f"}, prop, v);
    CHECK(ground_saturate(sys) == GroundStatus::Sat);
  }
  HyperProperty bad;
  bad.k = 1;
  bad.pre = "(= x1 1)";
  bad.post = "(= y1 0)";
  for (auto v : {BaselineVariant::SeqComposition, BaselineVariant::DirectNoCopies,
                 BaselineVariant::DirectCopies}) {
    ChcSystem sys = encode_baseline(prog, {"f"}, bad, v);
    CHECK(ground_saturate(sys) == GroundStatus::Unsat);
  }
}

TEST_CASE("baseline variants agree on a 2-safety equality fixture") {
  Program prog = parse_program("proc f(x) returns (y) { y := x; }");
  HyperProperty prop;
  prop.k = 2;
  prop.pre = "(= x1 x2)";
  prop.post = "(= y1 y2)";
  for (auto v : {BaselineVariant::SeqComposition, BaselineVariant::DirectNoCopies,
                 BaselineVariant::DirectCopies}) {
    ChcSystem sys = encode_baseline(prog, {"f", "f"}, prop, v);
    CHECK(ground_saturate(sys) == GroundStatus::Sat);
  }
}

TEST_CASE("unknown solver status propagates, missing binary reports NoSolver") {
  SolveResult r = solve_chc("/nonexistent.smt2", {}, 5);
  CHECK(r.status == SolveStatus::NoSolver);
  // a fake solver that prints unknown
  SolveResult r2 = solve_chc("/dev/null", {{"fake", "echo unknown; true {file}"}}, 5);
  CHECK(r2.status == SolveStatus::Unknown);
  SolveResult r3 = solve_chc("/dev/null", {{"fake", "echo sat {file}"}}, 5);
  CHECK(r3.status == SolveStatus::Sat);
}
