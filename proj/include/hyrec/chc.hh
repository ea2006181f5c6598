// chc.hh -- constrained-Horn-clause encodings and the solver driver
#ifndef HYREC_CHC_HH_
#define HYREC_CHC_HH_

#include <map>
#include <string>
#include <vector>

#include "hyrec/frontend.hh"
#include "hyrec/vpa.hh"
#include "hyrec/vpg.hh"

namespace hyrec {

/// SMT-LIB terms as little s-expressions.
struct Term {
  enum class Kind { Sym, Num, App };
  Kind kind = Kind::Sym;
  std::string sym;
  long long num = 0;
  std::vector<Term> args;

  static Term S(std::string s);
  static Term N(long long n);
  static Term A(std::string op, std::vector<Term> args);
  std::string str() const;
  bool operator==(const Term&) const = default;
};

Term parse_sexpr(const std::string& text);
/// Replaces free symbols by the mapped terms (operators are positional, so
/// plain symbol lookup is enough for our property snippets).
Term rename_syms(const Term& t, const std::map<std::string, Term>& map);

struct ChcPredicate {
  std::string name;
  std::vector<std::string> sorts;
};

struct ChcClause {
  std::vector<std::pair<std::string, std::string>> vars;  // (name, sort)
  std::vector<Term> body;  // conjuncts: predicate applications and constraints
  Term head;               // predicate application or false
};

struct ChcSystem {
  std::map<std::string, ChcPredicate> predicates;
  std::vector<ChcClause> clauses;
};

struct EncodeStats {
  int call_letter_splits = 0;  // state splits for the return-match condition
  int predicates = 0;
  int clauses = 0;
  // NWA only: sizes of the encoded (normalized, weakly hierarchical) automaton
  int transitions = 0;
  int initials = 0;
  int finals = 0;
};

/// Per-state predicates with a return-address ghost; one clause per
/// transition plus the pre/post clauses. The input automaton is made weakly
/// hierarchical and call-letter split internally. with_ghost=false drops the
/// return address (kept for the context-sensitivity regression).
ChcSystem encode_nwa(const Vpa& product, const CompiledProgram& cp, const HyperProperty& prop,
                     bool with_ghost = true, EncodeStats* stats = nullptr);

/// Per-nonterminal summary predicates under the stack-free semantics; one
/// clause per production plus one property clause per start symbol.
ChcSystem encode_vpg(const Vpg& g, const CompiledProgram& cp, const HyperProperty& prop,
                     EncodeStats* stats = nullptr);

enum class BaselineVariant { SeqComposition, DirectNoCopies, DirectCopies };

ChcSystem encode_baseline(const Program& p, const std::vector<std::string>& entries,
                          const HyperProperty& prop, BaselineVariant variant,
                          EncodeStats* stats = nullptr);

/// Deterministic serialization: sorted declarations, sorted asserts.
std::string emit_smtlib(const ChcSystem& s);

struct SolverSpec {
  std::string name;
  std::string command;  // with a {file} placeholder
};

enum class SolveStatus { Sat, Unsat, Unknown, Timeout, NoSolver, Error };

struct SolveResult {
  SolveStatus status = SolveStatus::NoSolver;
  std::string solver;  // which solver answered
  std::string detail;  // raw first line / error text
};

/// Runs the solvers in parallel on the file; first definitive answer wins and
/// the rest are killed. The timeout is enforced per solver process.
SolveResult solve_chc(const std::string& smt_path, const std::vector<SolverSpec>& solvers,
                      int timeout_s);

/// Solvers found on PATH (z3, eldarica, golem), in that order.
std::vector<SolverSpec> detect_solvers();

}  // namespace hyrec

#endif  // HYREC_CHC_HH_
