// frontend.hh -- the mini recursive language and its syntactic-run grammars
#ifndef HYREC_FRONTEND_HH_
#define HYREC_FRONTEND_HH_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyrec/vpg.hh"

namespace hyrec {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

enum class Sort { Int, Bool, IntArray };

struct Expr {
  enum class Kind { IntConst, BoolConst, Var, Unary, Binary, Select };
  Kind kind;
  long long num = 0;            // IntConst / BoolConst (0/1)
  std::string var;              // Var / Select array name
  std::string op;               // Unary: "-" "!"; Binary: + - * < <= > >= == != && ||
  std::vector<Expr> args;
  std::string to_string() const;
};

/// One alphabet letter's payload. Assignments are simultaneous.
struct Statement {
  enum class Kind { Assign, Assume, Call, Ret };
  Kind kind;
  std::vector<std::pair<Expr, Expr>> assigns;  // lhs (Var or Select), rhs
  Expr cond;                                   // Assume
  std::string proc;                            // Call / Ret
  std::string text() const;
};

struct Stmt;  // statement-tree node of the surface language

struct Procedure {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> outputs;
  std::vector<std::string> locals;  // declared via var, params/outputs included
  std::map<std::string, Sort> sorts;
  std::vector<std::shared_ptr<Stmt>> body;
};

struct Stmt {
  enum class Kind { VarDecl, Assign, Assume, Call, If };
  Kind kind;
  std::vector<std::string> names;                  // VarDecl
  Sort decl_sort = Sort::Int;                      // VarDecl
  std::vector<std::pair<Expr, Expr>> assigns;      // Assign
  Expr cond;                                       // Assume / If
  std::string callee;                              // Call
  std::vector<Expr> call_args;                     // Call
  std::vector<Expr> call_lhs;                      // Call results (may be empty)
  std::vector<std::shared_ptr<Stmt>> then_branch;  // If
  std::vector<std::shared_ptr<Stmt>> else_branch;  // If
};

struct Program {
  std::vector<Procedure> procedures;
  const Procedure* find(const std::string& name) const;
};

Program parse_program(const std::string& source);
std::string pretty_print(const Program& p);

/// One verification instance: arity and SMT-LIB pre/post snippets over the
/// copy-renamed variables (variable v of copy i is v<i>).
struct HyperProperty {
  int k = 1;
  std::string pre = "true";
  std::string post = "true";
};
HyperProperty parse_property(const std::string& text);

struct ComponentInfo {
  int component = 1;              // 1-based copy index
  std::string entry;              // entry procedure
  std::vector<std::string> vars;  // renamed locals, sorted
  std::map<std::string, Sort> sorts;
  std::map<std::string, std::vector<std::string>> params;   // proc -> renamed params
  std::map<std::string, std::vector<std::string>> outputs;  // proc -> renamed outputs
};

/// The compiled product universe: one shared alphabet over k disjoint copies,
/// the statement payload table, and a per-copy grammar of syntactic runs
/// ("call entry" body "ret entry", per the harness-frame convention).
struct CompiledProgram {
  AlphabetRef sigma;
  std::vector<Statement> statements;  // letter payload -> statement
  std::vector<ComponentInfo> components;
  std::vector<Vpg> grammars;  // per copy, uniform-form, trimmed

  const Statement& payload(LetterId a) const { return statements.at(sigma->letter(a).payload); }
};

/// Renames variables of copy i by suffixing the copy index, builds the joint
/// alphabet, and compiles each copy's syntactic-run grammar.
CompiledProgram compile_copies(const Program& p, int k, const std::vector<std::string>& entries);

/// Letters (call and ret) of the named procedures, across all copies.
std::set<LetterId> letters_of_procedures(const CompiledProgram& cp,
                                         const std::vector<std::string>& procs);

}  // namespace hyrec

#endif  // HYREC_FRONTEND_HH_
