// pipeline.hh -- the verification pipeline behind the command line
#ifndef HYREC_PIPELINE_HH_
#define HYREC_PIPELINE_HH_

#include <optional>
#include <string>
#include <vector>

#include "hyrec/chc.hh"
#include "hyrec/reduction.hh"

namespace hyrec {

/// Grammar: expr := ID | concat(expr, expr) | nested_concatenation(expr, expr)
///               | (INT{,INT}*)-lockstep(expr{,expr}*)
///               | right_aligned: expr | expr with exclude=[ID{,ID}*]
ReductionExpr parse_reduction_expr(const std::string& text);

struct RunConfig {
  std::string source_path;
  std::string source_text;  // used instead of the path when set
  std::string property;     // file path or inline "pre: ...\npost: ..."
  std::string reduction = "P1";
  std::string mode = "direct";  // aut | vpg | direct | baseline:seq|nocopies|copies
  std::vector<std::string> entries;  // per component; defaults to the sole procedure
  std::vector<SolverSpec> solvers;   // empty: detect from PATH
  int timeout_s = 600;
  std::string emit_dir;  // artifacts directory; empty = temporary
};

struct RunReport {
  std::string verdict = "unknown";  // verified | refuted | unknown
  int exit_code = 2;                // 0 verified, 1 refuted, 2 unknown, 3 config
  std::string mode;
  std::string solver;
  long long states = 0;        // product automaton states (aut mode)
  long long nonterminals = 0;  // product grammar size (vpg / direct)
  int predicates = 0;
  int clauses = 0;
  int encode_splits = 0;
  std::vector<OcStats> oc;
  long long wall_ms = 0;
  std::string smt_path;
  std::string product_path;
  std::string error;

  std::string to_json() const;
};

RunReport run(const RunConfig& cfg);

}  // namespace hyrec

#endif  // HYREC_PIPELINE_HH_
