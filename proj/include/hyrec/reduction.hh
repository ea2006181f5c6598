// reduction.hh -- product-program constructions and canonical reductions
#ifndef HYREC_REDUCTION_HH_
#define HYREC_REDUCTION_HH_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyrec/order.hh"
#include "hyrec/vpg.hh"

namespace hyrec {

/// User-facing product specification: a tree over component ids. Each
/// component occurs in exactly one leaf.
struct ReductionExpr {
  enum class Kind { Leaf, Concat, NestedConcat, Lockstep };
  Kind kind = Kind::Leaf;
  int leaf = -1;                       // component id (leaves)
  std::vector<int> speeds;             // lockstep speed vector
  std::vector<ReductionExpr> children;
  bool right_aligned = false;
  std::vector<std::string> exclude_names;  // procedure names, resolved by the cli
  std::set<LetterId> excluded;             // resolved call/return letters

  std::vector<int> components() const;  // leaves, left to right
  std::string to_string() const;

  static ReductionExpr make_leaf(int component);
  static ReductionExpr make_concat(ReductionExpr a, ReductionExpr b);
  static ReductionExpr make_nested_concat(ReductionExpr a, ReductionExpr b);
  static ReductionExpr make_lockstep(std::vector<int> speeds, std::vector<ReductionExpr> es);
};

/// Sleep-set automaton for red(Sigma*): states are (sleep set, order state),
/// built lazily from the reachable part. Requires |Sigma| <= 64.
Vpa sleepset_vpa(const OrderAutomaton& o, const Grouping& groups);

/// red(L1 zig ... zig Ln) via repair + sleep sets + well-nested shuffle.
Vpa generic_lex_reduction(const OrderAutomaton& o, const std::vector<const Vpa*>& parts,
                          const Grouping& groups);

struct OcStats {
  long long reachable_states = 0;
  long long bound = 0;  // prod n_i * n_A * n_Gamma over the normalized parts
};

/// The greedy product: states (q_1..q_n, q_A, stack top), only the group
/// owning the least enabled letter moves. Parts are normalized internally
/// (homogeneous outgoing kinds, finals without outgoing); the order must be
/// uniform w.r.t. the normalized parts.
Vpa optimized_product(const OrderAutomaton& o, const std::vector<const Vpa*>& parts,
                      const Grouping& groups, OcStats* stats = nullptr);

/// Modulo decrement over speed vectors (t != s componentwise cap).
std::vector<int> dec(const std::vector<int>& speeds, const std::vector<int>& t);

/// Word-level canonical semantics (inputs well-matched, disjoint letter sets).
Word nested_concat_words(const VPAlphabet& sigma, const Word& w1, const Word& w2);
Word lockstep_words(const VPAlphabet& sigma, const std::vector<int>& speeds,
                    const std::vector<Word>& words);

/// Direct VPG constructions (queue-driven); inputs must be uniform-form.
Vpg nested_concat_vpg(const Vpg& g1, const Vpg& g2);
Vpg lockstep_vpg(const std::vector<int>& speeds, const std::vector<const Vpg*>& parts);

enum class EvalMode { Aut, VpgMode, Direct };

struct EvalResult {
  std::optional<Vpa> vpa;       // Aut
  std::optional<Vpg> vpg;       // VpgMode / Direct
  std::vector<OcStats> oc;      // one entry per optimized product node
  int encode_splits = 0;        // reserved, filled by the chc layer
};

/// Folds the expression bottom-up. Inputs are keyed by leaf component id and
/// must be uniform-form grammars over one shared alphabet.
EvalResult evaluate(const ReductionExpr& expr, const std::map<int, Vpg>& inputs, EvalMode mode);

}  // namespace hyrec

#endif  // HYREC_REDUCTION_HH_
