// order.hh -- visibly pushdown contextual orders (scheduler automata)
#ifndef HYREC_ORDER_HH_
#define HYREC_ORDER_HH_

#include <set>
#include <vector>

#include "hyrec/vpa.hh"

namespace hyrec {

/// A strict total order on the alphabet, as a dense rank bijection.
class LinearOrder {
 public:
  LinearOrder() = default;
  explicit LinearOrder(std::vector<int> rank);

  int rank(LetterId a) const { return rank_.at(a); }
  bool less(LetterId a, LetterId b) const { return rank_.at(a) < rank_.at(b); }
  bool total() const;
  int size() const { return static_cast<int>(rank_.size()); }
  LetterId min_of(const std::vector<LetterId>& s) const;
  bool operator==(const LinearOrder&) const = default;

  /// Ranks assigned block by block, in the order letters appear.
  static LinearOrder from_blocks(int alphabet_size, const std::vector<std::vector<LetterId>>& blocks);

 private:
  std::vector<int> rank_;
};

/// Partial relation on letters; only the exclude-letters machinery builds one.
struct PartialOrderAtContext {
  std::set<std::pair<LetterId, LetterId>> holds;
  bool less(LetterId a, LetterId b) const { return holds.count({a, b}) != 0; }
};

/// Groups of raw components that commute as blocks. The reduction-expression
/// tree decides the grouping; a flat n-component instance uses singletons.
using Grouping = std::vector<std::vector<int>>;

Grouping singleton_groups(int n_components);

/// A complete deterministic VPA plus a per-state linear order: a visibly
/// pushdown contextual order. order_at(w) is a pure function of the state
/// reached on w.
struct OrderAutomaton {
  Vpa vpa;
  std::vector<LinearOrder> ord;

  explicit OrderAutomaton(AlphabetRef sigma) : vpa(std::move(sigma)) {}

  State state_at(const Word& context) const;
  const LinearOrder& order_at(const Word& context) const;
  bool wellformed() const;  // complete, deterministic, total orders everywhere
};

enum class Cmp { Less, Equal, Greater, Incomparable };

/// The contextual lexicographic order: prefix rule first, otherwise compare
/// the letters at the first divergence under the order at the common prefix.
Cmp clo_compare(const OrderAutomaton& o, const Word& u, const Word& v);

/// Canonical orders (per-group blocks; ties broken by component then id).
OrderAutomaton concat_order(AlphabetRef sigma, const Grouping& groups);
OrderAutomaton nested_concat_order(AlphabetRef sigma, const Grouping& groups);
OrderAutomaton lockstep_order(const std::vector<int>& speeds, AlphabetRef sigma,
                              const Grouping& groups);

/// The literal two-component round-robin scheduler (parentheses example
/// generalized to any 2-component alphabet); n > 2 uses (1,..,1)-lockstep.
OrderAutomaton make_roundrobin_order(AlphabetRef sigma);

/// Tracks (has pending call?, group of the last pending call) and demotes
/// returns of the other groups below everything else; the result is coherent.
OrderAutomaton coherence_repair(const OrderAutomaton& o, const Grouping& groups);

/// Quantified coherence check over all reachable (state, tracker) pairs.
bool is_coherent(const OrderAutomaton& o, const Grouping& groups);

/// Block-comparability of outgoing letters across two component automata.
bool is_uniform(const OrderAutomaton& o, const Vpa& a1, const Vpa& a2);
bool is_uniform_multi(const OrderAutomaton& o, const std::vector<const Vpa*>& parts);

/// Excluded calls/returns take their component's internal image: excluded
/// calls push a fresh star symbol, per-state orders become a fixed linear
/// extension of the image relation (excluded first, then letter id).
OrderAutomaton exclude_letters(const OrderAutomaton& o, const std::set<LetterId>& excluded);

/// The image relation {(a,b) | f(a) < f(b)} before extension; test surface.
PartialOrderAtContext exclude_image_relation(const LinearOrder& ord, const VPAlphabet& sigma,
                                             const std::set<LetterId>& excluded);

}  // namespace hyrec

#endif  // HYREC_ORDER_HH_
