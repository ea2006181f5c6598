// vpa.hh -- visibly pushdown automata and the closure constructions
#ifndef HYREC_VPA_HH_
#define HYREC_VPA_HH_

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyrec/alphabet.hh"

namespace hyrec {

using State = int;
using StackSym = int;  // 0 is always the bottom symbol

struct CallTrans {
  State from;
  LetterId letter;
  State to;
  StackSym push;  // never 0
  auto operator<=>(const CallTrans&) const = default;
};
struct RetTrans {
  State from;
  LetterId letter;
  StackSym pop;  // may be 0 (pending return reads the bottom symbol)
  State to;
  auto operator<=>(const RetTrans&) const = default;
};
struct IntTrans {
  State from;
  LetterId letter;
  State to;
  auto operator<=>(const IntTrans&) const = default;
};

/// A VPA with linear acceptance (runs end in a final state, stack arbitrary).
/// Callers that need the well-matched sublanguage pass require_empty_stack to
/// accepts()/enumerate. States and stack symbols are dense ints with
/// structural names kept for debug dumps and stable predicate naming.
class Vpa {
 public:
  explicit Vpa(AlphabetRef sigma) : sigma_(std::move(sigma)) { intern_stack_sym("$"); }

  const AlphabetRef& alphabet() const { return sigma_; }

  State add_state(std::string name);
  StackSym intern_stack_sym(const std::string& name);
  bool has_stack_sym(const std::string& name) const { return sym_by_name_.count(name) != 0; }

  int num_states() const { return static_cast<int>(state_names_.size()); }
  int num_stack_syms() const { return static_cast<int>(sym_names_.size()); }
  const std::string& state_name(State q) const { return state_names_.at(q); }
  const std::string& stack_sym_name(StackSym g) const { return sym_names_.at(g); }

  void add_call(State from, LetterId a, State to, StackSym push);
  void add_ret(State from, LetterId a, StackSym pop, State to);
  void add_int(State from, LetterId a, State to);

  void set_initial(State q) { initial_.insert(q); }
  void set_final(State q) { final_.insert(q); }
  const std::set<State>& initials() const { return initial_; }
  const std::set<State>& finals() const { return final_; }
  bool is_final(State q) const { return final_.count(q) != 0; }

  const std::vector<CallTrans>& calls() const { return calls_; }
  const std::vector<RetTrans>& rets() const { return rets_; }
  const std::vector<IntTrans>& ints() const { return ints_; }

  // Indexed successor lookups.
  const std::vector<CallTrans>& calls_from(State q, LetterId a) const;
  const std::vector<RetTrans>& rets_from(State q, LetterId a, StackSym g) const;
  const std::vector<IntTrans>& ints_from(State q, LetterId a) const;
  const std::vector<RetTrans>& rets_from_any(State q, LetterId a) const;

  /// Letters with at least one outgoing transition at q (returns: any pop).
  std::vector<LetterId> outgoing_letters(State q) const;
  /// Components actually used by some transition.
  std::set<int> used_components() const;

  bool complete_flag() const { return complete_; }
  void set_complete_flag(bool b) { complete_ = b; }
  /// True iff every (state, letter[, stack-top]) has at least one successor.
  bool check_complete() const;
  /// At most one successor everywhere and a single initial state.
  bool deterministic() const;

  bool empty_language() const;
  /// States reachable by some word from an initial state (exact, via
  /// well-matched summary saturation).
  std::set<State> reachable_states() const;

  /// Line-oriented deterministic debug dump (sorted).
  std::string dump() const;

 private:
  AlphabetRef sigma_;
  std::vector<std::string> state_names_;
  std::vector<std::string> sym_names_;
  std::unordered_map<std::string, StackSym> sym_by_name_;
  std::set<State> initial_, final_;
  std::vector<CallTrans> calls_;
  std::vector<RetTrans> rets_;
  std::vector<IntTrans> ints_;
  bool complete_ = false;

  mutable std::map<std::pair<State, LetterId>, std::vector<CallTrans>> call_idx_;
  mutable std::map<std::tuple<State, LetterId, StackSym>, std::vector<RetTrans>> ret_idx_;
  mutable std::map<std::pair<State, LetterId>, std::vector<IntTrans>> int_idx_;
  mutable std::map<std::pair<State, LetterId>, std::vector<RetTrans>> ret_any_idx_;
  mutable bool idx_dirty_ = true;
  void reindex() const;
};

bool vpa_accepts(const Vpa& a, const Word& w, bool require_empty_stack = false);

/// Language-preserving completion; adds at most one non-final sink state.
Vpa vpa_complete(const Vpa& a);

/// Product over a shared alphabet; stack symbols are interned pairs.
Vpa vpa_intersect(const Vpa& a, const Vpa& b);

/// Well-nested shuffle of automata over pairwise disjoint components.
Vpa wn_shuffle(const std::vector<const Vpa*>& parts);

/// {rev(w) : w in L(a)} over the kind-swapped alphabet. Sound for automata
/// whose language is well-matched.
Vpa vpa_reverse(const Vpa& a, AlphabetRef reversed_sigma);

/// All accepted words of length <= max_len, lexicographic DFS over letter ids.
std::set<Word> vpa_enumerate(const Vpa& a, int max_len, bool require_empty_stack = false,
                             size_t cap = 2'000'000);

struct NormalizeStats {
  int kind_splits = 0;      // states split by outgoing letter kind
  int final_splits = 0;     // final states split off with no outgoing
  int call_letter_splits = 0;
};

/// Split states so every state's outgoing letters are all-internal, all-call
/// or all-return, and final states have no outgoing transitions. If
/// split_call_letters is set, call states are additionally split per call
/// letter (needed by the NWA Horn encoding).
Vpa vpa_normalize(const Vpa& a, bool split_call_letters = false, NormalizeStats* stats = nullptr);

/// Re-push so that stack symbols determine the state the call was made from:
/// new symbols are (source state, old symbol) pairs.
Vpa vpa_weak_hierarchical(const Vpa& a,
                          std::vector<std::pair<State, StackSym>>* sym_origin = nullptr);

}  // namespace hyrec

#endif  // HYREC_VPA_HH_
