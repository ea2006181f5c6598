// vpg.hh -- well-matched visibly pushdown grammars
#ifndef HYREC_VPG_HH_
#define HYREC_VPG_HH_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hyrec/alphabet.hh"
#include "hyrec/vpa.hh"

namespace hyrec {

using NonTerminal = int;

/// Production of a well-matched VPG. Exactly three shapes:
///   X -> eps          (kind Eps)
///   X -> a Y          (kind Int, a internal)
///   X -> c Y r Z      (kind Call, c call, r its matching return)
struct Production {
  enum class Kind { Eps, Int, Call };
  NonTerminal lhs;
  Kind kind;
  LetterId a = -1;       // the internal (Int) or call letter (Call)
  NonTerminal y = -1;    // continuation (Int) or call body (Call)
  LetterId r = -1;       // return letter (Call)
  NonTerminal z = -1;    // continuation after the return (Call)
  auto operator<=>(const Production&) const = default;
};

class Vpg {
 public:
  explicit Vpg(AlphabetRef sigma) : sigma_(std::move(sigma)) {}

  const AlphabetRef& alphabet() const { return sigma_; }

  NonTerminal add_nonterminal(std::string name);
  NonTerminal nonterminal(const std::string& name) const;
  bool has_nonterminal(const std::string& name) const { return by_name_.count(name) != 0; }
  int num_nonterminals() const { return static_cast<int>(names_.size()); }
  const std::string& name(NonTerminal x) const { return names_.at(x); }

  void add_eps(NonTerminal x) { add_production({x, Production::Kind::Eps}); }
  void add_int(NonTerminal x, LetterId a, NonTerminal y) {
    add_production({x, Production::Kind::Int, a, y});
  }
  void add_call(NonTerminal x, LetterId c, NonTerminal y, LetterId r, NonTerminal z) {
    add_production({x, Production::Kind::Call, c, y, r, z});
  }
  void add_production(Production p);

  const std::vector<Production>& productions() const { return prods_; }
  std::vector<Production> productions_of(NonTerminal x) const;

  void set_start(NonTerminal x) { starts_.insert(x); }
  const std::set<NonTerminal>& starts() const { return starts_; }

  bool uniform_flag() const { return uniform_; }
  void set_uniform_flag(bool b) { uniform_ = b; }
  /// Checks the uniform-form condition: per nonterminal, all right-hand sides
  /// start with a call, all with an internal, or all are eps.
  bool check_uniform() const;

  std::string dump() const;

 private:
  AlphabetRef sigma_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NonTerminal> by_name_;
  std::vector<Production> prods_;
  std::set<Production> prod_set_;
  std::set<NonTerminal> starts_;
  bool uniform_ = false;
};

/// Drops non-generating and unreachable symbols (and their productions).
Vpg vpg_trim(const Vpg& g);

/// Splits mixed nonterminals until check_uniform holds; preserves language.
Vpg vpg_uniformize(const Vpg& g);

/// Exactly the words of length <= max_len derivable from a start symbol.
std::set<Word> vpg_enumerate(const Vpg& g, int max_len, size_t cap = 2'000'000);

/// Grammar as automaton: a VPA whose linear-acceptance language is L(G).
Vpa vpg_to_vpa(const Vpg& g);

/// Standard state-pair conversion; valid when L(A) is well-matched
/// (the result generates exactly the well-matched words accepted by A).
Vpg vpa_to_vpg(const Vpa& a);

/// L(a);L(b) for grammars over disjoint components of one shared alphabet.
Vpg vpg_concat(const Vpg& a, const Vpg& b);

/// Reverse of a well-matched grammar over the kind-swapped alphabet,
/// realized through the automaton round-trip.
Vpg vpg_reverse(const Vpg& g, AlphabetRef reversed_sigma);

}  // namespace hyrec

#endif  // HYREC_VPG_HH_
