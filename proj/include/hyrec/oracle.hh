// oracle.hh -- bounded brute-force references used as test ground truth
#ifndef HYREC_ORACLE_HH_
#define HYREC_ORACLE_HH_

#include <map>
#include <set>
#include <vector>

#include "hyrec/frontend.hh"
#include "hyrec/order.hh"

namespace hyrec {

/// All interleavings of the given words (each over its own letters).
/// Refuses to run past the cap rather than sampling.
std::set<Word> enumerate_shuffle(const std::vector<Word>& words, size_t cap = 2'000'000);

/// One commutativity class: all words sharing the per-group projections.
struct EquivClass {
  std::vector<Word> members;  // sorted
};

/// Groups a bounded language into equivalence classes of the full
/// cross-group commutativity relation (class = projection fiber).
std::vector<EquivClass> classes(const VPAlphabet& sigma, const Grouping& groups,
                                const std::set<Word>& language);

/// Keeps the order-minimal members of every class. If wn_only is set the
/// language is restricted to well-nested words first (reduction of the
/// well-nested shuffle rather than the full shuffle).
std::set<Word> ref_reduction(const OrderAutomaton& o, const Grouping& groups,
                             const std::set<Word>& language, bool wn_only);

/// Bounded shuffle of component languages, cut at max_len.
std::set<Word> bounded_shuffle(const VPAlphabet& sigma,
                               const std::vector<std::set<Word>>& component_langs, int max_len,
                               size_t cap = 2'000'000);

/// Concrete interpretation of syntactic runs over the statement payloads.
/// Integer/bool variables only; callee non-parameter locals start at zero.
using Valuation = std::map<std::string, long long>;

enum class StackMode { Single, Multi };

/// Final top-frame valuations of a run from one initial harness frame;
/// empty result means the run is infeasible. Multi mode keeps one stack per
/// copy and unions the top frames for comparison.
std::vector<Valuation> interpret(const CompiledProgram& cp, const Word& run,
                                 const Valuation& initial, StackMode mode);

}  // namespace hyrec

#endif  // HYREC_ORACLE_HH_
