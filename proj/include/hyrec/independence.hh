// independence.hh -- tail/head-independence and shuffle soundness reporting
#ifndef HYREC_INDEPENDENCE_HH_
#define HYREC_INDEPENDENCE_HH_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyrec/vpa.hh"

namespace hyrec {

/// Letters of one component that soundly commute with everything elsewhere.
/// Calls and returns always commute in the hypersafety setting and need not
/// be listed.
struct IndependenceSpec {
  int component = 1;
  std::set<LetterId> independent_internals;
};

/// Deterministic VPA for the largest tail-independent language over the
/// component's letters: runs splitting into a dependent-allowed prefix and an
/// all-independent suffix, where nesting respects the split.
Vpa max_tail_independent_vpa(AlphabetRef sigma, const IndependenceSpec& spec);
/// Head variant (reverse of the tail language); nondeterministic artifact.
Vpa max_head_independent_vpa(AlphabetRef sigma, const IndependenceSpec& spec);

bool is_tail_independent(const Vpa& component, const IndependenceSpec& spec);
bool is_head_independent(const Vpa& component, const IndependenceSpec& spec);

struct SoundnessReport {
  bool sound = false;
  std::string direction;  // "tail", "head" or "none"
  // per component: a bounded violating run, when one exists within the bound
  std::vector<std::pair<int, Word>> witnesses;
};

/// The well-nested shuffle soundly replaces the full shuffle iff every
/// component is tail-independent, or every component is head-independent.
SoundnessReport wn_shuffle_soundness_report(const std::vector<const Vpa*>& components,
                                            const std::vector<IndependenceSpec>& specs,
                                            int witness_len = 12);

/// Test surface: direct split search per the definition, at bounded length.
bool tail_independent_by_split(const VPAlphabet& sigma, const Word& run,
                               const IndependenceSpec& spec);

}  // namespace hyrec

#endif  // HYREC_INDEPENDENCE_HH_
