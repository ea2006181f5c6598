// alphabet.hh -- visibly pushdown alphabets, words, and the matching relation
#ifndef HYREC_ALPHABET_HH_
#define HYREC_ALPHABET_HH_

#include <cassert>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyrec {

enum class LetterKind { Call, Return, Internal };

using LetterId = int;

/// One letter of a VP alphabet. The payload is an opaque handle that only the
/// frontend / CHC layers interpret; the core constructions never look at it.
struct Letter {
  std::string name;
  LetterKind kind = LetterKind::Internal;
  int component = 1;  // 1-based component index
  int payload = -1;   // opaque statement handle, -1 = none
};

/// A tripartitioned, component-partitioned alphabet. Letter ids are dense
/// indices into `letters`. Immutable once built (see freeze()).
class VPAlphabet {
 public:
  LetterId add(std::string name, LetterKind kind, int component, int payload = -1);

  int size() const { return static_cast<int>(letters_.size()); }
  const Letter& letter(LetterId id) const { return letters_.at(id); }
  LetterKind kind(LetterId id) const { return letters_.at(id).kind; }
  int component(LetterId id) const { return letters_.at(id).component; }
  const std::string& name(LetterId id) const { return letters_.at(id).name; }

  bool has(const std::string& name) const { return by_name_.count(name) != 0; }
  LetterId id_of(const std::string& name) const;

  int num_components() const { return num_components_; }

  std::vector<LetterId> letters_of_component(int component) const;
  std::vector<LetterId> letters_of(int component, LetterKind kind) const;
  std::vector<LetterId> all_letters() const;

  /// Same letters, with Call and Return kinds swapped. Used by the
  /// right-alignment pipeline and the head-independence check.
  std::shared_ptr<VPAlphabet> reversed() const;

 private:
  std::vector<Letter> letters_;
  std::unordered_map<std::string, LetterId> by_name_;
  int num_components_ = 0;
};

using AlphabetRef = std::shared_ptr<const VPAlphabet>;
using Word = std::vector<LetterId>;

std::string word_to_string(const VPAlphabet& sigma, const Word& w, const char* sep = " ");

/// Matching relation of a word: for position i (0-based), match[i] is the
/// matching position, kPendingCall (+inf) for a pending call, kPendingReturn
/// (-inf side) for a pending return, kNone for internals.
struct MatchingRelation {
  static constexpr int kNone = -1;
  static constexpr int kPendingCall = -2;
  static constexpr int kPendingReturn = -3;
  std::vector<int> match;

  bool well_matched() const;
};

MatchingRelation matching_of(const VPAlphabet& sigma, const Word& w);
bool is_well_matched(const VPAlphabet& sigma, const Word& w);
/// Every matched pair must live in a single component.
bool is_well_nested(const VPAlphabet& sigma, const Word& w);

/// Projection onto one component (erases all other letters).
Word project_component(const VPAlphabet& sigma, const Word& w, int component);

}  // namespace hyrec

#endif  // HYREC_ALPHABET_HH_
