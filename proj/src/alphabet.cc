#include "hyrec/alphabet.hh"

#include <algorithm>

namespace hyrec {

LetterId VPAlphabet::add(std::string name, LetterKind kind, int component, int payload) {
  if (component < 1) throw std::invalid_argument("letter component must be >= 1");
  if (by_name_.count(name)) throw std::invalid_argument("duplicate letter name: " + name);
  LetterId id = static_cast<LetterId>(letters_.size());
  by_name_.emplace(name, id);
  letters_.push_back(Letter{std::move(name), kind, component, payload});
  num_components_ = std::max(num_components_, component);
  return id;
}

LetterId VPAlphabet::id_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown letter: " + name);
  return it->second;
}

std::vector<LetterId> VPAlphabet::letters_of_component(int component) const {
  std::vector<LetterId> out;
  for (LetterId i = 0; i < size(); ++i)
    if (letters_[i].component == component) out.push_back(i);
  return out;
}

std::vector<LetterId> VPAlphabet::letters_of(int component, LetterKind kind) const {
  std::vector<LetterId> out;
  for (LetterId i = 0; i < size(); ++i)
    if (letters_[i].component == component && letters_[i].kind == kind) out.push_back(i);
  return out;
}

std::vector<LetterId> VPAlphabet::all_letters() const {
  std::vector<LetterId> out(letters_.size());
  for (size_t i = 0; i < letters_.size(); ++i) out[i] = static_cast<LetterId>(i);
  return out;
}

std::shared_ptr<VPAlphabet> VPAlphabet::reversed() const {
  auto rev = std::make_shared<VPAlphabet>();
  for (const Letter& l : letters_) {
    LetterKind k = l.kind;
    if (k == LetterKind::Call) k = LetterKind::Return;
    else if (k == LetterKind::Return) k = LetterKind::Call;
    rev->add(l.name, k, l.component, l.payload);
  }
  return rev;
}

std::string word_to_string(const VPAlphabet& sigma, const Word& w, const char* sep) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += sigma.name(w[i]);
  }
  return out;
}

bool MatchingRelation::well_matched() const {
  for (int m : match)
    if (m == kPendingCall || m == kPendingReturn) return false;
  return true;
}

MatchingRelation matching_of(const VPAlphabet& sigma, const Word& w) {
  MatchingRelation rel;
  rel.match.assign(w.size(), MatchingRelation::kNone);
  std::vector<int> stack;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    switch (sigma.kind(w[i])) {
      case LetterKind::Call:
        stack.push_back(i);
        break;
      case LetterKind::Return:
        if (stack.empty()) {
          rel.match[i] = MatchingRelation::kPendingReturn;
        } else {
          rel.match[i] = stack.back();
          rel.match[stack.back()] = i;
          stack.pop_back();
        }
        break;
      case LetterKind::Internal:
        break;
    }
  }
  for (int i : stack) rel.match[i] = MatchingRelation::kPendingCall;
  return rel;
}

bool is_well_matched(const VPAlphabet& sigma, const Word& w) {
  return matching_of(sigma, w).well_matched();
}

bool is_well_nested(const VPAlphabet& sigma, const Word& w) {
  MatchingRelation rel = matching_of(sigma, w);
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    int j = rel.match[i];
    if (j >= 0 && j > i && sigma.component(w[i]) != sigma.component(w[j])) return false;
  }
  return true;
}

Word project_component(const VPAlphabet& sigma, const Word& w, int component) {
  Word out;
  for (LetterId l : w)
    if (sigma.component(l) == component) out.push_back(l);
  return out;
}

}  // namespace hyrec
