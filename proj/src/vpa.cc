#include "hyrec/vpa.hh"

#include <algorithm>
#include <deque>
#include <sstream>

namespace hyrec {

State Vpa::add_state(std::string name) {
  state_names_.push_back(std::move(name));
  return static_cast<State>(state_names_.size()) - 1;
}

StackSym Vpa::intern_stack_sym(const std::string& name) {
  auto it = sym_by_name_.find(name);
  if (it != sym_by_name_.end()) return it->second;
  StackSym s = static_cast<StackSym>(sym_names_.size());
  sym_names_.push_back(name);
  sym_by_name_.emplace(name, s);
  return s;
}

void Vpa::add_call(State from, LetterId a, State to, StackSym push) {
  assert(sigma_->kind(a) == LetterKind::Call);
  assert(push != 0);
  calls_.push_back({from, a, to, push});
  idx_dirty_ = true;
}

void Vpa::add_ret(State from, LetterId a, StackSym pop, State to) {
  assert(sigma_->kind(a) == LetterKind::Return);
  rets_.push_back({from, a, pop, to});
  idx_dirty_ = true;
}

void Vpa::add_int(State from, LetterId a, State to) {
  assert(sigma_->kind(a) == LetterKind::Internal);
  ints_.push_back({from, a, to});
  idx_dirty_ = true;
}

void Vpa::reindex() const {
  if (!idx_dirty_) return;
  call_idx_.clear();
  ret_idx_.clear();
  int_idx_.clear();
  ret_any_idx_.clear();
  for (const auto& t : calls_) call_idx_[{t.from, t.letter}].push_back(t);
  for (const auto& t : rets_) {
    ret_idx_[{t.from, t.letter, t.pop}].push_back(t);
    ret_any_idx_[{t.from, t.letter}].push_back(t);
  }
  for (const auto& t : ints_) int_idx_[{t.from, t.letter}].push_back(t);
  idx_dirty_ = false;
}

namespace {
template <typename M, typename K, typename V>
const V& lookup(const M& m, const K& k) {
  static const V kEmpty;
  auto it = m.find(k);
  return it == m.end() ? kEmpty : it->second;
}
}  // namespace

const std::vector<CallTrans>& Vpa::calls_from(State q, LetterId a) const {
  reindex();
  return lookup<decltype(call_idx_), std::pair<State, LetterId>, std::vector<CallTrans>>(
      call_idx_, {q, a});
}
const std::vector<RetTrans>& Vpa::rets_from(State q, LetterId a, StackSym g) const {
  reindex();
  return lookup<decltype(ret_idx_), std::tuple<State, LetterId, StackSym>, std::vector<RetTrans>>(
      ret_idx_, {q, a, g});
}
const std::vector<IntTrans>& Vpa::ints_from(State q, LetterId a) const {
  reindex();
  return lookup<decltype(int_idx_), std::pair<State, LetterId>, std::vector<IntTrans>>(
      int_idx_, {q, a});
}
const std::vector<RetTrans>& Vpa::rets_from_any(State q, LetterId a) const {
  reindex();
  return lookup<decltype(ret_any_idx_), std::pair<State, LetterId>, std::vector<RetTrans>>(
      ret_any_idx_, {q, a});
}

std::vector<LetterId> Vpa::outgoing_letters(State q) const {
  std::set<LetterId> out;
  for (const auto& t : calls_)
    if (t.from == q) out.insert(t.letter);
  for (const auto& t : rets_)
    if (t.from == q) out.insert(t.letter);
  for (const auto& t : ints_)
    if (t.from == q) out.insert(t.letter);
  return {out.begin(), out.end()};
}

std::set<int> Vpa::used_components() const {
  std::set<int> comps;
  for (const auto& t : calls_) comps.insert(sigma_->component(t.letter));
  for (const auto& t : rets_) comps.insert(sigma_->component(t.letter));
  for (const auto& t : ints_) comps.insert(sigma_->component(t.letter));
  return comps;
}

bool Vpa::check_complete() const {
  reindex();
  for (State q = 0; q < num_states(); ++q) {
    for (LetterId a = 0; a < sigma_->size(); ++a) {
      switch (sigma_->kind(a)) {
        case LetterKind::Call:
          if (calls_from(q, a).empty()) return false;
          break;
        case LetterKind::Internal:
          if (ints_from(q, a).empty()) return false;
          break;
        case LetterKind::Return:
          for (StackSym g = 0; g < num_stack_syms(); ++g)
            if (rets_from(q, a, g).empty()) return false;
          break;
      }
    }
  }
  return true;
}

bool Vpa::deterministic() const {
  if (initial_.size() > 1) return false;
  reindex();
  for (const auto& [k, v] : call_idx_)
    if (v.size() > 1) return false;
  for (const auto& [k, v] : ret_idx_)
    if (v.size() > 1) return false;
  for (const auto& [k, v] : int_idx_)
    if (v.size() > 1) return false;
  return true;
}

bool vpa_accepts(const Vpa& a, const Word& w, bool require_empty_stack) {
  using Config = std::pair<State, std::vector<StackSym>>;
  std::set<Config> configs;
  for (State q : a.initials()) configs.insert({q, {}});
  for (LetterId l : w) {
    std::set<Config> next;
    for (const auto& [q, st] : configs) {
      switch (a.alphabet()->kind(l)) {
        case LetterKind::Internal:
          for (const auto& t : a.ints_from(q, l)) next.insert({t.to, st});
          break;
        case LetterKind::Call:
          for (const auto& t : a.calls_from(q, l)) {
            auto st2 = st;
            st2.push_back(t.push);
            next.insert({t.to, std::move(st2)});
          }
          break;
        case LetterKind::Return: {
          StackSym top = st.empty() ? 0 : st.back();
          for (const auto& t : a.rets_from(q, l, top)) {
            auto st2 = st;
            if (!st2.empty()) st2.pop_back();
            next.insert({t.to, std::move(st2)});
          }
          break;
        }
      }
    }
    configs.swap(next);
    if (configs.empty()) return false;
  }
  for (const auto& [q, st] : configs)
    if (a.is_final(q) && (!require_empty_stack || st.empty())) return true;
  return false;
}

Vpa vpa_complete(const Vpa& a) {
  if (a.check_complete()) {
    Vpa out = a;
    out.set_complete_flag(true);
    return out;
  }
  Vpa out(a.alphabet());
  for (State q = 0; q < a.num_states(); ++q) out.add_state(a.state_name(q));
  for (StackSym g = 1; g < a.num_stack_syms(); ++g) out.intern_stack_sym(a.stack_sym_name(g));
  for (State q : a.initials()) out.set_initial(q);
  for (State q : a.finals()) out.set_final(q);
  for (const auto& t : a.calls()) out.add_call(t.from, t.letter, t.to, t.push);
  for (const auto& t : a.rets()) out.add_ret(t.from, t.letter, t.pop, t.to);
  for (const auto& t : a.ints()) out.add_int(t.from, t.letter, t.to);
  State sink = out.add_state("#sink");
  StackSym gsink = out.intern_stack_sym("#sink");
  const auto& sigma = *a.alphabet();
  for (State q = 0; q < out.num_states(); ++q) {
    for (LetterId l = 0; l < sigma.size(); ++l) {
      switch (sigma.kind(l)) {
        case LetterKind::Internal:
          if (out.ints_from(q, l).empty()) out.add_int(q, l, sink);
          break;
        case LetterKind::Call:
          if (out.calls_from(q, l).empty()) out.add_call(q, l, sink, gsink);
          break;
        case LetterKind::Return:
          for (StackSym g = 0; g < out.num_stack_syms(); ++g)
            if (out.rets_from(q, l, g).empty()) out.add_ret(q, l, g, sink);
          break;
      }
    }
  }
  out.set_complete_flag(true);
  return out;
}

namespace {

// Lazy pair-product worklist shared by intersect.
struct PairInterner {
  std::map<std::pair<State, State>, State> idx;
  std::deque<std::pair<State, State>> todo;
  State get(Vpa& out, const Vpa& a, const Vpa& b, State qa, State qb) {
    auto it = idx.find({qa, qb});
    if (it != idx.end()) return it->second;
    State q = out.add_state("(" + a.state_name(qa) + "&" + b.state_name(qb) + ")");
    idx.emplace(std::make_pair(qa, qb), q);
    todo.push_back({qa, qb});
    if (a.is_final(qa) && b.is_final(qb)) out.set_final(q);
    return q;
  }
};

}  // namespace

Vpa vpa_intersect(const Vpa& a, const Vpa& b) {
  if (a.alphabet() != b.alphabet())
    throw std::invalid_argument("vpa_intersect: alphabet mismatch");
  const auto& sigma = *a.alphabet();
  Vpa out(a.alphabet());
  PairInterner states;
  auto sym = [&](StackSym ga, StackSym gb) -> StackSym {
    if (ga == 0 && gb == 0) return 0;
    return out.intern_stack_sym("(" + a.stack_sym_name(ga) + "&" + b.stack_sym_name(gb) + ")");
  };
  for (State qa : a.initials())
    for (State qb : b.initials()) out.set_initial(states.get(out, a, b, qa, qb));
  while (!states.todo.empty()) {
    auto [qa, qb] = states.todo.front();
    states.todo.pop_front();
    State from = states.idx.at({qa, qb});
    for (LetterId l = 0; l < sigma.size(); ++l) {
      switch (sigma.kind(l)) {
        case LetterKind::Internal:
          for (const auto& ta : a.ints_from(qa, l))
            for (const auto& tb : b.ints_from(qb, l))
              out.add_int(from, l, states.get(out, a, b, ta.to, tb.to));
          break;
        case LetterKind::Call:
          for (const auto& ta : a.calls_from(qa, l))
            for (const auto& tb : b.calls_from(qb, l))
              out.add_call(from, l, states.get(out, a, b, ta.to, tb.to), sym(ta.push, tb.push));
          break;
        case LetterKind::Return:
          for (const auto& ta : a.rets_from_any(qa, l))
            for (const auto& tb : b.rets_from_any(qb, l)) {
              // bottoms pair only with bottoms; a pop of a never-pushed pair
              // simply never fires, so interning eagerly is harmless
              if ((ta.pop == 0) != (tb.pop == 0)) continue;
              out.add_ret(from, l, ta.pop == 0 ? 0 : sym(ta.pop, tb.pop),
                          states.get(out, a, b, ta.to, tb.to));
            }
          break;
      }
    }
  }
  return out;
}

Vpa wn_shuffle(const std::vector<const Vpa*>& parts) {
  if (parts.empty()) throw std::invalid_argument("wn_shuffle: no components");
  AlphabetRef sigma = parts[0]->alphabet();
  std::set<int> seen;
  for (const Vpa* p : parts) {
    if (p->alphabet() != sigma) throw std::invalid_argument("wn_shuffle: alphabet mismatch");
    for (int c : p->used_components())
      if (!seen.insert(c).second)
        throw std::invalid_argument("wn_shuffle: overlapping component alphabets");
  }
  const int n = static_cast<int>(parts.size());
  Vpa out(sigma);

  std::map<std::vector<State>, State> idx;
  std::deque<std::vector<State>> todo;
  auto get = [&](const std::vector<State>& qs) -> State {
    auto it = idx.find(qs);
    if (it != idx.end()) return it->second;
    std::string name = "(";
    bool fin = true;
    for (int i = 0; i < n; ++i) {
      if (i) name += "|";
      name += parts[i]->state_name(qs[i]);
      fin = fin && parts[i]->is_final(qs[i]);
    }
    name += ")";
    State q = out.add_state(name);
    idx.emplace(qs, q);
    todo.push_back(qs);
    if (fin) out.set_final(q);
    return q;
  };
  // stack symbols: component-tagged copies of the parts' symbols
  auto sym = [&](int i, StackSym g) -> StackSym {
    if (g == 0) return 0;
    return out.intern_stack_sym(std::to_string(i + 1) + ":" + parts[i]->stack_sym_name(g));
  };

  {
    std::vector<std::vector<State>> inits(1);
    for (int i = 0; i < n; ++i) {
      std::vector<std::vector<State>> next;
      for (const auto& pref : inits)
        for (State q : parts[i]->initials()) {
          auto v = pref;
          v.push_back(q);
          next.push_back(std::move(v));
        }
      inits.swap(next);
    }
    for (const auto& qs : inits) out.set_initial(get(qs));
  }

  while (!todo.empty()) {
    auto qs = todo.front();
    todo.pop_front();
    State from = idx.at(qs);
    for (int i = 0; i < n; ++i) {
      const Vpa& p = *parts[i];
      for (const auto& t : p.ints()) {
        if (t.from != qs[i]) continue;
        auto qs2 = qs;
        qs2[i] = t.to;
        out.add_int(from, t.letter, get(qs2));
      }
      for (const auto& t : p.calls()) {
        if (t.from != qs[i]) continue;
        auto qs2 = qs;
        qs2[i] = t.to;
        out.add_call(from, t.letter, get(qs2), sym(i, t.push));
      }
      for (const auto& t : p.rets()) {
        if (t.from != qs[i]) continue;
        auto qs2 = qs;
        qs2[i] = t.to;
        // popping a foreign component's symbol is simply not a transition:
        // that is what confines the product to well-nested words
        out.add_ret(from, t.letter, sym(i, t.pop), get(qs2));
      }
    }
  }
  return out;
}

Vpa vpa_reverse(const Vpa& a, AlphabetRef reversed_sigma) {
  Vpa out(reversed_sigma);
  for (State q = 0; q < a.num_states(); ++q) out.add_state(a.state_name(q));
  for (StackSym g = 1; g < a.num_stack_syms(); ++g) out.intern_stack_sym(a.stack_sym_name(g));
  for (State q : a.finals()) out.set_initial(q);
  for (State q : a.initials()) out.set_final(q);
  for (const auto& t : a.ints()) out.add_int(t.to, t.letter, t.from);
  // a call becomes a return read backwards, and vice versa
  for (const auto& t : a.calls()) out.add_ret(t.to, t.letter, t.push, t.from);
  for (const auto& t : a.rets()) {
    if (t.pop == 0) continue;  // pending returns have no reverse run
    out.add_call(t.to, t.letter, t.from, t.pop);
  }
  return out;
}

std::set<Word> vpa_enumerate(const Vpa& a, int max_len, bool require_empty_stack, size_t cap) {
  std::set<Word> out;
  using Config = std::pair<State, std::vector<StackSym>>;
  const auto& sigma = *a.alphabet();

  std::function<void(const std::set<Config>&, Word&)> dfs = [&](const std::set<Config>& configs,
                                                                Word& prefix) {
    for (const auto& [q, st] : configs) {
      if (a.is_final(q) && (!require_empty_stack || st.empty())) {
        out.insert(prefix);
        if (out.size() > cap) throw std::runtime_error("vpa_enumerate: cap exceeded");
        break;
      }
    }
    if (static_cast<int>(prefix.size()) == max_len) return;
    for (LetterId l = 0; l < sigma.size(); ++l) {
      std::set<Config> next;
      for (const auto& [q, st] : configs) {
        switch (sigma.kind(l)) {
          case LetterKind::Internal:
            for (const auto& t : a.ints_from(q, l)) next.insert({t.to, st});
            break;
          case LetterKind::Call:
            for (const auto& t : a.calls_from(q, l)) {
              auto st2 = st;
              st2.push_back(t.push);
              next.insert({t.to, std::move(st2)});
            }
            break;
          case LetterKind::Return: {
            StackSym top = st.empty() ? 0 : st.back();
            for (const auto& t : a.rets_from(q, l, top)) {
              auto st2 = st;
              if (!st2.empty()) st2.pop_back();
              next.insert({t.to, std::move(st2)});
            }
            break;
          }
        }
      }
      if (next.empty()) continue;
      prefix.push_back(l);
      dfs(next, prefix);
      prefix.pop_back();
    }
  };

  std::set<Config> init;
  for (State q : a.initials()) init.insert({q, {}});
  Word prefix;
  if (!init.empty()) dfs(init, prefix);
  return out;
}

std::set<State> Vpa::reachable_states() const {
  // summary saturation: wm[q] = states reachable from q by a well-matched word
  const int n = num_states();
  std::vector<std::set<State>> wm(n);
  for (State q = 0; q < n; ++q) wm[q].insert(q);
  bool changed = true;
  auto add = [&](State a, State b) {
    if (wm[a].insert(b).second) changed = true;
  };
  std::map<StackSym, std::vector<RetTrans>> rets_by_pop;
  for (const auto& r : rets_) rets_by_pop[r.pop].push_back(r);
  while (changed) {
    changed = false;
    for (const auto& t : ints_) add(t.from, t.to);
    for (State q = 0; q < n; ++q)
      for (State m : std::set<State>(wm[q].begin(), wm[q].end()))
        for (State e : std::set<State>(wm[m].begin(), wm[m].end())) add(q, e);
    for (const auto& c : calls_) {
      auto it = rets_by_pop.find(c.push);
      if (it == rets_by_pop.end()) continue;
      for (State m : std::set<State>(wm[c.to].begin(), wm[c.to].end()))
        for (const auto& r : it->second)
          if (r.from == m) add(c.from, r.to);
    }
  }
  // words may leave calls pending, or read returns on the bottom symbol while
  // the stack is still empty; track the emptiness bit for exactness
  std::set<std::pair<State, bool>> reach;
  std::deque<std::pair<State, bool>> todo;
  auto visit = [&](State q, bool empty) {
    for (State m : wm[q])
      if (reach.insert({m, empty}).second) todo.push_back({m, empty});
  };
  for (State q : initial_) visit(q, true);
  while (!todo.empty()) {
    auto [q, empty] = todo.front();
    todo.pop_front();
    for (const auto& c : calls_)
      if (c.from == q) visit(c.to, false);
    if (empty) {
      auto it = rets_by_pop.find(0);
      if (it != rets_by_pop.end())
        for (const auto& r : it->second)
          if (r.from == q) visit(r.to, true);
    }
  }
  std::set<State> out;
  for (const auto& [q, e] : reach) out.insert(q);
  return out;
}

bool Vpa::empty_language() const {
  for (State q : reachable_states())
    if (final_.count(q)) return false;
  return true;
}

std::string Vpa::dump() const {
  std::ostringstream os;
  os << "vpa states " << num_states() << "\n";
  std::vector<std::string> lines;
  for (State q : initial_) lines.push_back("initial " + state_name(q));
  for (State q : final_) lines.push_back("final " + state_name(q));
  for (const auto& t : ints_)
    lines.push_back("int " + state_name(t.from) + " " + sigma_->name(t.letter) + " " +
                    state_name(t.to));
  for (const auto& t : calls_)
    lines.push_back("call " + state_name(t.from) + " " + sigma_->name(t.letter) + " " +
                    state_name(t.to) + " push " + stack_sym_name(t.push));
  for (const auto& t : rets_)
    lines.push_back("ret " + state_name(t.from) + " " + sigma_->name(t.letter) + " pop " +
                    stack_sym_name(t.pop) + " " + state_name(t.to));
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

Vpa vpa_normalize(const Vpa& a, bool split_call_letters, NormalizeStats* stats) {
  const auto& sigma = *a.alphabet();
  // variants per state: keyed by (kind bucket, call letter or -1); bucket 3 = final-no-out
  struct Variant {
    int bucket;       // 0 int, 1 call, 2 ret, 3 final sink
    LetterId letter;  // call letter when split_call_letters, else -1
    auto operator<=>(const Variant&) const = default;
  };
  std::vector<std::vector<Variant>> variants(a.num_states());
  for (State q = 0; q < a.num_states(); ++q) {
    std::set<Variant> vs;
    for (const auto& t : a.ints())
      if (t.from == q) vs.insert({0, -1});
    for (const auto& t : a.calls())
      if (t.from == q) vs.insert({1, split_call_letters ? t.letter : -1});
    for (const auto& t : a.rets())
      if (t.from == q) vs.insert({2, -1});
    if (a.is_final(q) || vs.empty()) vs.insert({3, -1});
    variants[q] = {vs.begin(), vs.end()};
  }

  Vpa out(a.alphabet());
  for (StackSym g = 1; g < a.num_stack_syms(); ++g) out.intern_stack_sym(a.stack_sym_name(g));
  std::map<std::pair<State, Variant>, State> idx;
  for (State q = 0; q < a.num_states(); ++q) {
    int ncall = 0, nother = 0;
    for (const auto& v : variants[q]) (v.bucket == 1 ? ncall : nother)++;
    if (stats) {
      if (ncall + nother > 1) stats->kind_splits++;
      if (ncall > 1) stats->call_letter_splits += ncall - 1;
      if (a.is_final(q) && ncall + nother > 1) stats->final_splits++;
    }
    for (const auto& v : variants[q]) {
      std::string suffix;
      if (variants[q].size() > 1) {
        const char* tag[] = {"%i", "%c", "%r", "%f"};
        suffix = tag[v.bucket];
        if (v.bucket == 1 && v.letter >= 0 && ncall > 1) suffix += ":" + sigma.name(v.letter);
      }
      State nq = out.add_state(a.state_name(q) + suffix);
      idx[{q, v}] = nq;
      if (a.initials().count(q)) out.set_initial(nq);
      if (v.bucket == 3 && a.is_final(q)) out.set_final(nq);
    }
  }
  auto targets = [&](State q) { return variants[q]; };
  for (const auto& t : a.ints()) {
    State from = idx.at({t.from, Variant{0, -1}});
    for (const auto& v : targets(t.to)) out.add_int(from, t.letter, idx.at({t.to, v}));
  }
  for (const auto& t : a.calls()) {
    State from = idx.at({t.from, Variant{1, split_call_letters ? t.letter : -1}});
    for (const auto& v : targets(t.to)) out.add_call(from, t.letter, idx.at({t.to, v}), t.push);
  }
  for (const auto& t : a.rets()) {
    State from = idx.at({t.from, Variant{2, -1}});
    for (const auto& v : targets(t.to)) out.add_ret(from, t.letter, t.pop, idx.at({t.to, v}));
  }
  return out;
}

Vpa vpa_weak_hierarchical(const Vpa& a, std::vector<std::pair<State, StackSym>>* sym_origin) {
  Vpa out(a.alphabet());
  for (State q = 0; q < a.num_states(); ++q) out.add_state(a.state_name(q));
  for (State q : a.initials()) out.set_initial(q);
  for (State q : a.finals()) out.set_final(q);
  std::map<std::pair<State, StackSym>, StackSym> idx;
  if (sym_origin) sym_origin->assign(1, {-1, 0});
  auto sym = [&](State src, StackSym g) -> StackSym {
    auto it = idx.find({src, g});
    if (it != idx.end()) return it->second;
    StackSym s = out.intern_stack_sym("@" + out.state_name(src) + "/" + a.stack_sym_name(g));
    idx[{src, g}] = s;
    if (sym_origin) sym_origin->push_back({src, g});
    return s;
  };
  for (const auto& t : a.ints()) out.add_int(t.from, t.letter, t.to);
  for (const auto& t : a.calls()) out.add_call(t.from, t.letter, t.to, sym(t.from, t.push));
  for (const auto& t : a.rets()) {
    if (t.pop == 0) {
      out.add_ret(t.from, t.letter, 0, t.to);
      continue;
    }
    // one copy per possible call source of the popped symbol
    for (const auto& c : a.calls())
      if (c.push == t.pop) out.add_ret(t.from, t.letter, sym(c.from, t.pop), t.to);
  }
  return out;
}

}  // namespace hyrec
