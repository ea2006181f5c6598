#include "hyrec/reduction.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace hyrec {

std::vector<int> ReductionExpr::components() const {
  std::vector<int> out;
  std::function<void(const ReductionExpr&)> walk = [&](const ReductionExpr& e) {
    if (e.kind == Kind::Leaf) {
      out.push_back(e.leaf);
      return;
    }
    for (const auto& c : e.children) walk(c);
  };
  walk(*this);
  return out;
}

std::string ReductionExpr::to_string() const {
  std::string s;
  if (right_aligned) s += "right_aligned: ";
  switch (kind) {
    case Kind::Leaf:
      s += "P" + std::to_string(leaf);
      break;
    case Kind::Concat:
    case Kind::NestedConcat: {
      s += kind == Kind::Concat ? "concat(" : "nested_concatenation(";
      for (size_t i = 0; i < children.size(); ++i)
        s += (i ? ", " : "") + children[i].to_string();
      s += ")";
      break;
    }
    case Kind::Lockstep: {
      s += "(";
      for (size_t i = 0; i < speeds.size(); ++i) s += (i ? "," : "") + std::to_string(speeds[i]);
      s += ")-lockstep(";
      for (size_t i = 0; i < children.size(); ++i)
        s += (i ? ", " : "") + children[i].to_string();
      s += ")";
      break;
    }
  }
  if (!exclude_names.empty()) {
    s += " with exclude=[";
    for (size_t i = 0; i < exclude_names.size(); ++i) s += (i ? "," : "") + exclude_names[i];
    s += "]";
  }
  return s;
}

ReductionExpr ReductionExpr::make_leaf(int component) {
  ReductionExpr e;
  e.kind = Kind::Leaf;
  e.leaf = component;
  return e;
}
ReductionExpr ReductionExpr::make_concat(ReductionExpr a, ReductionExpr b) {
  ReductionExpr e;
  e.kind = Kind::Concat;
  e.children = {std::move(a), std::move(b)};
  return e;
}
ReductionExpr ReductionExpr::make_nested_concat(ReductionExpr a, ReductionExpr b) {
  ReductionExpr e;
  e.kind = Kind::NestedConcat;
  e.children = {std::move(a), std::move(b)};
  return e;
}
ReductionExpr ReductionExpr::make_lockstep(std::vector<int> speeds,
                                           std::vector<ReductionExpr> es) {
  ReductionExpr e;
  e.kind = Kind::Lockstep;
  e.speeds = std::move(speeds);
  e.children = std::move(es);
  if (e.speeds.size() != e.children.size())
    throw std::invalid_argument("lockstep: speed vector arity mismatch");
  return e;
}

// ---------------------------------------------------------------------------
// sleep sets

Vpa sleepset_vpa(const OrderAutomaton& o, const Grouping& groups) {
  const auto& sigma = *o.vpa.alphabet();
  if (sigma.size() > 64) throw std::invalid_argument("sleepset_vpa: alphabet too large");
  std::vector<int> c2g(sigma.num_components() + 1, static_cast<int>(groups.size()));
  for (int g = 0; g < static_cast<int>(groups.size()); ++g)
    for (int c : groups[g]) c2g[c] = g;
  auto group_of = [&](LetterId a) { return c2g[sigma.component(a)]; };
  // commuting = different groups
  std::vector<uint64_t> commutes(sigma.size(), 0);
  for (LetterId a = 0; a < sigma.size(); ++a)
    for (LetterId b = 0; b < sigma.size(); ++b)
      if (group_of(a) != group_of(b)) commutes[a] |= 1ULL << b;

  Vpa out(o.vpa.alphabet());
  using Key = std::pair<uint64_t, State>;
  std::map<Key, State> idx;
  std::deque<Key> todo;
  auto setname = [&](uint64_t r) {
    std::string s = "{";
    for (LetterId a = 0; a < sigma.size(); ++a)
      if (r >> a & 1) s += sigma.name(a) + ",";
    return s + "}";
  };
  auto get = [&](uint64_t r, State s) -> State {
    auto it = idx.find({r, s});
    if (it != idx.end()) return it->second;
    State q = out.add_state(setname(r) + o.vpa.state_name(s));
    idx[{r, s}] = q;
    todo.push_back({r, s});
    out.set_final(q);  // every minimal prefix is accepted
    return q;
  };
  out.set_initial(get(0, *o.vpa.initials().begin()));
  while (!todo.empty()) {
    auto [r, s] = todo.front();
    todo.pop_front();
    State from = idx.at({r, s});
    const LinearOrder& ord = o.ord.at(s);
    for (LetterId a = 0; a < sigma.size(); ++a) {
      if (r >> a & 1) continue;  // asleep
      uint64_t r2 = 0;
      for (LetterId b = 0; b < sigma.size(); ++b)
        if ((commutes[a] >> b & 1) && (ord.less(b, a) || (r >> b & 1))) r2 |= 1ULL << b;
      switch (sigma.kind(a)) {
        case LetterKind::Internal:
          for (const auto& t : o.vpa.ints_from(s, a)) out.add_int(from, a, get(r2, t.to));
          break;
        case LetterKind::Call:
          for (const auto& t : o.vpa.calls_from(s, a)) {
            StackSym g = out.intern_stack_sym(o.vpa.stack_sym_name(t.push));
            out.add_call(from, a, get(r2, t.to), g);
          }
          break;
        case LetterKind::Return:
          for (const auto& t : o.vpa.rets()) {
            if (t.from != s || t.letter != a) continue;
            StackSym g = t.pop == 0 ? 0 : out.intern_stack_sym(o.vpa.stack_sym_name(t.pop));
            out.add_ret(from, a, g, get(r2, t.to));
          }
          break;
      }
    }
  }
  return out;
}

Vpa generic_lex_reduction(const OrderAutomaton& o, const std::vector<const Vpa*>& parts,
                          const Grouping& groups) {
  OrderAutomaton repaired = coherence_repair(o, groups);
  Vpa sleeps = sleepset_vpa(repaired, groups);
  Vpa shuffle = wn_shuffle(parts);
  return vpa_intersect(sleeps, shuffle);
}

// ---------------------------------------------------------------------------
// optimized greedy product (App. C construction, generalized to n parts)

Vpa optimized_product(const OrderAutomaton& o, const std::vector<const Vpa*>& raw_parts,
                      const Grouping& groups, OcStats* stats) {
  const AlphabetRef sigma_ref = o.vpa.alphabet();
  const auto& sigma = *sigma_ref;
  const int n = static_cast<int>(raw_parts.size());
  if (n != static_cast<int>(groups.size()))
    throw std::invalid_argument("optimized_product: grouping arity mismatch");

  std::vector<Vpa> parts;
  parts.reserve(n);
  for (const Vpa* p : raw_parts) {
    if (p->alphabet() != sigma_ref)
      throw std::invalid_argument("optimized_product: alphabet mismatch");
    parts.push_back(vpa_normalize(*p));
  }
  {
    std::vector<const Vpa*> ps;
    for (const auto& p : parts) ps.push_back(&p);
    if (!is_uniform_multi(o, ps))
      throw std::invalid_argument("optimized_product: order not uniform for these parts");
  }
  std::vector<int> c2g(sigma.num_components() + 1, -1);
  for (int g = 0; g < n; ++g)
    for (int c : groups[g]) c2g[c] = g;
  auto group_of = [&](LetterId a) { return c2g[sigma.component(a)]; };

  // conceptual stack symbols: (group, local symbol); (-1,0) is the bottom
  using GSym = std::pair<int, StackSym>;
  const GSym kBot{-1, 0};
  auto gsym_name = [&](GSym g) {
    if (g == kBot) return std::string("$");
    return std::to_string(g.first + 1) + ":" + parts[g.first].stack_sym_name(g.second);
  };

  struct StateKey {
    std::vector<State> qs;
    State qa;
    GSym top;
    auto operator<=>(const StateKey&) const = default;
  };
  Vpa out(sigma_ref);
  std::map<StateKey, State> idx;
  std::deque<StateKey> todo;
  auto get = [&](const StateKey& k) -> State {
    auto it = idx.find(k);
    if (it != idx.end()) return it->second;
    std::string name = "(";
    bool fin = true;
    for (int i = 0; i < n; ++i) {
      name += parts[i].state_name(k.qs[i]) + "|";
      fin = fin && parts[i].is_final(k.qs[i]);
    }
    name += o.vpa.state_name(k.qa) + "|" + gsym_name(k.top) + ")";
    State q = out.add_state(name);
    idx[k] = q;
    todo.push_back(k);
    if (fin) out.set_final(q);
    return q;
  };
  // result stack symbols: (pushed gsym, order symbol, previous gsym)
  std::map<std::tuple<GSym, StackSym, GSym>, StackSym> syms;
  auto sym = [&](GSym g, StackSym ga, GSym gprev) -> StackSym {
    auto it = syms.find({g, ga, gprev});
    if (it != syms.end()) return it->second;
    StackSym s = out.intern_stack_sym("(" + gsym_name(g) + ";" + o.vpa.stack_sym_name(ga) +
                                      ";" + gsym_name(gprev) + ")");
    syms[{g, ga, gprev}] = s;
    return s;
  };
  // pops of (g, ga, gprev) may surface any previously seen gsym as gprev;
  // track the set and re-visit return emitters when it grows
  std::set<GSym> seen_gsyms{kBot};
  std::vector<StateKey> ret_emitters;  // states whose winner reads returns

  {
    std::vector<std::vector<State>> inits(1);
    for (int i = 0; i < n; ++i) {
      std::vector<std::vector<State>> next;
      for (const auto& pref : inits)
        for (State q : parts[i].initials()) {
          auto v = pref;
          v.push_back(q);
          next.push_back(std::move(v));
        }
      inits.swap(next);
    }
    State qa0 = *o.vpa.initials().begin();
    for (const auto& qs : inits) out.set_initial(get({qs, qa0, kBot}));
  }

  auto enabled_letters = [&](const StateKey& k) {
    std::vector<LetterId> en;
    for (int i = 0; i < n; ++i) {
      for (LetterId a : parts[i].outgoing_letters(k.qs[i])) {
        if (sigma.kind(a) != LetterKind::Return) {
          en.push_back(a);
        } else if (k.top.first == i &&
                   !parts[i].rets_from(k.qs[i], a, k.top.second).empty()) {
          en.push_back(a);
        }
      }
    }
    return en;
  };

  auto emit_returns = [&](const StateKey& k, int g) {
    State from = idx.at(k);
    for (const auto& tr : parts[g].rets()) {
      if (tr.from != k.qs[g] || k.top != GSym{g, tr.pop}) continue;
      const auto& atr = o.vpa.rets_from_any(k.qa, tr.letter);
      for (const auto& at : atr) {
        for (const GSym& gprev : seen_gsyms) {
          auto qs2 = k.qs;
          qs2[g] = tr.to;
          State to = get({qs2, at.to, gprev});
          out.add_ret(from, tr.letter, sym(k.top, at.pop, gprev), to);
        }
      }
    }
  };

  auto process = [&](const StateKey& k) {
    State from = idx.at(k);
    auto en = enabled_letters(k);
    if (en.empty()) return;
    LetterId min_letter = o.ord.at(k.qa).min_of(en);
    int g = group_of(min_letter);
    assert(g >= 0);
    // the winning group moves with all its outgoing transitions
    for (const auto& tr : parts[g].ints()) {
      if (tr.from != k.qs[g]) continue;
      for (const auto& at : o.vpa.ints_from(k.qa, tr.letter)) {
        auto qs2 = k.qs;
        qs2[g] = tr.to;
        out.add_int(from, tr.letter, get({qs2, at.to, k.top}));
      }
    }
    for (const auto& tr : parts[g].calls()) {
      if (tr.from != k.qs[g]) continue;
      for (const auto& at : o.vpa.calls_from(k.qa, tr.letter)) {
        GSym pushed{g, tr.push};
        auto qs2 = k.qs;
        qs2[g] = tr.to;
        State to = get({qs2, at.to, pushed});
        out.add_call(from, tr.letter, to, sym(pushed, at.push, k.top));
        if (seen_gsyms.insert(pushed).second) {
          // new conceptual symbol: previously emitted returns may now pop it
          for (const auto& rk : ret_emitters) {
            int rg = rk.top.first;
            if (rg >= 0) {
              // re-emit with the grown set (dedup via transition set is not
              // kept; emit only the new gprev)
              State rfrom = idx.at(rk);
              for (const auto& rtr : parts[rg].rets()) {
                if (rtr.from != rk.qs[rg] || rk.top != GSym{rg, rtr.pop}) continue;
                for (const auto& rat : o.vpa.rets_from_any(rk.qa,
                                                           rtr.letter)) {
                  auto qs3 = rk.qs;
                  qs3[rg] = rtr.to;
                  State rto = get({qs3, rat.to, pushed});
                  out.add_ret(rfrom, rtr.letter, sym(rk.top, rat.pop, pushed), rto);
                }
              }
            }
          }
        }
      }
    }
    bool winner_returns = false;
    for (const auto& tr : parts[g].rets())
      if (tr.from == k.qs[g] && k.top == GSym{g, tr.pop}) winner_returns = true;
    if (winner_returns) {
      ret_emitters.push_back(k);
      emit_returns(k, g);
    }
  };

  while (!todo.empty()) {
    StateKey k = todo.front();
    todo.pop_front();
    process(k);
  }

  if (stats) {
    long long bound = 1;
    for (const auto& p : parts) bound *= p.num_states();
    bound *= o.vpa.num_states();
    long long ngam = 1;  // shared bottom
    for (const auto& p : parts) ngam += p.num_stack_syms() - 1;
    bound *= ngam;
    stats->reachable_states = out.num_states();
    stats->bound = bound;
    if (stats->reachable_states > stats->bound)
      throw std::logic_error("optimized_product: size bound violated");
  }
  return out;
}

// ---------------------------------------------------------------------------
// word-level canonical semantics

std::vector<int> dec(const std::vector<int>& speeds, const std::vector<int>& t) {
  const int n = static_cast<int>(speeds.size());
  assert(static_cast<int>(t.size()) == n);
  bool zero = true;
  for (int v : t) zero = zero && v == 0;
  std::vector<int> out(n, 0);
  if (zero) {
    out[0] = speeds[0] - 1;
    for (int i = 1; i < n; ++i) out[i] = speeds[i];
    return out;
  }
  int i = 0;
  while (t[i] == 0) ++i;
  out[i] = t[i] - 1;
  for (int j = i + 1; j < n; ++j) out[j] = t[j];
  return out;
}

namespace {

// split "c body r tail" of a well-matched word starting with a call
struct CallSplit {
  LetterId c, r;
  Word body, tail;
};

CallSplit split_call(const VPAlphabet& sigma, const Word& w) {
  assert(!w.empty() && sigma.kind(w[0]) == LetterKind::Call);
  MatchingRelation m = matching_of(sigma, w);
  int j = m.match[0];
  assert(j > 0);
  CallSplit out;
  out.c = w[0];
  out.r = w[j];
  out.body.assign(w.begin() + 1, w.begin() + j);
  out.tail.assign(w.begin() + j + 1, w.end());
  return out;
}

Word ls_rec(const VPAlphabet& sigma, std::vector<int> s, std::vector<int> t,
            std::vector<Word> ws) {
  // drop exhausted components
  for (int i = static_cast<int>(ws.size()) - 1; i >= 0; --i) {
    if (ws[i].empty()) {
      ws.erase(ws.begin() + i);
      s.erase(s.begin() + i);
      t.erase(t.begin() + i);
    }
  }
  const int n = static_cast<int>(ws.size());
  if (n == 0) return {};
  if (n == 1) return ws[0];
  // leftmost component whose word starts with an internal moves first
  for (int i = 0; i < n; ++i) {
    if (sigma.kind(ws[i][0]) == LetterKind::Internal) {
      LetterId a = ws[i][0];
      ws[i].erase(ws[i].begin());
      Word rest = ls_rec(sigma, std::move(s), std::move(t), std::move(ws));
      rest.insert(rest.begin(), a);
      return rest;
    }
  }
  // all words start with calls
  bool zero = true;
  for (int v : t) zero = zero && v == 0;
  if (zero) {
    std::vector<CallSplit> sp(n);
    for (int i = 0; i < n; ++i) sp[i] = split_call(sigma, ws[i]);
    std::vector<Word> inner(n);
    inner[0] = sp[0].body;
    for (int i = 1; i < n; ++i) {
      inner[i].push_back(sp[i].c);
      inner[i].insert(inner[i].end(), sp[i].body.begin(), sp[i].body.end());
      inner[i].push_back(sp[i].r);
    }
    std::vector<Word> tails(n);
    for (int i = 0; i < n; ++i) tails[i] = sp[i].tail;
    Word u = ls_rec(sigma, s, dec(s, t), std::move(inner));
    Word v = ls_rec(sigma, s, t, std::move(tails));
    Word out{sp[0].c};
    out.insert(out.end(), u.begin(), u.end());
    out.push_back(sp[0].r);
    out.insert(out.end(), v.begin(), v.end());
    return out;
  }
  int m = 0;
  while (t[m] == 0) ++m;
  CallSplit sp = split_call(sigma, ws[m]);
  std::vector<Word> inner = ws;
  inner[m] = sp.body;
  Word u = ls_rec(sigma, s, dec(s, t), std::move(inner));
  Word out{sp.c};
  out.insert(out.end(), u.begin(), u.end());
  out.push_back(sp.r);
  out.insert(out.end(), sp.tail.begin(), sp.tail.end());
  return out;
}

}  // namespace

Word nested_concat_words(const VPAlphabet& sigma, const Word& w1, const Word& w2) {
  if (!is_well_matched(sigma, w1) || !is_well_matched(sigma, w2))
    throw std::invalid_argument("nested_concat_words: inputs must be well-matched");
  std::function<Word(const Word&, const Word&)> nc = [&](const Word& u,
                                                         const Word& v) -> Word {
    if (u.empty()) return v;
    if (sigma.kind(u[0]) == LetterKind::Internal) {
      Word rest = nc(Word(u.begin() + 1, u.end()), v);
      rest.insert(rest.begin(), u[0]);
      return rest;
    }
    CallSplit sp = split_call(sigma, u);
    Word mid = nc(sp.body, v);
    Word out{sp.c};
    out.insert(out.end(), mid.begin(), mid.end());
    out.push_back(sp.r);
    out.insert(out.end(), sp.tail.begin(), sp.tail.end());
    return out;
  };
  return nc(w1, w2);
}

Word lockstep_words(const VPAlphabet& sigma, const std::vector<int>& speeds,
                    const std::vector<Word>& words) {
  if (speeds.size() != words.size())
    throw std::invalid_argument("lockstep_words: arity mismatch");
  for (int v : speeds)
    if (v < 1) throw std::invalid_argument("lockstep_words: speeds must be positive");
  for (const Word& w : words)
    if (!is_well_matched(sigma, w))
      throw std::invalid_argument("lockstep_words: inputs must be well-matched");
  return ls_rec(sigma, speeds, std::vector<int>(speeds.size(), 0), words);
}

// ---------------------------------------------------------------------------
// direct VPG constructions (queue-driven)

namespace {

std::string plain_name(int part, const std::string& nt) {
  return std::to_string(part + 1) + ":" + nt;
}

}  // namespace

Vpg nested_concat_vpg(const Vpg& g1, const Vpg& g2) {
  if (g1.alphabet() != g2.alphabet())
    throw std::invalid_argument("nested_concat_vpg: alphabet mismatch");
  if (!g1.check_uniform() || !g2.check_uniform())
    throw std::invalid_argument("nested_concat_vpg: inputs must be uniform-form");
  Vpg out(g1.alphabet());
  struct Meta {
    bool pair;
    NonTerminal y1, y2;  // pair
    int part;            // plain
    NonTerminal nt;
  };
  std::vector<Meta> meta;
  std::map<std::string, NonTerminal> byname;
  std::deque<NonTerminal> queue;
  auto intern = [&](const std::string& name, Meta m) -> NonTerminal {
    auto it = byname.find(name);
    if (it != byname.end()) return it->second;
    NonTerminal x = out.add_nonterminal(name);
    byname[name] = x;
    meta.push_back(m);
    queue.push_back(x);
    return x;
  };
  auto pair_sym = [&](NonTerminal y1, NonTerminal y2) {
    return intern("[" + g1.name(y1) + "," + g2.name(y2) + "]", {true, y1, y2, -1, -1});
  };
  auto plain_sym = [&](int part, NonTerminal nt) {
    const Vpg& g = part == 0 ? g1 : g2;
    return intern(plain_name(part, g.name(nt)), {false, -1, -1, part, nt});
  };
  for (NonTerminal s1 : g1.starts())
    for (NonTerminal s2 : g2.starts()) out.set_start(pair_sym(s1, s2));
  while (!queue.empty()) {
    NonTerminal x = queue.front();
    queue.pop_front();
    Meta m = meta.at(x);
    if (!m.pair) {
      const Vpg& g = m.part == 0 ? g1 : g2;
      for (const auto& p : g.productions_of(m.nt)) {
        switch (p.kind) {
          case Production::Kind::Eps: out.add_eps(x); break;
          case Production::Kind::Int: out.add_int(x, p.a, plain_sym(m.part, p.y)); break;
          case Production::Kind::Call:
            out.add_call(x, p.a, plain_sym(m.part, p.y), p.r, plain_sym(m.part, p.z));
            break;
        }
      }
      continue;
    }
    bool second_alive = !g2.productions_of(m.y2).empty();
    for (const auto& p : g1.productions_of(m.y1)) {
      switch (p.kind) {
        case Production::Kind::Eps:
          for (const auto& q : g2.productions_of(m.y2)) {
            switch (q.kind) {
              case Production::Kind::Eps: out.add_eps(x); break;
              case Production::Kind::Int: out.add_int(x, q.a, plain_sym(1, q.y)); break;
              case Production::Kind::Call:
                out.add_call(x, q.a, plain_sym(1, q.y), q.r, plain_sym(1, q.z));
                break;
            }
          }
          break;
        case Production::Kind::Int:
          if (second_alive) out.add_int(x, p.a, pair_sym(p.y, m.y2));
          break;
        case Production::Kind::Call:
          if (second_alive)
            out.add_call(x, p.a, pair_sym(p.y, m.y2), p.r, plain_sym(0, p.z));
          break;
      }
    }
  }
  out.set_uniform_flag(out.check_uniform());
  return out;
}

Vpg lockstep_vpg(const std::vector<int>& speeds, const std::vector<const Vpg*>& parts) {
  const int arity = static_cast<int>(parts.size());
  if (static_cast<int>(speeds.size()) != arity)
    throw std::invalid_argument("lockstep_vpg: arity mismatch");
  for (int v : speeds)
    if (v < 1) throw std::invalid_argument("lockstep_vpg: speeds must be positive");
  AlphabetRef sigma = parts[0]->alphabet();
  for (const Vpg* g : parts) {
    if (g->alphabet() != sigma) throw std::invalid_argument("lockstep_vpg: alphabet mismatch");
    if (!g->check_uniform())
      throw std::invalid_argument("lockstep_vpg: inputs must be uniform-form");
  }

  // a tuple entry is a nonterminal or a pinned call block c Z r (tail eps)
  struct Entry {
    int part;
    bool block;
    NonTerminal nt;       // plain
    LetterId c, r;        // block
    NonTerminal z;        // block body
    auto operator<=>(const Entry&) const = default;
  };
  enum class SKind { Tuple, Plain, Eps };
  struct Meta {
    SKind kind;
    std::vector<int> s, t;
    std::vector<Entry> entries;
    int part = -1;
    NonTerminal nt = -1;
  };

  Vpg out(sigma);
  std::vector<Meta> meta;
  std::map<std::string, NonTerminal> byname;
  std::deque<NonTerminal> queue;
  auto intern = [&](const std::string& name, Meta m) -> NonTerminal {
    auto it = byname.find(name);
    if (it != byname.end()) return it->second;
    NonTerminal x = out.add_nonterminal(name);
    byname[name] = x;
    meta.push_back(std::move(m));
    queue.push_back(x);
    return x;
  };
  auto plain_sym = [&](int part, NonTerminal nt) {
    Meta m{SKind::Plain, {}, {}, {}, part, nt};
    return intern(plain_name(part, parts[part]->name(nt)), std::move(m));
  };
  auto eps_sym = [&]() { return intern("E", Meta{SKind::Eps, {}, {}, {}, -1, -1}); };

  // uniform inputs: production kind is a per-nonterminal property
  auto nt_kind = [&](int part, NonTerminal x) -> std::optional<Production::Kind> {
    auto ps = parts[part]->productions_of(x);
    if (ps.empty()) return std::nullopt;
    return ps[0].kind;
  };
  auto entry_name = [&](const Entry& e) {
    if (!e.block) return plain_name(e.part, parts[e.part]->name(e.nt));
    return std::to_string(e.part + 1) + ":<" + sigma->name(e.c) + " " +
           parts[e.part]->name(e.z) + " " + sigma->name(e.r) + ">";
  };

  // canonical tuple symbol: eps-kind entries vanish together with their
  // speed/counter slots; singleton tuples collapse
  std::function<NonTerminal(std::vector<int>, std::vector<int>, std::vector<Entry>)>
      tuple_sym = [&](std::vector<int> s, std::vector<int> t,
                      std::vector<Entry> entries) -> NonTerminal {
    for (int i = static_cast<int>(entries.size()) - 1; i >= 0; --i) {
      const Entry& e = entries[i];
      if (!e.block && nt_kind(e.part, e.nt) == Production::Kind::Eps) {
        entries.erase(entries.begin() + i);
        s.erase(s.begin() + i);
        t.erase(t.begin() + i);
      }
    }
    if (entries.empty()) return eps_sym();
    if (entries.size() == 1) {
      const Entry& e = entries[0];
      if (!e.block) return plain_sym(e.part, e.nt);
      // standalone call block: one call production with an eps tail
      Meta m{SKind::Tuple, std::move(s), std::move(t), {e}, -1, -1};
      return intern("[" + entry_name(e) + "]", std::move(m));
    }
    std::string name = "[s=";
    for (size_t i = 0; i < s.size(); ++i) name += (i ? "," : "") + std::to_string(s[i]);
    name += ";t=";
    for (size_t i = 0; i < t.size(); ++i) name += (i ? "," : "") + std::to_string(t[i]);
    name += ";";
    for (size_t i = 0; i < entries.size(); ++i) name += (i ? "," : "") + entry_name(entries[i]);
    name += "]";
    Meta m{SKind::Tuple, std::move(s), std::move(t), std::move(entries), -1, -1};
    return intern(name, std::move(m));
  };

  {
    std::vector<std::vector<Entry>> startsets(1);
    for (int i = 0; i < arity; ++i) {
      std::vector<std::vector<Entry>> next;
      for (const auto& pref : startsets)
        for (NonTerminal st : parts[i]->starts()) {
          auto v = pref;
          v.push_back(Entry{i, false, st, -1, -1, -1});
          next.push_back(std::move(v));
        }
      startsets.swap(next);
    }
    for (auto& es : startsets)
      out.set_start(tuple_sym(speeds, std::vector<int>(arity, 0), std::move(es)));
  }

  auto entry_productions = [&](const Entry& e) -> std::vector<Production> {
    if (!e.block) return parts[e.part]->productions_of(e.nt);
    Production p{-1, Production::Kind::Call, e.c, e.z, e.r, -2};  // -2 marks the eps tail
    return {p};
  };

  while (!queue.empty()) {
    NonTerminal x = queue.front();
    queue.pop_front();
    Meta m = meta.at(x);
    if (m.kind == SKind::Eps) {
      out.add_eps(x);
      continue;
    }
    if (m.kind == SKind::Plain) {
      for (const auto& p : parts[m.part]->productions_of(m.nt)) {
        switch (p.kind) {
          case Production::Kind::Eps: out.add_eps(x); break;
          case Production::Kind::Int: out.add_int(x, p.a, plain_sym(m.part, p.y)); break;
          case Production::Kind::Call:
            out.add_call(x, p.a, plain_sym(m.part, p.y), p.r, plain_sym(m.part, p.z));
            break;
        }
      }
      continue;
    }
    const int k = static_cast<int>(m.entries.size());
    // every entry must be productive, else the tuple is dead
    bool dead = false;
    std::vector<std::vector<Production>> prods(k);
    for (int i = 0; i < k; ++i) {
      prods[i] = entry_productions(m.entries[i]);
      if (prods[i].empty()) dead = true;
    }
    if (dead) continue;
    // entries are eps-free by canonicalization; find the first internal-kind
    int j = -1;
    for (int i = 0; i < k; ++i)
      if (prods[i][0].kind == Production::Kind::Int) {
        j = i;
        break;
      }
    if (j >= 0) {
      for (const auto& p : prods[j]) {
        auto es2 = m.entries;
        es2[j] = Entry{m.entries[j].part, false, p.y, -1, -1, -1};
        out.add_int(x, p.a, tuple_sym(m.s, m.t, std::move(es2)));
      }
      continue;
    }
    // all call-kind
    bool zero = true;
    for (int v : m.t) zero = zero && v == 0;
    if (zero) {
      // round start: the first entry leads, the rest pin their call blocks,
      // all tails regroup behind the leader's return
      std::function<void(int, std::vector<Production>&)> combos =
          [&](int i, std::vector<Production>& chosen) {
            if (i == k) {
              std::vector<Entry> inner(k);
              inner[0] = Entry{m.entries[0].part, false, chosen[0].y, -1, -1, -1};
              for (int q = 1; q < k; ++q)
                inner[q] = Entry{m.entries[q].part, true, -1, chosen[q].a, chosen[q].r,
                                 chosen[q].y};
              std::vector<Entry> tails(k);
              std::vector<int> valid;
              for (int q = 0; q < k; ++q) {
                if (chosen[q].z == -2) {
                  // block tail is eps: drop it here (identification rule)
                  tails[q] = Entry{m.entries[q].part, false, -1, -1, -1, -1};
                } else {
                  tails[q] = Entry{m.entries[q].part, false, chosen[q].z, -1, -1, -1};
                }
              }
              std::vector<int> s2, t2;
              std::vector<Entry> tails2;
              for (int q = 0; q < k; ++q) {
                if (tails[q].nt < 0) continue;
                s2.push_back(m.s[q]);
                t2.push_back(m.t[q]);
                tails2.push_back(tails[q]);
              }
              NonTerminal u = tuple_sym(m.s, dec(m.s, m.t), std::move(inner));
              NonTerminal v = tails2.empty()
                                  ? eps_sym()
                                  : tuple_sym(std::move(s2), std::move(t2), std::move(tails2));
              out.add_call(x, chosen[0].a, u, chosen[0].r, v);
              return;
            }
            for (const auto& p : prods[i]) {
              chosen.push_back(p);
              combos(i + 1, chosen);
              chosen.pop_back();
            }
          };
      std::vector<Production> chosen;
      combos(0, chosen);
    } else {
      int mm = 0;
      while (m.t[mm] == 0) ++mm;
      for (const auto& p : prods[mm]) {
        auto inner = m.entries;
        inner[mm] = Entry{m.entries[mm].part, false, p.y, -1, -1, -1};
        NonTerminal u = tuple_sym(m.s, dec(m.s, m.t), std::move(inner));
        NonTerminal tail =
            p.z == -2 ? eps_sym() : plain_sym(m.entries[mm].part, p.z);
        out.add_call(x, p.a, u, p.r, tail);
      }
    }
  }
  out.set_uniform_flag(out.check_uniform());
  return out;
}

// ---------------------------------------------------------------------------
// expression evaluation

namespace {

// flips alphabets with memo so that flip(flip(s)) is pointer-identical to s
struct AlphabetFlip {
  std::map<const VPAlphabet*, AlphabetRef> memo;
  AlphabetRef flip(const AlphabetRef& s) {
    auto it = memo.find(s.get());
    if (it != memo.end()) return it->second;
    AlphabetRef r = s->reversed();
    memo[s.get()] = r;
    memo[r.get()] = s;
    return r;
  }
};

struct Evaluator {
  EvalMode mode;
  const std::map<int, Vpg>& inputs;
  AlphabetFlip flip;
  EvalResult* result;

  // every build step is parameterized by the alphabet currently in effect
  // (flipped under right alignment)
  Vpg build_vpg(const ReductionExpr& e, AlphabetRef sigma, bool flipped) {
    if (e.right_aligned) {
      ReductionExpr inner = e;
      inner.right_aligned = false;
      Vpg r = build_vpg(inner, flip.flip(sigma), !flipped);
      return vpg_reverse(r, sigma);
    }
    if (!e.excluded.empty() || !e.exclude_names.empty())
      throw std::invalid_argument("exclusions require aut or vpg mode");
    switch (e.kind) {
      case ReductionExpr::Kind::Leaf: {
        const Vpg& in = inputs.at(e.leaf);
        if (!flipped) return in;
        return vpg_reverse(in, sigma);
      }
      case ReductionExpr::Kind::Concat: {
        Vpg a = build_vpg(e.children[0], sigma, flipped);
        Vpg b = build_vpg(e.children[1], sigma, flipped);
        if (flipped) return vpg_concat(b, a);  // reversal swaps the order
        return vpg_concat(a, b);
      }
      case ReductionExpr::Kind::NestedConcat: {
        Vpg a = vpg_uniformize(build_vpg(e.children[0], sigma, flipped));
        Vpg b = vpg_uniformize(build_vpg(e.children[1], sigma, flipped));
        return nested_concat_vpg(a, b);
      }
      case ReductionExpr::Kind::Lockstep: {
        std::vector<Vpg> gs;
        for (const auto& c : e.children)
          gs.push_back(vpg_uniformize(build_vpg(c, sigma, flipped)));
        std::vector<const Vpg*> ps;
        for (const auto& g : gs) ps.push_back(&g);
        return lockstep_vpg(e.speeds, ps);
      }
    }
    throw std::logic_error("unreachable");
  }

  Vpa build_vpa(const ReductionExpr& e, AlphabetRef sigma, bool flipped) {
    if (e.right_aligned) {
      ReductionExpr inner = e;
      inner.right_aligned = false;
      Vpa r = build_vpa(inner, flip.flip(sigma), !flipped);
      return vpa_reverse(r, sigma);
    }
    if (e.kind == ReductionExpr::Kind::Leaf) {
      const Vpg& in = inputs.at(e.leaf);
      if (!flipped) return vpg_to_vpa(in);
      return vpg_to_vpa(vpg_reverse(in, sigma));
    }
    std::vector<Vpa> subs;
    Grouping groups;
    std::vector<ReductionExpr> children = e.children;
    if (e.kind == ReductionExpr::Kind::Concat && flipped) std::swap(children[0], children[1]);
    for (const auto& c : children) {
      subs.push_back(build_vpa(c, sigma, flipped));
      groups.push_back(c.components());
    }
    OrderAutomaton o(sigma);
    switch (e.kind) {
      case ReductionExpr::Kind::Concat:
        o = concat_order(sigma, groups);
        break;
      case ReductionExpr::Kind::NestedConcat:
        o = nested_concat_order(sigma, groups);
        break;
      case ReductionExpr::Kind::Lockstep:
        o = lockstep_order(e.speeds, sigma, groups);
        break;
      default:
        throw std::logic_error("unreachable");
    }
    if (!e.excluded.empty()) o = exclude_letters(o, e.excluded);
    std::vector<const Vpa*> ps;
    for (const auto& s : subs) ps.push_back(&s);
    OcStats st;
    Vpa prod = optimized_product(o, ps, groups, &st);
    result->oc.push_back(st);
    return prod;
  }
};

}  // namespace

EvalResult evaluate(const ReductionExpr& expr, const std::map<int, Vpg>& inputs, EvalMode mode) {
  {
    auto comps = expr.components();
    std::set<int> seen;
    for (int c : comps) {
      if (!seen.insert(c).second)
        throw std::invalid_argument("reduction expression reuses component P" +
                                    std::to_string(c));
      if (!inputs.count(c))
        throw std::invalid_argument("no input for component P" + std::to_string(c));
    }
  }
  AlphabetRef sigma = inputs.begin()->second.alphabet();
  EvalResult res;
  Evaluator ev{mode, inputs, {}, &res};
  switch (mode) {
    case EvalMode::Direct:
      res.vpg = ev.build_vpg(expr, sigma, false);
      break;
    case EvalMode::Aut:
      res.vpa = ev.build_vpa(expr, sigma, false);
      break;
    case EvalMode::VpgMode: {
      Vpa a = ev.build_vpa(expr, sigma, false);
      res.vpg = vpa_to_vpg(a);
      break;
    }
  }
  return res;
}

}  // namespace hyrec
