#include "hyrec/vpg.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace hyrec {

NonTerminal Vpg::add_nonterminal(std::string name) {
  if (by_name_.count(name)) throw std::invalid_argument("duplicate nonterminal: " + name);
  NonTerminal x = static_cast<NonTerminal>(names_.size());
  by_name_.emplace(name, x);
  names_.push_back(std::move(name));
  return x;
}

NonTerminal Vpg::nonterminal(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown nonterminal: " + name);
  return it->second;
}

void Vpg::add_production(Production p) {
  if (p.kind == Production::Kind::Int && sigma_->kind(p.a) != LetterKind::Internal)
    throw std::invalid_argument("X -> aY needs an internal letter");
  if (p.kind == Production::Kind::Call &&
      (sigma_->kind(p.a) != LetterKind::Call || sigma_->kind(p.r) != LetterKind::Return))
    throw std::invalid_argument("X -> cYrZ needs a call and a return");
  if (prod_set_.insert(p).second) prods_.push_back(p);
}

std::vector<Production> Vpg::productions_of(NonTerminal x) const {
  std::vector<Production> out;
  for (const auto& p : prods_)
    if (p.lhs == x) out.push_back(p);
  return out;
}

bool Vpg::check_uniform() const {
  std::vector<int> kind(num_nonterminals(), -1);
  for (const auto& p : prods_) {
    int k = static_cast<int>(p.kind);
    if (kind[p.lhs] == -1) kind[p.lhs] = k;
    else if (kind[p.lhs] != k) return false;
  }
  return true;
}

std::string Vpg::dump() const {
  std::ostringstream os;
  os << "vpg nonterminals " << num_nonterminals() << "\n";
  std::vector<std::string> lines;
  for (NonTerminal s : starts_) lines.push_back("start " + name(s));
  for (const auto& p : prods_) {
    switch (p.kind) {
      case Production::Kind::Eps:
        lines.push_back("prod " + name(p.lhs) + " -> eps");
        break;
      case Production::Kind::Int:
        lines.push_back("prod " + name(p.lhs) + " -> " + sigma_->name(p.a) + " " + name(p.y));
        break;
      case Production::Kind::Call:
        lines.push_back("prod " + name(p.lhs) + " -> " + sigma_->name(p.a) + " " + name(p.y) +
                        " " + sigma_->name(p.r) + " " + name(p.z));
        break;
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

Vpg vpg_trim(const Vpg& g) {
  const int n = g.num_nonterminals();
  std::vector<bool> gen(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      if (gen[p.lhs]) continue;
      bool ok = false;
      switch (p.kind) {
        case Production::Kind::Eps: ok = true; break;
        case Production::Kind::Int: ok = gen[p.y]; break;
        case Production::Kind::Call: ok = gen[p.y] && gen[p.z]; break;
      }
      if (ok) gen[p.lhs] = changed = true;
    }
  }
  std::vector<bool> reach(n, false);
  std::deque<NonTerminal> todo;
  for (NonTerminal s : g.starts())
    if (gen[s]) {
      reach[s] = true;
      todo.push_back(s);
    }
  while (!todo.empty()) {
    NonTerminal x = todo.front();
    todo.pop_front();
    for (const auto& p : g.productions()) {
      if (p.lhs != x) continue;
      if (p.kind == Production::Kind::Eps) continue;
      for (NonTerminal y : {p.y, p.kind == Production::Kind::Call ? p.z : -1}) {
        if (y >= 0 && gen[y] && !reach[y]) {
          reach[y] = true;
          todo.push_back(y);
        }
      }
    }
  }
  Vpg out(g.alphabet());
  std::vector<NonTerminal> remap(n, -1);
  for (NonTerminal x = 0; x < n; ++x)
    if (reach[x]) remap[x] = out.add_nonterminal(g.name(x));
  for (NonTerminal s : g.starts())
    if (s >= 0 && remap[s] >= 0) out.set_start(remap[s]);
  for (const auto& p : g.productions()) {
    if (remap[p.lhs] < 0) continue;
    switch (p.kind) {
      case Production::Kind::Eps:
        out.add_eps(remap[p.lhs]);
        break;
      case Production::Kind::Int:
        if (remap[p.y] >= 0) out.add_int(remap[p.lhs], p.a, remap[p.y]);
        break;
      case Production::Kind::Call:
        if (remap[p.y] >= 0 && remap[p.z] >= 0)
          out.add_call(remap[p.lhs], p.a, remap[p.y], p.r, remap[p.z]);
        break;
    }
  }
  out.set_uniform_flag(g.uniform_flag() && out.check_uniform());
  return out;
}

Vpg vpg_uniformize(const Vpg& g) {
  if (g.check_uniform()) {
    Vpg out = g;
    out.set_uniform_flag(true);
    return out;
  }
  const int n = g.num_nonterminals();
  // which production kinds each nonterminal has
  std::vector<std::set<Production::Kind>> kinds(n);
  for (const auto& p : g.productions()) kinds[p.lhs].insert(p.kind);

  Vpg out(g.alphabet());
  auto variant_name = [&](NonTerminal x, Production::Kind k) {
    if (kinds[x].size() <= 1) return g.name(x);
    const char* tag = k == Production::Kind::Eps ? "%e" : k == Production::Kind::Int ? "%i" : "%c";
    return g.name(x) + tag;
  };
  std::map<std::pair<NonTerminal, Production::Kind>, NonTerminal> idx;
  for (NonTerminal x = 0; x < n; ++x)
    for (auto k : kinds[x]) idx[{x, k}] = out.add_nonterminal(variant_name(x, k));
  auto variants = [&](NonTerminal x) {
    std::vector<NonTerminal> vs;
    for (auto k : kinds[x]) vs.push_back(idx.at({x, k}));
    if (vs.empty()) vs.push_back(-1);  // nonterminal with no productions: dead
    return vs;
  };
  for (NonTerminal s : g.starts())
    for (NonTerminal v : variants(s))
      if (v >= 0) out.set_start(v);
  for (const auto& p : g.productions()) {
    NonTerminal lhs = idx.at({p.lhs, p.kind});
    switch (p.kind) {
      case Production::Kind::Eps:
        out.add_eps(lhs);
        break;
      case Production::Kind::Int:
        for (NonTerminal y : variants(p.y))
          if (y >= 0) out.add_int(lhs, p.a, y);
        break;
      case Production::Kind::Call:
        for (NonTerminal y : variants(p.y))
          for (NonTerminal z : variants(p.z))
            if (y >= 0 && z >= 0) out.add_call(lhs, p.a, y, p.r, z);
        break;
    }
  }
  out.set_uniform_flag(true);
  assert(out.check_uniform());
  return out;
}

std::set<Word> vpg_enumerate(const Vpg& g, int max_len, size_t cap) {
  // shortest yield per nonterminal, to prune hopeless branches
  const int n = g.num_nonterminals();
  const int kInf = 1 << 20;
  std::vector<int> shortest(n, kInf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      int len = kInf;
      switch (p.kind) {
        case Production::Kind::Eps: len = 0; break;
        case Production::Kind::Int:
          if (shortest[p.y] < kInf) len = 1 + shortest[p.y];
          break;
        case Production::Kind::Call:
          if (shortest[p.y] < kInf && shortest[p.z] < kInf)
            len = 2 + shortest[p.y] + shortest[p.z];
          break;
      }
      if (len < shortest[p.lhs]) {
        shortest[p.lhs] = len;
        changed = true;
      }
    }
  }
  size_t total = 0;
  std::map<std::pair<NonTerminal, int>, std::set<Word>> memo;
  std::function<const std::set<Word>&(NonTerminal, int)> lang = [&](NonTerminal x,
                                                                    int budget) -> const std::set<Word>& {
    budget = std::min(budget, max_len);
    auto key = std::make_pair(x, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<Word>& res = memo[key];
    if (shortest[x] > budget) return res;
    for (const auto& p : g.productions()) {
      if (p.lhs != x) continue;
      switch (p.kind) {
        case Production::Kind::Eps:
          res.insert(Word{});
          break;
        case Production::Kind::Int:
          if (budget >= 1)
            for (const Word& u : lang(p.y, budget - 1)) {
              Word w{p.a};
              w.insert(w.end(), u.begin(), u.end());
              res.insert(std::move(w));
            }
          break;
        case Production::Kind::Call:
          if (budget >= 2)
            for (const Word& u : lang(p.y, budget - 2 - shortest[p.z])) {
              int rem = budget - 2 - static_cast<int>(u.size());
              for (const Word& v : lang(p.z, rem)) {
                Word w{p.a};
                w.insert(w.end(), u.begin(), u.end());
                w.push_back(p.r);
                w.insert(w.end(), v.begin(), v.end());
                res.insert(std::move(w));
              }
            }
          break;
      }
      total += res.size();
      if (total > cap * 8) throw std::runtime_error("vpg_enumerate: cap exceeded");
    }
    return res;
  };
  std::set<Word> out;
  for (NonTerminal s : g.starts()) {
    const auto& ws = lang(s, max_len);
    out.insert(ws.begin(), ws.end());
    if (out.size() > cap) throw std::runtime_error("vpg_enumerate: cap exceeded");
  }
  return out;
}

Vpa vpg_to_vpa(const Vpg& g) {
  Vpa out(g.alphabet());
  // state = (nonterminal, stack-empty?), so linear acceptance suffices
  std::map<std::pair<NonTerminal, bool>, State> idx;
  std::deque<std::pair<NonTerminal, bool>> todo;
  std::vector<bool> nullable(g.num_nonterminals(), false);
  for (const auto& p : g.productions())
    if (p.kind == Production::Kind::Eps) nullable[p.lhs] = true;
  auto get = [&](NonTerminal x, bool bottom) -> State {
    auto it = idx.find({x, bottom});
    if (it != idx.end()) return it->second;
    State q = out.add_state(g.name(x) + (bottom ? "" : "^"));
    idx[{x, bottom}] = q;
    todo.push_back({x, bottom});
    if (bottom && nullable[x]) out.set_final(q);
    return q;
  };
  for (NonTerminal s : g.starts()) out.set_initial(get(s, true));
  std::set<std::pair<StackSym, State>> emitted_pops;
  while (true) {
    while (!todo.empty()) {
      auto [x, bottom] = todo.front();
      todo.pop_front();
      State from = idx.at({x, bottom});
      for (const auto& p : g.productions()) {
        if (p.lhs != x) continue;
        switch (p.kind) {
          case Production::Kind::Eps:
            break;  // handled by finals / return firing
          case Production::Kind::Int:
            out.add_int(from, p.a, get(p.y, bottom));
            break;
          case Production::Kind::Call: {
            StackSym s2 = out.intern_stack_sym(g.alphabet()->name(p.r) + ">" + g.name(p.z) +
                                               (bottom ? "" : "^"));
            out.add_call(from, p.a, get(p.y, false), s2);
            break;
          }
        }
      }
    }
    // pops: from every nullable nonterminal at nonempty stack, (r > Z, e) -> (Z, e);
    // popping may reach fresh (Z, e) states, so iterate to a fixpoint
    bool grew = false;
    for (const auto& p : g.productions()) {
      if (p.kind != Production::Kind::Call) continue;
      for (bool bottom : {true, false}) {
        std::string sn = g.alphabet()->name(p.r) + ">" + g.name(p.z) + (bottom ? "" : "^");
        if (!out.has_stack_sym(sn)) continue;
        StackSym sym = out.intern_stack_sym(sn);
        for (NonTerminal w = 0; w < g.num_nonterminals(); ++w) {
          if (!nullable[w]) continue;
          auto it = idx.find({w, false});
          if (it == idx.end()) continue;
          if (!emitted_pops.insert({sym, it->second}).second) continue;
          out.add_ret(it->second, p.r, sym, get(p.z, bottom));
          grew = true;
        }
      }
    }
    if (!grew && todo.empty()) break;
  }
  return out;
}

Vpg vpa_to_vpg(const Vpa& a) {
  // nonterminal [q, q'] = well-matched words leading q to q' at equal depth;
  // built over the automaton's states with a reachable worklist
  Vpg out(a.alphabet());
  std::map<std::pair<State, State>, NonTerminal> idx;
  std::deque<std::pair<State, State>> todo;
  auto get = [&](State p, State q) -> NonTerminal {
    auto it = idx.find({p, q});
    if (it != idx.end()) return it->second;
    NonTerminal x =
        out.add_nonterminal("[" + a.state_name(p) + "," + a.state_name(q) + "]");
    idx[{p, q}] = x;
    todo.push_back({p, q});
    return x;
  };
  for (State i : a.initials())
    for (State f : a.finals()) out.set_start(get(i, f));
  std::map<StackSym, std::vector<RetTrans>> rets_by_pop;
  for (const auto& r : a.rets()) rets_by_pop[r.pop].push_back(r);
  while (!todo.empty()) {
    auto [p, q] = todo.front();
    todo.pop_front();
    NonTerminal x = idx.at({p, q});
    if (p == q) out.add_eps(x);
    for (const auto& t : a.ints())
      if (t.from == p) out.add_int(x, t.letter, get(t.to, q));
    for (const auto& c : a.calls()) {
      if (c.from != p) continue;
      auto it = rets_by_pop.find(c.push);
      if (it == rets_by_pop.end()) continue;
      for (const auto& r : it->second)
        out.add_call(x, c.letter, get(c.to, r.from), r.letter, get(r.to, q));
    }
  }
  return vpg_trim(out);
}

Vpg vpg_concat(const Vpg& a, const Vpg& b) {
  if (a.alphabet() != b.alphabet()) throw std::invalid_argument("vpg_concat: alphabet mismatch");
  Vpg out(a.alphabet());
  // carry a continuation marker through the first grammar
  std::vector<NonTerminal> amap(a.num_nonterminals(), -1);
  std::vector<NonTerminal> bmap(b.num_nonterminals(), -1);
  for (NonTerminal x = 0; x < a.num_nonterminals(); ++x)
    amap[x] = out.add_nonterminal("<" + a.name(x) + ";>");
  for (NonTerminal x = 0; x < b.num_nonterminals(); ++x)
    bmap[x] = out.add_nonterminal(b.name(x) + "'");
  // inner (call body) occurrences of the first grammar keep their own symbols
  std::vector<NonTerminal> ainner(a.num_nonterminals(), -1);
  for (NonTerminal x = 0; x < a.num_nonterminals(); ++x)
    ainner[x] = out.add_nonterminal(a.name(x));
  auto inner = [&](NonTerminal x) { return ainner[x]; };
  for (const auto& p : b.productions()) {
    switch (p.kind) {
      case Production::Kind::Eps: out.add_eps(bmap[p.lhs]); break;
      case Production::Kind::Int: out.add_int(bmap[p.lhs], p.a, bmap[p.y]); break;
      case Production::Kind::Call:
        out.add_call(bmap[p.lhs], p.a, bmap[p.y], p.r, bmap[p.z]);
        break;
    }
  }
  for (const auto& p : a.productions()) {
    switch (p.kind) {
      case Production::Kind::Eps:
        // end of the first language: continue with any start of the second
        for (NonTerminal s : b.starts())
          for (const auto& q : b.productions()) {
            if (q.lhs != s) continue;
            switch (q.kind) {
              case Production::Kind::Eps: out.add_eps(amap[p.lhs]); break;
              case Production::Kind::Int: out.add_int(amap[p.lhs], q.a, bmap[q.y]); break;
              case Production::Kind::Call:
                out.add_call(amap[p.lhs], q.a, bmap[q.y], q.r, bmap[q.z]);
                break;
            }
          }
        break;
      case Production::Kind::Int:
        out.add_int(amap[p.lhs], p.a, amap[p.y]);
        break;
      case Production::Kind::Call:
        out.add_call(amap[p.lhs], p.a, inner(p.y), p.r, amap[p.z]);
        break;
    }
  }
  for (const auto& p : a.productions()) {
    switch (p.kind) {
      case Production::Kind::Eps: out.add_eps(ainner[p.lhs]); break;
      case Production::Kind::Int: out.add_int(ainner[p.lhs], p.a, inner(p.y)); break;
      case Production::Kind::Call:
        out.add_call(ainner[p.lhs], p.a, inner(p.y), p.r, inner(p.z));
        break;
    }
  }
  for (NonTerminal s : a.starts()) out.set_start(amap[s]);
  return vpg_trim(out);
}

Vpg vpg_reverse(const Vpg& g, AlphabetRef reversed_sigma) {
  Vpa a = vpg_to_vpa(g);
  Vpa r = vpa_reverse(a, std::move(reversed_sigma));
  return vpa_to_vpg(r);
}

}  // namespace hyrec
