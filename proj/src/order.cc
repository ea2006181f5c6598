#include "hyrec/order.hh"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace hyrec {

LinearOrder::LinearOrder(std::vector<int> rank) : rank_(std::move(rank)) {}

bool LinearOrder::total() const {
  std::vector<int> seen(rank_.size(), 0);
  for (int r : rank_) {
    if (r < 0 || r >= static_cast<int>(rank_.size()) || seen[r]) return false;
    seen[r] = 1;
  }
  return true;
}

LetterId LinearOrder::min_of(const std::vector<LetterId>& s) const {
  assert(!s.empty());
  LetterId best = s[0];
  for (LetterId a : s)
    if (less(a, best)) best = a;
  return best;
}

LinearOrder LinearOrder::from_blocks(int alphabet_size,
                                     const std::vector<std::vector<LetterId>>& blocks) {
  std::vector<int> rank(alphabet_size, -1);
  int next = 0;
  for (const auto& b : blocks)
    for (LetterId a : b) {
      assert(rank[a] == -1);
      rank[a] = next++;
    }
  assert(next == alphabet_size);
  return LinearOrder(std::move(rank));
}

Grouping singleton_groups(int n_components) {
  Grouping g;
  for (int i = 1; i <= n_components; ++i) g.push_back({i});
  return g;
}

namespace {

// Components outside the grouping map to the pseudo-group groups.size();
// their letters never occur on the words a node's product can read.
std::vector<int> component_to_group(const VPAlphabet& sigma, const Grouping& groups) {
  std::vector<int> c2g(sigma.num_components() + 1, static_cast<int>(groups.size()));
  for (int g = 0; g < static_cast<int>(groups.size()); ++g)
    for (int c : groups[g]) {
      assert(c >= 1 && c < static_cast<int>(c2g.size()));
      assert(c2g[c] == static_cast<int>(groups.size()));
      c2g[c] = g;
    }
  return c2g;
}

std::vector<LetterId> pseudo_group_block(const VPAlphabet& sigma, const std::vector<int>& c2g,
                                         int ngroups) {
  std::vector<LetterId> out;
  for (LetterId a = 0; a < sigma.size(); ++a)
    if (c2g[sigma.component(a)] == ngroups) out.push_back(a);
  return out;
}

// letters of a group, one kind, sorted by (component, id)
std::vector<LetterId> group_letters(const VPAlphabet& sigma, const std::vector<int>& c2g, int g,
                                    LetterKind kind) {
  std::vector<LetterId> out;
  for (LetterId a = 0; a < sigma.size(); ++a)
    if (c2g[sigma.component(a)] == g && sigma.kind(a) == kind) out.push_back(a);
  std::sort(out.begin(), out.end(), [&](LetterId x, LetterId y) {
    return std::make_pair(sigma.component(x), x) < std::make_pair(sigma.component(y), y);
  });
  return out;
}

std::vector<LetterId> concat_vectors(std::initializer_list<std::vector<LetterId>> vs) {
  std::vector<LetterId> out;
  for (const auto& v : vs) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

State OrderAutomaton::state_at(const Word& context) const {
  assert(vpa.initials().size() == 1);
  State q = *vpa.initials().begin();
  std::vector<StackSym> stack;
  const auto& sigma = *vpa.alphabet();
  for (LetterId a : context) {
    switch (sigma.kind(a)) {
      case LetterKind::Internal: {
        const auto& ts = vpa.ints_from(q, a);
        if (ts.empty()) throw std::logic_error("order automaton not complete (internal)");
        q = ts[0].to;
        break;
      }
      case LetterKind::Call: {
        const auto& ts = vpa.calls_from(q, a);
        if (ts.empty()) throw std::logic_error("order automaton not complete (call)");
        stack.push_back(ts[0].push);
        q = ts[0].to;
        break;
      }
      case LetterKind::Return: {
        StackSym top = stack.empty() ? 0 : stack.back();
        const auto& ts = vpa.rets_from(q, a, top);
        if (ts.empty()) throw std::logic_error("order automaton not complete (return)");
        if (!stack.empty()) stack.pop_back();
        q = ts[0].to;
        break;
      }
    }
  }
  return q;
}

const LinearOrder& OrderAutomaton::order_at(const Word& context) const {
  return ord.at(state_at(context));
}

bool OrderAutomaton::wellformed() const {
  if (!vpa.deterministic() || !vpa.check_complete()) return false;
  if (static_cast<int>(ord.size()) != vpa.num_states()) return false;
  for (const auto& o : ord)
    if (o.size() != vpa.alphabet()->size() || !o.total()) return false;
  return true;
}

Cmp clo_compare(const OrderAutomaton& o, const Word& u, const Word& v) {
  size_t k = 0;
  while (k < u.size() && k < v.size() && u[k] == v[k]) ++k;
  if (k == u.size() && k == v.size()) return Cmp::Equal;
  if (k == u.size()) return Cmp::Less;     // u is a proper prefix of v
  if (k == v.size()) return Cmp::Greater;  // v is a proper prefix of u
  Word prefix(u.begin(), u.begin() + k);
  const LinearOrder& ord = o.order_at(prefix);
  if (ord.less(u[k], v[k])) return Cmp::Less;
  if (ord.less(v[k], u[k])) return Cmp::Greater;
  return Cmp::Incomparable;
}

namespace {

// Single-state complete order automaton with the given per-state order.
OrderAutomaton single_state_order(AlphabetRef sigma, LinearOrder ord) {
  OrderAutomaton o(sigma);
  State star = o.vpa.add_state("*");
  StackSym g = o.vpa.intern_stack_sym("*");
  o.vpa.set_initial(star);
  o.vpa.set_final(star);
  for (LetterId a = 0; a < sigma->size(); ++a) {
    switch (sigma->kind(a)) {
      case LetterKind::Internal: o.vpa.add_int(star, a, star); break;
      case LetterKind::Call: o.vpa.add_call(star, a, star, g); break;
      case LetterKind::Return:
        o.vpa.add_ret(star, a, 0, star);
        o.vpa.add_ret(star, a, g, star);
        break;
    }
  }
  o.vpa.set_complete_flag(true);
  o.ord.push_back(std::move(ord));
  return o;
}

}  // namespace

OrderAutomaton concat_order(AlphabetRef sigma, const Grouping& groups) {
  auto c2g = component_to_group(*sigma, groups);
  const int ng = static_cast<int>(groups.size());
  std::vector<std::vector<LetterId>> blocks;
  for (int g = 0; g < ng; ++g)
    blocks.push_back(concat_vectors({group_letters(*sigma, c2g, g, LetterKind::Internal),
                                     group_letters(*sigma, c2g, g, LetterKind::Call),
                                     group_letters(*sigma, c2g, g, LetterKind::Return)}));
  blocks.push_back(pseudo_group_block(*sigma, c2g, ng));
  return single_state_order(sigma, LinearOrder::from_blocks(sigma->size(), blocks));
}

OrderAutomaton nested_concat_order(AlphabetRef sigma, const Grouping& groups) {
  auto c2g = component_to_group(*sigma, groups);
  const int ng = static_cast<int>(groups.size());
  std::vector<std::vector<LetterId>> blocks;
  for (int g = 0; g < ng; ++g)
    blocks.push_back(concat_vectors({group_letters(*sigma, c2g, g, LetterKind::Internal),
                                     group_letters(*sigma, c2g, g, LetterKind::Call)}));
  std::vector<LetterId> rets;
  for (int g = 0; g < ng; ++g)
    for (LetterId a : group_letters(*sigma, c2g, g, LetterKind::Return)) rets.push_back(a);
  blocks.push_back(rets);
  blocks.push_back(pseudo_group_block(*sigma, c2g, ng));
  return single_state_order(sigma, LinearOrder::from_blocks(sigma->size(), blocks));
}

OrderAutomaton lockstep_order(const std::vector<int>& speeds, AlphabetRef sigma,
                              const Grouping& groups) {
  const int n = static_cast<int>(speeds.size());
  if (n != static_cast<int>(groups.size()))
    throw std::invalid_argument("lockstep_order: speed/group arity mismatch");
  for (int s : speeds)
    if (s < 1) throw std::invalid_argument("lockstep_order: speeds must be positive");
  auto c2g = component_to_group(*sigma, groups);

  OrderAutomaton o(sigma);
  // states: every t with 0 <= t_i <= s_i, plus the absorbing star
  std::map<std::vector<int>, State> idx;
  std::vector<std::vector<int>> all_t;
  {
    std::vector<std::vector<int>> acc{{}};
    for (int i = 0; i < n; ++i) {
      std::vector<std::vector<int>> next;
      for (const auto& t : acc)
        for (int v = 0; v <= speeds[i]; ++v) {
          auto t2 = t;
          t2.push_back(v);
          next.push_back(std::move(t2));
        }
      acc.swap(next);
    }
    all_t = std::move(acc);
  }
  auto tname = [](const std::vector<int>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
  };
  for (const auto& t : all_t) idx[t] = o.vpa.add_state(tname(t));
  State star = o.vpa.add_state("*");
  // weakly hierarchical: calls push the current state
  std::vector<StackSym> sym(o.vpa.num_states());
  for (State q = 0; q < o.vpa.num_states(); ++q)
    sym[q] = o.vpa.intern_stack_sym("@" + o.vpa.state_name(q));

  o.vpa.set_initial(idx.at(std::vector<int>(n, 0)));
  for (State q = 0; q < o.vpa.num_states(); ++q) o.vpa.set_final(q);

  for (LetterId a = 0; a < sigma->size(); ++a) {
    const int g = c2g[sigma->component(a)];
    switch (sigma->kind(a)) {
      case LetterKind::Internal:
        for (State q = 0; q < o.vpa.num_states(); ++q) o.vpa.add_int(q, a, q);
        break;
      case LetterKind::Call: {
        for (const auto& t : all_t) {
          State from = idx.at(t);
          if (g >= n) {  // letter outside this node's grouping: absorb
            o.vpa.add_call(from, a, star, sym[from]);
            continue;
          }
          std::vector<int> t2(n, 0);
          if (t[g] == 0) {
            t2[g] = speeds[g] - 1;
            for (int j = g + 1; j < n; ++j) t2[j] = speeds[j];
          } else {
            t2[g] = t[g] - 1;
            for (int j = g + 1; j < n; ++j) t2[j] = t[j];
          }
          o.vpa.add_call(from, a, idx.at(t2), sym[from]);
        }
        o.vpa.add_call(star, a, star, sym[star]);
        break;
      }
      case LetterKind::Return: {
        for (State q = 0; q < o.vpa.num_states(); ++q) {
          o.vpa.add_ret(q, a, 0, star);  // pending return: absorb
          for (const auto& [t, p] : idx)
            o.vpa.add_ret(q, a, sym[p], g < n && t[g] == 0 ? p : star);
          o.vpa.add_ret(q, a, sym[star], star);
        }
        break;
      }
    }
  }
  o.vpa.set_complete_flag(true);

  // ord(t): ints by group, calls rotated from the first pending group, rets last
  o.ord.resize(o.vpa.num_states());
  auto make_ord = [&](int j) {  // j = rotation start
    std::vector<std::vector<LetterId>> blocks;
    for (int g = 0; g < n; ++g)
      blocks.push_back(group_letters(*sigma, c2g, g, LetterKind::Internal));
    for (int k = 0; k < n; ++k)
      blocks.push_back(group_letters(*sigma, c2g, (j + k) % n, LetterKind::Call));
    for (int g = 0; g < n; ++g)
      blocks.push_back(group_letters(*sigma, c2g, g, LetterKind::Return));
    blocks.push_back(pseudo_group_block(*sigma, c2g, n));
    return LinearOrder::from_blocks(sigma->size(), blocks);
  };
  for (const auto& [t, q] : idx) {
    int j = 0;
    while (j < n && t[j] == 0) ++j;
    if (j == n) j = 0;  // round start: group 1 leads
    o.ord[q] = make_ord(j);
  }
  {
    std::vector<std::vector<LetterId>> blocks;
    for (int g = 0; g < n; ++g)
      blocks.push_back(concat_vectors({group_letters(*sigma, c2g, g, LetterKind::Internal),
                                       group_letters(*sigma, c2g, g, LetterKind::Call),
                                       group_letters(*sigma, c2g, g, LetterKind::Return)}));
    blocks.push_back(pseudo_group_block(*sigma, c2g, n));
    o.ord[star] = LinearOrder::from_blocks(sigma->size(), blocks);
  }
  return o;
}

OrderAutomaton make_roundrobin_order(AlphabetRef sigma) {
  if (sigma->num_components() != 2)
    throw std::invalid_argument("make_roundrobin_order: exactly two components");
  OrderAutomaton o(sigma);
  enum { A = 0, C1, C1W, C2, C2W, kN };
  const char* names[kN] = {"A", "C1", "C1w", "C2", "C2w"};
  for (int i = 0; i < kN; ++i) o.vpa.add_state(names[i]);
  std::vector<StackSym> sym(kN);
  for (int i = 0; i < kN; ++i) sym[i] = o.vpa.intern_stack_sym(std::string("@") + names[i]);
  o.vpa.set_initial(A);
  for (int i = 0; i < kN; ++i) o.vpa.set_final(i);
  auto wify = [](State p) -> State {
    if (p == C1) return C1W;
    if (p == C2) return C2W;
    return p;
  };
  for (LetterId a = 0; a < sigma->size(); ++a) {
    int comp = sigma->component(a);
    switch (sigma->kind(a)) {
      case LetterKind::Internal:
        for (State q = 0; q < kN; ++q) o.vpa.add_int(q, a, wify(q));
        break;
      case LetterKind::Call:
        for (State q = 0; q < kN; ++q) o.vpa.add_call(q, a, comp == 1 ? C1 : C2, sym[q]);
        break;
      case LetterKind::Return:
        for (State q = 0; q < kN; ++q) {
          o.vpa.add_ret(q, a, 0, A);
          for (State p = 0; p < kN; ++p) o.vpa.add_ret(q, a, sym[p], wify(p));
        }
        break;
    }
  }
  o.vpa.set_complete_flag(true);

  auto block = [&](int comp, LetterKind k) {
    std::vector<LetterId> out;
    for (LetterId a = 0; a < sigma->size(); ++a)
      if (sigma->component(a) == comp && sigma->kind(a) == k) out.push_back(a);
    return out;
  };
  auto I = [&](int c) { return block(c, LetterKind::Internal); };
  auto C = [&](int c) { return block(c, LetterKind::Call); };
  auto R = [&](int c) { return block(c, LetterKind::Return); };
  o.ord.resize(kN);
  // otherwise: ( < [ < ] < )
  o.ord[A] = LinearOrder::from_blocks(sigma->size(), {I(1), C(1), I(2), C(2), R(2), R(1)});
  o.ord[C2] = o.ord[A];
  // just called component 1: [ < ( < ) < ]
  o.ord[C1] = LinearOrder::from_blocks(sigma->size(), {I(2), C(2), I(1), C(1), R(1), R(2)});
  // inside component 1's pending call: ) < ( < [ < ]
  o.ord[C1W] = LinearOrder::from_blocks(sigma->size(), {R(1), I(1), C(1), I(2), C(2), R(2)});
  o.ord[C2W] = LinearOrder::from_blocks(sigma->size(), {R(2), I(2), C(2), I(1), C(1), R(1)});
  return o;
}

namespace {

// Product of an order automaton with the pending-call tracker. Product state
// (q, t): t = 0 means no pending call, otherwise 1 + group of the last one.
// Calls push the tracker value alongside the original stack symbol.
OrderAutomaton pending_tracker_product(const OrderAutomaton& o, const Grouping& groups,
                                       std::vector<std::pair<State, int>>* origin) {
  const auto& sigma = *o.vpa.alphabet();
  auto c2g = component_to_group(sigma, groups);
  const int ng = static_cast<int>(groups.size()) + 1;  // +1: pseudo-group tracker

  OrderAutomaton out(o.vpa.alphabet());
  std::map<std::pair<State, int>, State> idx;
  std::deque<std::pair<State, int>> todo;
  auto get = [&](State q, int t) -> State {
    auto it = idx.find({q, t});
    if (it != idx.end()) return it->second;
    State s = out.vpa.add_state(o.vpa.state_name(q) +
                                (t == 0 ? "" : "!g" + std::to_string(t)));
    idx[{q, t}] = s;
    todo.push_back({q, t});
    if (origin) origin->push_back({q, t});
    return s;
  };
  auto psym = [&](StackSym g, int t) -> StackSym {
    if (g == 0 && t == 0) return 0;
    return out.vpa.intern_stack_sym(o.vpa.stack_sym_name(g) + "!g" + std::to_string(t));
  };
  State init = *o.vpa.initials().begin();
  out.vpa.set_initial(get(init, 0));
  while (!todo.empty()) {
    auto [q, t] = todo.front();
    todo.pop_front();
    State from = idx.at({q, t});
    out.vpa.set_final(from);
    for (LetterId a = 0; a < sigma.size(); ++a) {
      switch (sigma.kind(a)) {
        case LetterKind::Internal:
          for (const auto& tr : o.vpa.ints_from(q, a)) out.vpa.add_int(from, a, get(tr.to, t));
          break;
        case LetterKind::Call:
          for (const auto& tr : o.vpa.calls_from(q, a))
            out.vpa.add_call(from, a, get(tr.to, 1 + c2g[sigma.component(a)]),
                             psym(tr.push, t));
          break;
        case LetterKind::Return:
          // popping restores what was pending before the matching call
          for (int t0 = 0; t0 <= ng; ++t0)
            for (StackSym g = 0; g < o.vpa.num_stack_syms(); ++g) {
              if (g == 0 && t0 != 0) continue;
              for (const auto& tr : o.vpa.rets_from(q, a, g))
                out.vpa.add_ret(from, a, psym(g, t0), get(tr.to, t0));
            }
          break;
      }
    }
  }
  out.vpa.set_complete_flag(o.vpa.complete_flag());
  return out;
}

}  // namespace

OrderAutomaton coherence_repair(const OrderAutomaton& o, const Grouping& groups) {
  const auto& sigma = *o.vpa.alphabet();
  auto c2g = component_to_group(sigma, groups);
  std::vector<std::pair<State, int>> origin;
  OrderAutomaton out = pending_tracker_product(o, groups, &origin);
  out.ord.resize(out.vpa.num_states());
  for (State s = 0; s < out.vpa.num_states(); ++s) {
    auto [q, t] = origin.at(s);
    const LinearOrder& base = o.ord.at(q);
    if (t == 0) {
      out.ord[s] = base;
      continue;
    }
    // demote returns of the other groups below all other letters, keeping
    // the base order inside the two parts
    std::vector<LetterId> keep, demote;
    std::vector<LetterId> all(sigma.size());
    std::iota(all.begin(), all.end(), 0);
    std::sort(all.begin(), all.end(),
              [&](LetterId x, LetterId y) { return base.less(x, y); });
    for (LetterId a : all) {
      bool foreign_ret =
          sigma.kind(a) == LetterKind::Return && c2g[sigma.component(a)] != t - 1;
      (foreign_ret ? demote : keep).push_back(a);
    }
    out.ord[s] = LinearOrder::from_blocks(sigma.size(), {keep, demote});
  }
  return out;
}

bool is_coherent(const OrderAutomaton& o, const Grouping& groups) {
  const auto& sigma = *o.vpa.alphabet();
  auto c2g = component_to_group(sigma, groups);
  // a pair (q, k) is realized iff some context reaches state q with its last
  // pending call from group k: exact reachability over the tracker product
  std::vector<std::pair<State, int>> origin;
  OrderAutomaton prod = pending_tracker_product(o, groups, &origin);
  for (State s : prod.vpa.reachable_states()) {
    auto [q, t] = origin.at(s);
    if (t == 0) continue;
    int pg = t - 1;
    const LinearOrder& ord = o.ord.at(q);
    for (LetterId a = 0; a < sigma.size(); ++a) {
      if (c2g[sigma.component(a)] != pg) continue;
      for (LetterId r = 0; r < sigma.size(); ++r) {
        if (sigma.kind(r) != LetterKind::Return || c2g[sigma.component(r)] == pg) continue;
        if (!ord.less(a, r)) return false;
      }
    }
  }
  return true;
}

bool is_uniform(const OrderAutomaton& o, const Vpa& a1, const Vpa& a2) {
  return is_uniform_multi(o, {&a1, &a2});
}

bool is_uniform_multi(const OrderAutomaton& o, const std::vector<const Vpa*>& parts) {
  std::vector<std::vector<std::vector<LetterId>>> outs(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    for (State q = 0; q < parts[i]->num_states(); ++q) {
      auto letters = parts[i]->outgoing_letters(q);
      if (!letters.empty()) outs[i].push_back(std::move(letters));
    }
  }
  for (const auto& ord : o.ord) {
    for (size_t i = 0; i < parts.size(); ++i)
      for (size_t j = i + 1; j < parts.size(); ++j)
        for (const auto& oi : outs[i])
          for (const auto& oj : outs[j]) {
            int min_i = ord.rank(oi[0]), max_i = ord.rank(oi[0]);
            for (LetterId a : oi) {
              min_i = std::min(min_i, ord.rank(a));
              max_i = std::max(max_i, ord.rank(a));
            }
            int min_j = ord.rank(oj[0]), max_j = ord.rank(oj[0]);
            for (LetterId a : oj) {
              min_j = std::min(min_j, ord.rank(a));
              max_j = std::max(max_j, ord.rank(a));
            }
            if (!(max_i < min_j || max_j < min_i)) return false;
          }
  }
  return true;
}

PartialOrderAtContext exclude_image_relation(const LinearOrder& ord, const VPAlphabet& sigma,
                                             const std::set<LetterId>& excluded) {
  auto image = [&](LetterId a) -> LetterId {
    if (!excluded.count(a)) return a;
    for (LetterId x = 0; x < sigma.size(); ++x)
      if (sigma.component(x) == sigma.component(a) && sigma.kind(x) == LetterKind::Internal)
        return x;
    throw std::invalid_argument("exclude_letters: component has no internal letter");
  };
  PartialOrderAtContext rel;
  for (LetterId a = 0; a < sigma.size(); ++a)
    for (LetterId b = 0; b < sigma.size(); ++b)
      if (a != b && ord.less(image(a), image(b))) rel.holds.insert({a, b});
  return rel;
}

OrderAutomaton exclude_letters(const OrderAutomaton& o, const std::set<LetterId>& excluded) {
  const auto& sigma = *o.vpa.alphabet();
  for (LetterId a : excluded)
    if (sigma.kind(a) == LetterKind::Internal)
      throw std::invalid_argument("exclude_letters: only calls/returns can be excluded");
  auto image = [&](LetterId a) -> LetterId {
    if (!excluded.count(a)) return a;
    for (LetterId x = 0; x < sigma.size(); ++x)
      if (sigma.component(x) == sigma.component(a) && sigma.kind(x) == LetterKind::Internal)
        return x;
    throw std::invalid_argument("exclude_letters: component has no internal letter");
  };

  OrderAutomaton out(o.vpa.alphabet());
  for (State q = 0; q < o.vpa.num_states(); ++q) out.vpa.add_state(o.vpa.state_name(q));
  for (StackSym g = 1; g < o.vpa.num_stack_syms(); ++g)
    out.vpa.intern_stack_sym(o.vpa.stack_sym_name(g));
  StackSym star = out.vpa.intern_stack_sym("#excl");
  State sink = out.vpa.add_state("#sink");
  for (State q : o.vpa.initials()) out.vpa.set_initial(q);
  for (State q = 0; q < out.vpa.num_states(); ++q) out.vpa.set_final(q);

  auto int_target = [&](State q, LetterId internal_image) -> State {
    const auto& ts = o.vpa.ints_from(q, internal_image);
    if (ts.empty()) throw std::logic_error("exclude_letters: source order not complete");
    return ts[0].to;
  };

  for (const auto& t : o.vpa.ints()) out.vpa.add_int(t.from, t.letter, t.to);
  for (const auto& t : o.vpa.calls())
    if (!excluded.count(t.letter)) out.vpa.add_call(t.from, t.letter, t.to, t.push);
  for (const auto& t : o.vpa.rets())
    if (!excluded.count(t.letter)) out.vpa.add_ret(t.from, t.letter, t.pop, t.to);
  for (LetterId a : excluded) {
    if (sigma.kind(a) == LetterKind::Call) {
      for (State q = 0; q < o.vpa.num_states(); ++q)
        out.vpa.add_call(q, a, int_target(q, image(a)), star);
    } else {
      for (State q = 0; q < o.vpa.num_states(); ++q)
        out.vpa.add_ret(q, a, star, int_target(q, image(a)));
    }
  }
  // completion: configurations that mix excluded and non-excluded matching
  // cannot occur on runs satisfying the matched-pair condition; absorb them
  for (LetterId a = 0; a < sigma.size(); ++a) {
    switch (sigma.kind(a)) {
      case LetterKind::Internal:
        if (out.vpa.ints_from(sink, a).empty()) out.vpa.add_int(sink, a, sink);
        break;
      case LetterKind::Call:
        if (out.vpa.calls_from(sink, a).empty()) out.vpa.add_call(sink, a, sink, star);
        break;
      case LetterKind::Return:
        for (State q = 0; q < out.vpa.num_states(); ++q)
          for (StackSym g = 0; g < out.vpa.num_stack_syms(); ++g)
            if (out.vpa.rets_from(q, a, g).empty()) out.vpa.add_ret(q, a, g, sink);
        break;
    }
  }
  out.vpa.set_complete_flag(true);

  // per-state order: extend {(a,b) | f(a) < f(b)} by excluded-first, then id
  out.ord.resize(out.vpa.num_states());
  for (State q = 0; q < o.vpa.num_states(); ++q) {
    const LinearOrder& base = o.ord.at(q);
    std::vector<LetterId> all(sigma.size());
    std::iota(all.begin(), all.end(), 0);
    std::sort(all.begin(), all.end(), [&](LetterId x, LetterId y) {
      auto key = [&](LetterId a) {
        return std::make_tuple(base.rank(image(a)), excluded.count(a) ? 0 : 1, a);
      };
      return key(x) < key(y);
    });
    std::vector<int> rank(sigma.size());
    for (int i = 0; i < static_cast<int>(all.size()); ++i) rank[all[i]] = i;
    out.ord[q] = LinearOrder(std::move(rank));
  }
  {
    std::vector<int> rank(sigma.size());
    std::iota(rank.begin(), rank.end(), 0);
    out.ord[sink] = LinearOrder(std::move(rank));
  }
  return out;
}

}  // namespace hyrec
