#include "hyrec/oracle.hh"

#include <algorithm>
#include <functional>

namespace hyrec {

std::set<Word> enumerate_shuffle(const std::vector<Word>& words, size_t cap) {
  std::set<Word> out;
  const int n = static_cast<int>(words.size());
  std::vector<size_t> pos(n, 0);
  Word cur;
  std::function<void()> rec = [&]() {
    bool done = true;
    for (int i = 0; i < n; ++i) {
      if (pos[i] < words[i].size()) {
        done = false;
        cur.push_back(words[i][pos[i]]);
        pos[i]++;
        rec();
        pos[i]--;
        cur.pop_back();
      }
    }
    if (done) {
      out.insert(cur);
      if (out.size() > cap) throw std::runtime_error("enumerate_shuffle: cap exceeded");
    }
  };
  rec();
  return out;
}

namespace {

std::vector<Word> group_projections(const VPAlphabet& sigma, const Grouping& groups,
                                    const Word& w) {
  std::vector<int> c2g(sigma.num_components() + 1, static_cast<int>(groups.size()));
  for (int g = 0; g < static_cast<int>(groups.size()); ++g)
    for (int c : groups[g]) c2g[c] = g;
  std::vector<Word> proj(groups.size() + 1);
  for (LetterId a : w) proj[c2g[sigma.component(a)]].push_back(a);
  return proj;
}

}  // namespace

std::vector<EquivClass> classes(const VPAlphabet& sigma, const Grouping& groups,
                                const std::set<Word>& language) {
  std::map<std::vector<Word>, EquivClass> fibers;
  for (const Word& w : language) fibers[group_projections(sigma, groups, w)].members.push_back(w);
  std::vector<EquivClass> out;
  for (auto& [k, v] : fibers) {
    std::sort(v.members.begin(), v.members.end());
    out.push_back(std::move(v));
  }
  return out;
}

std::set<Word> ref_reduction(const OrderAutomaton& o, const Grouping& groups,
                             const std::set<Word>& language, bool wn_only) {
  const auto& sigma = *o.vpa.alphabet();
  std::set<Word> lang;
  for (const Word& w : language)
    if (!wn_only || is_well_nested(sigma, w)) lang.insert(w);
  std::set<Word> out;
  for (const EquivClass& cls : classes(sigma, groups, lang)) {
    // keep members with no strictly smaller equivalent word
    for (const Word& w : cls.members) {
      bool minimal = true;
      for (const Word& u : cls.members) {
        if (u == w) continue;
        if (clo_compare(o, u, w) == Cmp::Less) {
          minimal = false;
          break;
        }
      }
      if (minimal) out.insert(w);
    }
  }
  return out;
}

std::set<Word> bounded_shuffle(const VPAlphabet& sigma,
                               const std::vector<std::set<Word>>& component_langs, int max_len,
                               size_t cap) {
  std::set<Word> out;
  std::vector<std::vector<Word>> langs;
  for (const auto& l : component_langs) langs.emplace_back(l.begin(), l.end());
  std::vector<const Word*> chosen;
  std::function<void(size_t, int)> pick = [&](size_t i, int remaining) {
    if (i == langs.size()) {
      std::vector<Word> ws;
      for (const Word* w : chosen) ws.push_back(*w);
      for (const Word& w : enumerate_shuffle(ws, cap)) {
        out.insert(w);
        if (out.size() > cap) throw std::runtime_error("bounded_shuffle: cap exceeded");
      }
      return;
    }
    for (const Word& w : langs[i]) {
      if (static_cast<int>(w.size()) > remaining) continue;
      chosen.push_back(&w);
      pick(i + 1, remaining - static_cast<int>(w.size()));
      chosen.pop_back();
    }
  };
  pick(0, max_len);
  return out;
}

// ---------------------------------------------------------------------------
// concrete interpretation

namespace {

long long eval_expr(const Expr& e, const Valuation& v) {
  switch (e.kind) {
    case Expr::Kind::IntConst:
    case Expr::Kind::BoolConst:
      return e.num;
    case Expr::Kind::Var: {
      auto it = v.find(e.var);
      return it == v.end() ? 0 : it->second;
    }
    case Expr::Kind::Unary: {
      long long x = eval_expr(e.args[0], v);
      return e.op == "-" ? -x : (x == 0 ? 1 : 0);
    }
    case Expr::Kind::Binary: {
      long long a = eval_expr(e.args[0], v);
      long long b = eval_expr(e.args[1], v);
      const std::string& op = e.op;
      if (op == "+") return a + b;
      if (op == "-") return a - b;
      if (op == "*") return a * b;
      if (op == "<") return a < b;
      if (op == "<=") return a <= b;
      if (op == ">") return a > b;
      if (op == ">=") return a >= b;
      if (op == "==") return a == b;
      if (op == "!=") return a != b;
      if (op == "&&") return (a != 0) && (b != 0);
      if (op == "||") return (a != 0) || (b != 0);
      throw std::invalid_argument("interpret: unknown operator " + op);
    }
    case Expr::Kind::Select:
      throw std::invalid_argument("interpret: arrays are not supported");
  }
  return 0;
}

// apply an internal statement to a frame; false = infeasible
bool apply_internal(const Statement& st, Valuation& frame) {
  if (st.kind == Statement::Kind::Assume) return eval_expr(st.cond, frame) != 0;
  assert(st.kind == Statement::Kind::Assign);
  std::vector<std::pair<std::string, long long>> updates;
  for (const auto& [lhs, rhs] : st.assigns) {
    if (lhs.kind != Expr::Kind::Var)
      throw std::invalid_argument("interpret: arrays are not supported");
    updates.push_back({lhs.var, eval_expr(rhs, frame)});
  }
  for (const auto& [name, val] : updates) frame[name] = val;
  return true;
}

}  // namespace

std::vector<Valuation> interpret(const CompiledProgram& cp, const Word& run,
                                 const Valuation& initial, StackMode mode) {
  const auto& sigma = *cp.sigma;
  const int k = static_cast<int>(cp.components.size());

  // dummy parameter snapshots live in the frames alongside the locals
  auto dummy = [](const std::string& v) { return v + "`"; };

  if (mode == StackMode::Single) {
    Valuation init_frame;
    for (const auto& info : cp.components)
      for (const std::string& v : info.vars)
        init_frame[v] = initial.count(v) ? initial.at(v) : 0;
    std::vector<Valuation> stack{std::move(init_frame)};
    for (LetterId a : run) {
      const Statement& st = cp.payload(a);
      int comp = sigma.component(a);
      const ComponentInfo& info = cp.components.at(comp - 1);
      switch (sigma.kind(a)) {
        case LetterKind::Internal:
          if (!apply_internal(st, stack.back())) return {};
          break;
        case LetterKind::Call: {
          Valuation frame = stack.back();  // copy everything over
          for (const std::string& v : info.vars) frame[v] = 0;
          for (const std::string& p : info.params.at(st.proc)) {
            frame[p] = stack.back().count(p) ? stack.back().at(p) : 0;
            frame[dummy(p)] = frame[p];
          }
          stack.push_back(std::move(frame));
          break;
        }
        case LetterKind::Return: {
          if (stack.size() < 2) return {};  // pending return: not a run
          Valuation top = std::move(stack.back());
          stack.pop_back();
          Valuation& below = stack.back();
          Valuation result = below;
          // other copies continue from the popped frame
          for (const auto& [name, val] : top) {
            bool own = false;
            for (const std::string& v : info.vars)
              if (name == v || name == dummy(v)) {
                own = true;
                break;
              }
            if (!own) result[name] = val;
          }
          for (const std::string& y : info.outputs.at(st.proc)) result[y] = top.count(y) ? top.at(y) : 0;
          below = std::move(result);
          break;
        }
      }
    }
    return {stack.back()};
  }

  // multi stack: one per copy; the joint top frame is the union of the tops
  std::vector<std::vector<Valuation>> stacks(k);
  for (int i = 0; i < k; ++i) {
    Valuation v;
    for (const std::string& var : cp.components[i].vars)
      v[var] = initial.count(var) ? initial.at(var) : 0;
    stacks[i].push_back(std::move(v));
  }
  for (LetterId a : run) {
    const Statement& st = cp.payload(a);
    int comp = sigma.component(a);
    const ComponentInfo& info = cp.components.at(comp - 1);
    auto& stack = stacks[comp - 1];
    switch (sigma.kind(a)) {
      case LetterKind::Internal:
        if (!apply_internal(st, stack.back())) return {};
        break;
      case LetterKind::Call: {
        Valuation frame;
        for (const std::string& v : info.vars) frame[v] = 0;
        for (const std::string& p : info.params.at(st.proc)) {
          frame[p] = stack.back().count(p) ? stack.back().at(p) : 0;
          frame[dummy(p)] = frame[p];
        }
        stack.push_back(std::move(frame));
        break;
      }
      case LetterKind::Return: {
        if (stack.size() < 2) return {};
        Valuation top = std::move(stack.back());
        stack.pop_back();
        for (const std::string& y : info.outputs.at(st.proc))
          stack.back()[y] = top.count(y) ? top.at(y) : 0;
        break;
      }
    }
  }
  Valuation joint;
  for (int i = 0; i < k; ++i)
    for (const auto& [name, val] : stacks[i].back()) joint[name] = val;
  return {joint};
}

}  // namespace hyrec
