#include "hyrec/chc.hh"

#include <sys/wait.h>
#include <unistd.h>
#include <fcntl.h>
#include <signal.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

namespace hyrec {

Term Term::S(std::string s) {
  Term t;
  t.kind = Kind::Sym;
  t.sym = std::move(s);
  return t;
}
Term Term::N(long long n) {
  Term t;
  t.kind = Kind::Num;
  t.num = n;
  return t;
}
Term Term::A(std::string op, std::vector<Term> args) {
  Term t;
  t.kind = Kind::App;
  t.sym = std::move(op);
  t.args = std::move(args);
  return t;
}

std::string Term::str() const {
  switch (kind) {
    case Kind::Sym:
      return sym;
    case Kind::Num:
      return num < 0 ? "(- " + std::to_string(-num) + ")" : std::to_string(num);
    case Kind::App: {
      std::string s = "(" + sym;
      for (const auto& a : args) s += " " + a.str();
      return s + ")";
    }
  }
  return "?";
}

namespace {

size_t skip_ws(const std::string& s, size_t i) {
  while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

Term parse_sexpr_at(const std::string& s, size_t& i) {
  i = skip_ws(s, i);
  if (i >= s.size()) throw std::invalid_argument("sexpr: unexpected end in: " + s);
  if (s[i] == '(') {
    ++i;
    i = skip_ws(s, i);
    // operator symbol
    std::string op;
    while (i < s.size() && !isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
           s[i] != ')') {
      op += s[i++];
    }
    Term t = Term::A(op, {});
    while (true) {
      i = skip_ws(s, i);
      if (i >= s.size()) throw std::invalid_argument("sexpr: missing ')' in: " + s);
      if (s[i] == ')') {
        ++i;
        break;
      }
      t.args.push_back(parse_sexpr_at(s, i));
    }
    return t;
  }
  std::string tok;
  while (i < s.size() && !isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
         s[i] != ')') {
    tok += s[i++];
  }
  if (tok.empty()) throw std::invalid_argument("sexpr: empty token in: " + s);
  bool numeric = tok.find_first_not_of("0123456789") == std::string::npos;
  if (numeric) return Term::N(std::stoll(tok));
  return Term::S(tok);
}

}  // namespace

Term parse_sexpr(const std::string& text) {
  size_t i = 0;
  Term t = parse_sexpr_at(text, i);
  i = skip_ws(text, i);
  if (i != text.size()) throw std::invalid_argument("sexpr: trailing input in: " + text);
  return t;
}

Term rename_syms(const Term& t, const std::map<std::string, Term>& map) {
  if (t.kind == Term::Kind::Sym) {
    auto it = map.find(t.sym);
    return it == map.end() ? t : it->second;
  }
  Term out = t;
  out.args.clear();
  for (const auto& a : t.args) out.args.push_back(rename_syms(a, map));
  return out;
}

// ---------------------------------------------------------------------------
// shared encoding helpers

namespace {

std::string smt_sort(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::IntArray: return "(Array Int Int)";
  }
  return "Int";
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// stable predicate names from structural identity
struct NamePool {
  std::map<std::string, std::string> assigned;
  std::set<std::string> used;
  std::string get(const std::string& prefix, const std::string& structural) {
    auto it = assigned.find(structural);
    if (it != assigned.end()) return it->second;
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx",
             static_cast<unsigned long long>(fnv1a(structural)));
    std::string name = prefix + "_" + std::string(buf, 12);
    while (!used.insert(name).second) name += "x";
    assigned[structural] = name;
    return name;
  }
};

Term expr_to_term(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntConst:
      return Term::N(e.num);
    case Expr::Kind::BoolConst:
      return Term::S(e.num ? "true" : "false");
    case Expr::Kind::Var:
      return Term::S(e.var);
    case Expr::Kind::Select:
      return Term::A("select", {Term::S(e.var), expr_to_term(e.args[0])});
    case Expr::Kind::Unary:
      if (e.op == "-") return Term::A("-", {expr_to_term(e.args[0])});
      return Term::A("not", {expr_to_term(e.args[0])});
    case Expr::Kind::Binary: {
      Term a = expr_to_term(e.args[0]);
      Term b = expr_to_term(e.args[1]);
      const std::string& op = e.op;
      if (op == "==") return Term::A("=", {a, b});
      if (op == "!=") return Term::A("not", {Term::A("=", {a, b})});
      if (op == "&&") return Term::A("and", {a, b});
      if (op == "||") return Term::A("or", {a, b});
      return Term::A(op, {a, b});  // + - * < <= > >=
    }
  }
  return Term::S("true");
}

std::string dummy_of(const std::string& v) { return v + "!init"; }

// variable universe of the NWA encoding: per copy, locals then parameter
// dummies, in sorted order; the ghost slot comes last
struct VarUniverse {
  std::vector<std::string> names;
  std::vector<std::string> sorts;
  std::map<std::string, int> index;
  std::map<std::string, int> copy_of;  // base name -> component

  void add(const std::string& n, const std::string& sort, int copy) {
    index[n] = static_cast<int>(names.size());
    names.push_back(n);
    sorts.push_back(sort);
    copy_of[n] = copy;
  }
};

VarUniverse nwa_universe(const CompiledProgram& cp) {
  VarUniverse u;
  for (const auto& info : cp.components) {
    for (const auto& v : info.vars) u.add(v, smt_sort(info.sorts.at(v)), info.component);
    std::set<std::string> dummies;
    for (const auto& [proc, params] : info.params)
      for (const auto& p : params) dummies.insert(dummy_of(p));
    for (const auto& d : dummies) {
      std::string base = d.substr(0, d.size() - 5);
      u.add(d, smt_sort(info.sorts.at(base)), info.component);
    }
  }
  return u;
}

VarUniverse vpg_universe(const CompiledProgram& cp) {
  VarUniverse u;
  for (const auto& info : cp.components)
    for (const auto& v : info.vars) u.add(v, smt_sort(info.sorts.at(v)), info.component);
  return u;
}

// one generation of the universe: base names or !1 / !2 suffixed instances
std::vector<Term> instance(const VarUniverse& u, int gen) {
  std::vector<Term> out;
  for (const auto& n : u.names)
    out.push_back(Term::S(gen == 0 ? n : n + "!" + std::to_string(gen)));
  return out;
}

struct ClauseBuilder {
  ChcClause clause;
  std::set<std::string> declared;

  void declare(const std::string& name, const std::string& sort) {
    if (declared.insert(name).second) clause.vars.push_back({name, sort});
  }
  void declare_instance(const VarUniverse& u, int gen) {
    for (size_t i = 0; i < u.names.size(); ++i) {
      std::string n = gen == 0 ? u.names[i] : u.names[i] + "!" + std::to_string(gen);
      declare(n, u.sorts[i]);
    }
  }
};

Term app(const std::string& pred, std::vector<Term> args) {
  return Term::A(pred, std::move(args));
}

// all variable renamings v -> v!gen for one copy's statement
std::map<std::string, Term> gen_map(const VarUniverse& u, int gen) {
  std::map<std::string, Term> m;
  for (const auto& n : u.names)
    if (gen != 0) m[n] = Term::S(n + "!" + std::to_string(gen));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// NWA encoding

ChcSystem encode_nwa(const Vpa& product, const CompiledProgram& cp, const HyperProperty& prop,
                     bool with_ghost, EncodeStats* stats) {
  NormalizeStats ns;
  Vpa norm = vpa_normalize(product, /*split_call_letters=*/true, &ns);
  std::vector<std::pair<State, StackSym>> origin;
  Vpa a = vpa_weak_hierarchical(norm, &origin);
  const auto& sigma = *a.alphabet();
  VarUniverse u = nwa_universe(cp);

  ChcSystem sys;
  NamePool pool;
  std::vector<std::string> pred;
  for (State q = 0; q < a.num_states(); ++q) {
    std::string name = pool.get("I", a.state_name(q));
    pred.push_back(name);
    ChcPredicate p;
    p.name = name;
    p.sorts = u.sorts;
    if (with_ghost) p.sorts.push_back("Int");
    sys.predicates[name] = p;
  }
  auto atom = [&](State q, std::vector<Term> vars, Term ghost) {
    if (with_ghost) vars.push_back(std::move(ghost));
    return app(pred[q], std::move(vars));
  };

  // per-copy identity: v!1 = v for all variables of the copies in `copies`
  auto identity = [&](ClauseBuilder& cb, int except_copy, bool include_own_dummies) {
    for (const auto& n : u.names) {
      bool own = u.copy_of.at(n) == except_copy;
      if (!own) {
        cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
      } else if (include_own_dummies && n.size() > 5 &&
                 n.compare(n.size() - 5, 5, "!init") == 0) {
        // handled by the caller
      }
    }
  };

  for (const auto& t : a.ints()) {
    const Statement& st = cp.payload(t.letter);
    int copy = sigma.component(t.letter);
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.declare_instance(u, 1);
    if (with_ghost) cb.declare("r!a", "Int");
    Term ghost = Term::S("r!a");
    cb.clause.body.push_back(atom(t.from, instance(u, 0), ghost));
    identity(cb, copy, false);
    // own-copy variables: statement semantics
    auto m1 = gen_map(u, 1);
    if (st.kind == Statement::Kind::Assume) {
      cb.clause.body.push_back(expr_to_term(st.cond));
      for (const auto& n : u.names)
        if (u.copy_of.at(n) == copy)
          cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
    } else {
      std::set<std::string> assigned;
      for (const auto& [lhs, rhs] : st.assigns) {
        if (lhs.kind == Expr::Kind::Var) {
          assigned.insert(lhs.var);
          cb.clause.body.push_back(
              Term::A("=", {Term::S(lhs.var + "!1"), expr_to_term(rhs)}));
        } else {
          // array store: a!1 = (store a i rhs)
          assigned.insert(lhs.var);
          cb.clause.body.push_back(Term::A(
              "=", {Term::S(lhs.var + "!1"),
                    Term::A("store", {Term::S(lhs.var), expr_to_term(lhs.args[0]),
                                      expr_to_term(rhs)})}));
        }
      }
      for (const auto& n : u.names)
        if (u.copy_of.at(n) == copy && !assigned.count(n))
          cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
    }
    cb.clause.head = atom(t.to, instance(u, 1), ghost);
    sys.clauses.push_back(std::move(cb.clause));
  }

  for (const auto& t : a.calls()) {
    const Statement& st = cp.payload(t.letter);
    int copy = sigma.component(t.letter);
    const ComponentInfo& info = cp.components.at(copy - 1);
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.declare_instance(u, 1);
    if (with_ghost) cb.declare("r!a", "Int");
    Term ghost = Term::S("r!a");
    cb.clause.body.push_back(atom(t.from, instance(u, 0), ghost));
    identity(cb, copy, false);
    for (const auto& p : info.params.at(st.proc)) {
      cb.clause.body.push_back(Term::A("=", {Term::S(p + "!1"), Term::S(p)}));
      cb.clause.body.push_back(Term::A("=", {Term::S(dummy_of(p) + "!1"), Term::S(p)}));
    }
    // the return address is the state the call was made from
    cb.clause.head = atom(t.to, instance(u, 1), Term::N(t.from));
    sys.clauses.push_back(std::move(cb.clause));
  }

  for (const auto& t : a.rets()) {
    if (t.pop == 0) continue;  // no pending returns in well-matched products
    const Statement& st = cp.payload(t.letter);
    int copy = sigma.component(t.letter);
    const ComponentInfo& info = cp.components.at(copy - 1);
    State before_call = origin.at(t.pop).first;
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.declare_instance(u, 1);
    cb.declare_instance(u, 2);
    if (with_ghost) cb.declare("r!a", "Int");
    Term ghost = Term::S("r!a");
    // callee frame at the return, caller frame before the call
    cb.clause.body.push_back(atom(t.from, instance(u, 0), Term::N(before_call)));
    cb.clause.body.push_back(atom(before_call, instance(u, 1), ghost));
    // frames match: the callee's initial parameters equal the caller's
    for (const auto& p : info.params.at(st.proc))
      cb.clause.body.push_back(Term::A("=", {Term::S(dummy_of(p)), Term::S(p + "!1")}));
    // merge
    std::set<std::string> outs(info.outputs.at(st.proc).begin(),
                               info.outputs.at(st.proc).end());
    for (const auto& n : u.names) {
      bool own = u.copy_of.at(n) == copy;
      std::string from = !own ? n : (outs.count(n) ? n : n + "!1");
      cb.clause.body.push_back(Term::A("=", {Term::S(n + "!2"), Term::S(from)}));
    }
    cb.clause.head = atom(t.to, instance(u, 2), ghost);
    sys.clauses.push_back(std::move(cb.clause));
  }

  Term pre = parse_sexpr(prop.pre);
  Term post = parse_sexpr(prop.post);
  for (State q : a.initials()) {
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.clause.body.push_back(pre);
    cb.clause.head = atom(q, instance(u, 0), Term::N(-1));
    sys.clauses.push_back(std::move(cb.clause));
  }
  for (State q : a.finals()) {
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.clause.body.push_back(atom(q, instance(u, 0), Term::N(-1)));
    cb.clause.body.push_back(Term::A("not", {post}));
    cb.clause.head = Term::S("false");
    sys.clauses.push_back(std::move(cb.clause));
  }

  if (stats) {
    stats->call_letter_splits = ns.call_letter_splits;
    stats->predicates = static_cast<int>(sys.predicates.size());
    stats->clauses = static_cast<int>(sys.clauses.size());
    int rets_encoded = 0;
    for (const auto& t : a.rets())
      if (t.pop != 0) rets_encoded++;
    stats->transitions =
        static_cast<int>(a.ints().size() + a.calls().size()) + rets_encoded;
    stats->initials = static_cast<int>(a.initials().size());
    stats->finals = static_cast<int>(a.finals().size());
  }
  return sys;
}

// ---------------------------------------------------------------------------
// VPG encoding

ChcSystem encode_vpg(const Vpg& g, const CompiledProgram& cp, const HyperProperty& prop,
                     EncodeStats* stats) {
  const auto& sigma = *g.alphabet();
  VarUniverse u = vpg_universe(cp);
  ChcSystem sys;
  NamePool pool;
  std::vector<std::string> pred;
  for (NonTerminal x = 0; x < g.num_nonterminals(); ++x) {
    std::string name = pool.get("P", g.name(x));
    pred.push_back(name);
    ChcPredicate p;
    p.name = name;
    p.sorts = u.sorts;
    for (const auto& s : u.sorts) p.sorts.push_back(s);
    sys.predicates[name] = p;
  }
  auto atom = [&](NonTerminal x, int gen_in, int gen_out) {
    std::vector<Term> args = instance(u, gen_in);
    for (auto& t : instance(u, gen_out)) args.push_back(t);
    return app(pred[x], std::move(args));
  };

  for (const auto& p : g.productions()) {
    switch (p.kind) {
      case Production::Kind::Eps: {
        ClauseBuilder cb;
        cb.declare_instance(u, 0);
        cb.declare_instance(u, 1);
        for (const auto& n : u.names)
          cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
        cb.clause.head = atom(p.lhs, 0, 1);
        sys.clauses.push_back(std::move(cb.clause));
        break;
      }
      case Production::Kind::Int: {
        const Statement& st = cp.payload(p.a);
        int copy = sigma.component(p.a);
        ClauseBuilder cb;
        cb.declare_instance(u, 0);
        cb.declare_instance(u, 1);
        cb.declare_instance(u, 2);
        if (st.kind == Statement::Kind::Assume) {
          cb.clause.body.push_back(expr_to_term(st.cond));
          for (const auto& n : u.names)
            cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
        } else {
          std::set<std::string> assigned;
          for (const auto& [lhs, rhs] : st.assigns) {
            assigned.insert(lhs.var);
            if (lhs.kind == Expr::Kind::Var) {
              cb.clause.body.push_back(
                  Term::A("=", {Term::S(lhs.var + "!1"), expr_to_term(rhs)}));
            } else {
              cb.clause.body.push_back(Term::A(
                  "=", {Term::S(lhs.var + "!1"),
                        Term::A("store", {Term::S(lhs.var), expr_to_term(lhs.args[0]),
                                          expr_to_term(rhs)})}));
            }
          }
          for (const auto& n : u.names)
            if (!assigned.count(n))
              cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
        }
        (void)copy;
        cb.clause.body.push_back(atom(p.y, 1, 2));
        cb.clause.head = atom(p.lhs, 0, 2);
        sys.clauses.push_back(std::move(cb.clause));
        break;
      }
      case Production::Kind::Call: {
        const Statement& st = cp.payload(p.a);
        int copy = sigma.component(p.a);
        const ComponentInfo& info = cp.components.at(copy - 1);
        ClauseBuilder cb;
        for (int gen = 0; gen <= 4; ++gen) cb.declare_instance(u, gen);
        // entry: the callee sees the caller's parameters; other copies are
        // carried through; the callee's remaining locals are havocked
        for (const auto& pn : info.params.at(st.proc))
          cb.clause.body.push_back(Term::A("=", {Term::S(pn + "!1"), Term::S(pn)}));
        for (const auto& n : u.names)
          if (u.copy_of.at(n) != copy)
            cb.clause.body.push_back(Term::A("=", {Term::S(n + "!1"), Term::S(n)}));
        cb.clause.body.push_back(atom(p.y, 1, 2));
        // exit: outputs and the other copies continue from the body's end,
        // the caller's remaining locals are restored
        std::set<std::string> outs(info.outputs.at(st.proc).begin(),
                                   info.outputs.at(st.proc).end());
        for (const auto& n : u.names) {
          std::string from = u.copy_of.at(n) != copy ? n + "!2"
                             : outs.count(n)         ? n + "!2"
                                                     : n;
          cb.clause.body.push_back(Term::A("=", {Term::S(n + "!3"), Term::S(from)}));
        }
        cb.clause.body.push_back(atom(p.z, 3, 4));
        cb.clause.head = atom(p.lhs, 0, 4);
        sys.clauses.push_back(std::move(cb.clause));
        break;
      }
    }
  }

  Term pre = parse_sexpr(prop.pre);
  Term post = parse_sexpr(prop.post);
  auto m1 = gen_map(u, 1);
  for (NonTerminal s : g.starts()) {
    ClauseBuilder cb;
    cb.declare_instance(u, 0);
    cb.declare_instance(u, 1);
    cb.clause.body.push_back(atom(s, 0, 1));
    cb.clause.body.push_back(pre);
    cb.clause.body.push_back(Term::A("not", {rename_syms(post, m1)}));
    cb.clause.head = Term::S("false");
    sys.clauses.push_back(std::move(cb.clause));
  }

  if (stats) {
    stats->predicates = static_cast<int>(sys.predicates.size());
    stats->clauses = static_cast<int>(sys.clauses.size());
  }
  return sys;
}

// ---------------------------------------------------------------------------
// baselines

ChcSystem encode_baseline(const Program& p, const std::vector<std::string>& entries,
                          const HyperProperty& prop, BaselineVariant variant,
                          EncodeStats* stats) {
  const int k = static_cast<int>(entries.size());
  if (variant == BaselineVariant::SeqComposition) {
    CompiledProgram cp = compile_copies(p, k, entries);
    Vpg seq = vpg_trim(cp.grammars[0]);
    for (int i = 1; i < k; ++i) seq = vpg_concat(seq, vpg_trim(cp.grammars[i]));
    return encode_vpg(seq, cp, prop, stats);
  }

  if (variant == BaselineVariant::DirectCopies) {
    CompiledProgram cp = compile_copies(p, k, entries);
    // encode every copy's grammar in one system, chain the applications
    VarUniverse u = vpg_universe(cp);
    ChcSystem sys;
    HyperProperty trivial;  // property handled below
    for (int i = 0; i < k; ++i) {
      Vpg g = vpg_trim(cp.grammars[i]);
      ChcSystem part = encode_vpg(g, cp, trivial, nullptr);
      // drop the per-start property clauses (head false with trivial prop)
      for (auto& [name, predicate] : part.predicates) sys.predicates[name] = predicate;
      for (auto& c : part.clauses)
        if (!(c.head.kind == Term::Kind::Sym && c.head.sym == "false"))
          sys.clauses.push_back(std::move(c));
    }
    // chained property clause over the k start summaries
    ClauseBuilder cb;
    for (int gen = 0; gen <= k; ++gen) cb.declare_instance(u, gen);
    NamePool pool;
    for (int i = 0; i < k; ++i) {
      Vpg g = vpg_trim(cp.grammars[i]);
      for (NonTerminal s : g.starts()) {
        std::string name = pool.get("P", g.name(s));
        std::vector<Term> args = instance(u, i);
        for (auto& t : instance(u, i + 1)) args.push_back(t);
        cb.clause.body.push_back(app(name, std::move(args)));
        break;  // single start per copy grammar
      }
    }
    cb.clause.body.push_back(parse_sexpr(prop.pre));
    cb.clause.body.push_back(Term::A("not", {rename_syms(parse_sexpr(prop.post), gen_map(u, k))}));
    cb.clause.head = Term::S("false");
    sys.clauses.push_back(std::move(cb.clause));
    if (stats) {
      stats->predicates = static_cast<int>(sys.predicates.size());
      stats->clauses = static_cast<int>(sys.clauses.size());
    }
    return sys;
  }

  // DirectNoCopies: one program, the property ranges over k applications of
  // the same summary
  std::vector<std::string> single_entry{entries[0]};
  CompiledProgram single = compile_copies(p, 1, single_entry);
  VarUniverse u = vpg_universe(single);
  Vpg g = vpg_trim(single.grammars[0]);
  HyperProperty trivial;
  ChcSystem sys = encode_vpg(g, single, trivial, nullptr);
  sys.clauses.erase(std::remove_if(sys.clauses.begin(), sys.clauses.end(),
                                   [](const ChcClause& c) {
                                     return c.head.kind == Term::Kind::Sym &&
                                            c.head.sym == "false";
                                   }),
                    sys.clauses.end());
  // application i uses instances 2i (in) and 2i+1 (out); property variables
  // v<i> map to the single program's v1 instance of application i
  ClauseBuilder cb;
  NamePool pool;
  std::string start_pred;
  for (NonTerminal s : g.starts()) start_pred = pool.get("P", g.name(s));
  for (int i = 0; i < k; ++i) {
    cb.declare_instance(u, 2 * i + 1);
    cb.declare_instance(u, 2 * i + 2);
    std::vector<Term> args = instance(u, 2 * i + 1);
    for (auto& t : instance(u, 2 * i + 2)) args.push_back(t);
    cb.clause.body.push_back(app(start_pred, std::move(args)));
  }
  std::map<std::string, Term> pre_map, post_map;
  for (const auto& n : u.names) {
    // n ends with copy suffix "1"
    std::string base = n.substr(0, n.size() - 1);
    for (int i = 0; i < k; ++i) {
      pre_map[base + std::to_string(i + 1)] = Term::S(n + "!" + std::to_string(2 * i + 1));
      post_map[base + std::to_string(i + 1)] = Term::S(n + "!" + std::to_string(2 * i + 2));
    }
  }
  cb.clause.body.push_back(rename_syms(parse_sexpr(prop.pre), pre_map));
  cb.clause.body.push_back(Term::A("not", {rename_syms(parse_sexpr(prop.post), post_map)}));
  cb.clause.head = Term::S("false");
  sys.clauses.push_back(std::move(cb.clause));
  if (stats) {
    stats->predicates = static_cast<int>(sys.predicates.size());
    stats->clauses = static_cast<int>(sys.clauses.size());
  }
  return sys;
}

// ---------------------------------------------------------------------------
// serialization and solving

std::string emit_smtlib(const ChcSystem& s) {
  std::ostringstream os;
  os << "(set-logic HORN)\n";
  for (const auto& [name, p] : s.predicates) {
    os << "(declare-fun " << name << " (";
    for (size_t i = 0; i < p.sorts.size(); ++i) os << (i ? " " : "") << p.sorts[i];
    os << ") Bool)\n";
  }
  std::vector<std::string> asserts;
  for (const auto& c : s.clauses) {
    std::ostringstream a;
    a << "(assert (forall (";
    for (size_t i = 0; i < c.vars.size(); ++i) {
      a << (i ? " " : "") << "(" << c.vars[i].first << " " << c.vars[i].second << ")";
    }
    a << ")\n  (=> ";
    if (c.body.empty()) {
      a << "true";
    } else if (c.body.size() == 1) {
      a << c.body[0].str();
    } else {
      a << "(and";
      for (const auto& b : c.body) a << " " << b.str();
      a << ")";
    }
    a << "\n      " << c.head.str() << ")))\n";
    asserts.push_back(a.str());
  }
  std::sort(asserts.begin(), asserts.end());
  for (const auto& a : asserts) os << a;
  os << "(check-sat)\n";
  return os.str();
}

namespace {

struct ChildProc {
  pid_t pid = -1;
  int out_fd = -1;
};

ChildProc spawn(const std::string& command) {
  int fds[2];
  if (pipe(fds) != 0) return {};
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return {};
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execlp("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  setpgid(pid, pid);
  return {pid, fds[0]};
}

std::string substitute(const std::string& tmpl, const std::string& file) {
  std::string out = tmpl;
  size_t pos = out.find("{file}");
  if (pos == std::string::npos) return out + " " + file;
  out.replace(pos, 6, file);
  return out;
}

}  // namespace

SolveResult solve_chc(const std::string& smt_path, const std::vector<SolverSpec>& solvers,
                      int timeout_s) {
  if (solvers.empty()) return {SolveStatus::NoSolver, "", "no solver configured"};
  std::mutex mu;
  SolveResult winner;
  bool decided = false;
  std::vector<pid_t> pids(solvers.size(), -1);
  std::vector<std::thread> threads;

  for (size_t i = 0; i < solvers.size(); ++i) {
    threads.emplace_back([&, i]() {
      std::string cmd = "timeout -k 2 " + std::to_string(timeout_s) + "s " +
                        substitute(solvers[i].command, smt_path);
      ChildProc child = spawn(cmd);
      if (child.pid < 0) return;
      {
        std::lock_guard<std::mutex> lk(mu);
        if (decided) {
          kill(-child.pid, SIGKILL);
        }
        pids[i] = child.pid;
      }
      std::string output;
      char buf[4096];
      ssize_t n;
      while ((n = read(child.out_fd, buf, sizeof buf)) > 0) output.append(buf, n);
      close(child.out_fd);
      int status = 0;
      waitpid(child.pid, &status, 0);
      SolveStatus st = SolveStatus::Error;
      std::istringstream is(output);
      std::string tok;
      while (is >> tok) {
        if (tok == "sat") {
          st = SolveStatus::Sat;
          break;
        }
        if (tok == "unsat") {
          st = SolveStatus::Unsat;
          break;
        }
        if (tok == "unknown") {
          st = SolveStatus::Unknown;
          break;
        }
      }
      if (st == SolveStatus::Error && WIFEXITED(status) && WEXITSTATUS(status) == 124)
        st = SolveStatus::Timeout;
      std::lock_guard<std::mutex> lk(mu);
      if (decided) return;
      bool definitive = st == SolveStatus::Sat || st == SolveStatus::Unsat;
      if (definitive || !decided) {
        if (definitive || winner.status == SolveStatus::NoSolver) {
          winner.status = st;
          winner.solver = solvers[i].name;
          winner.detail = output.substr(0, 200);
        }
        if (definitive) {
          decided = true;
          for (pid_t p : pids)
            if (p > 0 && p != child.pid) kill(-p, SIGKILL);
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  return winner;
}

std::vector<SolverSpec> detect_solvers() {
  std::vector<SolverSpec> out;
  auto has = [](const char* exe) {
    std::string cmd = std::string("command -v ") + exe + " >/dev/null 2>&1";
    return system(cmd.c_str()) == 0;
  };
  if (has("z3")) out.push_back({"z3", "z3 {file}"});
  if (has("eld")) out.push_back({"eldarica", "eld {file}"});
  if (has("eldarica")) out.push_back({"eldarica", "eldarica {file}"});
  if (has("golem")) out.push_back({"golem", "golem {file}"});
  return out;
}

}  // namespace hyrec
