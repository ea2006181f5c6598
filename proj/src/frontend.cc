#include "hyrec/frontend.hh"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace hyrec {

// ---------------------------------------------------------------------------
// expression / statement rendering

std::string Expr::to_string() const {
  switch (kind) {
    case Kind::IntConst: return std::to_string(num);
    case Kind::BoolConst: return num ? "true" : "false";
    case Kind::Var: return var;
    case Kind::Unary: return op + args[0].to_string();
    case Kind::Binary:
      return "(" + args[0].to_string() + " " + op + " " + args[1].to_string() + ")";
    case Kind::Select: return var + "[" + args[0].to_string() + "]";
  }
  return "?";
}

std::string Statement::text() const {
  switch (kind) {
    case Kind::Assume:
      return "assume " + cond.to_string();
    case Kind::Call:
      return "call " + proc;
    case Kind::Ret:
      return "ret " + proc;
    case Kind::Assign: {
      std::string lhs, rhs;
      for (size_t i = 0; i < assigns.size(); ++i) {
        lhs += (i ? "," : "") + assigns[i].first.to_string();
        rhs += (i ? "," : "") + assigns[i].second.to_string();
      }
      return lhs + " := " + rhs;
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// lexer / parser

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind;
  std::string text;
  long long num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  std::string src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(std::string s) : src(std::move(s)) { advance(); }

  void bump(char c) {
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    pos++;
  }

  void advance() {
    while (pos < src.size()) {
      char c = src[pos];
      if (isspace(static_cast<unsigned char>(c))) {
        bump(c);
        continue;
      }
      if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
        continue;
      }
      break;
    }
    cur.line = line;
    cur.col = col;
    if (pos >= src.size()) {
      cur.kind = Token::Kind::End;
      cur.text = "<eof>";
      return;
    }
    char c = src[pos];
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos < src.size() &&
             (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        id += src[pos];
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Ident;
      cur.text = id;
      return;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      long long v = 0;
      std::string t;
      while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) {
        v = v * 10 + (src[pos] - '0');
        t += src[pos];
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Int;
      cur.num = v;
      cur.text = t;
      return;
    }
    static const char* two[] = {":=", "<=", ">=", "==", "!=", "&&", "||"};
    for (const char* t : two) {
      if (src.compare(pos, 2, t) == 0) {
        cur.kind = Token::Kind::Punct;
        cur.text = t;
        bump(src[pos]);
        bump(src[pos]);
        return;
      }
    }
    cur.kind = Token::Kind::Punct;
    cur.text = std::string(1, c);
    bump(c);
  }
};

struct Parser {
  Lexer lex;
  explicit Parser(std::string s) : lex(std::move(s)) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(lex.cur.line, lex.cur.col, msg + " (got '" + lex.cur.text + "')");
  }
  bool at(const std::string& t) { return lex.cur.text == t && lex.cur.kind != Token::Kind::Int; }
  bool at_ident() { return lex.cur.kind == Token::Kind::Ident; }
  void expect(const std::string& t) {
    if (!at(t)) fail("expected '" + t + "'");
    lex.advance();
  }
  bool accept(const std::string& t) {
    if (!at(t)) return false;
    lex.advance();
    return true;
  }
  std::string ident() {
    if (!at_ident()) fail("expected identifier");
    std::string s = lex.cur.text;
    lex.advance();
    return s;
  }

  // precedence climbing: || < && < comparisons < additive < multiplicative
  Expr parse_expr() { return parse_or(); }
  Expr parse_or() {
    Expr e = parse_and();
    while (at("||")) {
      lex.advance();
      Expr r = parse_and();
      e = Expr{Expr::Kind::Binary, 0, "", "||", {e, r}};
    }
    return e;
  }
  Expr parse_and() {
    Expr e = parse_cmp();
    while (at("&&")) {
      lex.advance();
      Expr r = parse_cmp();
      e = Expr{Expr::Kind::Binary, 0, "", "&&", {e, r}};
    }
    return e;
  }
  Expr parse_cmp() {
    Expr e = parse_add();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
      if (at(op)) {
        lex.advance();
        Expr r = parse_add();
        return Expr{Expr::Kind::Binary, 0, "", op, {e, r}};
      }
    }
    return e;
  }
  Expr parse_add() {
    Expr e = parse_mul();
    while (at("+") || at("-")) {
      std::string op = lex.cur.text;
      lex.advance();
      Expr r = parse_mul();
      e = Expr{Expr::Kind::Binary, 0, "", op, {e, r}};
    }
    return e;
  }
  Expr parse_mul() {
    Expr e = parse_unary();
    while (at("*")) {
      lex.advance();
      Expr r = parse_unary();
      e = Expr{Expr::Kind::Binary, 0, "", "*", {e, r}};
    }
    return e;
  }
  Expr parse_unary() {
    if (at("-")) {
      lex.advance();
      return Expr{Expr::Kind::Unary, 0, "", "-", {parse_unary()}};
    }
    if (at("!")) {
      lex.advance();
      return Expr{Expr::Kind::Unary, 0, "", "!", {parse_unary()}};
    }
    return parse_atom();
  }
  Expr parse_atom() {
    if (lex.cur.kind == Token::Kind::Int) {
      Expr e{Expr::Kind::IntConst, lex.cur.num, "", "", {}};
      lex.advance();
      return e;
    }
    if (accept("(")) {
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (at("true") || at("false")) {
      Expr e{Expr::Kind::BoolConst, at("true") ? 1 : 0, "", "", {}};
      lex.advance();
      return e;
    }
    std::string name = ident();
    if (accept("[")) {
      Expr i = parse_expr();
      expect("]");
      return Expr{Expr::Kind::Select, 0, name, "", {i}};
    }
    return Expr{Expr::Kind::Var, 0, name, "", {}};
  }

  Sort parse_sort() {
    if (accept("bool")) return Sort::Bool;
    expect("int");
    if (accept("[")) {
      expect("]");
      return Sort::IntArray;
    }
    return Sort::Int;
  }

  std::shared_ptr<Stmt> parse_stmt() {
    auto s = std::make_shared<Stmt>();
    if (accept("var")) {
      s->kind = Stmt::Kind::VarDecl;
      s->names.push_back(ident());
      while (accept(",")) s->names.push_back(ident());
      s->decl_sort = accept(":") ? parse_sort() : Sort::Int;
      expect(";");
      return s;
    }
    if (accept("assume")) {
      s->kind = Stmt::Kind::Assume;
      expect("(");
      s->cond = parse_expr();
      expect(")");
      expect(";");
      return s;
    }
    if (accept("if")) {
      s->kind = Stmt::Kind::If;
      expect("(");
      s->cond = parse_expr();
      expect(")");
      s->then_branch = parse_block();
      if (accept("else")) s->else_branch = parse_block();
      return s;
    }
    if (accept("call")) {
      s->kind = Stmt::Kind::Call;
      s->callee = ident();
      parse_call_args(*s);
      expect(";");
      return s;
    }
    // assignment or call with results: lhs (`,` lhs)* := rhs
    std::vector<Expr> lhs;
    if (accept("(")) {
      lhs.push_back(parse_lvalue());
      while (accept(",")) lhs.push_back(parse_lvalue());
      expect(")");
    } else {
      lhs.push_back(parse_lvalue());
    }
    expect(":=");
    if (accept("call")) {
      s->kind = Stmt::Kind::Call;
      s->callee = ident();
      s->call_lhs = std::move(lhs);
      parse_call_args(*s);
      expect(";");
      return s;
    }
    s->kind = Stmt::Kind::Assign;
    std::vector<Expr> rhs;
    if (lhs.size() > 1) {
      expect("(");
      rhs.push_back(parse_expr());
      while (accept(",")) rhs.push_back(parse_expr());
      expect(")");
    } else {
      rhs.push_back(parse_expr());
    }
    if (lhs.size() != rhs.size()) fail("assignment arity mismatch");
    for (size_t i = 0; i < lhs.size(); ++i) s->assigns.push_back({lhs[i], rhs[i]});
    expect(";");
    return s;
  }

  Expr parse_lvalue() {
    std::string name = ident();
    if (accept("[")) {
      Expr i = parse_expr();
      expect("]");
      return Expr{Expr::Kind::Select, 0, name, "", {i}};
    }
    return Expr{Expr::Kind::Var, 0, name, "", {}};
  }

  void parse_call_args(Stmt& s) {
    expect("(");
    if (!at(")")) {
      s.call_args.push_back(parse_expr());
      while (accept(",")) s.call_args.push_back(parse_expr());
    }
    expect(")");
  }

  std::vector<std::shared_ptr<Stmt>> parse_block() {
    expect("{");
    std::vector<std::shared_ptr<Stmt>> out;
    while (!at("}")) out.push_back(parse_stmt());
    expect("}");
    return out;
  }

  Procedure parse_proc() {
    expect("proc");
    Procedure p;
    p.name = ident();
    expect("(");
    if (!at(")")) {
      do {
        std::string n = ident();
        p.params.push_back(n);
        p.sorts[n] = accept(":") ? parse_sort() : Sort::Int;
      } while (accept(","));
    }
    expect(")");
    if (accept("returns")) {
      expect("(");
      do {
        std::string n = ident();
        p.outputs.push_back(n);
        p.sorts[n] = accept(":") ? parse_sort() : Sort::Int;
      } while (accept(","));
      expect(")");
    }
    p.body = parse_block();
    return p;
  }

  Program parse_program() {
    Program prog;
    while (lex.cur.kind != Token::Kind::End) prog.procedures.push_back(parse_proc());
    if (prog.procedures.empty()) fail("empty program");
    return prog;
  }
};

void collect_locals(const std::vector<std::shared_ptr<Stmt>>& body, Procedure& p) {
  for (const auto& s : body) {
    if (s->kind == Stmt::Kind::VarDecl) {
      for (const auto& n : s->names) {
        if (p.sorts.count(n)) throw ParseError(0, 0, "duplicate variable " + n);
        p.sorts[n] = s->decl_sort;
        p.locals.push_back(n);
      }
    } else if (s->kind == Stmt::Kind::If) {
      collect_locals(s->then_branch, p);
      collect_locals(s->else_branch, p);
    }
  }
}

void check_vars(const Expr& e, const Procedure& p, const Program& prog) {
  switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Select:
      if (!p.sorts.count(e.var))
        throw ParseError(0, 0, "undeclared identifier " + e.var + " in " + p.name);
      break;
    default:
      break;
  }
  for (const auto& a : e.args) check_vars(a, p, prog);
}

void check_body(const std::vector<std::shared_ptr<Stmt>>& body, const Procedure& p,
                const Program& prog) {
  for (const auto& s : body) {
    switch (s->kind) {
      case Stmt::Kind::VarDecl:
        break;
      case Stmt::Kind::Assume:
        check_vars(s->cond, p, prog);
        break;
      case Stmt::Kind::Assign:
        for (const auto& [l, r] : s->assigns) {
          check_vars(l, p, prog);
          check_vars(r, p, prog);
        }
        break;
      case Stmt::Kind::Call: {
        const Procedure* callee = prog.find(s->callee);
        if (!callee) throw ParseError(0, 0, "unknown procedure " + s->callee);
        if (s->call_args.size() != callee->params.size())
          throw ParseError(0, 0, "call arity mismatch for " + s->callee);
        if (!s->call_lhs.empty() && s->call_lhs.size() != callee->outputs.size())
          throw ParseError(0, 0, "call result arity mismatch for " + s->callee);
        for (const auto& a : s->call_args) check_vars(a, p, prog);
        for (const auto& l : s->call_lhs) check_vars(l, p, prog);
        break;
      }
      case Stmt::Kind::If:
        check_vars(s->cond, p, prog);
        check_body(s->then_branch, p, prog);
        check_body(s->else_branch, p, prog);
        break;
    }
  }
}

}  // namespace

const Procedure* Program::find(const std::string& name) const {
  for (const auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

Program parse_program(const std::string& source) {
  Parser p(source);
  Program prog = p.parse_program();
  for (auto& proc : prog.procedures) {
    for (const auto& n : proc.params) proc.locals.push_back(n);
    for (const auto& n : proc.outputs)
      if (std::find(proc.locals.begin(), proc.locals.end(), n) == proc.locals.end())
        proc.locals.push_back(n);
    collect_locals(proc.body, proc);
  }
  for (const auto& proc : prog.procedures) check_body(proc.body, proc, prog);
  return prog;
}

namespace {

std::string sort_str(Sort s) {
  switch (s) {
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::IntArray: return "int[]";
  }
  return "int";
}

void print_block(std::ostringstream& os, const std::vector<std::shared_ptr<Stmt>>& body,
                 int indent) {
  std::string pad(indent, ' ');
  for (const auto& s : body) {
    switch (s->kind) {
      case Stmt::Kind::VarDecl: {
        os << pad << "var ";
        for (size_t i = 0; i < s->names.size(); ++i) os << (i ? ", " : "") << s->names[i];
        os << ": " << sort_str(s->decl_sort) << ";\n";
        break;
      }
      case Stmt::Kind::Assume:
        os << pad << "assume (" << s->cond.to_string() << ");\n";
        break;
      case Stmt::Kind::Assign: {
        os << pad;
        if (s->assigns.size() > 1) {
          os << "(";
          for (size_t i = 0; i < s->assigns.size(); ++i)
            os << (i ? ", " : "") << s->assigns[i].first.to_string();
          os << ") := (";
          for (size_t i = 0; i < s->assigns.size(); ++i)
            os << (i ? ", " : "") << s->assigns[i].second.to_string();
          os << ");\n";
        } else {
          os << s->assigns[0].first.to_string() << " := " << s->assigns[0].second.to_string()
             << ";\n";
        }
        break;
      }
      case Stmt::Kind::Call: {
        os << pad;
        if (!s->call_lhs.empty()) {
          if (s->call_lhs.size() > 1) {
            os << "(";
            for (size_t i = 0; i < s->call_lhs.size(); ++i)
              os << (i ? ", " : "") << s->call_lhs[i].to_string();
            os << ") := ";
          } else {
            os << s->call_lhs[0].to_string() << " := ";
          }
        }
        os << "call " << s->callee << "(";
        for (size_t i = 0; i < s->call_args.size(); ++i)
          os << (i ? ", " : "") << s->call_args[i].to_string();
        os << ");\n";
        break;
      }
      case Stmt::Kind::If:
        os << pad << "if (" << s->cond.to_string() << ") {\n";
        print_block(os, s->then_branch, indent + 2);
        os << pad << "}";
        if (!s->else_branch.empty()) {
          os << " else {\n";
          print_block(os, s->else_branch, indent + 2);
          os << pad << "}";
        }
        os << "\n";
        break;
    }
  }
}

}  // namespace

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& proc : p.procedures) {
    os << "proc " << proc.name << "(";
    for (size_t i = 0; i < proc.params.size(); ++i) {
      os << (i ? ", " : "") << proc.params[i];
      if (proc.sorts.at(proc.params[i]) != Sort::Int)
        os << ": " << sort_str(proc.sorts.at(proc.params[i]));
    }
    os << ")";
    if (!proc.outputs.empty()) {
      os << " returns (";
      for (size_t i = 0; i < proc.outputs.size(); ++i) {
        os << (i ? ", " : "") << proc.outputs[i];
        if (proc.sorts.at(proc.outputs[i]) != Sort::Int)
          os << ": " << sort_str(proc.sorts.at(proc.outputs[i]));
      }
      os << ")";
    }
    os << " {\n";
    print_block(os, proc.body, 2);
    os << "}\n";
  }
  return os.str();
}

HyperProperty parse_property(const std::string& text) {
  HyperProperty prop;
  std::istringstream is(text);
  std::string line, key, value;
  auto flush = [&]() {
    if (key.empty()) return;
    // trim
    size_t a = value.find_first_not_of(" \t\n");
    size_t b = value.find_last_not_of(" \t\n");
    std::string v = a == std::string::npos ? "" : value.substr(a, b - a + 1);
    if (key == "k") prop.k = std::stoi(v);
    else if (key == "pre") prop.pre = v;
    else if (key == "post") prop.post = v;
    else throw std::invalid_argument("property file: unknown key " + key);
    key.clear();
    value.clear();
  };
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) continue;
    bool is_key = false;
    for (const char* k : {"k:", "pre:", "post:"}) {
      if (line.rfind(k, 0) == 0) {
        flush();
        key = std::string(k).substr(0, std::string(k).size() - 1);
        value = line.substr(std::string(k).size());
        is_key = true;
        break;
      }
    }
    if (!is_key) value += "\n" + line;
  }
  flush();
  return prop;
}

// ---------------------------------------------------------------------------
// compilation to grammars over a shared alphabet

namespace {

Expr rename_expr(const Expr& e, int copy) {
  Expr out = e;
  if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Select)
    out.var = e.var + std::to_string(copy);
  out.args.clear();
  for (const auto& a : e.args) out.args.push_back(rename_expr(a, copy));
  return out;
}

struct Compiler {
  const Program& prog;
  int k;
  std::shared_ptr<VPAlphabet> sigma = std::make_shared<VPAlphabet>();
  std::vector<Statement> statements;
  std::map<std::string, LetterId> letter_by_name;

  LetterId letter(int copy, LetterKind kind, Statement st) {
    std::string name = std::to_string(copy) + "|" + st.text();
    auto it = letter_by_name.find(name);
    if (it != letter_by_name.end()) return it->second;
    statements.push_back(std::move(st));
    LetterId id =
        sigma->add(name, kind, copy, static_cast<int>(statements.size()) - 1);
    letter_by_name[name] = id;
    return id;
  }

  LetterId assume_letter(int copy, const Expr& cond) {
    Statement st;
    st.kind = Statement::Kind::Assume;
    st.cond = rename_expr(cond, copy);
    return letter(copy, LetterKind::Internal, std::move(st));
  }
  LetterId assign_letter(int copy, const std::vector<std::pair<Expr, Expr>>& assigns) {
    Statement st;
    st.kind = Statement::Kind::Assign;
    for (const auto& [l, r] : assigns)
      st.assigns.push_back({rename_expr(l, copy), rename_expr(r, copy)});
    return letter(copy, LetterKind::Internal, std::move(st));
  }
  LetterId call_letter(int copy, const std::string& proc) {
    Statement st;
    st.kind = Statement::Kind::Call;
    st.proc = proc;
    return letter(copy, LetterKind::Call, std::move(st));
  }
  LetterId ret_letter(int copy, const std::string& proc) {
    Statement st;
    st.kind = Statement::Kind::Ret;
    st.proc = proc;
    return letter(copy, LetterKind::Return, std::move(st));
  }

  // per-copy grammar pieces
  struct GrammarBuild {
    Vpg g;
    int copy;
    int fresh = 0;
    std::map<std::string, NonTerminal> proc_body;  // proc -> body start
    explicit GrammarBuild(AlphabetRef s, int copy) : g(std::move(s)), copy(copy) {}
    NonTerminal nt(const std::string& hint) {
      return g.add_nonterminal(std::to_string(copy) + ":" + hint + "#" +
                               std::to_string(fresh++));
    }
  };

  // compile a statement list; returns the entry nonterminal, wiring the chain
  // to `next` at the end
  NonTerminal compile_body(GrammarBuild& gb, const std::vector<std::shared_ptr<Stmt>>& body,
                           size_t i, NonTerminal next, const Procedure& proc) {
    if (i == body.size()) return next;
    const Stmt& s = *body[i];
    NonTerminal rest = compile_body(gb, body, i + 1, next, proc);
    switch (s.kind) {
      case Stmt::Kind::VarDecl:
        return rest;
      case Stmt::Kind::Assume: {
        NonTerminal x = gb.nt("assume");
        gb.g.add_int(x, assume_letter(gb.copy, s.cond), rest);
        return x;
      }
      case Stmt::Kind::Assign: {
        NonTerminal x = gb.nt("assign");
        gb.g.add_int(x, assign_letter(gb.copy, s.assigns), rest);
        return x;
      }
      case Stmt::Kind::If: {
        Expr neg{Expr::Kind::Unary, 0, "", "!", {s.cond}};
        NonTerminal x = gb.nt("if");
        NonTerminal tb = compile_body(gb, s.then_branch, 0, rest, proc);
        NonTerminal eb = compile_body(gb, s.else_branch, 0, rest, proc);
        NonTerminal ta = gb.nt("then");
        NonTerminal ea = gb.nt("else");
        gb.g.add_int(x, assume_letter(gb.copy, s.cond), tb == rest ? rest : tb);
        // both productions of x start with internals (uniform by construction)
        (void)ta;
        (void)ea;
        gb.g.add_int(x, assume_letter(gb.copy, neg), eb == rest ? rest : eb);
        return x;
      }
      case Stmt::Kind::Call: {
        const Procedure& callee = *prog.find(s.callee);
        // parameter update before the call, result copy after the return;
        // identity updates are dropped
        std::vector<std::pair<Expr, Expr>> pre_assign;
        for (size_t j = 0; j < callee.params.size(); ++j) {
          Expr lhs{Expr::Kind::Var, 0, callee.params[j], "", {}};
          const Expr& rhs = s.call_args[j];
          if (rhs.kind == Expr::Kind::Var && rhs.var == callee.params[j]) continue;
          pre_assign.push_back({lhs, rhs});
        }
        std::vector<std::pair<Expr, Expr>> post_assign;
        for (size_t j = 0; j < s.call_lhs.size(); ++j) {
          const Expr& lhs = s.call_lhs[j];
          Expr rhs{Expr::Kind::Var, 0, callee.outputs[j], "", {}};
          if (lhs.kind == Expr::Kind::Var && lhs.var == callee.outputs[j]) continue;
          post_assign.push_back({lhs, rhs});
        }
        NonTerminal after = rest;
        if (!post_assign.empty()) {
          NonTerminal y = gb.nt("ret_copy");
          gb.g.add_int(y, assign_letter(gb.copy, post_assign), rest);
          after = y;
        }
        NonTerminal callnt = gb.nt("call_" + s.callee);
        gb.g.add_call(callnt, call_letter(gb.copy, s.callee), proc_body_nt(gb, s.callee),
                      ret_letter(gb.copy, s.callee), after);
        if (pre_assign.empty()) return callnt;
        NonTerminal x = gb.nt("args_" + s.callee);
        gb.g.add_int(x, assign_letter(gb.copy, pre_assign), callnt);
        return x;
      }
    }
    throw std::logic_error("unreachable");
  }

  NonTerminal proc_body_nt(GrammarBuild& gb, const std::string& name) {
    auto it = gb.proc_body.find(name);
    if (it != gb.proc_body.end()) return it->second;
    // reserve the symbol first: recursion may reference it
    NonTerminal body = gb.g.add_nonterminal(std::to_string(gb.copy) + ":" + name);
    gb.proc_body[name] = body;
    const Procedure& proc = *prog.find(name);
    NonTerminal end = gb.nt(name + "_end");
    gb.g.add_eps(end);
    NonTerminal chain = compile_body(gb, proc.body, 0, end, proc);
    // alias: body behaves as chain
    for (const auto& p : gb.g.productions())
      if (p.lhs == chain) {
        Production q = p;
        q.lhs = body;
        gb.g.add_production(q);
      }
    if (chain == end) gb.g.add_eps(body);
    return body;
  }
};

}  // namespace

CompiledProgram compile_copies(const Program& p, int k,
                               const std::vector<std::string>& entries) {
  if (k < 1) throw std::invalid_argument("compile_copies: k must be >= 1");
  if (static_cast<int>(entries.size()) != k)
    throw std::invalid_argument("compile_copies: one entry per copy required");
  for (const auto& e : entries)
    if (!p.find(e)) throw std::invalid_argument("unknown entry procedure " + e);

  Compiler c{p, k};
  CompiledProgram out;
  std::vector<Compiler::GrammarBuild> builds;
  // interleave letter creation per copy so payload/letter tables stay stable
  for (int copy = 1; copy <= k; ++copy) {
    builds.emplace_back(c.sigma, copy);
    Compiler::GrammarBuild& gb = builds.back();
    NonTerminal start = gb.g.add_nonterminal(std::to_string(copy) + ":S");
    NonTerminal end = gb.nt("harness_end");
    gb.g.add_eps(end);
    gb.g.add_call(start, c.call_letter(copy, entries[copy - 1]),
                  c.proc_body_nt(gb, entries[copy - 1]), c.ret_letter(copy, entries[copy - 1]),
                  end);
    gb.g.set_start(start);
  }

  out.sigma = c.sigma;
  out.statements = std::move(c.statements);
  for (int copy = 1; copy <= k; ++copy) {
    ComponentInfo info;
    info.component = copy;
    info.entry = entries[copy - 1];
    std::set<std::string> vars;
    for (const auto& proc : p.procedures) {
      std::vector<std::string> params, outs;
      for (const auto& v : proc.params) params.push_back(v + std::to_string(copy));
      for (const auto& v : proc.outputs) outs.push_back(v + std::to_string(copy));
      info.params[proc.name] = params;
      info.outputs[proc.name] = outs;
      for (const auto& v : proc.locals) {
        std::string rv = v + std::to_string(copy);
        vars.insert(rv);
        info.sorts[rv] = proc.sorts.at(v);
      }
    }
    info.vars.assign(vars.begin(), vars.end());
    out.components.push_back(std::move(info));
    out.grammars.push_back(vpg_uniformize(vpg_trim(builds[copy - 1].g)));
  }
  return out;
}

std::set<LetterId> letters_of_procedures(const CompiledProgram& cp,
                                         const std::vector<std::string>& procs) {
  std::set<LetterId> out;
  for (LetterId a = 0; a < cp.sigma->size(); ++a) {
    const Letter& l = cp.sigma->letter(a);
    if (l.kind == LetterKind::Internal) continue;
    const Statement& st = cp.statements.at(l.payload);
    for (const auto& p : procs)
      if (st.proc == p) out.insert(a);
  }
  return out;
}

}  // namespace hyrec
