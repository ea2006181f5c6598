#include "hyrec/pipeline.hh"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "hyrec/frontend.hh"
#include "hyrec/oracle.hh"

namespace hyrec {

// ---------------------------------------------------------------------------
// reduction expression surface syntax

namespace {

struct ExprParser {
  std::string s;
  size_t i = 0;

  explicit ExprParser(std::string text) : s(std::move(text)) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("reduction expression, position " + std::to_string(i) + ": " +
                                msg);
  }
  void ws() {
    while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool accept(const std::string& tok) {
    ws();
    if (s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }
  std::string ident() {
    ws();
    size_t b = i;
    while (i < s.size() && (isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (b == i) fail("expected identifier");
    return s.substr(b, i - b);
  }
  int integer() {
    ws();
    size_t b = i;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) fail("expected integer");
    return std::stoi(s.substr(b, i - b));
  }

  ReductionExpr parse() {
    ReductionExpr e = parse_expr();
    ws();
    if (i != s.size()) fail("trailing input");
    return e;
  }

  ReductionExpr parse_expr() {
    ws();
    ReductionExpr e;
    if (accept("right_aligned:")) {
      e = parse_expr();
      e.right_aligned = true;
      return finish(e);
    }
    if (accept("(")) {
      // (a,b,...)-lockstep(...)
      std::vector<int> speeds{integer()};
      while (accept(",")) speeds.push_back(integer());
      expect(")");
      expect("-lockstep");
      expect("(");
      std::vector<ReductionExpr> children{parse_expr()};
      while (accept(",")) children.push_back(parse_expr());
      expect(")");
      for (int v : speeds)
        if (v < 1) fail("lockstep speeds must be positive");
      if (speeds.size() != children.size()) fail("lockstep speed/arity mismatch");
      e = ReductionExpr::make_lockstep(std::move(speeds), std::move(children));
      return finish(e);
    }
    std::string id = ident();
    if (id == "concat" || id == "nested_concatenation") {
      expect("(");
      ReductionExpr a = parse_expr();
      expect(",");
      ReductionExpr b = parse_expr();
      expect(")");
      e = id == "concat" ? ReductionExpr::make_concat(std::move(a), std::move(b))
                         : ReductionExpr::make_nested_concat(std::move(a), std::move(b));
      return finish(e);
    }
    // leaf: P<digits>
    if (id.size() < 2 || id[0] != 'P' ||
        id.find_first_not_of("0123456789", 1) != std::string::npos)
      fail("component leaves are written P1, P2, ...");
    e = ReductionExpr::make_leaf(std::stoi(id.substr(1)));
    return finish(e);
  }

  ReductionExpr finish(ReductionExpr e) {
    size_t save = i;
    ws();
    if (accept("with")) {
      expect("exclude=[");
      e.exclude_names.push_back(ident());
      while (accept(",")) e.exclude_names.push_back(ident());
      expect("]");
    } else {
      i = save;
    }
    return e;
  }
};

}  // namespace

ReductionExpr parse_reduction_expr(const std::string& text) {
  ExprParser p(text);
  ReductionExpr e = p.parse();
  std::set<int> seen;
  for (int c : e.components()) {
    if (c < 1) throw std::invalid_argument("component indices start at P1");
    if (!seen.insert(c).second)
      throw std::invalid_argument("component P" + std::to_string(c) +
                                  " occurs in more than one leaf");
  }
  return e;
}

// ---------------------------------------------------------------------------
// run

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string RunReport::to_json() const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": 1,\n";
  os << "  \"verdict\": \"" << verdict << "\",\n";
  os << "  \"mode\": \"" << mode << "\",\n";
  os << "  \"solver\": \"" << solver << "\",\n";
  os << "  \"sizes\": {\n";
  os << "    \"states\": " << states << ",\n";
  os << "    \"nonterminals\": " << nonterminals << ",\n";
  os << "    \"predicates\": " << predicates << ",\n";
  os << "    \"clauses\": " << clauses << "\n";
  os << "  },\n";
  os << "  \"oc_bound_checks\": [";
  for (size_t i = 0; i < oc.size(); ++i) {
    os << (i ? ", " : "") << "{\"reachable\": " << oc[i].reachable_states
       << ", \"bound\": " << oc[i].bound << "}";
  }
  os << "],\n";
  os << "  \"encode_splits\": " << encode_splits << ",\n";
  os << "  \"wall_ms\": " << wall_ms << ",\n";
  os << "  \"smt_file\": \"" << json_escape(smt_path) << "\",\n";
  os << "  \"product_file\": \"" << json_escape(product_path) << "\",\n";
  os << "  \"error\": \"" << json_escape(error) << "\"\n";
  os << "}\n";
  return os.str();
}

RunReport run(const RunConfig& cfg) {
  RunReport rep;
  rep.mode = cfg.mode;
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::string source =
        !cfg.source_text.empty() ? cfg.source_text : read_file(cfg.source_path);
    Program prog = parse_program(source);

    std::string prop_text = cfg.property;
    if (!prop_text.empty() && prop_text.find("pre:") == std::string::npos)
      prop_text = read_file(cfg.property);
    HyperProperty prop = parse_property(prop_text);

    ReductionExpr expr = parse_reduction_expr(cfg.reduction);
    auto comps = expr.components();
    int k = prop.k > 1 ? prop.k : static_cast<int>(comps.size());
    if (static_cast<int>(comps.size()) != k)
      throw std::invalid_argument("reduction expression mentions " +
                                  std::to_string(comps.size()) + " components, property has " +
                                  std::to_string(k));

    std::vector<std::string> entries = cfg.entries;
    if (entries.empty()) {
      if (prog.procedures.size() != 1 && cfg.mode.rfind("baseline", 0) != 0 && k > 0) {
        // default entry: the first procedure
      }
      entries.assign(k, prog.procedures[0].name);
    }
    if (static_cast<int>(entries.size()) != k)
      throw std::invalid_argument("need one entry per component");

    std::filesystem::path dir =
        cfg.emit_dir.empty() ? std::filesystem::temp_directory_path() / "hyrec_out"
                             : std::filesystem::path(cfg.emit_dir);
    std::filesystem::create_directories(dir);

    ChcSystem sys;
    EncodeStats es;
    if (cfg.mode.rfind("baseline:", 0) == 0) {
      std::string variant = cfg.mode.substr(9);
      BaselineVariant bv;
      if (variant == "seq") bv = BaselineVariant::SeqComposition;
      else if (variant == "nocopies") bv = BaselineVariant::DirectNoCopies;
      else if (variant == "copies") bv = BaselineVariant::DirectCopies;
      else throw std::invalid_argument("unknown baseline variant " + variant);
      sys = encode_baseline(prog, entries, prop, bv, &es);
      rep.product_path = "";
    } else {
      CompiledProgram cp = compile_copies(prog, k, entries);
      std::map<int, Vpg> inputs;
      for (int i = 0; i < k; ++i) inputs.emplace(i + 1, cp.grammars[i]);
      // resolve excluded procedure names on every node
      std::function<void(ReductionExpr&)> resolve = [&](ReductionExpr& e) {
        if (!e.exclude_names.empty()) e.excluded = letters_of_procedures(cp, e.exclude_names);
        for (auto& c : e.children) resolve(c);
      };
      resolve(expr);

      EvalMode mode;
      if (cfg.mode == "aut") mode = EvalMode::Aut;
      else if (cfg.mode == "vpg") mode = EvalMode::VpgMode;
      else if (cfg.mode == "direct") mode = EvalMode::Direct;
      else throw std::invalid_argument("unknown mode " + cfg.mode);

      EvalResult ev = evaluate(expr, inputs, mode);
      rep.oc = ev.oc;
      std::string dump;
      if (ev.vpa) {
        rep.states = ev.vpa->num_states();
        dump = ev.vpa->dump();
        sys = encode_nwa(*ev.vpa, cp, prop, true, &es);
      } else {
        Vpg g = vpg_trim(*ev.vpg);
        rep.nonterminals = g.num_nonterminals();
        dump = g.dump();
        sys = encode_vpg(g, cp, prop, &es);
      }
      rep.product_path = (dir / "product.txt").string();
      std::ofstream(rep.product_path) << dump;
    }
    rep.predicates = es.predicates;
    rep.clauses = es.clauses;
    rep.encode_splits = es.call_letter_splits;

    rep.smt_path = (dir / "system.smt2").string();
    std::ofstream(rep.smt_path) << emit_smtlib(sys);

    std::vector<SolverSpec> solvers = cfg.solvers.empty() ? detect_solvers() : cfg.solvers;
    SolveResult sr = solve_chc(rep.smt_path, solvers, cfg.timeout_s);
    rep.solver = sr.solver;
    switch (sr.status) {
      case SolveStatus::Sat:
        rep.verdict = "verified";
        rep.exit_code = 0;
        break;
      case SolveStatus::Unsat:
        rep.verdict = "refuted";
        rep.exit_code = 1;
        break;
      case SolveStatus::NoSolver:
        rep.verdict = "unknown";
        rep.error = "no CHC solver configured or found on PATH";
        rep.exit_code = 2;
        break;
      default:
        rep.verdict = "unknown";
        rep.exit_code = 2;
        break;
    }
  } catch (const std::exception& e) {
    rep.verdict = "unknown";
    rep.error = e.what();
    rep.exit_code = 3;
  }
  auto t1 = std::chrono::steady_clock::now();
  rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  if (!rep.smt_path.empty()) {
    std::filesystem::path dir = std::filesystem::path(rep.smt_path).parent_path();
    std::ofstream(dir / "report.json") << rep.to_json();
  }
  return rep;
}

}  // namespace hyrec
