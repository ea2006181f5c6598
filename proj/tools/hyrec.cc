// hyrec -- hypersafety verification of recursive programs via product programs
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hyrec/frontend.hh"
#include "hyrec/independence.hh"
#include "hyrec/oracle.hh"
#include "hyrec/pipeline.hh"

using namespace hyrec;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_verify(const RunConfig& cfg) {
  RunReport rep = run(cfg);
  std::cout << rep.to_json();
  if (!rep.error.empty()) std::cerr << "error: " << rep.error << "\n";
  return rep.exit_code;
}

int cmd_check_independence(const std::string& source, const std::string& annotations,
                           const std::string& entry) {
  Program prog = parse_program(read_file(source));
  std::vector<std::string> entries{entry.empty() ? prog.procedures[0].name : entry};
  CompiledProgram cp = compile_copies(prog, 1, entries);

  // annotation file: one "<statement text> dep|indep" per line; unlisted
  // internals default to dep
  IndependenceSpec spec;
  spec.component = 1;
  std::map<std::string, bool> marks;
  std::istringstream is(read_file(annotations));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto pos = line.find_last_of(' ');
    if (pos == std::string::npos) continue;
    std::string text = line.substr(0, pos);
    std::string mark = line.substr(pos + 1);
    marks[text] = mark == "indep";
  }
  for (LetterId a = 0; a < cp.sigma->size(); ++a) {
    if (cp.sigma->kind(a) != LetterKind::Internal) continue;
    const Statement& st = cp.payload(a);
    auto it = marks.find(st.text());
    if (it != marks.end() && it->second) spec.independent_internals.insert(a);
  }
  Vpa comp = vpg_to_vpa(cp.grammars[0]);
  std::vector<const Vpa*> comps{&comp};
  SoundnessReport rep = wn_shuffle_soundness_report(comps, {spec});
  std::cout << "{\n  \"sound\": " << (rep.sound ? "true" : "false") << ",\n  \"direction\": \""
            << rep.direction << "\",\n  \"witnesses\": [";
  for (size_t i = 0; i < rep.witnesses.size(); ++i) {
    std::cout << (i ? ", " : "") << "\"" << word_to_string(*cp.sigma, rep.witnesses[i].second)
              << "\"";
  }
  std::cout << "]\n}\n";
  return rep.sound ? 0 : 1;
}

int cmd_debug_enumerate(const std::string& source, const std::string& reduction,
                        const std::string& mode, int maxlen,
                        const std::vector<std::string>& entries_in) {
  Program prog = parse_program(read_file(source));
  ReductionExpr expr = parse_reduction_expr(reduction);
  int k = static_cast<int>(expr.components().size());
  std::vector<std::string> entries = entries_in;
  if (entries.empty()) entries.assign(k, prog.procedures[0].name);
  CompiledProgram cp = compile_copies(prog, k, entries);
  std::map<int, Vpg> inputs;
  for (int i = 0; i < k; ++i) inputs.emplace(i + 1, cp.grammars[i]);
  EvalMode m = mode == "aut" ? EvalMode::Aut
               : mode == "vpg" ? EvalMode::VpgMode
                               : EvalMode::Direct;
  EvalResult ev = evaluate(expr, inputs, m);
  std::set<Word> words = ev.vpa ? vpa_enumerate(*ev.vpa, maxlen, true)
                                : vpg_enumerate(vpg_trim(*ev.vpg), maxlen);
  for (const Word& w : words) std::cout << word_to_string(*cp.sigma, w, " ; ") << "\n";
  std::cerr << words.size() << " words of length <= " << maxlen << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypersafety verification of recursive programs via product programs"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> entry_flags;
  std::vector<std::string> solver_flags;

  auto* verify = app.add_subcommand("verify", "construct a product program and solve");
  verify->add_option("source", cfg.source_path, "program source file")->required();
  verify->add_option("--property", cfg.property, "property file or inline pre:/post: text")
      ->required();
  verify->add_option("--reduction", cfg.reduction, "reduction expression");
  verify->add_option("--mode", cfg.mode, "aut | vpg | direct | baseline:seq|nocopies|copies");
  verify->add_option("--entry", entry_flags, "component entry, e.g. --entry P1=div");
  verify->add_option("--solver", solver_flags, "solver spec name=cmdline with {file}");
  verify->add_option("--timeout", cfg.timeout_s, "solver timeout in seconds");
  verify->add_option("--emit-dir", cfg.emit_dir, "artifact output directory");

  std::string ind_source, ind_annotations, ind_entry;
  auto* check = app.add_subcommand("check-independence",
                                   "decide tail/head-independence and shuffle soundness");
  check->add_option("source", ind_source, "program source file")->required();
  check->add_option("--annotations", ind_annotations, "letter dependence file")->required();
  check->add_option("--entry", ind_entry, "entry procedure");

  std::string dbg_source, dbg_reduction = "P1", dbg_mode = "direct";
  int dbg_maxlen = 8;
  std::vector<std::string> dbg_entries;
  auto* debug = app.add_subcommand("debug", "debugging helpers");
  auto* enumerate = debug->add_subcommand("enumerate", "list bounded words of a product");
  enumerate->add_option("source", dbg_source, "program source file")->required();
  enumerate->add_option("--reduction", dbg_reduction, "reduction expression");
  enumerate->add_option("--mode", dbg_mode, "aut | vpg | direct");
  enumerate->add_option("--maxlen", dbg_maxlen, "maximum word length");
  enumerate->add_option("--entry", dbg_entries, "component entries in order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      for (const auto& e : entry_flags) {
        auto pos = e.find('=');
        if (pos == std::string::npos) throw std::invalid_argument("--entry expects P<i>=proc");
        size_t idx = std::stoul(e.substr(1, pos - 1));
        if (cfg.entries.size() < idx) cfg.entries.resize(idx);
        cfg.entries[idx - 1] = e.substr(pos + 1);
      }
      for (const auto& s : solver_flags) {
        auto pos = s.find('=');
        if (pos == std::string::npos) throw std::invalid_argument("--solver expects name=cmd");
        cfg.solvers.push_back({s.substr(0, pos), s.substr(pos + 1)});
      }
      return cmd_verify(cfg);
    }
    if (*check) return cmd_check_independence(ind_source, ind_annotations, ind_entry);
    if (*enumerate)
      return cmd_debug_enumerate(dbg_source, dbg_reduction, dbg_mode, dbg_maxlen, dbg_entries);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
