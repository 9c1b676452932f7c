// Command-line front end: validation, supported models, translation,
// evaluation, bounded static analysis, and automaton dumps.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wfshacl/wfshacl.hpp"

using namespace wfshacl;
using nlohmann::json;

namespace {

// Exit codes. Verdicts first, then the error classes.
constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kInconclusive = 2;
constexpr int kBudget = 3;
constexpr int kInputError = 4;
constexpr int kUsageError = 5;
constexpr int kInternalError = 6;

struct Options {
  bool json = false;
  bool trace = false;
  bool clean = false;
  bool bounded_only = false;
  bool deterministic = false;
  bool dump = false;
  std::string semantics = "wf";
  std::string engine = "search";
  std::size_t max_nodes = 4;
  std::optional<long> budget_ms;
  std::size_t guess = 0;
  std::vector<std::string> symbols;
  std::vector<std::string> args;
};

/// A failure that already carries its exit code.
struct Failure {
  int code;
  std::string kind;
  std::string message;
  json extra = json::object();
};

/// A parse error located as where:line:column.
Failure located(const std::string& where, const ParseError& e) {
  std::string msg = e.what();
  // Drop the "ParseError: l:c: " prefix; the location is reported separately.
  std::string head = std::string(to_string(ErrorKind::Parse)) + ": " + std::to_string(e.line()) + ":" +
                     std::to_string(e.column()) + ": ";
  if (msg.rfind(head, 0) == 0) msg = msg.substr(head.size());
  json extra{{"line", e.line()}, {"column", e.column()}};
  if (where != "formula") extra["file"] = where;
  return Failure{kInputError, "ParseError",
                 where + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + msg, extra};
}

/// Reads and parses a file.
template <class Parse>
auto load(const std::string& path, Parse parse) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Failure{kInputError, "InvalidArgument", "cannot open '" + path + "'"};
  }
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw located(path, e);
  }
}

Document load_document(const std::string& path) {
  Document d = load(path, [](const std::string& t) { return parse_document(t); });
  d.check();
  return d;
}

DataGraph load_graph(const std::string& path) {
  return load(path, [](const std::string& t) { return parse_graph(t); });
}

/// A formula given inline or as a file name.
MuFormula load_formula(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return load(arg, [](const std::string& t) { return parse_mu_formula(t); });
  try {
    return parse_mu_formula(arg);
  } catch (const ParseError& e) {
    throw located("formula", e);
  }
}

SearchBudget budget_of(const Options& o) {
  SearchBudget b;
  if (o.budget_ms) b.wall = std::chrono::milliseconds(*o.budget_ms);
  return b;
}

/// Output of one command: the JSON document and its human rendering.
struct Report {
  json body = json::object();
  std::string text;
  int code = kYes;
};

std::string assignment_text(const ShapeAssignment& s) { return s.str(); }

// ---------------------------------------------------------------------------

Report run_validate(const Options& o) {
  if (o.args.size() != 2) throw Failure{kUsageError, "Usage", "validate expects GRAPH DOCUMENT"};
  DataGraph g = load_graph(o.args[0]);
  Document d = load_document(o.args[1]);
  require_compatible(g, d);
  Report r;
  bool ok = false;
  if (o.semantics == "wf") {
    WfResult wf = well_founded_model(g, d.constraints);
    ok = validates(g, d, wf.model);
    r.body["model"] = assignment_text(wf.model);
    if (o.trace) {
      json lines = json::array();
      for (const auto& step : wf.trace) lines.push_back(step.str());
      r.body["trace"] = lines;
      r.text += format_trace(wf.trace);
    }
    r.text += "model: " + wf.model.str() + "\n";
  } else {
    // Brave validation: some supported model satisfies every target.
    auto models = enumerate_supported_models(g, d.constraints);
    std::optional<std::size_t> which;
    for (std::size_t i = 0; i < models.size() && !which; ++i)
      if (validates(g, d, models[i])) which = i;
    ok = which.has_value();
    r.body["supported_models"] = models.size();
    if (which) {
      r.body["model"] = assignment_text(models[*which]);
      r.text += "model: " + models[*which].str() + "\n";
    }
    if (o.trace) r.text += "(no trace under supported semantics)\n";
  }
  r.body["verdict"] = ok ? "true" : "false";
  r.text += std::string("verdict: ") + (ok ? "true" : "false") + "\n";
  r.code = ok ? kYes : kNo;
  return r;
}

Report run_models(const Options& o) {
  if (o.args.size() != 2) throw Failure{kUsageError, "Usage", "models expects GRAPH DOCUMENT"};
  DataGraph g = load_graph(o.args[0]);
  Document d = load_document(o.args[1]);
  require_compatible(g, d);
  Report r;
  json list = json::array();
  auto models = enumerate_supported_models(g, d.constraints);
  for (std::size_t i = 0; i < models.size(); ++i) {
    list.push_back(models[i].str());
    r.text += "S" + std::to_string(i + 1) + ": " + models[i].str() + "\n";
  }
  r.text += std::to_string(models.size()) + " supported model" + (models.size() == 1 ? "" : "s") + "\n";
  r.body["models"] = list;
  r.body["verdict"] = list.empty() ? "false" : "true";
  r.code = list.empty() ? kNo : kYes;
  return r;
}

MuFormula formula_for(const Options& o, const Document& d, const std::optional<std::string>& shape) {
  MuFormula f = shape ? translate(d.constraints, ShapeName(*shape)) : theta(d);
  return o.clean ? cln(f) : f;
}

Report run_translate(const Options& o) {
  if (o.args.empty() || o.args.size() > 2) throw Failure{kUsageError, "Usage", "translate expects DOCUMENT [SHAPE]"};
  Document d = load_document(o.args[0]);
  std::optional<std::string> shape;
  if (o.args.size() == 2) shape = o.args[1];
  MuFormula f = formula_for(o, d, shape);
  Report r;
  r.body["verdict"] = "ok";
  r.body["formula"] = f.to_string();
  r.body["size"] = dag_size(f);
  r.text = f.to_string() + "\n";
  return r;
}

Report run_eval(const Options& o) {
  if (o.args.size() < 2 || o.args.size() > 3)
    throw Failure{kUsageError, "Usage", "eval expects GRAPH FORMULA or GRAPH DOCUMENT SHAPE"};
  DataGraph g = load_graph(o.args[0]);
  MuFormula f = o.args.size() == 3 ? formula_for(o, load_document(o.args[1]), o.args[2]) : load_formula(o.args[1]);
  if (auto fv = free_vars(f); !fv.empty())
    throw Failure{kInputError, "FreeVariable", "formula has free variable '" + *fv.begin() + "'"};
  NodeSet ext = eval(f, g);
  Report r;
  json nodes = json::array();
  for (const auto& a : ext) nodes.push_back(a.str());
  r.body["verdict"] = ext.empty() ? "false" : "true";
  r.body["extension"] = nodes;
  r.text = to_string(ext) + "\n";
  r.code = ext.empty() ? kNo : kYes;
  return r;
}

// ---------------------------------------------------------------------------
// Bounded static analysis.

/// Bounded search under supported semantics: graphs of at most n nodes are
/// enumerated and checked against every supported model.
SearchOutcome supported_search(const GraphSignature& sig, const std::set<NodeId>& required, std::size_t n,
                               const SearchBudget& budget, const std::function<bool(const DataGraph&)>& hit) {
  SearchOutcome out;
  GraphSignature with_marker = sig;
  with_marker.concepts.insert(detail::marker_concept(sig));
  auto start = std::chrono::steady_clock::now();
  for (std::size_t m = required.size(); m <= n; ++m) {
    bool stop = false;
    enumerate_graphs(with_marker, required, m, [&](const DataGraph& g) {
      if (++out.stats.states > budget.max_states ||
          (budget.wall && std::chrono::steady_clock::now() - start > *budget.wall)) {
        out.stats.budget_exhausted = true;
        stop = true;
        return false;
      }
      if (g.size() != m) return true;
      ++out.stats.graphs_examined;
      if (hit(g)) {
        out.witness = g;
        stop = true;
        return false;
      }
      return true;
    });
    out.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (stop) {
      if (out.witness) out.bound = m;
      return out;
    }
    out.bound = m;
  }
  return out;
}

bool brave(const DataGraph& g, const Document& d) {
  if (!check_compatible(g, d)) return false;
  for (const auto& m : enumerate_supported_models(g, d.constraints))
    if (validates(g, d, m)) return true;
  return false;
}

GraphSignature signature_for(const ExprSignature& s) {
  GraphSignature g;
  g.add(s);
  return g;
}

void require_bounded_ack(const Options& o, const std::string& cmd) {
  if (o.semantics == "supported" && !o.bounded_only)
    throw Failure{kUsageError, "Usage",
                  cmd + " is undecidable under supported semantics; pass --bounded-only to run a bounded search"};
}

/// Renders a search outcome; `found` names the verdict for a witness.
Report search_report(const SearchOutcome& out, const std::string& found, int found_code) {
  Report r;
  r.body["graphs_examined"] = out.stats.graphs_examined;
  r.body["bound"] = out.bound;
  if (out.found()) {
    r.body["verdict"] = found;
    r.body["witness"] = to_inline(*out.witness);
    if (out.witness_node) r.body["witness_node"] = out.witness_node->str();
    r.text = found + "\nwitness (" + std::to_string(out.witness->size()) + " nodes):\n" + to_text(*out.witness);
    if (out.witness_node) r.text += "at node " + out.witness_node->str() + "\n";
    r.code = found_code;
  } else if (out.stats.budget_exhausted) {
    r.body["verdict"] = "budget_exhausted";
    r.text = "budget exhausted; no witness up to " + std::to_string(out.bound) + " nodes\n";
    r.code = kBudget;
  } else {
    r.body["verdict"] = "inconclusive";
    r.text = "inconclusive: no witness up to " + std::to_string(out.bound) + " nodes\n";
    r.code = kInconclusive;
  }
  r.text += std::to_string(out.stats.graphs_examined) + " graphs examined, bound " + std::to_string(out.bound) + "\n";
  return r;
}

Report run_sat(const Options& o) {
  if (o.args.size() != 2) throw Failure{kUsageError, "Usage", "sat expects DOCUMENT SHAPE"};
  require_bounded_ack(o, "sat");
  Document d = load_document(o.args[0]);
  ShapeName s(o.args[1]);
  if (!d.constraints.defines(s)) throw Failure{kInputError, "UndefinedShape", "shape '" + s.str() + "' is not defined"};
  SearchOutcome out;
  if (o.semantics == "supported") {
    ConstraintSet cs = restrict_to(d.constraints, s);
    ExprSignature sig = cs.signature();
    out = supported_search(signature_for(sig), sig.nominals, o.max_nodes, budget_of(o), [&](const DataGraph& g) {
      for (const auto& m : enumerate_supported_models(g, cs))
        for (const auto& [shape, node] : m.positive())
          if (shape == s) return true;
      return false;
    });
  } else if (o.engine == "automaton") {
    out = automaton_sat_bounded(d.constraints, s, o.max_nodes, budget_of(o));
  } else {
    out = shape_sat_bounded(d.constraints, s, o.max_nodes, budget_of(o));
  }
  return search_report(out, "satisfiable", kYes);
}

Report run_docsat(const Options& o) {
  if (o.args.size() != 1) throw Failure{kUsageError, "Usage", "docsat expects DOCUMENT"};
  require_bounded_ack(o, "docsat");
  Document d = load_document(o.args[0]);
  SearchOutcome out;
  if (o.semantics == "supported")
    out = supported_search(signature_for(d.signature()), d.individuals(), o.max_nodes, budget_of(o),
                           [&](const DataGraph& g) { return brave(g, d); });
  else if (o.engine == "automaton")
    out = automaton_docsat_bounded(d, o.max_nodes, budget_of(o));
  else
    out = doc_sat_bounded(d, o.max_nodes, budget_of(o));
  return search_report(out, "satisfiable", kYes);
}

Report run_implies(const Options& o) {
  if (o.args.size() != 2) throw Failure{kUsageError, "Usage", "implies expects DOCUMENT1 DOCUMENT2"};
  require_bounded_ack(o, "implies");
  if (o.engine == "automaton") throw Failure{kUsageError, "Usage", "implies has no automaton engine"};
  Document d1 = load_document(o.args[0]);
  Document d2 = load_document(o.args[1]);
  SearchOutcome out;
  if (o.semantics == "supported") {
    ExprSignature sig = d1.signature();
    ExprSignature sig2 = d2.signature();
    GraphSignature gs = signature_for(sig);
    gs.add(sig2);
    std::set<NodeId> required = sig.nominals;
    required.insert(sig2.nominals.begin(), sig2.nominals.end());
    out = supported_search(gs, required, o.max_nodes, budget_of(o),
                           [&](const DataGraph& g) { return brave(g, d1) && !brave(g, d2); });
  } else {
    out = implies_bounded(d1, d2, o.max_nodes, budget_of(o));
  }
  return search_report(out, "counterexample", kNo);
}

// ---------------------------------------------------------------------------

Report run_automaton(const Options& o) {
  if (o.args.empty() || o.args.size() > 2) throw Failure{kUsageError, "Usage", "automaton expects DOCUMENT [SHAPE]"};
  Document d = load_document(o.args[0]);
  GuessSpace sp = o.args.size() == 2 ? guess_space(d.constraints, ShapeName(o.args[1])) : guess_space(d);
  std::optional<Guess> chosen;
  std::size_t index = 0;
  enumerate_guesses(sp, [&](const Guess& g) {
    if (index++ == o.guess) {
      chosen = g;
      return false;
    }
    return true;
  });
  if (!chosen) throw Failure{kUsageError, "Usage", "guess index " + std::to_string(o.guess) + " is out of range"};
  TwoATA a = o.args.size() == 2 ? build_2ata(d.constraints, ShapeName(o.args[1]), *chosen) : build_doc_2ata(d, *chosen);
  std::set<RoleName> roles;
  for (const auto& r : sp.roles) roles.insert(r.name);
  std::vector<Symbol> symbols;
  for (const auto& text : o.symbols) {
    try {
      symbols.push_back(parse_symbol(text, roles));
    } catch (const Error& e) {
      throw Failure{kInputError, "InvalidArgument", "bad symbol '" + text + "': " + e.what()};
    }
  }
  if (symbols.empty()) symbols = {Symbol::root(), Symbol::bottom(), Symbol{}};
  Report r;
  r.body["verdict"] = "ok";
  r.body["states"] = a.size();
  r.body["branching"] = a.branching();
  r.body["guess"] = chosen->to_string(a.space());
  if (o.dump) {
    std::string text = dump(a, symbols);
    r.body["dump"] = text;
    r.text = text;
  } else {
    r.text = "states " + std::to_string(a.size()) + "\nbranching " + std::to_string(a.branching()) + "\nguess " +
             chosen->to_string(a.space()) + "\n";
  }
  return r;
}

Failure from_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TranslationBudget: return {kBudget, to_string(e.kind()), e.what()};
    case ErrorKind::EngineInvariant: return {kInternalError, to_string(e.kind()), e.what()};
    default: return {kInputError, to_string(e.kind()), e.what()};
  }
}

int emit(const Report& r, const Options& o) {
  if (o.json) {
    std::cout << r.body.dump(2) << std::endl;
  } else {
    std::cout << r.text << std::flush;
  }
  return r.code;
}

int emit_failure(const Failure& f, bool as_json) {
  if (as_json) {
    json body{{"verdict", f.code == kBudget ? "budget_exhausted" : "error"},
              {"error", json{{"kind", f.kind}, {"message", f.message}}}};
    for (auto it = f.extra.begin(); it != f.extra.end(); ++it) body["error"][it.key()] = it.value();
    std::cout << body.dump(2) << std::endl;
  }
  std::cerr << "wfshacl: " << f.message << std::endl;
  return f.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive SHACL under well-founded semantics: validation and static analysis"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Print a JSON verdict document");
  app.add_option("--max-nodes", o.max_nodes, "Size bound for bounded searches")->check(CLI::NonNegativeNumber);
  app.add_option("--budget-ms", o.budget_ms, "Wall-clock budget for bounded searches")->check(CLI::NonNegativeNumber);
  app.add_option("--semantics", o.semantics, "wf or supported")->check(CLI::IsMember({"wf", "supported"}));
  app.add_flag("--bounded-only", o.bounded_only, "Accept a bounded search where the problem is undecidable");
  app.add_flag("--deterministic", o.deterministic, "Deterministic output (searches are sequential)");
  app.add_flag("--trace", o.trace, "Print the well-founded iteration");
  app.add_flag("--clean", o.clean, "Clean translated formulas");
  app.add_option("--engine", o.engine, "search or automaton")->check(CLI::IsMember({"search", "automaton"}));
  app.fallthrough();

  struct Cmd {
    const char* name;
    const char* help;
    Report (*run)(const Options&);
  };
  const Cmd cmds[] = {
      {"validate", "Validate a graph against a document", run_validate},
      {"models", "List the supported models", run_models},
      {"translate", "Translate a shape, or a whole document, to the mu-calculus", run_translate},
      {"eval", "Evaluate a formula, or a translated shape, on a graph", run_eval},
      {"sat", "Bounded satisfiability of a shape", run_sat},
      {"docsat", "Bounded satisfiability of a document", run_docsat},
      {"implies", "Bounded search for an implication counterexample", run_implies},
      {"automaton", "Build a guess automaton", run_automaton},
  };
  std::map<CLI::App*, const Cmd*> which;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("args", o.args, "Inputs")->required();
    if (std::string(c.name) == "automaton") {
      sub->add_flag("--dump", o.dump, "Print states, priorities, and transitions");
      sub->add_option("--symbol", o.symbols, "Symbol to tabulate, e.g. '{A, <a>, r-}', root, bot");
      sub->add_option("--guess", o.guess, "Index of the guess in enumeration order");
    }
    which[sub] = &c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const Cmd* cmd = nullptr;
  for (auto* sub : app.get_subcommands()) cmd = which.at(sub);
  try {
    return emit(cmd->run(o), o);
  } catch (const Failure& f) {
    return emit_failure(f, o.json);
  } catch (const Error& e) {
    return emit_failure(from_error(e), o.json);
  } catch (const std::exception& e) {
    return emit_failure({kInternalError, "Internal", e.what()}, o.json);
  }
}
