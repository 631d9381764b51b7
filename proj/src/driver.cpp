#include "axon/driver.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "axon/builtins.hpp"
#include "axon/solver.hpp"
#include "axon/syntax.hpp"
#include "axon/typecheck.hpp"

namespace axon {

namespace {

using Json = nlohmann::ordered_json;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buffer.str();
}

void print_trace(const TraceEvent& e, std::ostream& os) {
  os << "[" << rule_name(e.rule) << "] " << to_string(e.before) << "\n    => " << to_string(e.after) << "\n";
}

struct FileOutcome {
  std::string path;
  InferResult result;
  int exit = kExitOk;
};

FileOutcome check_one(const std::string& path, const CheckOptions& options, std::ostream& trace_out) {
  FileOutcome outcome{path, {}, kExitOk};
  std::optional<std::string> text = read_file(path);
  if (!text) {
    outcome.result.diagnostics.push_back(Diagnostic{"error", Span{}, "cannot read file", std::nullopt});
    outcome.exit = kExitIoError;
    return outcome;
  }
  Program program;
  try {
    program = parse_program(*text);
  } catch (const SyntaxError& e) {
    outcome.result.diagnostics.push_back(Diagnostic{"error", e.span(), e.what(), std::nullopt});
    outcome.exit = kExitParseError;
    return outcome;
  }
  InferOptions infer_options;
  if (options.trace) infer_options.trace = [&](const TraceEvent& e) { print_trace(e, trace_out); };
  outcome.result = infer_program(program, default_table(), infer_options);
  bool failed = std::any_of(outcome.result.bindings.begin(), outcome.result.bindings.end(), [](const auto& b) {
    return b.status == BindingStatus::failed || b.status == BindingStatus::unchecked;
  });
  outcome.exit = failed ? kExitFailure : kExitOk;
  return outcome;
}

void print_text(const FileOutcome& f, bool header, std::ostream& out, std::ostream& err) {
  if (header) out << f.path << ":\n";
  for (const BindingReport& b : f.result.bindings) {
    switch (b.status) {
      case BindingStatus::solved:
        out << b.name << " : " << b.signature << "\n";
        break;
      case BindingStatus::partial:
        out << b.name << " : " << b.signature << "\n";
        for (const std::string& r : b.residual) out << "    where " << r << "\n";
        break;
      case BindingStatus::failed:
      case BindingStatus::unchecked:
        out << b.name << " : <" << status_name(b.status) << ">\n";
        break;
    }
  }
  for (const Diagnostic& d : f.result.diagnostics) {
    err << f.path << ":" << d.span.line << ":" << d.span.col << ": " << d.severity << ": " << d.message << "\n";
  }
}

}  // namespace

int check_files(const std::vector<std::string>& paths, const CheckOptions& options, std::ostream& out,
                std::ostream& err) {
  std::ostream& trace_out = options.json ? err : out;
  int exit = kExitOk;
  Json bindings = Json::array();
  Json diagnostics = Json::array();

  for (const std::string& path : paths) {
    if (options.trace && !options.json) out << "-- " << path << "\n";
    FileOutcome f = check_one(path, options, trace_out);
    exit = std::max(exit, f.exit);
    if (!options.json) {
      print_text(f, paths.size() > 1, out, err);
      continue;
    }
    for (const BindingReport& b : f.result.bindings) {
      Json entry;
      entry["file"] = path;
      entry["name"] = b.name;
      entry["signature"] = b.signature.empty() ? Json(nullptr) : Json(b.signature);
      entry["status"] = std::string(status_name(b.status));
      entry["residual"] = b.residual;
      bindings.push_back(std::move(entry));
    }
    for (const Diagnostic& d : f.result.diagnostics) {
      Json entry;
      entry["severity"] = d.severity;
      entry["file"] = path;
      entry["line"] = d.span.line;
      entry["col"] = d.span.col;
      entry["message"] = d.message;
      if (d.rule) entry["rule"] = std::string(rule_name(*d.rule));
      diagnostics.push_back(std::move(entry));
    }
  }

  if (options.json) {
    Json doc;
    doc["schema"] = 1;
    doc["bindings"] = std::move(bindings);
    doc["diagnostics"] = std::move(diagnostics);
    out << doc.dump(2) << "\n";
  }
  return exit;
}

int solve_file(const std::string& path, bool trace, std::ostream& out, std::ostream& err) {
  std::optional<std::string> text = read_file(path);
  if (!text) {
    err << path << ": error: cannot read file\n";
    return kExitIoError;
  }
  ConstraintSet set;
  try {
    set = parse_constraints(*text);
  } catch (const ConstraintFileError& e) {
    err << path << ":" << e.line() << ":" << e.col() << ": error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const ShapeError& e) {
    err << path << ": error: " << e.what() << "\n";
    return kExitParseError;
  }

  SolveOptions options;
  if (trace) options.trace = [&](const TraceEvent& e) { print_trace(e, out); };
  SolveOutcome outcome = solve(set, options);

  if (const auto* failed = std::get_if<Failed>(&outcome)) {
    const Constraint& c = failed->offender;
    out << path << ":" << c.origin.span.line << ":" << c.origin.span.col << ": error: " << rule_name(failed->rule)
        << " rule failed on " << to_string(c) << " (from " << c.origin.source << "): " << failed->message << "\n";
    return kExitFailure;
  }
  const Solved& solved = std::get<Solved>(outcome);
  for (const auto& [name, term] : solved.substitution) out << name << " = " << to_string(term) << "\n";
  if (solved.residual.empty()) {
    out << "residual: none\n";
  } else {
    out << "residual:\n";
    for (const Constraint& c : solved.residual) out << "  " << to_string(c) << "\n";
  }
  return kExitOk;
}

}  // namespace axon
