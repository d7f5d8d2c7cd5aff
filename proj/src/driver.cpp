#include "sizedlang/driver.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "sizedlang/parser.hpp"
#include "sizedlang/scope.hpp"
#include "sizedlang/size_order.hpp"

namespace sizedlang {

FileOutcome checkSource(std::string source, std::string name, const DriverOptions& opts) {
  FileOutcome out;
  out.file = std::move(name);
  out.source = std::move(source);
  std::vector<SDecl> surface;
  try {
    surface = parseSource(out.source);
  } catch (const LexError& e) {
    out.parseFailed = true;
    out.diags.push_back({ErrorCode::Lexical, e.span, e.what()});
    return out;
  } catch (const ParseError& e) {
    out.parseFailed = true;
    out.diags.push_back({ErrorCode::Parse, e.span, e.what()});
    return out;
  }
  ScopeResult scoped = scopeCheck(surface);
  out.diags = scoped.errors;
  if (!out.diags.empty()) {
    out.sig = std::move(scoped.sig);
    return out;
  }
  CheckResult checked = checkProgram(std::move(scoped.sig), opts.check);
  out.sig = std::move(checked.sig);
  out.diags = checked.errors;
  return out;
}

FileOutcome checkFile(const std::string& path, const DriverOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    FileOutcome out;
    out.file = path;
    out.ioFailed = true;
    out.diags.push_back({ErrorCode::Parse, {0, 0}, "cannot open file"});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkSource(ss.str(), path, opts);
}

namespace {

void printDiags(const FileOutcome& f, bool json, std::ostream& out) {
  if (json) {
    nlohmann::json j;
    j["file"] = f.file;
    j["ok"] = f.ok();
    auto& errs = j["errors"] = nlohmann::json::array();
    for (const auto& d : f.diags) {
      size_t line = 1, col = 1;
      for (size_t i = 0; i < d.span.start && i < f.source.size(); ++i) {
        if (f.source[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      errs.push_back({{"code", errorCodeName(d.code)},
                      {"message", d.message},
                      {"line", line},
                      {"col", col},
                      {"start", d.span.start},
                      {"end", d.span.end}});
    }
    out << j.dump() << "\n";
    return;
  }
  for (const auto& d : f.diags) out << formatDiag(d, f.file, f.source) << "\n";
}

} // namespace

int cmdCheck(const std::vector<std::string>& files, const DriverOptions& opts,
             std::ostream& out) {
  if (opts.explainSize)
    setExplainSink([&out](const std::string& s) { out << "size: " << s << "\n"; });
  bool anyType = false, anyParse = false;
  for (const auto& path : files) {
    FileOutcome f = checkFile(path, opts);
    printDiags(f, opts.json, out);
    if (f.ioFailed || f.parseFailed) anyParse = true;
    else if (!f.diags.empty()) anyType = true;
    if (f.ok() && opts.printCore) out << printSignature(f.sig);
  }
  if (opts.explainSize) setExplainSink(nullptr);
  if (anyParse) return 2;
  return anyType ? 1 : 0;
}

RunOutcome runMain(const FileOutcome& checked, const std::string& mainName, uint32_t depth,
                   int64_t fuel, bool tokens) {
  RunOutcome out;
  const Declaration* main = lookupDecl(checked.sig, mainName);
  if (!main || (main->kind != DeclKind::Let && main->kind != DeclKind::Fun)) {
    out.exitCode = 1;
    out.error = "no runnable declaration named '" + mainName + "'";
    return out;
  }
  RTProgram prog = eraseProgram(checked.sig, tokens);
  Evaluator ev(prog, fuel);
  try {
    ValuePtr v = ev.evalDef(mainName);
    ObservationTree tree = observe(ev, v, depth);
    out.lines = observationLines(tree);
  } catch (const FuelExhausted&) {
    out.exitCode = 3;
    out.error = "fuel exhausted evaluating '" + mainName +
                "' - SOUNDNESS BUG: a checked program failed to terminate within fuel";
  } catch (const EvalError& e) {
    out.exitCode = 3;
    out.error = "runtime error: " + e.message;
  }
  return out;
}

int cmdRun(const std::string& file, const std::string& mainName, uint32_t depth, int64_t fuel,
           bool tokens, const DriverOptions& opts, std::ostream& out) {
  FileOutcome f = checkFile(file, opts);
  if (!f.ok()) {
    printDiags(f, opts.json, out);
    return f.ioFailed || f.parseFailed ? 2 : 1;
  }
  RunOutcome r = runMain(f, mainName, depth, fuel, tokens);
  for (const auto& line : r.lines) out << line << "\n";
  if (!r.error.empty()) out << r.error << "\n";
  return r.exitCode;
}

int cmdOracle(const OracleOptions& opts, std::ostream& out) {
  OracleOutcome o = runOracle(opts);
  out << o.report;
  return o.ok ? 0 : 1;
}

int64_t fuelOrDefault(std::optional<int64_t> flagValue) {
  if (flagValue && *flagValue > 0) return *flagValue;
  if (const char* env = std::getenv("SIZEDLANG_FUEL")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return kDefaultFuel;
}

} // namespace sizedlang
