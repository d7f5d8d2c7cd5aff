#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sizedlang/diag.hpp"
#include "sizedlang/eval.hpp"
#include "sizedlang/lattice.hpp"
#include "sizedlang/typecheck.hpp"

namespace sizedlang {

struct DriverOptions {
  bool json = false;
  bool printCore = false;
  bool explainSize = false;
  CheckOptions check;
};

struct FileOutcome {
  std::string file;
  std::string source;
  Signature sig;
  std::vector<Diag> diags;
  bool ioFailed = false;
  bool parseFailed = false;
  bool ok() const { return !ioFailed && !parseFailed && diags.empty(); }
};

FileOutcome checkSource(std::string source, std::string name, const DriverOptions& opts = {});
FileOutcome checkFile(const std::string& path, const DriverOptions& opts = {});

// Exit codes: 0 all files check, 1 scope/type errors, 2 parse or IO errors.
int cmdCheck(const std::vector<std::string>& files, const DriverOptions& opts, std::ostream& out);

struct RunOutcome {
  int exitCode = 0;  // 0 ok, 1 check failure, 2 parse/IO, 3 fuel exhausted
  std::vector<std::string> lines;
  std::string error;
};

RunOutcome runMain(const FileOutcome& checked, const std::string& mainName, uint32_t depth,
                   int64_t fuel, bool tokens);
int cmdRun(const std::string& file, const std::string& mainName, uint32_t depth, int64_t fuel,
           bool tokens, const DriverOptions& opts, std::ostream& out);

int cmdOracle(const OracleOptions& opts, std::ostream& out);

int64_t fuelOrDefault(std::optional<int64_t> flagValue);

} // namespace sizedlang
