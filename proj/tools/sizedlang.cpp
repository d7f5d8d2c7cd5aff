#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sizedlang/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sizedlang - checker and evaluator for a sized-type core language"};
  app.require_subcommand(1);

  sizedlang::DriverOptions opts;

  auto* check = app.add_subcommand("check", "type-check .ma files");
  std::vector<std::string> files;
  check->add_option("files", files, "source files")->required()->expected(-1);
  check->add_flag("--json", opts.json, "machine-readable error output");
  check->add_flag("--print-core", opts.printCore, "print elaborated declarations");
  check->add_flag("--explain-size", opts.explainSize, "print size entailment derivations");
  check->add_option("--unfold-fuel", opts.check.unfoldFuel, "type unfolding budget");

  auto* run = app.add_subcommand("run", "check a file, then observe a main value");
  std::string runFile, mainName;
  uint32_t depth = 8;
  std::optional<int64_t> fuelFlag;
  bool tokens = false;
  run->add_option("file", runFile, "source file")->required();
  run->add_option("--main", mainName, "declaration to evaluate")->required();
  run->add_option("--depth", depth, "number of forcings to observe");
  run->add_option("--fuel", fuelFlag, "application budget (or SIZEDLANG_FUEL)");
  run->add_flag("--tokens", tokens, "evaluate with sizes as inert tokens instead of erasing");

  auto* oracle = app.add_subcommand("oracle", "verify the iteration identities by brute force");
  sizedlang::OracleOptions oopts;
  oracle->add_option("--universe", oopts.maxUniverse, "largest universe size (1..n)")
      ->check(CLI::Range(size_t{1}, size_t{16}));
  oracle->add_option("--trials", oopts.trials, "number of random operators");
  oracle->add_option("--seed", oopts.seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return sizedlang::cmdCheck(files, opts, std::cout);
  if (run->parsed())
    return sizedlang::cmdRun(runFile, mainName, depth, sizedlang::fuelOrDefault(fuelFlag), tokens,
                             opts, std::cout);
  if (oracle->parsed()) return sizedlang::cmdOracle(oopts, std::cout);
  return 2;
}
