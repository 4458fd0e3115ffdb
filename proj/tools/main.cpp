#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "hitt/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"checker and finite-set evaluator for higher inductive schemas"};
  app.require_subcommand(1);

  hitt::Options opts;
  std::vector<std::string> files;

  CLI::App* check = app.add_subcommand("check", "typecheck every definition");
  CLI::App* eval =
      app.add_subcommand("eval", "run eval requests in the finite-set model");
  CLI::App* lint =
      app.add_subcommand("lint", "validate schema declarations only");
  for (CLI::App* c : {check, eval, lint}) {
    c->add_option("files", files, "input files")->required();
    c->add_flag("--json", opts.json, "emit the machine-readable report");
    c->add_option("--prelude", opts.preludePath,
                  "schema library to load instead of the builtin one");
  }
  eval->add_option("--fuel", opts.fuel, "override the saturation budget");
  eval->add_option("--check-initiality", opts.initialityBound,
                   "confirm the universal property up to this carrier size");
  eval->add_option("--request", opts.request, "run a single named request");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (check->parsed()) return hitt::run_check(files, opts, std::cout);
  if (eval->parsed()) return hitt::run_eval(files, opts, std::cout);
  return hitt::run_lint(files, opts, std::cout);
}
