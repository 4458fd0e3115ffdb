#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hitt/finset.hpp"
#include "hitt/parser.hpp"

namespace hitt {

struct Diagnostic {
  std::string severity = "error";
  SourceSpan span;
  ErrKind kind = ErrKind::Usage;
  std::string message;
};

struct Evaluation {
  std::string name;
  bool converged = false;
  int classes = 0;
  int fuelUsed = 0;
  std::vector<std::string> reps;  // one representative tree per class
  std::optional<InitialityReport> initiality;
};

struct Report {
  bool ok = true;
  std::vector<Diagnostic> diagnostics;
  std::vector<Evaluation> evaluations;
};

struct Options {
  bool json = false;
  int fuel = 0;             // 0 keeps each request's own budget
  int initialityBound = 0;  // 0 skips the universal-property check
  std::string preludePath;  // empty loads the builtin library
  std::string request;      // eval: restrict to one named request
};

std::string report_json(const Report& r);

// exit codes: 0 clean, 1 semantic failure, 2 usage, I/O or syntax trouble
int run_check(const std::vector<std::string>& paths, const Options& opts,
              std::ostream& out);
int run_eval(const std::vector<std::string>& paths, const Options& opts,
             std::ostream& out);
int run_lint(const std::vector<std::string>& paths, const Options& opts,
             std::ostream& out);

}  // namespace hitt
