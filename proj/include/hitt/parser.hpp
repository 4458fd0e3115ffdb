#pragma once

#include <string>
#include <vector>

#include "hitt/error.hpp"
#include "hitt/schema.hpp"
#include "hitt/term.hpp"

namespace hitt {

struct SourceSpan {
  std::string file;
  int startLine = 1;
  int startCol = 1;
  int endLine = 1;
  int endCol = 1;
};

// syntax and scope problems carry a location; errors raised further down the
// pipeline get the span of the enclosing item instead
struct ParseError : KernelError {
  SourceSpan span;
  ParseError(ErrKind k, SourceSpan sp, const std::string& msg)
      : KernelError(k, msg), span(std::move(sp)) {}
};

struct Item {
  enum class Kind { Definition, SchemaDecl, Eval };
  Kind kind = Kind::Definition;
  SourceSpan span;
  std::string name;    // definition name, schema name, or eval request name
  TermPtr type, body;  // Definition only
  Schema schema;       // SchemaDecl only
  TermPtr target;      // Eval only
  int fuel = 8;        // Eval only
};

struct Module {
  std::vector<Item> items;
};

// parses a whole file.  definition bodies are closed terms: uses of earlier
// definitions are inlined on the spot, so forward references cannot arise.
// `preloaded` supplies already-registered schemas (the prelude) for
// qualified-name resolution; schemas declared in the text join the lookup
// table as they appear but are validated later, at registration.
Module parse_module(const std::string& text,
                    const std::string& file = "<input>",
                    const Registry* preloaded = nullptr);

// one expression with the given free-variable names, innermost last.
// finite-set literals are permitted (the module parser restricts them to
// eval requests).
TermPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& names = {},
                   const Registry* preloaded = nullptr);

// inverse of parse_expr up to alpha-equality.  `names` supplies free-variable
// names, `reg` resolves schema cell names for qualified forms.
std::string pretty_print(const TermPtr& t,
                         const std::vector<std::string>& names = {},
                         const Registry* reg = nullptr);

}  // namespace hitt
