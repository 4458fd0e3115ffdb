#pragma once

#include <string>

#include "hitt/schema.hpp"

namespace hitt {

// the source text of the builtin schema library; the same bytes ship as
// prelude.hitt next to the tool
const std::string& prelude_text();

// parses the prelude and registers every schema in a fresh registry
Registry builtin_registry();

}  // namespace hitt
