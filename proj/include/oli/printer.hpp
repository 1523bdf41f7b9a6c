#pragma once

#include <string>

#include "oli/ast.hpp"

namespace oli {

// Canonical source rendering. Re-parsing the output of any of these yields a
// structurally equal tree. Includes are not printed (they are already
// spliced into the program).

std::string print_program(const AstProgram& program);
std::string print_type(const TypeDef& def);
std::string print_process(const Process& process);
std::string print_expr(const Expr& expr);

/// Source spelling of a literal value; raw bytes have no literal form.
std::string print_literal(const BasicValue& value);

} // namespace oli
