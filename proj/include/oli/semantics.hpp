#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oli/ast.hpp"

namespace oli {

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceLoc loc;
};

/// `severity: file:line:col: message`
std::string format_diagnostic(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags);

/// Well-formedness checks over a parsed program. Every problem is reported;
/// the result is empty iff the program is clean.
std::vector<Diagnostic> verify_program(const AstProgram& program);

} // namespace oli
