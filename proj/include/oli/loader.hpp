#pragma once

#include <string>
#include <vector>

#include "oli/ast.hpp"
#include "oli/parser.hpp"
#include "oli/semantics.hpp"

namespace oli {

/// Resolves includes relative to the including file's directory. A missing
/// `console.iol` falls back to the built-in console declarations.
IncludeLoader file_loader();

/// Reads a whole file.
/// @throws IoError
std::string read_source(const std::string& path);

/// tokenize, parse (with includes) and optimize.
/// @throws IoError, LexError, ParseError, IncludeError
AstProgram load_program(const std::string& path);
AstProgram load_program_text(const std::string& text, const std::string& file,
                             const IncludeLoader& loader = file_loader());

struct CheckedProgram {
    AstProgram program;
    std::vector<Diagnostic> diagnostics;
};

/// load_program followed by verify_program.
CheckedProgram check_program(const std::string& path);

} // namespace oli
