#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oli/ast.hpp"
#include "oli/lexer.hpp"

namespace oli {

/// Result of resolving an `include` directive. `file` must identify the
/// source uniquely (it is used for cycle detection and include-once).
struct IncludedSource {
    std::string file;
    std::vector<Token> tokens;
};

/// Loads `path` as written in an `include` directive of `from_file`.
/// Failures should throw; anything thrown becomes an IncludeError.
using IncludeLoader =
    std::function<IncludedSource(const std::string& path, const std::string& from_file)>;

/// Parses a complete program (or include-only file). Included files are
/// spliced in place; each distinct file is spliced at most once and may only
/// contain deployment instructions.
AstProgram parse_program(const std::vector<Token>& tokens, const IncludeLoader& loader,
                         const std::string& file = {});

/// Parses a standalone type expression such as `int | long`.
TypeDef parse_type_definition(const std::vector<Token>& tokens, const std::string& file = {});

/// Parses a standalone behavior fragment such as `x = 1; y = 2`.
Process parse_process(const std::vector<Token>& tokens, const std::string& file = {});

Expr parse_expression(const std::vector<Token>& tokens, const std::string& file = {});

/// Loader for programs without includes; every include is an error.
IncludeLoader no_includes();

} // namespace oli
