#pragma once

#include "oli/ast.hpp"

namespace oli {

/// Splices nested sequences into their parent and drops `nullProcess`
/// elements from sequences. A sequence left with no elements becomes Nil.
/// Semantics-preserving and idempotent.
AstProgram optimize_ast(AstProgram program);
Process optimize_process(Process process);

} // namespace oli
