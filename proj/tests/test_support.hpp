#pragma once

#include <string>

#include "oli/loader.hpp"

#ifndef OLI_CORPUS_DIR
#define OLI_CORPUS_DIR "corpus"
#endif

namespace oli::test {

inline std::string corpus(const std::string& rel) { return std::string(OLI_CORPUS_DIR) + "/" + rel; }

/// Parses inline source; includes resolve against the corpus directory.
inline AstProgram parse_text(const std::string& text, const std::string& file = "inline.ol") {
    return load_program_text(text, corpus("car_rental/" + file));
}

} // namespace oli::test
