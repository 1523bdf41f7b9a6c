#include "oli/loader.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oli/console.hpp"
#include "oli/lexer.hpp"
#include "oli/optimizer.hpp"

namespace oli {

namespace fs = std::filesystem;

std::string read_source(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "': no such file or not readable");
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return text.str();
}

IncludeLoader file_loader() {
    return [](const std::string& path, const std::string& from_file) -> IncludedSource {
        fs::path base = from_file.empty() ? fs::path{} : fs::path(from_file).parent_path();
        fs::path candidate = fs::path(path).is_absolute() ? fs::path(path) : base / path;
        std::error_code ec;
        if (fs::is_regular_file(candidate, ec)) {
            std::string file = fs::weakly_canonical(candidate, ec).string();
            if (file.empty()) file = candidate.string();
            return {file, tokenize(read_source(file), file)};
        }
        if (fs::path(path).filename() == "console.iol") {
            std::string file = "<builtin>/console.iol";
            return {file, tokenize(console_iol_source(), file)};
        }
        throw IoError("no such file '" + candidate.string() + "'");
    };
}

AstProgram load_program_text(const std::string& text, const std::string& file, const IncludeLoader& loader) {
    return optimize_ast(parse_program(tokenize(text, file), loader, file));
}

AstProgram load_program(const std::string& path) { return load_program_text(read_source(path), path); }

CheckedProgram check_program(const std::string& path) {
    CheckedProgram out;
    out.program = load_program(path);
    out.diagnostics = verify_program(out.program);
    return out;
}

} // namespace oli
