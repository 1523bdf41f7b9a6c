#include "oli/parser.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace oli {
namespace {

struct IncludeState {
    const IncludeLoader* loader = nullptr;
    std::vector<std::string> stack;
    std::set<std::string> seen;
};

class Parser {
public:
    Parser(const std::vector<Token>& tokens, std::string file, IncludeState* includes = nullptr)
        : toks_(tokens), file_(std::move(file)), includes_(includes) {
        if (toks_.empty() || toks_.back().kind != TokenKind::EndOfInput)
            throw ParseError("token stream does not end with end-of-input", SourceLoc{file_, 1, 1});
    }

    // -- program ------------------------------------------------------------

    void program(AstProgram& prog, bool deployment_only) {
        while (!at_end()) {
            const Token& t = cur();
            if (t.is_keyword("include")) {
                include(prog);
            } else if (t.is_keyword("type")) {
                prog.type_decls.push_back(type_decl());
            } else if (t.is_keyword("interface")) {
                prog.interfaces.push_back(interface_decl());
            } else if (t.is_keyword("inputPort") || t.is_keyword("outputPort")) {
                auto port = port_decl();
                (port.direction == PortDirection::Input ? prog.input_ports : prog.output_ports)
                    .push_back(std::move(port));
            } else if (t.is_keyword("execution")) {
                advance();
                expect_punct("{");
                if (accept_keyword("single")) prog.execution_mode = ExecutionMode::Single;
                else if (accept_keyword("concurrent")) prog.execution_mode = ExecutionMode::Concurrent;
                else if (accept_keyword("sequential")) prog.execution_mode = ExecutionMode::Sequential;
                else unexpected("'single', 'concurrent' or 'sequential'");
                expect_punct("}");
            } else if (!deployment_only && t.is_keyword("main")) {
                auto loc = here();
                advance();
                if (prog.main_block) throw ParseError("duplicate main block", loc);
                prog.main_block = block();
            } else if (!deployment_only && t.is_keyword("init")) {
                auto loc = here();
                advance();
                if (prog.init_block) throw ParseError("duplicate init block", loc);
                prog.init_block = block();
            } else if (!deployment_only && t.is_keyword("define")) {
                advance();
                auto loc = here();
                std::string name = identifier();
                if (prog.defines.count(name))
                    throw ParseError("duplicate define '" + name + "'", loc);
                prog.defines.emplace(name, block());
            } else if (deployment_only) {
                unexpected("a deployment instruction (include files may not contain behavior)");
            } else {
                unexpected("a deployment instruction or behavioral block");
            }
        }
    }

    void include(AstProgram& prog) {
        auto loc = here();
        advance();
        if (cur().kind != TokenKind::StringLiteral) unexpected("include path string");
        std::string path = cur().text;
        advance();
        prog.includes.push_back(path);
        if (!includes_ || !includes_->loader || !*includes_->loader)
            throw IncludeError("cannot include \"" + path + "\": no include loader", loc);

        IncludedSource src;
        try {
            src = (*includes_->loader)(path, file_);
        } catch (const IncludeError&) {
            throw;
        } catch (const std::exception& e) {
            throw IncludeError("cannot include \"" + path + "\": " + e.what(), loc);
        }
        auto& stack = includes_->stack;
        if (std::find(stack.begin(), stack.end(), src.file) != stack.end())
            throw IncludeError("include cycle through \"" + src.file + "\"", loc);
        if (!includes_->seen.insert(src.file).second) return;

        stack.push_back(src.file);
        Parser nested(src.tokens, src.file, includes_);
        nested.program(prog, true);
        stack.pop_back();
    }

    TypeDecl type_decl() {
        advance();
        TypeDecl decl;
        decl.loc = here();
        decl.name = identifier();
        expect_punct(":");
        decl.def = type_definition();
        return decl;
    }

    InterfaceDecl interface_decl() {
        advance();
        InterfaceDecl iface;
        iface.loc = here();
        iface.name = identifier();
        expect_punct("{");
        while (!accept_punct("}")) {
            if (accept_keyword("RequestResponse")) {
                expect_punct(":");
                do {
                    RequestResponseOp op;
                    op.loc = here();
                    op.name = identifier();
                    expect_punct("(");
                    op.request_type = type_name();
                    expect_punct(")");
                    expect_punct("(");
                    op.response_type = type_name();
                    expect_punct(")");
                    iface.request_response_ops.push_back(std::move(op));
                } while (accept_punct(","));
            } else if (accept_keyword("OneWay")) {
                expect_punct(":");
                do {
                    OneWayOp op;
                    op.loc = here();
                    op.name = identifier();
                    expect_punct("(");
                    op.request_type = type_name();
                    expect_punct(")");
                    iface.one_way_ops.push_back(std::move(op));
                } while (accept_punct(","));
            } else {
                unexpected("'RequestResponse', 'OneWay' or '}'");
            }
        }
        return iface;
    }

    PortConfig port_decl() {
        PortConfig port;
        port.direction = cur().is_keyword("inputPort") ? PortDirection::Input : PortDirection::Output;
        advance();
        port.loc = here();
        port.name = identifier();
        expect_punct("{");
        while (!accept_punct("}")) {
            if (accept_keyword("Location")) {
                expect_punct(":");
                if (cur().kind != TokenKind::StringLiteral) unexpected("location string");
                port.location = cur().text;
                advance();
            } else if (accept_keyword("Protocol")) {
                expect_punct(":");
                if (cur().kind == TokenKind::StringLiteral || cur().kind == TokenKind::Identifier) {
                    port.protocol = cur().text;
                    advance();
                } else {
                    unexpected("protocol name");
                }
            } else if (accept_keyword("Interfaces")) {
                expect_punct(":");
                do {
                    port.interfaces.push_back(identifier());
                } while (accept_punct(","));
            } else {
                unexpected("'Location', 'Protocol', 'Interfaces' or '}'");
            }
        }
        return port;
    }

    // -- types --------------------------------------------------------------

    /// Type names usable in interfaces and match arms: identifiers, native
    /// type keywords, and `undefined`.
    std::string type_name() {
        const Token& t = cur();
        if (t.kind == TokenKind::Identifier ||
            (t.kind == TokenKind::Keyword && (native_from_name(t.text) || t.text == "undefined"))) {
            std::string name = t.text;
            advance();
            return name;
        }
        unexpected("type name");
    }

    TypeDef type_definition() {
        TypeDef left = type_term();
        if (cur().is_punct("|")) {
            auto loc = here();
            advance();
            TypeDef right = type_definition();
            return make_type(typedefs::Choice{std::move(left), std::move(right)}, loc);
        }
        return left;
    }

    TypeDef type_term() {
        auto loc = here();
        const Token& t = cur();
        if (t.kind == TokenKind::Keyword) {
            if (t.text == "undefined") {
                advance();
                return make_type(typedefs::Undefined{}, loc);
            }
            if (auto native = native_from_name(t.text)) {
                advance();
                if (!accept_punct("{")) return make_type(typedefs::Native{*native}, loc);
                if (accept_punct("?")) {
                    expect_punct("}");
                    return make_type(typedefs::UntypedSubnodes{*native}, loc);
                }
                typedefs::Inline inl{*native, {}};
                while (!accept_punct("}")) inl.subtypes.push_back(subtype());
                return make_type(std::move(inl), loc);
            }
        }
        if (t.kind == TokenKind::Identifier) {
            std::string name = t.text;
            advance();
            return make_type(typedefs::Link{std::move(name)}, loc);
        }
        unexpected("type definition");
    }

    SubTypeAst subtype() {
        SubTypeAst st;
        st.loc = here();
        if (!accept_punct(".")) unexpected("'.' starting a subtype or '}'");
        st.name = identifier();
        st.cardinality = cardinality();
        expect_punct(":");
        st.def = type_definition();
        return st;
    }

    Cardinality cardinality() {
        if (accept_punct("*")) return Cardinality::any_number();
        if (accept_punct("?")) return Cardinality::optional();
        if (!accept_punct("[")) return Cardinality::exactly_one();
        Cardinality c;
        c.min = small_uint();
        expect_punct(",");
        if (accept_punct("*")) c.max = std::nullopt;
        else c.max = small_uint();
        expect_punct("]");
        return c;
    }

    std::uint32_t small_uint() {
        if (cur().kind != TokenKind::IntegerLiteral) unexpected("non-negative integer");
        std::uint32_t v = 0;
        const auto& s = cur().text;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError("cardinality bound out of range", here());
        advance();
        return v;
    }

    // -- behavior -----------------------------------------------------------

    Process block() {
        expect_punct("{");
        Process p = process();
        expect_punct("}");
        return p;
    }

    /// Parallel binds looser than sequence.
    Process process() {
        Process left = sequence();
        while (cur().is_punct("|")) {
            auto loc = here();
            advance();
            Process right = sequence();
            left = make_process(procs::Parallel{std::move(left), std::move(right)}, loc);
        }
        return left;
    }

    bool statement_follows() const {
        const Token& t = cur();
        if (t.kind == TokenKind::Identifier) return true;
        return t.is_punct("[") || t.is_punct("{") || t.is_keyword("if") || t.is_keyword("match");
    }

    Process sequence() {
        auto loc = here();
        if (!statement_follows()) return make_process(procs::Nil{}, loc);
        std::vector<Process> items;
        items.push_back(statement());
        while (accept_punct(";")) {
            if (!statement_follows()) break; // trailing ';'
            items.push_back(statement());
        }
        if (items.size() == 1) return std::move(items.front());
        return make_process(procs::Sequence{std::move(items)}, loc);
    }

    Process statement() {
        auto loc = here();
        const Token& t = cur();
        if (t.is_punct("[")) return input_choice();
        if (t.is_punct("{")) return block();
        if (t.is_keyword("if")) return if_statement();
        if (t.is_keyword("match")) return match_statement();
        if (t.kind != TokenKind::Identifier) unexpected("statement");

        if (t.text == "nullProcess") {
            advance();
            return make_process(procs::Nil{}, loc);
        }
        const Token& next = peek(1);
        if (next.is_punct(".") || next.is_punct("=")) {
            Path p = path();
            expect_punct("=");
            Expr e = expression();
            return make_process(procs::Assign{std::move(p), std::move(e)}, loc);
        }
        if (next.is_punct("@")) return output_statement();
        if (next.is_punct("(")) return std::visit([&](auto&& g) { return make_process(std::move(g), loc); },
                                                  input_statement());
        std::string name = identifier();
        return make_process(procs::CallDefine{std::move(name)}, loc);
    }

    Path optional_path_in_parens() {
        expect_punct("(");
        Path p;
        if (cur().kind == TokenKind::Identifier) p = path();
        expect_punct(")");
        return p;
    }

    procs::InputGuard input_statement() {
        std::string op = identifier();
        Path in = optional_path_in_parens();
        if (!cur().is_punct("(")) return procs::OneWayRecv{std::move(op), std::move(in)};
        Path out = optional_path_in_parens();
        Process body = cur().is_punct("{") ? block() : make_process(procs::Nil{}, here());
        return procs::RequestResponseRecv{std::move(op), std::move(in), std::move(out), std::move(body)};
    }

    Process input_choice() {
        auto loc = here();
        procs::InputChoice choice;
        while (cur().is_punct("[")) {
            procs::InputBranch br;
            br.loc = here();
            advance();
            if (cur().kind != TokenKind::Identifier || !peek(1).is_punct("("))
                unexpected("input statement");
            br.guard = input_statement();
            expect_punct("]");
            br.body = cur().is_punct("{") ? block() : make_process(procs::Nil{}, here());
            choice.branches.push_back(std::move(br));
        }
        return make_process(std::move(choice), loc);
    }

    Process output_statement() {
        auto loc = here();
        std::string op = identifier();
        expect_punct("@");
        std::string port = identifier();
        expect_punct("(");
        std::optional<Expr> arg;
        if (!cur().is_punct(")")) arg = expression();
        expect_punct(")");
        if (!cur().is_punct("("))
            return make_process(procs::Notification{std::move(op), std::move(port), std::move(arg)}, loc);
        Path result = optional_path_in_parens();
        return make_process(
            procs::SolicitResponse{std::move(op), std::move(port), std::move(arg), std::move(result)}, loc);
    }

    Process if_statement() {
        auto loc = here();
        advance();
        expect_punct("(");
        Expr cond = expression();
        expect_punct(")");
        Process then = block();
        std::optional<Box<Process>> otherwise;
        if (accept_keyword("else")) {
            if (cur().is_keyword("if")) otherwise = Box<Process>(if_statement());
            else otherwise = Box<Process>(block());
        }
        return make_process(procs::If{std::move(cond), std::move(then), std::move(otherwise)}, loc);
    }

    Process match_statement() {
        auto loc = here();
        advance();
        expect_punct("(");
        Path subject = path();
        expect_punct(")");
        expect_punct("{");
        procs::Match m{std::move(subject), {}};
        do {
            procs::MatchArm arm;
            arm.loc = here();
            arm.type_name = type_name();
            arm.body = block();
            m.arms.push_back(std::move(arm));
        } while (!accept_punct("}"));
        return make_process(std::move(m), loc);
    }

    Path path() {
        Path p;
        p.push_back(identifier());
        while (cur().is_punct(".")) {
            advance();
            p.push_back(identifier());
        }
        return p;
    }

    // -- expressions --------------------------------------------------------

    Expr expression() {
        Expr lhs = additive();
        static constexpr std::pair<std::string_view, BinaryOp> cmp[] = {
            {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
            {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge},
        };
        for (auto [text, op] : cmp) {
            if (cur().is_punct(text)) {
                auto loc = here();
                advance();
                Expr rhs = additive();
                return make_expr(exprs::Binary{op, std::move(lhs), std::move(rhs)}, loc);
            }
        }
        return lhs;
    }

    Expr additive() {
        Expr lhs = unary();
        for (;;) {
            BinaryOp op;
            if (cur().is_punct("+")) op = BinaryOp::Add;
            else if (cur().is_punct("-")) op = BinaryOp::Sub;
            else return lhs;
            auto loc = here();
            advance();
            Expr rhs = unary();
            lhs = make_expr(exprs::Binary{op, std::move(lhs), std::move(rhs)}, loc);
        }
    }

    Expr unary() {
        auto loc = here();
        if (accept_punct("!")) return make_expr(exprs::Unary{UnaryOp::Not, unary()}, loc);
        if (accept_punct("-")) {
            Expr operand = unary();
            // Fold negative numeric literals.
            if (auto* lit = std::get_if<exprs::Literal>(&operand.node)) {
                if (auto* i = std::get_if<std::int32_t>(&lit->value); i && *i != INT32_MIN) {
                    lit->value = -*i;
                    operand.loc = loc;
                    return operand;
                }
                if (auto* l = std::get_if<std::int64_t>(&lit->value); l && *l != INT64_MIN) {
                    lit->value = -*l;
                    operand.loc = loc;
                    return operand;
                }
                if (auto* d = std::get_if<double>(&lit->value)) {
                    lit->value = -*d;
                    operand.loc = loc;
                    return operand;
                }
            }
            return make_expr(exprs::Unary{UnaryOp::Negate, std::move(operand)}, loc);
        }
        return primary();
    }

    Expr primary() {
        auto loc = here();
        const Token& t = cur();
        switch (t.kind) {
        case TokenKind::IntegerLiteral: {
            std::int64_t v = parse_int(t);
            advance();
            if (v >= INT32_MIN && v <= INT32_MAX)
                return make_expr(exprs::Literal{static_cast<std::int32_t>(v)}, loc);
            return make_expr(exprs::Literal{v}, loc);
        }
        case TokenKind::LongLiteral: {
            std::int64_t v = parse_int(t);
            advance();
            return make_expr(exprs::Literal{v}, loc);
        }
        case TokenKind::DoubleLiteral: {
            double d = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
            if (ec != std::errc{}) throw ParseError("double literal out of range", loc);
            advance();
            return make_expr(exprs::Literal{d}, loc);
        }
        case TokenKind::StringLiteral: {
            std::string s = t.text;
            advance();
            return make_expr(exprs::Literal{std::move(s)}, loc);
        }
        case TokenKind::Identifier:
            if (t.text == "true" || t.text == "false") {
                bool b = t.text == "true";
                advance();
                return make_expr(exprs::Literal{b}, loc);
            }
            if (t.text == "is_defined" && peek(1).is_punct("(")) {
                advance();
                expect_punct("(");
                Path p = path();
                expect_punct(")");
                return make_expr(exprs::IsDefined{std::move(p)}, loc);
            }
            return make_expr(exprs::PathRead{path()}, loc);
        case TokenKind::Punct:
            if (t.text == "(") {
                advance();
                Expr e = expression();
                expect_punct(")");
                return e;
            }
            break;
        default:
            break;
        }
        unexpected("expression");
    }

    std::int64_t parse_int(const Token& t) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{}) throw ParseError("integer literal out of range", here());
        return v;
    }

    // -- token helpers ------------------------------------------------------

    bool at_end() const { return cur().kind == TokenKind::EndOfInput; }
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
    void advance() {
        if (!at_end()) ++pos_;
    }
    SourceLoc here() const { return SourceLoc{file_, cur().line, cur().column}; }

    bool accept_punct(std::string_view p) {
        if (!cur().is_punct(p)) return false;
        advance();
        return true;
    }
    bool accept_keyword(std::string_view k) {
        if (!cur().is_keyword(k)) return false;
        advance();
        return true;
    }
    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) unexpected("'" + std::string(p) + "'");
    }
    std::string identifier() {
        if (cur().kind != TokenKind::Identifier) unexpected("identifier");
        std::string s = cur().text;
        advance();
        return s;
    }

    [[noreturn]] void unexpected(const std::string& expected) const {
        const Token& t = cur();
        std::string found = t.kind == TokenKind::EndOfInput
                                ? "end of input"
                                : std::string(to_string(t.kind)) + " '" + t.text + "'";
        throw ParseError("unexpected " + found + ", expected " + expected, here());
    }

    const std::vector<Token>& toks_;
    std::string file_;
    IncludeState* includes_;
    std::size_t pos_ = 0;

public:
    void expect_end() {
        if (!at_end()) unexpected("end of input");
    }
};

} // namespace

std::string_view to_string(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(ExecutionMode mode) {
    switch (mode) {
    case ExecutionMode::Single: return "single";
    case ExecutionMode::Concurrent: return "concurrent";
    case ExecutionMode::Sequential: return "sequential";
    }
    return "?";
}

AstProgram parse_program(const std::vector<Token>& tokens, const IncludeLoader& loader,
                         const std::string& file) {
    IncludeState state;
    state.loader = &loader;
    state.stack.push_back(file);
    state.seen.insert(file);
    AstProgram prog;
    Parser(tokens, file, &state).program(prog, false);
    return prog;
}

TypeDef parse_type_definition(const std::vector<Token>& tokens, const std::string& file) {
    Parser p(tokens, file);
    TypeDef def = p.type_definition();
    p.expect_end();
    return def;
}

Process parse_process(const std::vector<Token>& tokens, const std::string& file) {
    Parser p(tokens, file);
    Process proc = p.process();
    p.expect_end();
    return proc;
}

Expr parse_expression(const std::vector<Token>& tokens, const std::string& file) {
    Parser p(tokens, file);
    Expr e = p.expression();
    p.expect_end();
    return e;
}

IncludeLoader no_includes() {
    return [](const std::string& path, const std::string&) -> IncludedSource {
        throw Error("includes are not available here (\"" + path + "\")");
    };
}

} // namespace oli
