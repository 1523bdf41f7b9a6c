#include "oli/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace oli {
namespace {

constexpr std::array kKeywords = {
    "type",        "interface", "inputPort", "outputPort", "include",   "execution",
    "main",        "init",      "define",    "RequestResponse", "OneWay", "Location",
    "Protocol",    "Interfaces", "if",       "else",       "match",     "undefined",
    "int",         "long",      "double",    "string",     "raw",       "void",
    "any",         "concurrent", "single",   "sequential",
};

// Longest match first.
constexpr std::array kPunct = {
    "==", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ",", ":", ";", ".",
    "|",  "=",  "<",  ">",  "+", "-", "*", "?", "@", "!",
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool digit(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

class Scanner {
public:
    Scanner(std::string_view src, const std::string& file) : src_(src), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            if (at_end()) {
                out.push_back(Token{TokenKind::EndOfInput, {}, line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    bool at_end() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& what, std::uint32_t line, std::uint32_t col) const {
        throw LexError(what, SourceLoc{file_, line, col});
    }

    void skip_blank() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                auto line = line_, col = col_;
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (at_end()) fail("unterminated block comment", line, col);
                    advance();
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Token next() {
        Token tok;
        tok.line = line_;
        tok.column = col_;
        char c = peek();
        if (ident_start(c)) {
            std::size_t start = pos_;
            for (;;) {
                while (ident_char(peek())) advance();
                // A hyphen joins two identifier runs; otherwise it is minus.
                if (peek() == '-' && ident_char(peek(1))) {
                    advance();
                    continue;
                }
                break;
            }
            tok.text = std::string(src_.substr(start, pos_ - start));
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
            return tok;
        }
        if (digit(c)) return number(tok);
        if (c == '"') return string_literal(tok);
        for (std::string_view p : kPunct) {
            if (src_.substr(pos_, p.size()) == p) {
                for (std::size_t i = 0; i < p.size(); ++i) advance();
                tok.kind = TokenKind::Punct;
                tok.text = std::string(p);
                return tok;
            }
        }
        fail(std::string("illegal character '") + c + "'", line_, col_);
    }

    Token number(Token tok) {
        std::size_t start = pos_;
        bool is_double = false;
        while (digit(peek())) advance();
        if (peek() == '.' && digit(peek(1))) {
            is_double = true;
            advance();
            while (digit(peek())) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
            is_double = true;
            advance();
            if (peek() == '+' || peek() == '-') advance();
            while (digit(peek())) advance();
        }
        tok.text = std::string(src_.substr(start, pos_ - start));
        if (is_double) {
            tok.kind = TokenKind::DoubleLiteral;
        } else if (peek() == 'L' || peek() == 'l') {
            advance();
            tok.kind = TokenKind::LongLiteral;
        } else {
            tok.kind = TokenKind::IntegerLiteral;
        }
        if (ident_char(peek())) fail("malformed numeric literal", tok.line, tok.column);
        return tok;
    }

    Token string_literal(Token tok) {
        advance();
        std::string text;
        for (;;) {
            if (at_end() || peek() == '\n') fail("unterminated string literal", tok.line, tok.column);
            char c = peek();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                auto line = line_, col = col_;
                advance();
                if (at_end()) fail("unterminated string literal", tok.line, tok.column);
                switch (peek()) {
                case '"': text += '"'; break;
                case '\\': text += '\\'; break;
                case 'n': text += '\n'; break;
                case 't': text += '\t'; break;
                default: fail(std::string("unknown escape '\\") + peek() + "'", line, col);
                }
                advance();
                continue;
            }
            text += c;
            advance();
        }
        tok.kind = TokenKind::StringLiteral;
        tok.text = std::move(text);
        return tok;
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

} // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntegerLiteral: return "integer literal";
    case TokenKind::LongLiteral: return "long literal";
    case TokenKind::DoubleLiteral: return "double literal";
    case TokenKind::StringLiteral: return "string literal";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::EndOfInput: return "end of input";
    }
    return "?";
}

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source, const std::string& file) {
    return Scanner(source, file).run();
}

} // namespace oli
