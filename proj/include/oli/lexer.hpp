#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oli/error.hpp"

namespace oli {

enum class TokenKind {
    Identifier,
    IntegerLiteral,
    LongLiteral,
    DoubleLiteral,
    StringLiteral,
    Keyword,
    Punct,
    EndOfInput,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::EndOfInput;
    /// Identifier/keyword/punctuation spelling, literal digits (without any
    /// `L` suffix), or the unescaped content of a string literal.
    std::string text;
    std::uint32_t line = 1;
    std::uint32_t column = 1;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }

    friend bool operator==(const Token&, const Token&) = default;
};

bool is_keyword(std::string_view word);

/// Splits source text into tokens, terminated by an EndOfInput token.
///
/// `file` is only used to label LexError positions.
std::vector<Token> tokenize(std::string_view source, const std::string& file = {});

} // namespace oli
