#ifndef YAK_LEXER_HPP
#define YAK_LEXER_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "yak/diagnostic.hpp"

namespace yak {

enum class TokenKind { Keyword, Identifier, Integer, Punctuation, Operator, End };

struct SourceToken {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 1;
    int column = 1;

    SourcePos pos() const { return {line, column}; }
    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return kind == TokenKind::Punctuation && text == t; }
    bool is_op(std::string_view t) const { return kind == TokenKind::Operator && text == t; }
    bool is_keyword(std::string_view t) const { return kind == TokenKind::Keyword && text == t; }
};

inline constexpr std::array<std::string_view, 17> kKeywords = {
    "chan", "sig",   "def",   "comb", "logic",  "join",  "fork",  "merge",    "mux",
    "demux", "arbit", "reg", "source", "sink", "input", "output", "blackbox",
};

inline bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (k == word) return true;
    return false;
}

inline std::string_view token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Integer: return "integer";
        case TokenKind::Punctuation: return "punctuation";
        case TokenKind::Operator: return "operator";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

namespace detail {

inline bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
inline bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
inline bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

/// Splits Yak source into tokens. `//` comments and whitespace are dropped.
/// Throws CompileError(E_LEX) on the first byte outside the grammar.
inline std::vector<SourceToken> tokenize(std::string_view src) {
    std::vector<SourceToken> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    static constexpr std::array<std::string_view, 9> two_char_ops = {
        "->", "<<", ">>", "==", "!=", "<=", ">=", "&&", "||",
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourceToken tok;
        tok.line = line;
        tok.column = col;
        if (detail::ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && detail::ident_char(src[j])) ++j;
            tok.text = std::string(src.substr(i, j - i));
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        if (detail::digit(c)) {
            std::size_t j = i;
            while (j < src.size() && detail::digit(src[j])) ++j;
            if (j < src.size() && detail::ident_start(src[j]))
                throw CompileError(Diagnostic::error(
                    "E_LEX", std::string("unexpected character '") + src[j] + "' in integer literal",
                    {line, col + static_cast<int>(j - i)}));
            tok.text = std::string(src.substr(i, j - i));
            if (tok.text.size() > 20 || (tok.text.size() == 20 && tok.text > "18446744073709551615"))
                throw CompileError(Diagnostic::error("E_LEX", "integer literal '" + tok.text + "' exceeds 64 bits",
                                                     tok.pos()));
            tok.kind = TokenKind::Integer;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        bool matched = false;
        if (i + 1 < src.size()) {
            std::string_view two = src.substr(i, 2);
            for (auto op : two_char_ops) {
                if (op == two) {
                    tok.kind = TokenKind::Operator;
                    tok.text = std::string(two);
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            switch (c) {
                case ';': case ',': case '[': case ']': case '(': case ')':
                case '{': case '}': case ':': case '=':
                    tok.kind = TokenKind::Punctuation;
                    tok.text = std::string(1, c);
                    matched = true;
                    break;
                case '+': case '-': case '*': case '&': case '|': case '^':
                case '<': case '>': case '~': case '!': case '?':
                    tok.kind = TokenKind::Operator;
                    tok.text = std::string(1, c);
                    matched = true;
                    break;
                default:
                    break;
            }
        }
        if (!matched) {
            std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                    ? "byte 0x" + [&] {
                                          static const char* hex = "0123456789abcdef";
                                          auto u = static_cast<unsigned char>(c);
                                          return std::string{hex[u >> 4], hex[u & 15]};
                                      }()
                                    : std::string("'") + c + "'";
            throw CompileError(Diagnostic::error("E_LEX", "unexpected character " + shown, {line, col}));
        }
        advance(tok.text.size());
        out.push_back(std::move(tok));
    }
    return out;
}

}  // namespace yak

#endif  // YAK_LEXER_HPP
