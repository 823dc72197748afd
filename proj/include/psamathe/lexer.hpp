#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "psamathe/diagnostics.hpp"

namespace psa {

enum class TokenKind { Keyword, Ident, Natural, Symbol, Eof };

struct Token {
    TokenKind kind;
    std::string lexeme;
    Span span;

    bool is_kw(std::string_view kw) const { return kind == TokenKind::Keyword && lexeme == kw; }
    bool is_sym(std::string_view s) const { return kind == TokenKind::Symbol && lexeme == s; }
};

inline const std::set<std::string, std::less<>>& keywords() {
    static const std::set<std::string, std::less<>> kws = {
        "type",     "is",     "transformer", "var",        "try",   "catch", "consume",
        "new",      "st",     "such",        "that",       "copy",  "zip",   "fungible",
        "unique",   "immutable", "consumable", "asset",    "one",   "any",   "nonempty",
        "empty",    "bool",   "nat",         "address",    "list",  "table", "true",
        "false"};
    return kws;
}

// Multi-char symbols first so maximal munch wins.
inline const std::array<std::string_view, 17>& symbols() {
    static const std::array<std::string_view, 17> syms = {
        "-->", "<--", "->", ":", ",", ".", "_", "[", "]", "{", "}", "(", ")", "+", "-", "*", "/"};
    return syms;
}

inline std::vector<Token> tokenize(std::string_view src, DiagnosticBag& diags) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;

    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
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
        Span span{line, col, 1};
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            span.len = int(j - i);
            out.push_back({TokenKind::Natural, std::string(src.substr(i, j - i)), span});
            advance(j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                      src[j] == '_'))
                ++j;
            std::string word(src.substr(i, j - i));
            span.len = int(j - i);
            if (word == "_") {
                out.push_back({TokenKind::Symbol, word, span});
            } else if (keywords().count(word)) {
                out.push_back({TokenKind::Keyword, word, span});
            } else {
                out.push_back({TokenKind::Ident, word, span});
            }
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (std::string_view sym : symbols()) {
            if (src.substr(i, sym.size()) == sym) {
                span.len = int(sym.size());
                out.push_back({TokenKind::Symbol, std::string(sym), span});
                advance(sym.size());
                matched = true;
                break;
            }
        }
        if (!matched) {
            diags.error(span, "unexpected character '" + std::string(1, c) + "'");
            advance(1);
        }
    }
    out.push_back({TokenKind::Eof, "", Span{line, col, 0}});
    return out;
}

} // namespace psa
