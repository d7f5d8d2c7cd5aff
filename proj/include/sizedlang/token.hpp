#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sizedlang {

// Byte range into the original source, end exclusive.
struct Span {
  size_t start = 0;
  size_t end = 0;
};

enum class TokenKind { Identifier, Keyword, Symbol, NatLiteral };

struct Token {
  TokenKind kind;
  std::string text;
  Span span;
};

struct LexError : std::runtime_error {
  Span span;
  LexError(std::string msg, Span s) : std::runtime_error(std::move(msg)), span(s) {}
};

// Splits source into tokens. Line comments ("--" to end of line) and
// whitespace are skipped; any other character outside the token alphabet
// raises LexError. Token texts are exact slices of the input.
std::vector<Token> tokenize(const std::string& source);

bool isKeyword(const std::string& word);

} // namespace sizedlang
