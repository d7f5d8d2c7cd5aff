#include "sizedlang/token.hpp"

#include <array>
#include <cctype>

namespace sizedlang {

namespace {

const std::array<const char*, 9> kKeywords = {
    "data", "fun", "cofun", "let", "pattern", "case", "Set", "Size", "in"};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool identCont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// Single-character symbols; "->" is handled separately.
bool singleSymbol(char c) {
  switch (c) {
    case '=': case ':': case ';': case ',':
    case '{': case '}': case '(': case ')':
    case '[': case ']': case '<': case '&':
    case '$': case '#': case '|': case '+':
    case '-': case '\\': case '.':
      return true;
    default:
      return false;
  }
}

} // namespace

bool isKeyword(const std::string& word) {
  for (const char* kw : kKeywords)
    if (word == kw) return true;
  return false;
}

std::vector<Token> tokenize(const std::string& source) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = source.size();
  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && source[i + 1] == '-') {
      while (i < n && source[i] != '\n') ++i;
      continue;
    }
    size_t start = i;
    if (identStart(c)) {
      while (i < n && identCont(source[i])) ++i;
      std::string text = source.substr(start, i - start);
      TokenKind kind = isKeyword(text) ? TokenKind::Keyword : TokenKind::Identifier;
      out.push_back({kind, std::move(text), {start, i}});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
      out.push_back({TokenKind::NatLiteral, source.substr(start, i - start), {start, i}});
      continue;
    }
    if (c == '-' && i + 1 < n && source[i + 1] == '>') {
      i += 2;
      out.push_back({TokenKind::Symbol, "->", {start, i}});
      continue;
    }
    if (singleSymbol(c)) {
      ++i;
      out.push_back({TokenKind::Symbol, std::string(1, c), {start, i}});
      continue;
    }
    throw LexError("character '" + std::string(1, c) + "' is not part of the language",
                   {start, start + 1});
  }
  return out;
}

} // namespace sizedlang
