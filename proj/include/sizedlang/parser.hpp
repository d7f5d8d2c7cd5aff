#pragma once

#include <string>
#include <vector>

#include "sizedlang/surface.hpp"
#include "sizedlang/token.hpp"

namespace sizedlang {

struct ParseError : std::runtime_error {
  Span span;
  ParseError(std::string msg, Span s) : std::runtime_error(std::move(msg)), span(s) {}
};

std::vector<SDecl> parse(const std::vector<Token>& tokens);
std::vector<SDecl> parseSource(const std::string& source);

// Entry points used by tests and by the core printer round trip.
SExprPtr parseExprString(const std::string& source);

} // namespace sizedlang
