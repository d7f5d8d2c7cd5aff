#include "sizedlang/diag.hpp"

#include <sstream>

namespace sizedlang {

const char* errorCodeName(ErrorCode c) {
  switch (c) {
    case ErrorCode::Lexical: return "E001";
    case ErrorCode::Parse: return "E002";
    case ErrorCode::UnboundIdentifier: return "E010";
    case ErrorCode::DuplicateDefinition: return "E011";
    case ErrorCode::SynonymArity: return "E012";
    case ErrorCode::ScopeOther: return "E013";
    case ErrorCode::Mismatch: return "E020";
    case ErrorCode::NotASubtype: return "E021";
    case ErrorCode::BoundViolation: return "E022";
    case ErrorCode::MeasureNotDecreasing: return "E023";
    case ErrorCode::NonExhaustive: return "E024";
    case ErrorCode::UnboundSizeInMeasure: return "E025";
    case ErrorCode::PolarityViolation: return "E026";
    case ErrorCode::Internal: return "E029";
  }
  return "E999";
}

ErrorCode errorCodeFromName(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::Internal); ++i) {
    auto c = static_cast<ErrorCode>(i);
    if (name == errorCodeName(c)) return c;
  }
  return ErrorCode::Internal;
}

namespace {

// 1-based line and column of a byte offset.
void lineCol(const std::string& source, size_t offset, size_t* line, size_t* col,
             size_t* lineStart, size_t* lineEnd) {
  size_t ln = 1, start = 0;
  if (offset > source.size()) offset = source.size();
  for (size_t i = 0; i < offset; ++i) {
    if (source[i] == '\n') {
      ++ln;
      start = i + 1;
    }
  }
  size_t end = source.find('\n', start);
  if (end == std::string::npos) end = source.size();
  *line = ln;
  *col = offset - start + 1;
  *lineStart = start;
  *lineEnd = end;
}

} // namespace

std::string formatDiag(const Diag& d, const std::string& file, const std::string& source) {
  size_t line, col, ls, le;
  lineCol(source, d.span.start, &line, &col, &ls, &le);
  std::ostringstream os;
  os << file << ":" << line << ":" << col << ": [" << errorCodeName(d.code) << "] " << d.message
     << "\n";
  std::string text = source.substr(ls, le - ls);
  os << "  " << text << "\n  ";
  for (size_t i = 0; i + 1 < col; ++i) os << (i < text.size() && text[i] == '\t' ? '\t' : ' ');
  size_t width = d.span.end > d.span.start ? d.span.end - d.span.start : 1;
  size_t maxWidth = le > d.span.start ? le - d.span.start : 1;
  if (width > maxWidth) width = maxWidth;
  for (size_t i = 0; i < width; ++i) os << "^";
  return os.str();
}

} // namespace sizedlang
