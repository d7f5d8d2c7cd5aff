#include "sizedlang/parser.hpp"

#include <cassert>

namespace sizedlang {

SExprPtr mkSExpr(SKind k, Span sp) {
  auto e = std::make_shared<SExpr>();
  e->kind = k;
  e->span = sp;
  return e;
}

namespace {

struct BinderGroup {
  bool bounded = false;
  std::vector<std::string> names;
  SExprPtr bound;  // bounded: strict upper bound
  SExprPtr type;   // non-bounded: domain
  bool erased = false;
  PolarityMark polarity = PolarityMark::None;
  Span span;
};

class Parser {
public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  std::vector<SDecl> program() {
    std::vector<SDecl> decls;
    while (!atEnd()) decls.push_back(decl());
    return decls;
  }

  SExprPtr exprOnly() {
    SExprPtr e = exprFull();
    if (!atEnd()) fail("end of input");
    return e;
  }

private:
  const std::vector<Token>& toks_;
  size_t pos_ = 0;

  bool atEnd() const { return pos_ >= toks_.size(); }

  const Token& cur() const {
    if (atEnd()) throw ParseError("unexpected end of input", endSpan());
    return toks_[pos_];
  }

  Span endSpan() const {
    size_t e = toks_.empty() ? 0 : toks_.back().span.end;
    return {e, e};
  }

  Span hereSpan() const { return atEnd() ? endSpan() : toks_[pos_].span; }

  bool peekSym(const char* s, size_t ahead = 0) const {
    size_t p = pos_ + ahead;
    return p < toks_.size() && toks_[p].kind == TokenKind::Symbol && toks_[p].text == s;
  }

  bool peekKw(const char* s, size_t ahead = 0) const {
    size_t p = pos_ + ahead;
    return p < toks_.size() && toks_[p].kind == TokenKind::Keyword && toks_[p].text == s;
  }

  bool peekIdent(size_t ahead = 0) const {
    size_t p = pos_ + ahead;
    return p < toks_.size() && toks_[p].kind == TokenKind::Identifier;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = atEnd() ? "end of input" : "'" + toks_[pos_].text + "'";
    throw ParseError("expected " + expected + ", found " + found, hereSpan());
  }

  Token eatSym(const char* s) {
    if (!peekSym(s)) fail(std::string("'") + s + "'");
    return toks_[pos_++];
  }

  Token eatKw(const char* s) {
    if (!peekKw(s)) fail(std::string("'") + s + "'");
    return toks_[pos_++];
  }

  Token eatIdent() {
    if (!peekIdent()) fail("identifier");
    return toks_[pos_++];
  }

  // ---- declarations ----

  SDecl decl() {
    if (peekKw("data")) return dataDecl();
    if (peekKw("fun") || peekKw("cofun")) return funDecl();
    if (peekKw("let")) return letDecl();
    if (peekKw("pattern")) return patDecl();
    fail("declaration keyword (data, fun, cofun, let, pattern)");
  }

  SDecl dataDecl() {
    SDecl d;
    d.kind = SDeclKind::Data;
    Span start = eatKw("data").span;
    d.name = eatIdent().text;
    d.params = paramList();
    eatSym(":");
    d.type = exprArrow();
    eatSym("{");
    for (;;) {
      SCtor c;
      Token id = eatIdent();
      c.name = id.text;
      eatSym(":");
      c.type = exprArrow();
      c.span = {id.span.start, c.type->span.end};
      d.ctors.push_back(std::move(c));
      if (peekSym(";")) { ++pos_; continue; }
      break;
    }
    Span end = eatSym("}").span;
    d.span = {start.start, end.end};
    return d;
  }

  SDecl funDecl() {
    SDecl d;
    d.kind = SDeclKind::Fun;
    Token kw = toks_[pos_++];
    d.isCofun = kw.text == "cofun";
    d.name = eatIdent().text;
    eatSym(":");
    d.type = exprFull();
    eatSym("{");
    for (;;) {
      SClause cl;
      Token hd = eatIdent();
      cl.head = hd.text;
      while (peekIdent() || peekSym("(")) cl.patterns.push_back(patternTerm());
      eatSym("=");
      cl.body = exprArrow();
      cl.span = {hd.span.start, cl.body->span.end};
      d.clauses.push_back(std::move(cl));
      if (peekSym(";")) { ++pos_; continue; }
      break;
    }
    Span end = eatSym("}").span;
    d.span = {kw.span.start, end.end};
    return d;
  }

  SDecl letDecl() {
    SDecl d;
    d.kind = SDeclKind::Let;
    Span start = eatKw("let").span;
    d.name = eatIdent().text;
    d.params = paramList();
    if (peekSym(":")) {
      ++pos_;
      d.type = exprArrow();
      d.hasType = true;
    }
    eatSym("=");
    d.body = exprArrow();
    d.span = {start.start, d.body->span.end};
    return d;
  }

  SDecl patDecl() {
    SDecl d;
    d.kind = SDeclKind::PatternSyn;
    Span start = eatKw("pattern").span;
    d.name = eatIdent().text;
    while (peekIdent()) d.synParams.push_back(eatIdent().text);
    eatSym("=");
    d.synRhs = synonymRhs();
    d.span = {start.start, d.synRhs->span.end};
    return d;
  }

  // Synonym right-hand sides allow an unparenthesized constructor
  // application, e.g. `pattern get k f = left k f`.
  SPatternPtr synonymRhs() {
    if (peekIdent() && (peekIdent(1) || peekSym("(", 1))) {
      Token hd = eatIdent();
      auto p = std::make_shared<SPattern>();
      p->kind = SPatKind::Con;
      p->name = hd.text;
      while (peekIdent() || peekSym("(")) p->args.push_back(patternTerm());
      p->span = {hd.span.start, p->args.back()->span.end};
      return p;
    }
    return patternTerm();
  }

  // ---- patterns ----

  SPatternPtr patternTerm() {
    if (peekIdent()) {
      Token id = toks_[pos_++];
      auto p = std::make_shared<SPattern>();
      p->kind = SPatKind::Var;
      p->name = id.text;
      p->span = id.span;
      return p;
    }
    if (peekSym("(")) {
      Span open = toks_[pos_++].span;
      SPatternPtr inner = patternInside();
      Span close = eatSym(")").span;
      inner->span = {open.start, close.end};
      return inner;
    }
    fail("pattern");
  }

  SPatternPtr patternInside() {
    // `(c p1 p2 ...)` is a constructor pattern; `(p , q)` a pair.
    if (peekIdent() && (peekIdent(1) || peekSym("(", 1))) {
      Token hd = toks_[pos_++];
      auto p = std::make_shared<SPattern>();
      p->kind = SPatKind::Con;
      p->name = hd.text;
      p->span = hd.span;
      while (peekIdent() || peekSym("(")) p->args.push_back(patternTerm());
      return p;
    }
    SPatternPtr first = patternTerm();
    if (peekSym(",")) {
      ++pos_;
      SPatternPtr second = patternTerm();
      auto p = std::make_shared<SPattern>();
      p->kind = SPatKind::Pair;
      p->span = {first->span.start, second->span.end};
      p->args = {first, second};
      return p;
    }
    return first;
  }

  // ---- telescopes ----

  std::vector<SParam> paramList() {
    std::vector<SParam> params;
    for (;;) {
      PolarityMark outer = PolarityMark::None;
      size_t save = pos_;
      if ((peekSym("+") || peekSym("-")) && peekSym("(", 1)) {
        outer = peekSym("+") ? PolarityMark::Plus : PolarityMark::Minus;
        ++pos_;
      }
      if (peekSym("(") && scanParenBinder()) {
        params.push_back(parenParam(outer));
        continue;
      }
      pos_ = save;
      if (peekSym("[") && peekIdent(1) && !peekSym("<", 2)) {
        params.push_back(bracketParam());
        continue;
      }
      break;
    }
    return params;
  }

  SParam parenParam(PolarityMark outer) {
    SParam p;
    Span open = eatSym("(").span;
    p.polarity = outer;
    if (peekSym("+") || peekSym("-")) {
      p.polarity = peekSym("+") ? PolarityMark::Plus : PolarityMark::Minus;
      ++pos_;
    }
    p.names.push_back(eatIdent().text);
    while (peekSym(",")) {
      ++pos_;
      p.names.push_back(eatIdent().text);
    }
    eatSym(":");
    p.type = exprArrow();
    Span close = eatSym(")").span;
    p.span = {open.start, close.end};
    return p;
  }

  SParam bracketParam() {
    SParam p;
    p.erased = true;
    Span open = eatSym("[").span;
    p.names.push_back(eatIdent().text);
    while (peekSym(",")) {
      ++pos_;
      p.names.push_back(eatIdent().text);
    }
    eatSym(":");
    p.type = exprArrow();
    Span close = eatSym("]").span;
    p.span = {open.start, close.end};
    return p;
  }

  // True when the tokens after the current '(' look like `(+x, y :`.
  bool scanParenBinder() const {
    size_t p = pos_ + 1;
    auto isSym = [&](const char* s) {
      return p < toks_.size() && toks_[p].kind == TokenKind::Symbol && toks_[p].text == s;
    };
    if (isSym("+") || isSym("-")) ++p;
    if (p >= toks_.size() || toks_[p].kind != TokenKind::Identifier) return false;
    ++p;
    while (p < toks_.size() && toks_[p].kind == TokenKind::Symbol && toks_[p].text == ",") {
      ++p;
      if (p >= toks_.size() || toks_[p].kind != TokenKind::Identifier) return false;
      ++p;
    }
    return p < toks_.size() && toks_[p].kind == TokenKind::Symbol && toks_[p].text == ":";
  }

  // ---- expressions ----

  // Full expression including a leading measure marker `|s,..| -> e`.
  SExprPtr exprFull() {
    if (peekSym("|")) {
      Span open = toks_[pos_++].span;
      std::vector<SExprPtr> parts;
      parts.push_back(exprApp());
      while (peekSym(",")) {
        ++pos_;
        parts.push_back(exprApp());
      }
      eatSym("|");
      eatSym("->");
      SExprPtr body = exprFull();
      auto m = mkSExpr(SKind::Measure, {open.start, body->span.end});
      m->kids = std::move(parts);
      m->kids.push_back(body);
      return m;
    }
    return exprArrow();
  }

  SExprPtr exprArrow() {
    if (peekSym("|")) return exprFull();
    std::vector<BinderGroup> groups;
    for (;;) {
      if (peekSym("[") && peekIdent(1)) {
        groups.push_back(bracketGroup());
        continue;
      }
      if ((peekSym("+") || peekSym("-")) && peekSym("(", 1)) {
        PolarityMark outer = peekSym("+") ? PolarityMark::Plus : PolarityMark::Minus;
        ++pos_;
        BinderGroup g = parenGroup(outer);
        groups.push_back(std::move(g));
        continue;
      }
      if (peekSym("(") && scanParenBinder()) {
        groups.push_back(parenGroup(PolarityMark::None));
        continue;
      }
      break;
    }
    if (groups.empty()) {
      SExprPtr left = exprProd();
      if (peekSym("->")) {
        ++pos_;
        SExprPtr cod = exprArrow();
        auto pi = mkSExpr(SKind::Pi, {left->span.start, cod->span.end});
        pi->kids = {left, cod};
        return pi;
      }
      return left;
    }
    if (peekSym("&") && groups.size() == 1 && groups.front().bounded) {
      ++pos_;
      SExprPtr body = exprProd();
      const BinderGroup& g = groups.front();
      auto ex = mkSExpr(SKind::BoundedEx, {g.span.start, body->span.end});
      ex->names = g.names;
      ex->kids = {g.bound, body};
      if (peekSym("->")) {
        ++pos_;
        SExprPtr cod = exprArrow();
        auto pi = mkSExpr(SKind::Pi, {ex->span.start, cod->span.end});
        pi->kids = {ex, cod};
        return pi;
      }
      return ex;
    }
    eatSym("->");
    SExprPtr body = exprArrow();
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      const BinderGroup& g = *it;
      if (g.bounded) {
        auto all = mkSExpr(SKind::BoundedAll, {g.span.start, body->span.end});
        all->names = g.names;
        all->kids = {g.bound, body};
        body = all;
      } else {
        // One pi per name, innermost last.
        for (auto nit = g.names.rbegin(); nit != g.names.rend(); ++nit) {
          auto pi = mkSExpr(SKind::Pi, {g.span.start, body->span.end});
          pi->name = *nit;
          pi->names = {*nit};
          pi->erased = g.erased;
          pi->polarity = g.polarity;
          pi->kids = {g.type, body};
          body = pi;
        }
      }
    }
    return body;
  }

  BinderGroup bracketGroup() {
    BinderGroup g;
    Span open = eatSym("[").span;
    g.names.push_back(eatIdent().text);
    if (peekSym("<")) {
      ++pos_;
      g.bounded = true;
      g.bound = exprApp();
      Span close = eatSym("]").span;
      g.span = {open.start, close.end};
      return g;
    }
    while (peekSym(",")) {
      ++pos_;
      g.names.push_back(eatIdent().text);
    }
    eatSym(":");
    g.erased = true;
    g.type = exprArrow();
    Span close = eatSym("]").span;
    g.span = {open.start, close.end};
    return g;
  }

  BinderGroup parenGroup(PolarityMark outer) {
    BinderGroup g;
    SParam p = parenParam(outer);
    g.names = p.names;
    g.type = p.type;
    g.polarity = p.polarity;
    g.span = p.span;
    return g;
  }

  SExprPtr exprProd() {
    SExprPtr left = exprApp();
    if (peekSym("&")) {
      ++pos_;
      SExprPtr right = exprProd();
      auto prod = mkSExpr(SKind::Prod, {left->span.start, right->span.end});
      prod->kids = {left, right};
      return prod;
    }
    return left;
  }

  bool atomStart() const {
    if (atEnd()) return false;
    const Token& t = toks_[pos_];
    if (t.kind == TokenKind::Identifier) return true;
    if (t.kind == TokenKind::Keyword) return t.text == "Set" || t.text == "Size" || t.text == "case";
    if (t.kind == TokenKind::Symbol)
      return t.text == "(" || t.text == "#" || t.text == "$" || t.text == "\\";
    return false;
  }

  SExprPtr exprApp() {
    SExprPtr head = atom();
    if (!atomStart()) return head;
    auto app = mkSExpr(SKind::App, head->span);
    app->kids.push_back(head);
    while (atomStart()) {
      SExprPtr arg = atom();
      app->span.end = arg->span.end;
      app->kids.push_back(arg);
    }
    return app;
  }

  SExprPtr atom() {
    if (atEnd()) fail("expression");
    const Token& t = cur();
    if (t.kind == TokenKind::Identifier) {
      ++pos_;
      auto v = mkSExpr(SKind::Var, t.span);
      v->name = t.text;
      return v;
    }
    if (t.kind == TokenKind::NatLiteral)
      throw ParseError("number literals are not expressions", t.span);
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "Set") { ++pos_; return mkSExpr(SKind::SetSort, t.span); }
      if (t.text == "Size") { ++pos_; return mkSExpr(SKind::SizeSort, t.span); }
      if (t.text == "case") return caseExpr();
      fail("expression");
    }
    if (t.text == "#") { ++pos_; return mkSExpr(SKind::Infty, t.span); }
    if (t.text == "$") {
      ++pos_;
      SExprPtr arg = atom();
      auto s = mkSExpr(SKind::Succ, {t.span.start, arg->span.end});
      s->kids = {arg};
      return s;
    }
    if (t.text == "\\") {
      ++pos_;
      std::vector<std::string> params;
      params.push_back(eatIdent().text);
      while (peekIdent()) params.push_back(eatIdent().text);
      eatSym("->");
      SExprPtr body = exprArrow();
      auto lam = mkSExpr(SKind::Lam, {t.span.start, body->span.end});
      lam->names = std::move(params);
      lam->kids = {body};
      return lam;
    }
    if (t.text == "(") {
      ++pos_;
      SExprPtr first = exprFull();
      if (peekSym(",")) {
        ++pos_;
        SExprPtr second = exprArrow();
        Span close = eatSym(")").span;
        auto pair = mkSExpr(SKind::Pair, {t.span.start, close.end});
        pair->kids = {first, second};
        return pair;
      }
      Span close = eatSym(")").span;
      first->span = {t.span.start, close.end};
      return first;
    }
    fail("expression");
  }

  SExprPtr caseExpr() {
    Span start = eatKw("case").span;
    SExprPtr scrut = exprApp();
    auto c = mkSExpr(SKind::Case, start);
    c->kids = {scrut};
    if (peekSym(":")) {
      ++pos_;
      c->ascription = exprArrow();
    }
    eatSym("{");
    for (;;) {
      SBranch b;
      b.pattern = patternTerm();
      eatSym("->");
      b.body = exprArrow();
      c->branches.push_back(std::move(b));
      if (peekSym(";")) { ++pos_; continue; }
      break;
    }
    Span end = eatSym("}").span;
    c->span = {start.start, end.end};
    return c;
  }
};

} // namespace

std::vector<SDecl> parse(const std::vector<Token>& tokens) {
  Parser p(tokens);
  return p.program();
}

std::vector<SDecl> parseSource(const std::string& source) {
  return parse(tokenize(source));
}

SExprPtr parseExprString(const std::string& source) {
  Parser p(tokenize(source));
  return p.exprOnly();
}

} // namespace sizedlang
