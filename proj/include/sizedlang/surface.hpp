#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sizedlang/token.hpp"

namespace sizedlang {

struct SExpr;
using SExprPtr = std::shared_ptr<SExpr>;

struct SPattern;
using SPatternPtr = std::shared_ptr<SPattern>;

enum class SKind {
  Var,         // name
  App,         // kids[0] head, kids[1..] args
  Lam,         // names = params, kids[0] body
  Pi,          // names (empty = non-dependent), kids[0] domain, kids[1] codomain
  BoundedAll,  // names[0] size var, kids[0] bound, kids[1] body
  BoundedEx,   // names[0] size var, kids[0] bound, kids[1] body
  Prod,        // kids[0], kids[1]
  Pair,        // kids[0], kids[1]
  Case,        // kids[0] scrutinee, optional ascription, branches
  Succ,        // kids[0]
  Infty,
  Measure,     // kids[0..n-2] measure exprs, kids[n-1] body
  SetSort,
  SizeSort,
};

// '+' / '-' variance mark on a pi binder; NoMark when unannotated.
enum class PolarityMark { None, Plus, Minus };

struct SBranch {
  SPatternPtr pattern;
  SExprPtr body;
};

struct SExpr {
  SKind kind;
  Span span;
  std::string name;                // Var; binder for Pi (single after desugar)
  std::vector<std::string> names;  // Lam params, Pi binder group, bound var
  std::vector<SExprPtr> kids;
  bool erased = false;             // Pi: bracket binder
  PolarityMark polarity = PolarityMark::None;
  std::optional<SExprPtr> ascription; // Case only
  std::vector<SBranch> branches;      // Case only
};

enum class SPatKind { Var, Pair, Con };

struct SPattern {
  SPatKind kind;
  Span span;
  std::string name;               // Var name or Con head
  std::vector<SPatternPtr> args;  // Pair: 2, Con: sub-patterns
};

enum class SDeclKind { Data, Fun, Let, PatternSyn };

struct SParam {
  PolarityMark polarity = PolarityMark::None;
  bool erased = false;
  std::vector<std::string> names;
  SExprPtr type;
  Span span;
};

struct SCtor {
  std::string name;
  SExprPtr type;
  Span span;
};

struct SClause {
  std::string head;
  std::vector<SPatternPtr> patterns;
  SExprPtr body;
  Span span;
};

struct SDecl {
  SDeclKind kind;
  std::string name;
  Span span;
  std::vector<SParam> params;           // Data, Let
  SExprPtr type;                        // Data index type / Fun signature / Let annotation
  bool hasType = false;                 // Let: annotation present
  bool isCofun = false;                 // Fun
  std::vector<SCtor> ctors;             // Data
  std::vector<SClause> clauses;         // Fun
  SExprPtr body;                        // Let
  std::vector<std::string> synParams;   // PatternSyn
  SPatternPtr synRhs;                   // PatternSyn
};

SExprPtr mkSExpr(SKind k, Span sp);

// Structural equality, ignoring spans.
bool sexprEqual(const SExprPtr& a, const SExprPtr& b);
bool spatternEqual(const SPatternPtr& a, const SPatternPtr& b);
bool sdeclEqual(const SDecl& a, const SDecl& b);

// Pretty printer; output re-parses to a structurally identical AST.
std::string printSExpr(const SExprPtr& e);
std::string printSPattern(const SPatternPtr& p);
std::string printSDecl(const SDecl& d);
std::string printProgram(const std::vector<SDecl>& decls);

} // namespace sizedlang
