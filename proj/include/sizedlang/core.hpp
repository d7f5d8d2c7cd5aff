#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sizedlang/token.hpp"

namespace sizedlang {

// ---------------------------------------------------------------------------
// Sizes
// ---------------------------------------------------------------------------

// Ordinal-valued size expression, kept in normal form: a base (variable or
// the closure ordinal) plus a finite successor offset. Successor of the
// closure ordinal is the closure ordinal again, so infinite bases carry
// offset zero.
struct SizeExpr {
  bool infty = false;
  std::string var;      // meaningful when !infty
  uint32_t offset = 0;  // always 0 when infty

  static SizeExpr mkVar(std::string name, uint32_t off = 0) {
    SizeExpr s;
    s.var = std::move(name);
    s.offset = off;
    return s;
  }
  static SizeExpr mkInfty() {
    SizeExpr s;
    s.infty = true;
    return s;
  }
  SizeExpr succ(uint32_t n = 1) const {
    SizeExpr s = *this;
    if (!s.infty) s.offset += n;
    return s;
  }
  bool operator==(const SizeExpr& o) const {
    return infty == o.infty && offset == o.offset && (infty || var == o.var);
  }
};

struct SizeNormalForm {
  bool baseIsInfty;
  std::string baseVar;
  uint32_t offset;
};

SizeNormalForm normalizeSize(const SizeExpr& s);
std::string printSize(const SizeExpr& s);

// ---------------------------------------------------------------------------
// Polarity
// ---------------------------------------------------------------------------

enum class Polarity { Pos, Neg, Mixed };

Polarity composePolarity(Polarity outer, Polarity inner);
Polarity joinPolarity(Polarity a, Polarity b);
std::string printPolarity(Polarity p);

// ---------------------------------------------------------------------------
// Core expressions
// ---------------------------------------------------------------------------

struct CoreExpr;
using CorePtr = std::shared_ptr<CoreExpr>;

struct CorePattern;
using CorePatternPtr = std::shared_ptr<CorePattern>;

enum class CKind {
  SetSort,
  SizeSort,
  Var,         // local variable
  Def,         // global definition (data, fun, let)
  Con,         // data constructor
  App,         // kids[0] head, kids[1..] args
  Lam,         // name binder, kids[0] body
  Pi,          // name binder ("" if non-dependent), kids[0] domain, kids[1] codomain
  BoundedAll,  // name size binder, size bound, kids[0] body
  BoundedEx,   // name size binder, size bound, kids[0] body
  Prod,        // kids[0], kids[1]
  Pair,        // kids[0], kids[1]
  Case,        // kids[0] scrutinee; optional kids[1] ascription (see hasAscription)
  SizeVal,     // size
};

// How a lambda binder / application argument behaves at runtime.
enum class ArgKind : uint8_t { Value, Size, Erased };

struct CoreBranch {
  CorePatternPtr pattern;
  CorePtr body;
};

struct CoreExpr {
  CKind kind;
  Span span;
  std::string name;  // Var/Def/Con name, binder name
  std::vector<CorePtr> kids;
  SizeExpr size;                  // SizeVal payload; BoundedAll/Ex bound
  bool erased = false;            // Pi: bracket binder
  std::optional<Polarity> declaredPolarity;  // Pi binders in type-level signatures
  bool hasAscription = false;     // Case
  std::vector<CoreBranch> branches;

  // Elaboration marks filled in by the checker, consumed by erasure.
  mutable ArgKind lamKind = ArgKind::Value;     // Lam
  mutable bool exIntro = false;                 // Pair introduced at a bounded existential
  mutable std::vector<ArgKind> argKinds;        // App, parallel to kids[1..]
};

CorePtr mkCore(CKind k, Span sp = {});

enum class CPatKind { Var, Pair, Con };

struct CorePattern {
  CPatKind kind;
  Span span;
  std::string name;  // Var name; Con constructor name
  std::vector<CorePatternPtr> args;  // Pair: 2; Con: size binder first, then fields
  mutable bool exPattern = false;    // Pair matched against a bounded existential
  mutable ArgKind binderKind = ArgKind::Value;  // Var: runtime behaviour of the binding
};

CorePatternPtr mkCorePattern(CPatKind k, Span sp = {});

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct DataCtor {
  std::string name;
  std::string sizeBinder;          // the [i : Size] binder
  std::vector<CorePtr> fieldTypes; // in scope of data params + sizeBinder
  Span span;
};

struct Clause {
  std::vector<CorePatternPtr> patterns;
  CorePtr body;
  Span span;
  mutable std::vector<ArgKind> paramKinds;  // filled during checking
};

enum class DeclKind { Data, Fun, Let, PatternSyn };

struct Declaration {
  DeclKind kind;
  std::string name;
  Span span;
  CorePtr type;  // full pi type; Let: annotation (or inferred)
  std::vector<Polarity> paramPolarities;  // per pi binder of `type`

  // Data
  std::vector<DataCtor> ctors;

  // Fun
  bool isCofun = false;
  bool isTypeLevel = false;          // codomain is Set
  std::vector<SizeExpr> measure;     // lexicographic termination measure
  bool measureExplicit = false;
  int measurePos = -1;               // pi binders before the |...| marker
  std::vector<Clause> clauses;
  bool selfRecursive = false;

  // Let
  CorePtr body;
  bool annotated = false;

  // PatternSyn
  std::vector<std::string> synParams;
  CorePatternPtr synRhs;
};

using Signature = std::vector<Declaration>;

const Declaration* lookupDecl(const Signature& sig, const std::string& name);
// Returns the data declaration owning constructor `con`, with its index.
const Declaration* lookupCtor(const Signature& sig, const std::string& con, size_t* ctorIndex);

// ---------------------------------------------------------------------------
// Contexts
// ---------------------------------------------------------------------------

struct SizeHypothesis {
  std::string var;
  SizeExpr bound;  // var < bound
};

struct ConstraintCtx {
  std::vector<std::pair<std::string, CorePtr>> bindings;
  std::vector<SizeHypothesis> sizeHypotheses;

  void bind(const std::string& name, CorePtr type) { bindings.emplace_back(name, std::move(type)); }
  void hypothesize(const std::string& var, SizeExpr bound) {
    sizeHypotheses.push_back({var, std::move(bound)});
  }
  const CorePtr* lookup(const std::string& name) const {
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
  bool boundHere(const std::string& name) const { return lookup(name) != nullptr; }

  struct Mark {
    size_t bindings;
    size_t hyps;
  };
  Mark mark() const { return {bindings.size(), sizeHypotheses.size()}; }
  void rewind(Mark m) {
    bindings.resize(m.bindings);
    sizeHypotheses.resize(m.hyps);
  }
};

// ---------------------------------------------------------------------------
// Substitution and friends
// ---------------------------------------------------------------------------

struct Subst {
  std::map<std::string, CorePtr> terms;
  std::map<std::string, SizeExpr> sizes;
  bool empty() const { return terms.empty() && sizes.empty(); }
};

// Capture-avoiding substitution. Binders clashing with free variables of the
// images are renamed with freshName.
CorePtr substitute(const CorePtr& e, const Subst& s);
SizeExpr substituteSize(const SizeExpr& s, const Subst& sub);

void freeVars(const CorePtr& e, std::set<std::string>& out);
std::string freshName(const std::string& base);
// Registers names that freshName must avoid (call once per program).
void reserveNames(const std::set<std::string>& names);

// If e denotes a size (variable, $-successor, #), return it.
std::optional<SizeExpr> toSizeExpr(const CorePtr& e);
CorePtr sizeToCore(const SizeExpr& s, Span sp = {});

// Alpha-insensitive structural equality is deliberately not provided;
// the checker compares via subtyping. This is plain structural equality
// with size normalization, used by tests and the scope round trip.
bool coreEqual(const CorePtr& a, const CorePtr& b);
bool declEqual(const Declaration& a, const Declaration& b);

// Pretty printer to surface syntax (re-parses under the surface grammar).
std::string printCore(const CorePtr& e);
std::string printCorePattern(const CorePatternPtr& p);
std::string printDeclaration(const Declaration& d);
std::string printSignature(const Signature& sig);

} // namespace sizedlang
