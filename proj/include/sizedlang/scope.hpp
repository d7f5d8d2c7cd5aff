#pragma once

#include "sizedlang/core.hpp"
#include "sizedlang/diag.hpp"
#include "sizedlang/surface.hpp"

namespace sizedlang {

struct ScopeResult {
  Signature sig;
  std::vector<Diag> errors;
  bool ok() const { return errors.empty(); }
};

// Resolves identifiers, expands pattern synonyms at use sites, extracts
// termination measures from signatures and produces checked-for-scope
// declarations in dependency order.
ScopeResult scopeCheck(const std::vector<SDecl>& decls);

// Binder spine of a pi/bounded type, without unfolding definitions.
struct SpineBinder {
  std::string name;
  CorePtr domain;          // null for bounded binders
  bool erased = false;
  bool bounded = false;    // [j < s] ->
  SizeExpr bound;          // meaningful when bounded
  std::optional<Polarity> declaredPolarity;
  bool isSize = false;     // domain is Size (or bounded)
};

std::vector<SpineBinder> typeSpine(const CorePtr& type, CorePtr* codomain);

} // namespace sizedlang
