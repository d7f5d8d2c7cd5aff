#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sizedlang/core.hpp"

namespace sizedlang {

// Decides size entailments under the hypotheses of a context.
//
//   leq       — the ordering the types denote; # sits on top.
//   ltInst    — strict order for instantiating bounded quantifiers;
//               admits # < # so that size-polymorphic functions can be
//               forced at the closure ordinal.
//   ltMeasure — strict order for termination measures; well-founded,
//               so # < # is refused, and nothing sits below # except
//               by explicit hypothesis.
bool leq(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t);
bool ltInst(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t);
bool ltMeasure(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t);

struct SizeOrderStats {
  uint64_t queries = 0;
  uint64_t inftyAdmissions = 0;           // # < # uses
  uint64_t inftyAdmissionsInMeasure = 0;  // must stay 0
};

SizeOrderStats& sizeOrderStats();
void resetSizeOrderStats();

// Scoped marker set by the checker around measure comparisons.
class MeasureScope {
public:
  MeasureScope();
  ~MeasureScope();
};

// When set, every decided judgment is reported with its derivation chain.
using ExplainSink = std::function<void(const std::string&)>;
void setExplainSink(ExplainSink sink);

} // namespace sizedlang
