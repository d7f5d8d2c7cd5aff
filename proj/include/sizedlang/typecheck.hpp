#pragma once

#include <optional>

#include "sizedlang/core.hpp"
#include "sizedlang/diag.hpp"
#include "sizedlang/scope.hpp"

namespace sizedlang {

struct CheckOptions {
  int unfoldFuel = 1000;  // defined-type unfolding budget per declaration
};

struct CheckResult {
  Signature sig;  // checked declarations with elaboration marks
  std::vector<Diag> errors;
  bool ok() const { return errors.empty(); }
};

// Thrown internally; surfaced as Diags in CheckResult.
struct TypeErrorEx {
  Diag diag;
};

// Bidirectional checker with polarity-driven subtyping, bounded quantifier
// introduction/elimination, sized pattern matching and lexicographic
// termination measures. There is deliberately no bottom check and no
// semi-continuity condition: recursion is justified by the well-founded
// order on sizes alone.
class Checker {
public:
  explicit Checker(CheckOptions opts = {}) : opts_(opts) {}

  // Checks declarations in order; continues past failing declarations.
  CheckResult run(Signature scoped);

  // Exposed for tests and tooling. `sig` access for pre-seeded signatures.
  Signature& signature() { return sig_; }
  void setCurrent(const Declaration* d) { current_ = d; }
  void setMeasureAtEntry(std::vector<SizeExpr> m) { measureAtEntry_ = std::move(m); }

  CorePtr infer(ConstraintCtx& ctx, const CorePtr& e);
  void check(ConstraintCtx& ctx, const CorePtr& e, const CorePtr& type);
  bool subtype(ConstraintCtx& ctx, const CorePtr& sub, const CorePtr& super);
  void checkPattern(ConstraintCtx& ctx, const CorePatternPtr& p, const CorePtr& type);
  // Lexicographic comparison of a recursive call's measure against the
  // clause-entry measure; throws MeasureNotDecreasing on failure.
  void checkRecursiveCall(ConstraintCtx& ctx, const std::vector<SizeExpr>& callMeasure,
                          Span site);

  CorePtr whnfType(ConstraintCtx& ctx, CorePtr t);

private:
  CheckOptions opts_;
  Signature sig_;
  const Declaration* current_ = nullptr;
  std::vector<SizeExpr> measureAtEntry_;
  int unfoldBudget_ = 0;
  std::set<std::string> instantiable_;
  std::map<std::string, SizeExpr> solutions_;

  [[noreturn]] void fail(ErrorCode code, Span sp, std::string msg) const;

  void checkDecl(Declaration& d);
  void checkDataDecl(Declaration& d);
  void checkFunDecl(Declaration& d);
  void checkLetDecl(Declaration& d);
  void checkClause(Declaration& d, Clause& clause);
  void checkClauseCoverage(const Declaration& d);

  void checkIsType(ConstraintCtx& ctx, const CorePtr& e);
  CorePtr inferApp(ConstraintCtx& ctx, const CorePtr& app);
  CorePtr inferCtorApp(ConstraintCtx& ctx, const CorePtr& e);
  void checkCtorApp(ConstraintCtx& ctx, const CorePtr& e, const CorePtr& expected);
  CorePtr checkCase(ConstraintCtx& ctx, const CorePtr& e, CorePtr expected);

  SizeExpr resolveSize(SizeExpr s) const;
  bool isInstantiable(const SizeExpr& s) const;
  bool leqS(ConstraintCtx& ctx, SizeExpr a, SizeExpr b);
  bool ltInstS(ConstraintCtx& ctx, SizeExpr a, SizeExpr b);
  bool sizeEqS(ConstraintCtx& ctx, const SizeExpr& a, const SizeExpr& b);
  std::optional<SizeExpr> sizeOfExpr(ConstraintCtx& ctx, const CorePtr& e);
  SizeExpr solveCtorDepth(ConstraintCtx& ctx, const SizeExpr& depth, Span sp);

  struct DataApp {
    const Declaration* data;
    std::vector<CorePtr> params;
    SizeExpr depth;
  };
  std::optional<DataApp> asDataApp(ConstraintCtx& ctx, const CorePtr& t);

  bool coversCtor(ConstraintCtx& ctx, std::vector<std::vector<CorePatternPtr>> rows,
                  std::vector<CorePtr> colTypes, std::string* missing);
  void requireCoverage(ConstraintCtx& ctx, const std::vector<std::vector<CorePatternPtr>>& rows,
                       const std::vector<CorePtr>& colTypes, Span sp, const char* what);
};

CheckResult checkProgram(Signature scoped, CheckOptions opts = {});

} // namespace sizedlang
