#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sizedlang/core.hpp"

namespace sizedlang {

// ---------------------------------------------------------------------------
// Runtime language
// ---------------------------------------------------------------------------

struct RExpr;
using RExprPtr = std::shared_ptr<const RExpr>;

struct RPattern;
using RPatternPtr = std::shared_ptr<const RPattern>;

enum class RKind { Var, Def, Con, App, Lam, Thunk, Force, Pair, Case, Unit };

struct RBranch {
  RPatternPtr pattern;
  RExprPtr body;
};

struct RExpr {
  RKind kind;
  std::string name;            // Var/Def/Con, Lam binder
  std::vector<RExprPtr> kids;  // App: {fn, arg}; Lam/Thunk/Force: {body}; Pair: {l, r}; Case: {scrut}
  bool sizeLam = false;        // token mode: lambda standing for a delayed computation
  std::vector<RBranch> branches;
};

enum class RPatKind { Var, Pair, Con };

struct RPattern {
  RPatKind kind;
  std::string name;
  std::vector<RPatternPtr> args;
  // Token mode: size binders with no value component (constructor depth
  // variables, existential witnesses) bind the unit token.
  std::vector<std::string> unitBinds;
};

struct RTClause {
  std::vector<RPatternPtr> params;
  RExprPtr body;
};

struct RTFun {
  std::string name;
  size_t arity = 0;
  std::vector<RTClause> clauses;
  std::vector<ArgKind> paramKinds;  // token mode: kinds of all params
};

struct RTDef {
  bool isFun = false;
  RTFun fun;
  RExprPtr letBody;
};

struct RTProgram {
  std::map<std::string, RTDef> defs;
  std::map<std::string, size_t> ctorArity;  // field count per constructor
};

// Erases a checked signature into the runtime language. With
// `keepTokens`, sizes stay behind as inert unit tokens and size
// abstraction/application stay ordinary lambdas/applications; otherwise
// size abstraction becomes an explicit thunk and size application a force.
RTProgram eraseProgram(const Signature& sig, bool keepTokens);
RExprPtr erase(const CorePtr& e, const Signature& sig, bool keepTokens);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;

struct EnvNode {
  EnvPtr parent;
  std::string name;
  ValuePtr value;
};

enum class VKind { Closure, Thunk, Pair, Con, Unit, Fun };

struct Value {
  VKind kind;
  // Closure / Thunk
  EnvPtr env;
  RExprPtr body;
  std::string param;
  bool sizeClosure = false;
  std::shared_ptr<std::optional<ValuePtr>> memo;  // Thunk: forced at most once
  // Pair
  ValuePtr first, second;
  // Con / Fun
  std::string name;
  std::vector<ValuePtr> args;
  size_t fieldArity = 0;
  const RTFun* fun = nullptr;
};

struct FuelExhausted {
  int64_t budget;
};

struct EvalError {
  std::string message;
};

class Evaluator {
public:
  Evaluator(const RTProgram& prog, int64_t fuel) : prog_(prog), fuel_(fuel), budget_(fuel) {}

  ValuePtr evalDef(const std::string& name);
  ValuePtr eval(const EnvPtr& env, const RExprPtr& e);
  ValuePtr apply(const ValuePtr& f, const ValuePtr& a);
  ValuePtr force(const ValuePtr& v);
  // True when observation can make progress on v by forcing.
  bool forceable(const ValuePtr& v) const;

  int64_t fuelUsed() const { return budget_ - fuel_; }

private:
  const RTProgram& prog_;
  int64_t fuel_;
  int64_t budget_;
  std::map<std::string, ValuePtr> defCache_;

  void spend();
  ValuePtr applyClauses(const RTFun& fun, const std::vector<ValuePtr>& args);
  bool match(const RPatternPtr& p, const ValuePtr& v, EnvPtr& env);
};

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

struct ObservationTree {
  enum class Kind { Con, Pair, Thunk, Fun, Unit };
  Kind kind;
  std::string name;  // Con
  std::vector<ObservationTree> kids;

  bool operator==(const ObservationTree& o) const;
};

// Forces thunks up to `depth` times along each path and renders the value
// as a finite tree. Total for checked programs.
ObservationTree observe(Evaluator& ev, const ValuePtr& v, uint32_t depth);

// Constructor syntax; zero/succ towers render as decimal numerals.
std::string renderObservation(const ObservationTree& t);
// One stream element per line for pair-chains, single line otherwise.
std::vector<std::string> observationLines(const ObservationTree& t);

// Reads a fully observed tree back into a core term (constructors and
// pairs only).
std::optional<CorePtr> readbackObservation(const ObservationTree& t);

constexpr int64_t kDefaultFuel = 10'000'000;

} // namespace sizedlang
