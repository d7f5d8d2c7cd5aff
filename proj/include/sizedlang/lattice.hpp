#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sizedlang {

// Brute-force semantics of the iteration schemes over finite powerset
// lattices. Subsets are bitmasks over a universe of at most 16 elements.

using Subset = uint32_t;

struct FinUniverse {
  size_t n = 0;
  std::vector<std::string> labels;

  static FinUniverse lists(size_t maxLen);  // len0 .. len(maxLen)
  static FinUniverse abstract(size_t n);    // e0 .. e(n-1)
  Subset full() const { return n >= 32 ? ~0u : ((1u << n) - 1); }
  std::string show(Subset s) const;
};

enum class OpKind { Table, Const, Id, Union, Inter, Complement, Compose, ListF };

struct SetOperator {
  OpKind kind = OpKind::Id;
  Subset constant = 0;            // Const
  std::vector<Subset> table;      // Table
  std::shared_ptr<SetOperator> f, g;
  bool listHead = true;           // ListF: head set nonempty

  static SetOperator mkConst(Subset s);
  static SetOperator mkId();
  static SetOperator mkUnion(SetOperator a, SetOperator b);
  static SetOperator mkInter(SetOperator a, SetOperator b);
  static SetOperator mkComplement(SetOperator a);
  static SetOperator mkCompose(SetOperator a, SetOperator b);
  static SetOperator mkListF(bool headNonEmpty = true);
  static SetOperator mkTable(std::vector<Subset> t);

  std::string describe() const;
};

Subset applyOp(const SetOperator& op, const FinUniverse& u, Subset x);

enum class Scheme { ConventionalMu, ConventionalNu, InflationaryMu, DeflationaryNu, BarMu };

struct Chain {
  Scheme scheme;
  std::vector<Subset> iterates;  // truncated one step past stationarity
  std::optional<size_t> closureIndex;
  bool nonStationary = false;

  // Chain value at an arbitrary index, extending the stationary tail.
  Subset at(size_t i) const {
    return i < iterates.size() ? iterates[i] : iterates.back();
  }
};

Chain iterateConventional(const SetOperator& op, const FinUniverse& u, bool nu);
Chain iterateInflationary(const SetOperator& op, const FinUniverse& u);
Chain iterateDeflationary(const SetOperator& op, const FinUniverse& u);
Chain iterateBarMu(const SetOperator& op, const FinUniverse& u);

// Exhaustive check over all comparable pairs; universe size <= 10.
bool isMonotone(const SetOperator& op, const FinUniverse& u);

struct IdentityReport {
  bool ascending = false;        // inflationary chain ascends
  bool descending = false;       // deflationary chain descends
  bool preFixedAtClosure = false;
  bool postFixedAtClosure = false;
  bool monotoneChecked = false;
  bool monotone = false;
  bool inflEqConventional = true;
  bool deflEqConventional = true;
  bool barMuIsShiftedMu = true;
  bool closureIsLfp = true;
  bool closureIsGfp = true;
  std::string failure;  // human-readable counterexample, empty when ok

  bool ok() const {
    bool base = ascending && descending && preFixedAtClosure && postFixedAtClosure;
    if (!monotoneChecked || !monotone) return base;
    return base && inflEqConventional && deflEqConventional && barMuIsShiftedMu &&
           closureIsLfp && closureIsGfp;
  }
};

IdentityReport checkIdentities(const SetOperator& op, const FinUniverse& u);

SetOperator randomOperator(std::mt19937_64& rng, const FinUniverse& u, int maxDepth = 4);

struct OracleOptions {
  size_t maxUniverse = 6;
  uint64_t trials = 1000;
  uint64_t seed = 42;
};

struct OracleOutcome {
  bool ok = true;
  uint64_t ran = 0;
  std::string report;
};

OracleOutcome runOracle(const OracleOptions& opts);

} // namespace sizedlang
