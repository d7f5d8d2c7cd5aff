#include "sizedlang/lattice.hpp"

#include <sstream>

namespace sizedlang {

FinUniverse FinUniverse::lists(size_t maxLen) {
  FinUniverse u;
  u.n = maxLen + 1;
  for (size_t i = 0; i <= maxLen; ++i) u.labels.push_back("len" + std::to_string(i));
  return u;
}

FinUniverse FinUniverse::abstract(size_t n) {
  FinUniverse u;
  u.n = n;
  for (size_t i = 0; i < n; ++i) u.labels.push_back("e" + std::to_string(i));
  return u;
}

std::string FinUniverse::show(Subset s) const {
  std::string out = "{";
  bool first = true;
  for (size_t i = 0; i < n; ++i) {
    if (!(s & (1u << i))) continue;
    if (!first) out += ",";
    first = false;
    out += i < labels.size() ? labels[i] : std::to_string(i);
  }
  return out + "}";
}

SetOperator SetOperator::mkConst(Subset s) {
  SetOperator o;
  o.kind = OpKind::Const;
  o.constant = s;
  return o;
}
SetOperator SetOperator::mkId() { return {}; }
SetOperator SetOperator::mkUnion(SetOperator a, SetOperator b) {
  SetOperator o;
  o.kind = OpKind::Union;
  o.f = std::make_shared<SetOperator>(std::move(a));
  o.g = std::make_shared<SetOperator>(std::move(b));
  return o;
}
SetOperator SetOperator::mkInter(SetOperator a, SetOperator b) {
  SetOperator o = mkUnion(std::move(a), std::move(b));
  o.kind = OpKind::Inter;
  return o;
}
SetOperator SetOperator::mkComplement(SetOperator a) {
  SetOperator o;
  o.kind = OpKind::Complement;
  o.f = std::make_shared<SetOperator>(std::move(a));
  return o;
}
SetOperator SetOperator::mkCompose(SetOperator a, SetOperator b) {
  SetOperator o = mkUnion(std::move(a), std::move(b));
  o.kind = OpKind::Compose;
  return o;
}
SetOperator SetOperator::mkListF(bool headNonEmpty) {
  SetOperator o;
  o.kind = OpKind::ListF;
  o.listHead = headNonEmpty;
  return o;
}
SetOperator SetOperator::mkTable(std::vector<Subset> t) {
  SetOperator o;
  o.kind = OpKind::Table;
  o.table = std::move(t);
  return o;
}

std::string SetOperator::describe() const {
  switch (kind) {
    case OpKind::Table: return "table";
    case OpKind::Const: return "const(" + std::to_string(constant) + ")";
    case OpKind::Id: return "id";
    case OpKind::Union: return "union(" + f->describe() + "," + g->describe() + ")";
    case OpKind::Inter: return "inter(" + f->describe() + "," + g->describe() + ")";
    case OpKind::Complement: return "compl(" + f->describe() + ")";
    case OpKind::Compose: return "compose(" + f->describe() + "," + g->describe() + ")";
    case OpKind::ListF: return listHead ? "listF" : "listF(empty-head)";
  }
  return "?";
}

Subset applyOp(const SetOperator& op, const FinUniverse& u, Subset x) {
  Subset full = u.full();
  x &= full;
  switch (op.kind) {
    case OpKind::Table:
      return op.table[x] & full;
    case OpKind::Const:
      return op.constant & full;
    case OpKind::Id:
      return x;
    case OpKind::Union:
      return applyOp(*op.f, u, x) | applyOp(*op.g, u, x);
    case OpKind::Inter:
      return applyOp(*op.f, u, x) & applyOp(*op.g, u, x);
    case OpKind::Complement:
      return full & ~applyOp(*op.f, u, x);
    case OpKind::Compose:
      return applyOp(*op.f, u, applyOp(*op.g, u, x));
    case OpKind::ListF: {
      // F(X) = {len0} u {len(m+1) | lenm in X}; the element set is
      // collapsed to one abstract element carried by listHead.
      Subset r = 1u;  // len0, the empty list
      if (op.listHead) r |= (x << 1);
      return r & full;
    }
  }
  return 0;
}

namespace {

Chain iterate(Scheme scheme, const SetOperator& op, const FinUniverse& u) {
  Chain c;
  c.scheme = scheme;
  Subset full = u.full();
  size_t guard = u.n >= 20 ? 1u << 20 : (1u << u.n);
  Subset x = (scheme == Scheme::ConventionalNu || scheme == Scheme::DeflationaryNu) ? full : 0;
  Subset acc = 0;  // BarMu: union of iterates so far
  if (scheme == Scheme::BarMu) x = applyOp(op, u, 0);
  c.iterates.push_back(x);
  for (size_t step = 0; step <= guard; ++step) {
    Subset next;
    switch (scheme) {
      case Scheme::ConventionalMu:
      case Scheme::ConventionalNu:
        next = applyOp(op, u, x);
        break;
      case Scheme::InflationaryMu:
        next = x | applyOp(op, u, x);
        break;
      case Scheme::DeflationaryNu:
        next = x & applyOp(op, u, x);
        break;
      case Scheme::BarMu:
        acc |= x;
        next = applyOp(op, u, acc);
        break;
    }
    c.iterates.push_back(next);
    if (next == x) {
      c.closureIndex = c.iterates.size() - 2;
      return c;
    }
    x = next;
  }
  c.nonStationary = true;
  return c;
}

} // namespace

Chain iterateConventional(const SetOperator& op, const FinUniverse& u, bool nu) {
  return iterate(nu ? Scheme::ConventionalNu : Scheme::ConventionalMu, op, u);
}
Chain iterateInflationary(const SetOperator& op, const FinUniverse& u) {
  return iterate(Scheme::InflationaryMu, op, u);
}
Chain iterateDeflationary(const SetOperator& op, const FinUniverse& u) {
  return iterate(Scheme::DeflationaryNu, op, u);
}
Chain iterateBarMu(const SetOperator& op, const FinUniverse& u) {
  return iterate(Scheme::BarMu, op, u);
}

bool isMonotone(const SetOperator& op, const FinUniverse& u) {
  Subset full = u.full();
  // every pair S <= T, via submask enumeration of each complement
  for (Subset s = 0;; ++s) {
    Subset comp = full & ~s;
    Subset add = comp;
    for (;;) {
      Subset t = s | add;
      if ((applyOp(op, u, s) & ~applyOp(op, u, t)) != 0) return false;
      if (add == 0) break;
      add = (add - 1) & comp;
    }
    if (s == full) break;
  }
  return true;
}

IdentityReport checkIdentities(const SetOperator& op, const FinUniverse& u) {
  IdentityReport rep;
  std::ostringstream fail;
  Chain infl = iterateInflationary(op, u);
  Chain defl = iterateDeflationary(op, u);

  rep.ascending = true;
  for (size_t i = 0; i + 1 < infl.iterates.size(); ++i)
    if ((infl.iterates[i] & ~infl.iterates[i + 1]) != 0) {
      rep.ascending = false;
      fail << "inflationary chain not ascending at " << i << ": " << u.show(infl.iterates[i])
           << " vs " << u.show(infl.iterates[i + 1]) << "; ";
    }
  rep.descending = true;
  for (size_t i = 0; i + 1 < defl.iterates.size(); ++i)
    if ((defl.iterates[i + 1] & ~defl.iterates[i]) != 0) {
      rep.descending = false;
      fail << "deflationary chain not descending at " << i << "; ";
    }

  Subset muClosure = infl.iterates.back();
  Subset nuClosure = defl.iterates.back();
  rep.preFixedAtClosure = (applyOp(op, u, muClosure) & ~muClosure) == 0;
  if (!rep.preFixedAtClosure)
    fail << "F" << u.show(muClosure) << " exceeds the inflationary closure; ";
  rep.postFixedAtClosure = (nuClosure & ~applyOp(op, u, nuClosure)) == 0;
  if (!rep.postFixedAtClosure)
    fail << "deflationary closure " << u.show(nuClosure) << " exceeds F of it; ";

  if (u.n <= 10) {
    rep.monotoneChecked = true;
    rep.monotone = isMonotone(op, u);
  }

  if (rep.monotoneChecked && rep.monotone) {
    Chain mu = iterateConventional(op, u, false);
    Chain nu = iterateConventional(op, u, true);
    Chain bar = iterateBarMu(op, u);
    size_t len = std::max(infl.iterates.size(), mu.iterates.size()) + 1;
    for (size_t i = 0; i < len; ++i) {
      if (infl.at(i) != mu.at(i)) {
        rep.inflEqConventional = false;
        fail << "inflationary iterate " << i << " = " << u.show(infl.at(i))
             << " differs from conventional " << u.show(mu.at(i)) << "; ";
        break;
      }
    }
    len = std::max(defl.iterates.size(), nu.iterates.size()) + 1;
    for (size_t i = 0; i < len; ++i) {
      if (defl.at(i) != nu.at(i)) {
        rep.deflEqConventional = false;
        fail << "deflationary iterate " << i << " differs from conventional; ";
        break;
      }
    }
    len = std::max(bar.iterates.size() + 1, mu.iterates.size()) + 1;
    for (size_t i = 0; i < len; ++i) {
      if (bar.at(i) != mu.at(i + 1)) {
        rep.barMuIsShiftedMu = false;
        fail << "bar-mu iterate " << i << " = " << u.show(bar.at(i))
             << " differs from conventional iterate " << i + 1 << " = " << u.show(mu.at(i + 1))
             << "; ";
        break;
      }
    }
    // genuine least/greatest fixed points by scanning all subsets
    Subset full = u.full();
    Subset lfp = full;
    Subset gfp = 0;
    for (Subset s = 0;; ++s) {
      Subset fs = applyOp(op, u, s);
      if ((fs & ~s) == 0) lfp &= s;  // pre-fixed point
      if ((s & ~fs) == 0) gfp |= s;  // post-fixed point
      if (s == full) break;
    }
    rep.closureIsLfp = muClosure == lfp;
    if (!rep.closureIsLfp)
      fail << "inflationary closure " << u.show(muClosure) << " is not the lfp " << u.show(lfp)
           << "; ";
    rep.closureIsGfp = nuClosure == gfp;
    if (!rep.closureIsGfp)
      fail << "deflationary closure " << u.show(nuClosure) << " is not the gfp " << u.show(gfp)
           << "; ";
  }

  rep.failure = fail.str();
  return rep;
}

SetOperator randomOperator(std::mt19937_64& rng, const FinUniverse& u, int maxDepth) {
  auto coin = [&](int n) { return static_cast<int>(rng() % n); };
  if (maxDepth <= 0) {
    if (coin(2) == 0) return SetOperator::mkId();
    return SetOperator::mkConst(static_cast<Subset>(rng()) & u.full());
  }
  switch (coin(6)) {
    case 0: return SetOperator::mkId();
    case 1: return SetOperator::mkConst(static_cast<Subset>(rng()) & u.full());
    case 2:
      return SetOperator::mkUnion(randomOperator(rng, u, maxDepth - 1),
                                  randomOperator(rng, u, maxDepth - 1));
    case 3:
      return SetOperator::mkInter(randomOperator(rng, u, maxDepth - 1),
                                  randomOperator(rng, u, maxDepth - 1));
    case 4:
      return SetOperator::mkComplement(randomOperator(rng, u, maxDepth - 1));
    default:
      return SetOperator::mkCompose(randomOperator(rng, u, maxDepth - 1),
                                    randomOperator(rng, u, maxDepth - 1));
  }
}

OracleOutcome runOracle(const OracleOptions& opts) {
  OracleOutcome out;
  std::ostringstream rep;
  rep << "iteration oracle: seed=" << opts.seed << " universes=1.." << opts.maxUniverse
      << " trials=" << opts.trials << "\n";

  auto runOne = [&](const SetOperator& op, const FinUniverse& u, const std::string& name) {
    IdentityReport r = checkIdentities(op, u);
    ++out.ran;
    if (!r.ok()) {
      out.ok = false;
      rep << "FAIL " << name << " over n=" << u.n << ": " << r.failure << "\n";
    }
    return r;
  };

  for (size_t n = 1; n <= opts.maxUniverse; ++n) {
    FinUniverse lists = FinUniverse::lists(n - 1);
    runOne(SetOperator::mkListF(true), lists, "listF");
    runOne(SetOperator::mkListF(false), lists, "listF-empty-head");
    FinUniverse u = FinUniverse::abstract(n);
    runOne(SetOperator::mkId(), u, "id");
    runOne(SetOperator::mkConst(u.full() & 0x5), u, "const");
    runOne(SetOperator::mkComplement(SetOperator::mkId()), u, "complement(id)");
  }

  std::mt19937_64 rng(opts.seed);
  uint64_t failures = 0;
  for (uint64_t t = 0; t < opts.trials; ++t) {
    size_t n = 1 + static_cast<size_t>(rng() % opts.maxUniverse);
    FinUniverse u = FinUniverse::abstract(n);
    SetOperator op = randomOperator(rng, u);
    IdentityReport r = checkIdentities(op, u);
    ++out.ran;
    if (!r.ok()) {
      ++failures;
      out.ok = false;
      if (failures <= 5)
        rep << "FAIL trial " << t << " op=" << op.describe() << " n=" << n << ": " << r.failure
            << "\n";
    }
  }
  rep << "checked " << out.ran << " operators, " << failures << " failures\n";
  out.report = rep.str();
  return out;
}

} // namespace sizedlang
