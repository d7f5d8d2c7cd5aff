#include "sizedlang/typecheck.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "sizedlang/polarity.hpp"
#include "sizedlang/size_order.hpp"

namespace sizedlang {

namespace {

CorePtr setSort() { return mkCore(CKind::SetSort); }
CorePtr sizeSort() { return mkCore(CKind::SizeSort); }

CorePtr varRef(const std::string& name, Span sp = {}) {
  auto v = mkCore(CKind::Var, sp);
  v->name = name;
  return v;
}

bool isConHead(const CorePtr& e) {
  return e->kind == CKind::Con ||
         (e->kind == CKind::App && e->kids[0]->kind == CKind::Con);
}

std::optional<std::string> defAppHead(const CorePtr& e) {
  if (e->kind == CKind::Def) return e->name;
  if (e->kind == CKind::App && e->kids[0]->kind == CKind::Def) return e->kids[0]->name;
  return std::nullopt;
}

std::vector<CorePtr> appArgs(const CorePtr& e) {
  if (e->kind == CKind::App) return {e->kids.begin() + 1, e->kids.end()};
  return {};
}

} // namespace

void Checker::fail(ErrorCode code, Span sp, std::string msg) const {
  throw TypeErrorEx{{code, sp, std::move(msg)}};
}

CheckResult checkProgram(Signature scoped, CheckOptions opts) {
  Checker checker(opts);
  return checker.run(std::move(scoped));
}

CheckResult Checker::run(Signature scoped) {
  CheckResult res;
  for (auto& d : scoped) {
    sig_.push_back(std::move(d));
    unfoldBudget_ = opts_.unfoldFuel;
    instantiable_.clear();
    solutions_.clear();
    try {
      checkDecl(sig_.back());
    } catch (const TypeErrorEx& e) {
      res.errors.push_back(e.diag);
    }
    current_ = nullptr;
  }
  res.sig = sig_;
  return res;
}

void Checker::checkDecl(Declaration& d) {
  switch (d.kind) {
    case DeclKind::Data: checkDataDecl(d); break;
    case DeclKind::Fun: checkFunDecl(d); break;
    case DeclKind::Let: checkLetDecl(d); break;
    case DeclKind::PatternSyn: break;  // validated during scope checking
  }
}

void Checker::checkDataDecl(Declaration& d) {
  ConstraintCtx ctx;
  CorePtr t = d.type;
  while (t->kind == CKind::Pi && !t->name.empty()) {
    checkIsType(ctx, t->kids[0]);
    ctx.bind(t->name, t->kids[0]);
    t = t->kids[1];
  }
  for (const auto& ctor : d.ctors) {
    auto mark = ctx.mark();
    ctx.bind(ctor.sizeBinder, sizeSort());
    for (const auto& field : ctor.fieldTypes) checkIsType(ctx, field);
    ctx.rewind(mark);
  }
  auto polErrs = checkDataPolarities(d, sig_);
  if (!polErrs.empty()) throw TypeErrorEx{polErrs.front()};
}

void Checker::checkFunDecl(Declaration& d) {
  ConstraintCtx ctx;
  checkIsType(ctx, d.type);

  // Explicit measures must mention Size-typed telescope binders only.
  CorePtr cod;
  auto spine = typeSpine(d.type, &cod);
  for (const auto& comp : d.measure) {
    if (comp.infty) continue;
    bool found = false;
    for (const auto& b : spine)
      if (b.name == comp.var && b.isSize) found = true;
    if (!found)
      fail(ErrorCode::UnboundSizeInMeasure, d.span,
           "measure component '" + printSize(comp) + "' does not name a Size binder of '" +
               d.name + "'");
  }

  if (!d.clauses.empty()) {
    size_t arity = d.clauses.front().patterns.size();
    for (const auto& cl : d.clauses)
      if (cl.patterns.size() != arity)
        fail(ErrorCode::Mismatch, cl.span,
             "clauses of '" + d.name + "' must bind the same number of arguments");
  }

  current_ = &d;
  std::vector<Diag> clauseErrors;
  for (auto& clause : d.clauses) {
    try {
      checkClause(d, clause);
    } catch (const TypeErrorEx& e) {
      clauseErrors.push_back(e.diag);
    }
  }
  current_ = nullptr;
  if (!clauseErrors.empty()) throw TypeErrorEx{clauseErrors.front()};

  checkClauseCoverage(d);

  if (d.isTypeLevel) {
    auto polErrs = checkTypeDefPolarities(d, sig_);
    if (!polErrs.empty()) throw TypeErrorEx{polErrs.front()};
  }
}

void Checker::checkLetDecl(Declaration& d) {
  ConstraintCtx ctx;
  if (d.annotated) {
    checkIsType(ctx, d.type);
    check(ctx, d.body, d.type);
  } else {
    d.type = infer(ctx, d.body);
  }
}

// ---------------------------------------------------------------------------
// Clauses
// ---------------------------------------------------------------------------

void Checker::checkClause(Declaration& d, Clause& clause) {
  ConstraintCtx ctx;
  CorePtr type = d.type;
  std::map<std::string, SizeExpr> sizeArgs;  // telescope binder -> clause size
  clause.paramKinds.clear();
  bool seenSizePattern = false;

  for (const auto& p : clause.patterns) {
    type = whnfType(ctx, type);
    if (type->kind == CKind::Pi) {
      const CorePtr& dom = type->kids[0];
      const CorePtr& cod = type->kids[1];
      ArgKind kind = type->erased ? ArgKind::Erased : ArgKind::Value;
      if (seenSizePattern && p->kind != CPatKind::Var)
        fail(ErrorCode::Mismatch, p->span,
             "patterns after a bounded size argument must be variables");
      if (p->kind != CPatKind::Var) {
        if (type->erased)
          fail(ErrorCode::Mismatch, p->span, "cannot match on an erased argument");
        std::set<std::string> codFvs;
        freeVars(cod, codFvs);
        if (!type->name.empty() && codFvs.count(type->name))
          fail(ErrorCode::Mismatch, p->span,
               "matching on an argument later types depend on is not supported");
        checkPattern(ctx, p, dom);
        type = cod;
      } else {
        checkPattern(ctx, p, dom);
        Subst s;
        bool isSize = whnfType(ctx, dom)->kind == CKind::SizeSort;
        if (!type->name.empty()) {
          if (isSize) {
            s.sizes[type->name] = SizeExpr::mkVar(p->name);
            sizeArgs[type->name] = SizeExpr::mkVar(p->name);
          } else {
            s.terms[type->name] = varRef(p->name, p->span);
          }
        }
        type = substitute(cod, s);
      }
      clause.paramKinds.push_back(kind);
      continue;
    }
    if (type->kind == CKind::BoundedAll) {
      if (p->kind != CPatKind::Var)
        fail(ErrorCode::Mismatch, p->span, "a bounded size argument binds a variable");
      ctx.bind(p->name, sizeSort());
      ctx.hypothesize(p->name, type->size);
      sizeArgs[type->name] = SizeExpr::mkVar(p->name);
      Subst s;
      s.sizes[type->name] = SizeExpr::mkVar(p->name);
      type = substitute(type->kids[0], s);
      clause.paramKinds.push_back(ArgKind::Size);
      seenSizePattern = true;
      continue;
    }
    fail(ErrorCode::Mismatch, p->span,
         "clause of '" + d.name + "' has more arguments than its signature provides");
  }

  measureAtEntry_.clear();
  for (const auto& comp : d.measure) {
    if (comp.infty) {
      measureAtEntry_.push_back(comp);
      continue;
    }
    auto it = sizeArgs.find(comp.var);
    if (it == sizeArgs.end())
      fail(ErrorCode::MeasureNotDecreasing, clause.span,
           "clause does not bind measure variable '" + comp.var + "'");
    measureAtEntry_.push_back(it->second.succ(comp.offset));
  }

  check(ctx, clause.body, type);
}

void Checker::checkClauseCoverage(const Declaration& d) {
  if (d.clauses.empty()) return;
  ConstraintCtx ctx;
  CorePtr type = d.type;
  std::vector<CorePtr> cols;
  size_t arity = d.clauses.front().patterns.size();
  for (size_t k = 0; k < arity; ++k) {
    type = whnfType(ctx, type);
    if (type->kind == CKind::Pi) {
      cols.push_back(type->kids[0]);
      if (!type->name.empty()) {
        std::string fresh = freshName(type->name);
        bool isSize = type->kids[0]->kind == CKind::SizeSort;
        ctx.bind(fresh, type->kids[0]);
        Subst s;
        if (isSize)
          s.sizes[type->name] = SizeExpr::mkVar(fresh);
        else
          s.terms[type->name] = varRef(fresh);
        type = substitute(type->kids[1], s);
      } else {
        type = type->kids[1];
      }
      continue;
    }
    if (type->kind == CKind::BoundedAll) {
      cols.push_back(sizeSort());
      std::string fresh = freshName(type->name);
      ctx.bind(fresh, sizeSort());
      ctx.hypothesize(fresh, type->size);
      Subst s;
      s.sizes[type->name] = SizeExpr::mkVar(fresh);
      type = substitute(type->kids[0], s);
      continue;
    }
    return;  // clause checking already reported the arity problem
  }
  std::vector<std::vector<CorePatternPtr>> rows;
  for (const auto& cl : d.clauses) rows.push_back(cl.patterns);
  requireCoverage(ctx, rows, cols, d.span, ("the clauses of '" + d.name + "'").c_str());
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

void Checker::checkPattern(ConstraintCtx& ctx, const CorePatternPtr& p, const CorePtr& type) {
  CorePtr tw = whnfType(ctx, type);
  switch (p->kind) {
    case CPatKind::Var:
      p->binderKind = tw->kind == CKind::SizeSort ? ArgKind::Size : ArgKind::Value;
      ctx.bind(p->name, type);
      return;
    case CPatKind::Pair: {
      if (tw->kind == CKind::Prod) {
        checkPattern(ctx, p->args[0], tw->kids[0]);
        checkPattern(ctx, p->args[1], tw->kids[1]);
        return;
      }
      if (tw->kind == CKind::BoundedEx) {
        if (p->args[0]->kind != CPatKind::Var)
          fail(ErrorCode::Mismatch, p->args[0]->span,
               "the first component of an existential pattern binds a size");
        const std::string& j = p->args[0]->name;
        ctx.bind(j, sizeSort());
        ctx.hypothesize(j, tw->size);
        p->exPattern = true;
        p->args[0]->binderKind = ArgKind::Size;
        Subst s;
        s.sizes[tw->name] = SizeExpr::mkVar(j);
        checkPattern(ctx, p->args[1], substitute(tw->kids[0], s));
        return;
      }
      fail(ErrorCode::Mismatch, p->span,
           "pair pattern against type " + printCore(type));
    }
    case CPatKind::Con: {
      auto da = asDataApp(ctx, tw);
      if (!da)
        fail(ErrorCode::Mismatch, p->span,
             "constructor pattern against non-data type " + printCore(type));
      size_t ctorIdx = 0;
      const Declaration* owner = lookupCtor(sig_, p->name, &ctorIdx);
      if (!owner || owner->name != da->data->name)
        fail(ErrorCode::Mismatch, p->span,
             "constructor '" + p->name + "' does not belong to data type '" +
                 da->data->name + "'");
      const DataCtor& ctor = owner->ctors[ctorIdx];
      if (p->args.size() != ctor.fieldTypes.size() + 1)
        fail(ErrorCode::Mismatch, p->span, "constructor pattern arity mismatch");
      const std::string& j = p->args[0]->name;
      ctx.bind(j, sizeSort());
      ctx.hypothesize(j, da->depth);
      p->args[0]->binderKind = ArgKind::Size;
      Subst s;
      CorePtr dt = da->data->type;
      size_t pi = 0;
      while (dt->kind == CKind::Pi && !dt->name.empty() && pi < da->params.size()) {
        if (auto sz = toSizeExpr(da->params[pi]))
          s.sizes[dt->name] = *sz;
        else
          s.terms[dt->name] = da->params[pi];
        dt = dt->kids[1];
        ++pi;
      }
      s.sizes[ctor.sizeBinder] = SizeExpr::mkVar(j);
      for (size_t k = 0; k < ctor.fieldTypes.size(); ++k)
        checkPattern(ctx, p->args[k + 1], substitute(ctor.fieldTypes[k], s));
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

void Checker::checkIsType(ConstraintCtx& ctx, const CorePtr& e) {
  if (e->kind == CKind::SizeSort) return;  // valid as a binder domain
  CorePtr s = whnfType(ctx, infer(ctx, e));
  if (s->kind != CKind::SetSort)
    fail(ErrorCode::Mismatch, e->span,
         "expected a type, but " + printCore(e) + " has type " + printCore(s));
}

CorePtr Checker::whnfType(ConstraintCtx& ctx, CorePtr t) {
  (void)ctx;
  auto spend = [&] {
    if (--unfoldBudget_ < 0)
      fail(ErrorCode::Internal, t ? t->span : Span{},
           "type-level unfolding exceeded its fuel; definition unlikely to terminate");
  };
  for (;;) {
    if (t->kind == CKind::Def) {
      const Declaration* d = lookupDecl(sig_, t->name);
      if (d && d->kind == DeclKind::Let && d->body) {
        spend();
        t = d->body;
        continue;
      }
      return t;
    }
    if (t->kind == CKind::App) {
      const CorePtr& head = t->kids[0];
      if (head->kind == CKind::Lam) {
        spend();
        Subst s;
        if (auto sz = toSizeExpr(t->kids[1]))
          s.sizes[head->name] = *sz;
        else
          s.terms[head->name] = t->kids[1];
        CorePtr reduced = substitute(head->kids[0], s);
        if (t->kids.size() > 2) {
          auto app = mkCore(CKind::App, t->span);
          app->kids.push_back(reduced);
          app->kids.insert(app->kids.end(), t->kids.begin() + 2, t->kids.end());
          t = app;
        } else {
          t = reduced;
        }
        continue;
      }
      if (head->kind == CKind::Def) {
        const Declaration* d = lookupDecl(sig_, head->name);
        if (d && d->kind == DeclKind::Let && d->body) {
          spend();
          auto app = mkCore(CKind::App, t->span);
          app->kids = t->kids;
          app->kids[0] = d->body;
          t = app;
          continue;
        }
        if (d && d->kind == DeclKind::Fun && d->isTypeLevel && d->clauses.size() == 1) {
          const Clause& cl = d->clauses.front();
          if (cl.patterns.size() == t->kids.size() - 1) {
            bool allVars = true;
            for (const auto& p : cl.patterns) allVars = allVars && p->kind == CPatKind::Var;
            if (allVars) {
              spend();
              Subst s;
              for (size_t i = 0; i < cl.patterns.size(); ++i) {
                const CorePtr& a = t->kids[i + 1];
                if (auto sz = toSizeExpr(a))
                  s.sizes[cl.patterns[i]->name] = resolveSize(*sz);
                else
                  s.terms[cl.patterns[i]->name] = a;
              }
              t = substitute(cl.body, s);
              continue;
            }
          }
        }
      }
      return t;
    }
    if (t->kind == CKind::SizeVal) {
      SizeExpr r = resolveSize(t->size);
      if (!(r == t->size)) {
        t = sizeToCore(r, t->span);
        continue;
      }
      return t;
    }
    return t;
  }
}

std::optional<Checker::DataApp> Checker::asDataApp(ConstraintCtx& ctx, const CorePtr& t) {
  CorePtr tw = whnfType(ctx, t);
  if (tw->kind != CKind::App || tw->kids[0]->kind != CKind::Def) return std::nullopt;
  const Declaration* d = lookupDecl(sig_, tw->kids[0]->name);
  if (!d || d->kind != DeclKind::Data) return std::nullopt;
  size_t nparams = d->paramPolarities.size();  // params + depth index
  if (tw->kids.size() != nparams + 1) return std::nullopt;
  DataApp da;
  da.data = d;
  for (size_t i = 1; i + 1 < tw->kids.size(); ++i) da.params.push_back(tw->kids[i]);
  auto depth = toSizeExpr(tw->kids.back());
  if (!depth) return std::nullopt;
  da.depth = resolveSize(*depth);
  return da;
}

// ---------------------------------------------------------------------------
// Size helpers
// ---------------------------------------------------------------------------

SizeExpr Checker::resolveSize(SizeExpr s) const {
  while (!s.infty) {
    auto it = solutions_.find(s.var);
    if (it == solutions_.end()) break;
    s = it->second.succ(s.offset);
  }
  return s;
}

bool Checker::isInstantiable(const SizeExpr& s) const {
  return !s.infty && instantiable_.count(s.var) && !solutions_.count(s.var);
}

bool Checker::leqS(ConstraintCtx& ctx, SizeExpr a, SizeExpr b) {
  a = resolveSize(a);
  b = resolveSize(b);
  if (leq(ctx, a, b)) return true;
  if (isInstantiable(b)) {
    // minimal solution of  a <= ? + b.offset
    SizeExpr sol = a.infty ? SizeExpr::mkInfty()
                           : SizeExpr::mkVar(a.var, a.offset > b.offset ? a.offset - b.offset : 0);
    solutions_[b.var] = sol;
    return leq(ctx, a, resolveSize(b));
  }
  if (isInstantiable(a)) {
    // maximal solution of  ? + a.offset <= b
    SizeExpr sol;
    if (b.infty)
      sol = SizeExpr::mkInfty();
    else
      sol = SizeExpr::mkVar(b.var, b.offset > a.offset ? b.offset - a.offset : 0);
    solutions_[a.var] = sol;
    return leq(ctx, resolveSize(a), b);
  }
  return false;
}

bool Checker::ltInstS(ConstraintCtx& ctx, SizeExpr a, SizeExpr b) {
  a = resolveSize(a);
  b = resolveSize(b);
  if (isInstantiable(a) || isInstantiable(b)) return leqS(ctx, a.succ(), b);
  return ltInst(ctx, a, b);
}

bool Checker::sizeEqS(ConstraintCtx& ctx, const SizeExpr& a, const SizeExpr& b) {
  return leqS(ctx, a, b) && leqS(ctx, b, a);
}

std::optional<SizeExpr> Checker::sizeOfExpr(ConstraintCtx& ctx, const CorePtr& e) {
  if (e->kind == CKind::SizeVal) return resolveSize(e->size);
  if (e->kind == CKind::Var) {
    const CorePtr* b = ctx.lookup(e->name);
    if (b && whnfType(ctx, *b)->kind == CKind::SizeSort) return SizeExpr::mkVar(e->name);
  }
  return std::nullopt;
}

SizeExpr Checker::solveCtorDepth(ConstraintCtx& ctx, const SizeExpr& depth, Span sp) {
  SizeExpr s = resolveSize(depth);
  if (isInstantiable(s)) {
    // Constructing at an as-yet-unknown depth: refine it to a successor.
    std::string kappa = freshName(s.var);
    instantiable_.insert(kappa);
    solutions_[s.var] = SizeExpr::mkVar(kappa, 1);
    return SizeExpr::mkVar(kappa, s.offset);
  }
  if (s.infty) return s;
  if (s.offset >= 1) return SizeExpr::mkVar(s.var, s.offset - 1);
  // Bare variable: look for a hypothesis-backed predecessor.
  std::optional<SizeExpr> best;
  for (const auto& h : ctx.sizeHypotheses) {
    SizeExpr cand = SizeExpr::mkVar(h.var);
    if (!leq(ctx, cand.succ(), s)) continue;
    if (!best || leq(ctx, *best, cand)) best = cand;
  }
  if (!best)
    fail(ErrorCode::Mismatch, sp,
         "cannot construct at depth " + printSize(s) +
             ", which is not known to be a successor");
  return *best;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

CorePtr Checker::infer(ConstraintCtx& ctx, const CorePtr& e) {
  switch (e->kind) {
    case CKind::Var: {
      const CorePtr* b = ctx.lookup(e->name);
      if (!b) fail(ErrorCode::Internal, e->span, "unbound variable '" + e->name + "'");
      return *b;
    }
    case CKind::Def: {
      if (current_ && e->name == current_->name)
        fail(ErrorCode::MeasureNotDecreasing, e->span,
             "recursive reference to '" + e->name +
                 "' must be applied to its size arguments");
      const Declaration* d = lookupDecl(sig_, e->name);
      if (!d || !d->type) fail(ErrorCode::Internal, e->span, "unknown definition '" + e->name + "'");
      return d->type;
    }
    case CKind::Con:
      return inferCtorApp(ctx, e);
    case CKind::App:
      return inferApp(ctx, e);
    case CKind::Lam:
      fail(ErrorCode::Mismatch, e->span, "cannot infer the type of a lambda");
    case CKind::Pair: {
      auto prod = mkCore(CKind::Prod, e->span);
      prod->kids = {infer(ctx, e->kids[0]), infer(ctx, e->kids[1])};
      return prod;
    }
    case CKind::Prod:
      checkIsType(ctx, e->kids[0]);
      checkIsType(ctx, e->kids[1]);
      return setSort();
    case CKind::Pi: {
      checkIsType(ctx, e->kids[0]);
      auto mark = ctx.mark();
      if (!e->name.empty()) ctx.bind(e->name, e->kids[0]);
      checkIsType(ctx, e->kids[1]);
      ctx.rewind(mark);
      return setSort();
    }
    case CKind::BoundedAll:
    case CKind::BoundedEx: {
      SizeExpr bound = resolveSize(e->size);
      if (!bound.infty) {
        const CorePtr* b = ctx.lookup(bound.var);
        if (!b || whnfType(ctx, *b)->kind != CKind::SizeSort)
          fail(ErrorCode::Mismatch, e->span,
               "bound '" + printSize(bound) + "' is not a size in scope");
      }
      auto mark = ctx.mark();
      ctx.bind(e->name, sizeSort());
      ctx.hypothesize(e->name, bound);
      checkIsType(ctx, e->kids[0]);
      ctx.rewind(mark);
      return setSort();
    }
    case CKind::Case:
      return checkCase(ctx, e, nullptr);
    case CKind::SizeVal: {
      SizeExpr s = resolveSize(e->size);
      if (!s.infty && !instantiable_.count(s.var)) {
        const CorePtr* b = ctx.lookup(s.var);
        if (!b || whnfType(ctx, *b)->kind != CKind::SizeSort)
          fail(ErrorCode::Mismatch, e->span,
               "'" + s.var + "' is not a size variable");
      }
      return sizeSort();
    }
    case CKind::SetSort:
    case CKind::SizeSort:
      return setSort();
  }
  fail(ErrorCode::Internal, e->span, "unhandled expression");
}

namespace {

// Index of the last telescope binder a recursive call must reach so that
// every measure component is instantiated.
int lastMeasureBinderIndex(const Declaration& d) {
  CorePtr cod;
  auto spine = typeSpine(d.type, &cod);
  int last = -1;
  for (const auto& comp : d.measure) {
    if (comp.infty) continue;
    for (size_t i = 0; i < spine.size(); ++i)
      if (spine[i].name == comp.var) last = std::max(last, static_cast<int>(i));
  }
  return last;
}

} // namespace

CorePtr Checker::inferApp(ConstraintCtx& ctx, const CorePtr& e) {
  const CorePtr& head = e->kids[0];
  if (head->kind == CKind::Con) return inferCtorApp(ctx, e);

  bool self = head->kind == CKind::Def && current_ && head->name == current_->name;
  CorePtr t;
  if (self) {
    t = current_->type;
  } else {
    t = infer(ctx, head);
  }

  int lastIdx = -1;
  bool measureDone = true;
  std::map<std::string, SizeExpr> sizesSeen;
  if (self) {
    lastIdx = lastMeasureBinderIndex(*current_);
    if (current_->measure.empty())
      fail(ErrorCode::MeasureNotDecreasing, e->span,
           "'" + current_->name + "' calls itself but has no termination measure");
    measureDone = false;
    if (lastIdx < 0) {
      // Measure without variable components can never decrease.
      fail(ErrorCode::MeasureNotDecreasing, e->span,
           "the measure of '" + current_->name + "' has no variable component to decrease");
    }
  }

  e->argKinds.assign(e->kids.size() - 1, ArgKind::Value);
  int binderIdx = 0;
  for (size_t ai = 1; ai < e->kids.size(); ++ai) {
    const CorePtr& arg = e->kids[ai];
    t = whnfType(ctx, t);
    if (t->kind == CKind::Pi) {
      const CorePtr& dom = t->kids[0];
      CorePtr cod = t->kids[1];
      e->argKinds[ai - 1] = t->erased ? ArgKind::Erased : ArgKind::Value;
      if (whnfType(ctx, dom)->kind == CKind::SizeSort) {
        auto u = sizeOfExpr(ctx, arg);
        if (!u)
          fail(ErrorCode::Mismatch, arg->span,
               "expected a size argument, got " + printCore(arg));
        if (!t->name.empty()) {
          sizesSeen[t->name] = *u;
          Subst s;
          s.sizes[t->name] = *u;
          cod = substitute(cod, s);
        }
      } else {
        check(ctx, arg, dom);
        if (!t->name.empty()) {
          Subst s;
          if (auto sz = toSizeExpr(arg))
            s.sizes[t->name] = *sz;
          else
            s.terms[t->name] = arg;
          cod = substitute(cod, s);
        }
      }
      t = cod;
    } else if (t->kind == CKind::BoundedAll) {
      auto u = sizeOfExpr(ctx, arg);
      if (!u)
        fail(ErrorCode::Mismatch, arg->span,
             "expected a size argument, got " + printCore(arg));
      if (!ltInstS(ctx, *u, t->size))
        fail(ErrorCode::BoundViolation, arg->span,
             "size " + printSize(*u) + " is not strictly below the bound " +
                 printSize(t->size));
      e->argKinds[ai - 1] = ArgKind::Size;
      sizesSeen[t->name] = *u;
      Subst s;
      s.sizes[t->name] = *u;
      t = substitute(t->kids[0], s);
    } else {
      fail(ErrorCode::Mismatch, arg->span,
           "cannot apply a value of type " + printCore(t));
    }
    if (self && !measureDone && binderIdx == lastIdx) {
      std::vector<SizeExpr> callMeasure;
      for (const auto& comp : current_->measure) {
        if (comp.infty) {
          callMeasure.push_back(comp);
          continue;
        }
        auto it = sizesSeen.find(comp.var);
        if (it == sizesSeen.end())
          fail(ErrorCode::Internal, e->span, "measure variable not instantiated by the call");
        callMeasure.push_back(it->second.succ(comp.offset));
      }
      checkRecursiveCall(ctx, callMeasure, e->span);
      measureDone = true;
    }
    ++binderIdx;
  }
  if (self && !measureDone)
    fail(ErrorCode::MeasureNotDecreasing, e->span,
         "recursive reference to '" + current_->name +
             "' must be applied to all of its measured size arguments");
  return t;
}

void Checker::checkRecursiveCall(ConstraintCtx& ctx, const std::vector<SizeExpr>& callMeasure,
                                 Span site) {
  MeasureScope scope;
  const auto& entry = measureAtEntry_;
  if (entry.size() != callMeasure.size())
    fail(ErrorCode::Internal, site, "measure arity mismatch");
  std::ostringstream trace;
  trace << "call measure |";
  for (size_t i = 0; i < callMeasure.size(); ++i)
    trace << (i ? "," : "") << printSize(callMeasure[i]);
  trace << "| against |";
  for (size_t i = 0; i < entry.size(); ++i) trace << (i ? "," : "") << printSize(entry[i]);
  trace << "|";
  for (size_t p = 0; p < entry.size(); ++p) {
    SizeExpr c = resolveSize(callMeasure[p]);
    SizeExpr m = resolveSize(entry[p]);
    bool eq = leq(ctx, c, m) && leq(ctx, m, c);
    if (eq) continue;
    if (ltMeasure(ctx, c, m)) return;  // strictly smaller here, rest unconstrained
    fail(ErrorCode::MeasureNotDecreasing, site,
         trace.str() + ": component " + std::to_string(p + 1) + " (" + printSize(c) +
             " vs " + printSize(m) + ") is neither equal nor strictly smaller");
  }
  fail(ErrorCode::MeasureNotDecreasing, site,
       trace.str() + ": the measure never strictly decreases");
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

CorePtr Checker::inferCtorApp(ConstraintCtx& ctx, const CorePtr& e) {
  const CorePtr& head = e->kind == CKind::Con ? e : e->kids[0];
  std::vector<CorePtr> args = appArgs(e);
  size_t ctorIdx = 0;
  const Declaration* owner = lookupCtor(sig_, head->name, &ctorIdx);
  if (!owner) fail(ErrorCode::Internal, e->span, "unknown constructor '" + head->name + "'");
  if (owner->paramPolarities.size() > 1)
    fail(ErrorCode::Mismatch, e->span,
         "cannot infer the parameters of constructor '" + head->name +
             "'; this position needs an expected type");
  const DataCtor& ctor = owner->ctors[ctorIdx];
  if (args.size() != ctor.fieldTypes.size())
    fail(ErrorCode::Mismatch, e->span,
         "constructor '" + head->name + "' expects " +
             std::to_string(ctor.fieldTypes.size()) + " arguments");
  std::string iota = freshName(ctor.sizeBinder.empty() ? "i" : ctor.sizeBinder);
  instantiable_.insert(iota);
  Subst s;
  s.sizes[ctor.sizeBinder] = SizeExpr::mkVar(iota);
  if (e->kind == CKind::App) e->argKinds.assign(args.size(), ArgKind::Value);
  for (size_t k = 0; k < args.size(); ++k)
    check(ctx, args[k], substitute(ctor.fieldTypes[k], s));
  auto res = mkCore(CKind::App, e->span);
  auto d = mkCore(CKind::Def, e->span);
  d->name = owner->name;
  res->kids = {d, sizeToCore(resolveSize(SizeExpr::mkVar(iota, 1)), e->span)};
  return res;
}

void Checker::checkCtorApp(ConstraintCtx& ctx, const CorePtr& e, const CorePtr& expected) {
  const CorePtr& head = e->kind == CKind::Con ? e : e->kids[0];
  std::vector<CorePtr> args = appArgs(e);
  auto da = asDataApp(ctx, expected);
  if (!da)
    fail(ErrorCode::Mismatch, e->span,
         "constructor '" + head->name + "' checked against non-data type " +
             printCore(whnfType(ctx, expected)));
  size_t ctorIdx = 0;
  const Declaration* owner = lookupCtor(sig_, head->name, &ctorIdx);
  if (!owner || owner->name != da->data->name)
    fail(ErrorCode::Mismatch, e->span,
         "constructor '" + head->name + "' does not belong to data type '" +
             da->data->name + "'");
  const DataCtor& ctor = owner->ctors[ctorIdx];
  if (args.size() != ctor.fieldTypes.size())
    fail(ErrorCode::Mismatch, e->span,
         "constructor '" + head->name + "' expects " +
             std::to_string(ctor.fieldTypes.size()) + " arguments, got " +
             std::to_string(args.size()));
  SizeExpr depth = solveCtorDepth(ctx, da->depth, e->span);
  Subst s;
  CorePtr dt = da->data->type;
  size_t pi = 0;
  while (dt->kind == CKind::Pi && !dt->name.empty() && pi < da->params.size()) {
    if (auto sz = toSizeExpr(da->params[pi]))
      s.sizes[dt->name] = *sz;
    else
      s.terms[dt->name] = da->params[pi];
    dt = dt->kids[1];
    ++pi;
  }
  s.sizes[ctor.sizeBinder] = depth;
  if (e->kind == CKind::App) e->argKinds.assign(args.size(), ArgKind::Value);
  for (size_t k = 0; k < args.size(); ++k)
    check(ctx, args[k], substitute(ctor.fieldTypes[k], s));
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

void Checker::check(ConstraintCtx& ctx, const CorePtr& e, const CorePtr& type) {
  switch (e->kind) {
    case CKind::Lam: {
      CorePtr tw = whnfType(ctx, type);
      if (tw->kind == CKind::Pi) {
        e->lamKind = tw->erased ? ArgKind::Erased : ArgKind::Value;
        auto mark = ctx.mark();
        ctx.bind(e->name, tw->kids[0]);
        CorePtr cod = tw->kids[1];
        if (!tw->name.empty()) {
          Subst s;
          if (whnfType(ctx, tw->kids[0])->kind == CKind::SizeSort)
            s.sizes[tw->name] = SizeExpr::mkVar(e->name);
          else
            s.terms[tw->name] = varRef(e->name, e->span);
          cod = substitute(cod, s);
        }
        check(ctx, e->kids[0], cod);
        ctx.rewind(mark);
        return;
      }
      if (tw->kind == CKind::BoundedAll) {
        e->lamKind = ArgKind::Size;  // delaying
        auto mark = ctx.mark();
        ctx.bind(e->name, sizeSort());
        ctx.hypothesize(e->name, tw->size);
        Subst s;
        s.sizes[tw->name] = SizeExpr::mkVar(e->name);
        check(ctx, e->kids[0], substitute(tw->kids[0], s));
        ctx.rewind(mark);
        return;
      }
      fail(ErrorCode::Mismatch, e->span,
           "lambda checked against non-function type " + printCore(type));
    }
    case CKind::Pair: {
      CorePtr tw = whnfType(ctx, type);
      if (tw->kind == CKind::Prod) {
        check(ctx, e->kids[0], tw->kids[0]);
        check(ctx, e->kids[1], tw->kids[1]);
        return;
      }
      if (tw->kind == CKind::BoundedEx) {
        auto u = sizeOfExpr(ctx, e->kids[0]);
        if (!u)
          fail(ErrorCode::Mismatch, e->kids[0]->span,
               "the first component of an existential pair is a size witness");
        if (!ltInstS(ctx, *u, tw->size))
          fail(ErrorCode::BoundViolation, e->kids[0]->span,
               "witness " + printSize(*u) + " is not strictly below the bound " +
                   printSize(tw->size));
        e->exIntro = true;
        Subst s;
        s.sizes[tw->name] = *u;
        check(ctx, e->kids[1], substitute(tw->kids[0], s));
        return;
      }
      break;  // fall through to infer + subtype
    }
    case CKind::Con:
      checkCtorApp(ctx, e, type);
      return;
    case CKind::App:
      if (isConHead(e)) {
        checkCtorApp(ctx, e, type);
        return;
      }
      break;
    case CKind::Case:
      checkCase(ctx, e, type);
      return;
    default:
      break;
  }
  CorePtr inferred = infer(ctx, e);
  if (!subtype(ctx, inferred, type))
    fail(ErrorCode::NotASubtype, e->span,
         "inferred type  " + printCore(inferred) + "  is not a subtype of expected  " +
             printCore(type));
}

CorePtr Checker::checkCase(ConstraintCtx& ctx, const CorePtr& e, CorePtr expected) {
  CorePtr scrutType;
  if (e->hasAscription) {
    checkIsType(ctx, e->kids[1]);
    check(ctx, e->kids[0], e->kids[1]);
    scrutType = e->kids[1];
  } else {
    scrutType = infer(ctx, e->kids[0]);
  }
  CorePtr result = expected;
  for (const auto& b : e->branches) {
    auto mark = ctx.mark();
    size_t bindBase = ctx.bindings.size();
    checkPattern(ctx, b.pattern, scrutType);
    if (result) {
      check(ctx, b.body, result);
    } else {
      CorePtr t = infer(ctx, b.body);
      std::set<std::string> fvs;
      freeVars(t, fvs);
      for (size_t i = bindBase; i < ctx.bindings.size(); ++i)
        if (fvs.count(ctx.bindings[i].first))
          fail(ErrorCode::Mismatch, b.body->span,
               "the type of this case depends on pattern variable '" +
                   ctx.bindings[i].first + "'; add an ascription");
      result = t;
    }
    ctx.rewind(mark);
  }
  std::vector<std::vector<CorePatternPtr>> rows;
  for (const auto& b : e->branches) rows.push_back({b.pattern});
  requireCoverage(ctx, rows, {scrutType}, e->span, "case");
  if (!result) fail(ErrorCode::Mismatch, e->span, "a case needs at least one branch");
  return result;
}

// ---------------------------------------------------------------------------
// Subtyping
// ---------------------------------------------------------------------------

bool Checker::subtype(ConstraintCtx& ctx, const CorePtr& sub, const CorePtr& super) {
  if (coreEqual(sub, super)) return true;

  // Applications of the same named type compare argument-wise, each position
  // at its declared polarity; no unfolding needed.
  auto sHead = defAppHead(sub);
  auto tHead = defAppHead(super);
  if (sHead && tHead && *sHead == *tHead) {
    const Declaration* d = lookupDecl(sig_, *sHead);
    bool comparable = d && (d->kind == DeclKind::Data ||
                            (d->kind == DeclKind::Fun && d->isTypeLevel));
    if (comparable) {
      auto sArgs = appArgs(sub);
      auto tArgs = appArgs(super);
      if (sArgs.size() == tArgs.size() && sArgs.size() == d->paramPolarities.size()) {
        for (size_t i = 0; i < sArgs.size(); ++i) {
          Polarity pol = d->paramPolarities[i];
          auto sa = toSizeExpr(sArgs[i]);
          auto ta = toSizeExpr(tArgs[i]);
          if (sa && ta) {
            bool ok = pol == Polarity::Pos   ? leqS(ctx, *sa, *ta)
                      : pol == Polarity::Neg ? leqS(ctx, *ta, *sa)
                                             : sizeEqS(ctx, *sa, *ta);
            if (!ok) return false;
          } else {
            bool ok = pol == Polarity::Pos   ? subtype(ctx, sArgs[i], tArgs[i])
                      : pol == Polarity::Neg ? subtype(ctx, tArgs[i], sArgs[i])
                                             : (subtype(ctx, sArgs[i], tArgs[i]) &&
                                                subtype(ctx, tArgs[i], sArgs[i]));
            if (!ok) return false;
          }
        }
        return true;
      }
    }
  }

  CorePtr s = whnfType(ctx, sub);
  CorePtr t = whnfType(ctx, super);
  if (s->kind != t->kind) {
    auto ss = toSizeExpr(s);
    auto ts = toSizeExpr(t);
    if (ss && ts) return sizeEqS(ctx, *ss, *ts);
    // One side may have unfolded to a different shape; a second round of
    // head comparison applies when both are Def applications again.
    if (s.get() != sub.get() || t.get() != super.get()) return subtype(ctx, s, t);
    return false;
  }
  switch (s->kind) {
    case CKind::SetSort:
    case CKind::SizeSort:
      return true;
    case CKind::Var:
    case CKind::Con:
      return s->name == t->name;
    case CKind::Def:
      return s->name == t->name;
    case CKind::SizeVal:
      return sizeEqS(ctx, s->size, t->size);
    case CKind::Prod:
      return subtype(ctx, s->kids[0], t->kids[0]) && subtype(ctx, s->kids[1], t->kids[1]);
    case CKind::Pi: {
      if (s->erased != t->erased) return false;
      if (!subtype(ctx, t->kids[0], s->kids[0])) return false;
      std::string x = freshName(s->name.empty() ? (t->name.empty() ? "x" : t->name) : s->name);
      auto mark = ctx.mark();
      ctx.bind(x, t->kids[0]);
      Subst ss, ts;
      bool isSize = whnfType(ctx, t->kids[0])->kind == CKind::SizeSort;
      if (!s->name.empty()) {
        if (isSize) ss.sizes[s->name] = SizeExpr::mkVar(x);
        else ss.terms[s->name] = varRef(x);
      }
      if (!t->name.empty()) {
        if (isSize) ts.sizes[t->name] = SizeExpr::mkVar(x);
        else ts.terms[t->name] = varRef(x);
      }
      bool ok = subtype(ctx, substitute(s->kids[1], ss), substitute(t->kids[1], ts));
      ctx.rewind(mark);
      return ok;
    }
    case CKind::BoundedAll: {
      // [j < b] -> B  <=  [j' < b'] -> B'   iff   b' <= b, bodies under j < b'
      if (!leqS(ctx, t->size, s->size)) return false;
      std::string x = freshName(s->name);
      auto mark = ctx.mark();
      ctx.bind(x, sizeSort());
      ctx.hypothesize(x, t->size);
      Subst ss, ts;
      ss.sizes[s->name] = SizeExpr::mkVar(x);
      ts.sizes[t->name] = SizeExpr::mkVar(x);
      bool ok = subtype(ctx, substitute(s->kids[0], ss), substitute(t->kids[0], ts));
      ctx.rewind(mark);
      return ok;
    }
    case CKind::BoundedEx: {
      if (!leqS(ctx, s->size, t->size)) return false;
      std::string x = freshName(s->name);
      auto mark = ctx.mark();
      ctx.bind(x, sizeSort());
      ctx.hypothesize(x, s->size);
      Subst ss, ts;
      ss.sizes[s->name] = SizeExpr::mkVar(x);
      ts.sizes[t->name] = SizeExpr::mkVar(x);
      bool ok = subtype(ctx, substitute(s->kids[0], ss), substitute(t->kids[0], ts));
      ctx.rewind(mark);
      return ok;
    }
    case CKind::App: {
      if (s->kids.size() != t->kids.size()) return false;
      for (size_t i = 0; i < s->kids.size(); ++i) {
        auto sa = toSizeExpr(s->kids[i]);
        auto ta = toSizeExpr(t->kids[i]);
        bool ok = sa && ta ? sizeEqS(ctx, *sa, *ta)
                           : subtype(ctx, s->kids[i], t->kids[i]) &&
                                 subtype(ctx, t->kids[i], s->kids[i]);
        if (!ok) return false;
      }
      return true;
    }
    default:
      return coreEqual(s, t);
  }
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

namespace {

CorePatternPtr wildcard() {
  auto p = mkCorePattern(CPatKind::Var);
  p->name = "_";
  return p;
}

} // namespace

bool Checker::coversCtor(ConstraintCtx& ctx, std::vector<std::vector<CorePatternPtr>> rows,
                         std::vector<CorePtr> colTypes, std::string* missing) {
  if (rows.empty()) {
    *missing = "<any value>";
    return false;
  }
  if (colTypes.empty()) return true;
  size_t c = colTypes.size();
  for (size_t j = 0; j < colTypes.size() && c == colTypes.size(); ++j)
    for (const auto& row : rows)
      if (row[j]->kind != CPatKind::Var) {
        c = j;
        break;
      }
  if (c == colTypes.size()) return true;  // all wildcards

  CorePtr tw = whnfType(ctx, colTypes[c]);
  auto replaceCol = [&](const std::vector<CorePtr>& sub) {
    std::vector<CorePtr> cols;
    cols.insert(cols.end(), colTypes.begin(), colTypes.begin() + c);
    cols.insert(cols.end(), sub.begin(), sub.end());
    cols.insert(cols.end(), colTypes.begin() + c + 1, colTypes.end());
    return cols;
  };
  auto rowWithout = [&](const std::vector<CorePatternPtr>& row,
                        const std::vector<CorePatternPtr>& sub) {
    std::vector<CorePatternPtr> r;
    r.insert(r.end(), row.begin(), row.begin() + c);
    r.insert(r.end(), sub.begin(), sub.end());
    r.insert(r.end(), row.begin() + c + 1, row.end());
    return r;
  };

  if (tw->kind == CKind::Prod || tw->kind == CKind::BoundedEx) {
    std::vector<CorePtr> sub;
    auto mark = ctx.mark();
    if (tw->kind == CKind::Prod) {
      sub = {tw->kids[0], tw->kids[1]};
    } else {
      std::string k = freshName(tw->name);
      ctx.bind(k, sizeSort());
      ctx.hypothesize(k, tw->size);
      Subst s;
      s.sizes[tw->name] = SizeExpr::mkVar(k);
      sub = {sizeSort(), substitute(tw->kids[0], s)};
    }
    std::vector<std::vector<CorePatternPtr>> newRows;
    for (const auto& row : rows) {
      const auto& p = row[c];
      if (p->kind == CPatKind::Var)
        newRows.push_back(rowWithout(row, {wildcard(), wildcard()}));
      else if (p->kind == CPatKind::Pair)
        newRows.push_back(rowWithout(row, {p->args[0], p->args[1]}));
      // constructor patterns here would have failed checking
    }
    bool ok = coversCtor(ctx, std::move(newRows), replaceCol(sub), missing);
    ctx.rewind(mark);
    return ok;
  }

  auto da = asDataApp(ctx, tw);
  if (da) {
    for (const auto& ctor : da->data->ctors) {
      std::vector<std::vector<CorePatternPtr>> newRows;
      for (const auto& row : rows) {
        const auto& p = row[c];
        if (p->kind == CPatKind::Var) {
          std::vector<CorePatternPtr> subs(1 + ctor.fieldTypes.size());
          for (auto& w : subs) w = wildcard();
          newRows.push_back(rowWithout(row, subs));
        } else if (p->kind == CPatKind::Con && p->name == ctor.name) {
          newRows.push_back(rowWithout(row, p->args));
        }
      }
      if (newRows.empty()) {
        *missing = ctor.name;
        return false;
      }
      auto mark = ctx.mark();
      std::string k = freshName(ctor.sizeBinder.empty() ? "j" : ctor.sizeBinder);
      ctx.bind(k, sizeSort());
      ctx.hypothesize(k, da->depth);
      Subst s;
      CorePtr dt = da->data->type;
      size_t pi = 0;
      while (dt->kind == CKind::Pi && !dt->name.empty() && pi < da->params.size()) {
        if (auto sz = toSizeExpr(da->params[pi]))
          s.sizes[dt->name] = *sz;
        else
          s.terms[dt->name] = da->params[pi];
        dt = dt->kids[1];
        ++pi;
      }
      s.sizes[ctor.sizeBinder] = SizeExpr::mkVar(k);
      std::vector<CorePtr> sub;
      sub.push_back(sizeSort());
      for (const auto& f : ctor.fieldTypes) sub.push_back(substitute(f, s));
      bool ok = coversCtor(ctx, std::move(newRows), replaceCol(sub), missing);
      ctx.rewind(mark);
      if (!ok) {
        *missing = ctor.name + (missing->empty() ? "" : " " + *missing);
        return false;
      }
    }
    return true;
  }

  // Unmatchable column type: only variable rows are meaningful.
  std::vector<std::vector<CorePatternPtr>> newRows;
  for (const auto& row : rows)
    if (row[c]->kind == CPatKind::Var) newRows.push_back(rowWithout(row, {}));
  std::vector<CorePtr> cols = replaceCol({});
  return coversCtor(ctx, std::move(newRows), std::move(cols), missing);
}

void Checker::requireCoverage(ConstraintCtx& ctx,
                              const std::vector<std::vector<CorePatternPtr>>& rows,
                              const std::vector<CorePtr>& colTypes, Span sp, const char* what) {
  std::string missing;
  if (!coversCtor(ctx, rows, colTypes, &missing))
    fail(ErrorCode::NonExhaustive, sp,
         std::string(what) + " do(es) not cover constructor pattern '" + missing + "'");
}

} // namespace sizedlang
