#include "sizedlang/scope.hpp"

#include <algorithm>

namespace sizedlang {

std::vector<SpineBinder> typeSpine(const CorePtr& type, CorePtr* codomain) {
  std::vector<SpineBinder> out;
  CorePtr t = type;
  while (t) {
    if (t->kind == CKind::Pi && !t->name.empty()) {
      SpineBinder b;
      b.name = t->name;
      b.domain = t->kids[0];
      b.erased = t->erased;
      b.declaredPolarity = t->declaredPolarity;
      b.isSize = t->kids[0]->kind == CKind::SizeSort;
      out.push_back(std::move(b));
      t = t->kids[1];
      continue;
    }
    if (t->kind == CKind::BoundedAll) {
      SpineBinder b;
      b.name = t->name;
      b.bounded = true;
      b.bound = t->size;
      b.isSize = true;
      out.push_back(std::move(b));
      t = t->kids[0];
      continue;
    }
    break;
  }
  if (codomain) *codomain = t;
  return out;
}

namespace {

enum class GlobalKind { Data, Fun, Let, Ctor, Syn };

struct ScopeError {
  Diag diag;
};

class ScopeChecker {
public:
  ScopeResult run(const std::vector<SDecl>& decls) {
    ScopeResult res;
    for (const auto& d : decls) {
      try {
        switch (d.kind) {
          case SDeclKind::Data: res.sig.push_back(dataDecl(d)); break;
          case SDeclKind::Fun: res.sig.push_back(funDecl(d)); break;
          case SDeclKind::Let: res.sig.push_back(letDecl(d)); break;
          case SDeclKind::PatternSyn: res.sig.push_back(synDecl(d)); break;
        }
      } catch (const ScopeError& e) {
        res.errors.push_back(e.diag);
        // The declaration's name still becomes visible so later
        // declarations do not cascade into unbound errors.
        if (!globals_.count(d.name) && d.kind != SDeclKind::PatternSyn)
          globals_[d.name] = d.kind == SDeclKind::Data ? GlobalKind::Data
                             : d.kind == SDeclKind::Fun ? GlobalKind::Fun
                                                        : GlobalKind::Let;
      }
    }
    reserveNames(allNames_);
    return res;
  }

private:
  std::map<std::string, GlobalKind> globals_;
  Signature partial_;  // declarations converted so far (for ctor/synonym lookup)
  std::set<std::string> allNames_;

  [[noreturn]] void fail(ErrorCode code, Span sp, std::string msg) {
    throw ScopeError{{code, sp, std::move(msg)}};
  }

  void declareGlobal(const std::string& name, GlobalKind k, Span sp) {
    if (globals_.count(name))
      fail(ErrorCode::DuplicateDefinition, sp, "duplicate definition of '" + name + "'");
    globals_[name] = k;
    allNames_.insert(name);
  }

  const Declaration* findDecl(const std::string& name) const {
    return lookupDecl(partial_, name);
  }

  // ---- locals ----

  struct Locals {
    std::vector<std::string> names;
    bool has(const std::string& n) const {
      return std::find(names.begin(), names.end(), n) != names.end();
    }
  };

  void bindLocal(Locals& loc, const std::string& n) {
    loc.names.push_back(n);
    allNames_.insert(n);
  }

  // ---- expressions ----

  CorePtr convert(const SExprPtr& e, Locals& loc) {
    switch (e->kind) {
      case SKind::Var: {
        auto v = resolve(e->name, e->span, loc);
        return v;
      }
      case SKind::App: {
        auto app = mkCore(CKind::App, e->span);
        for (const auto& k : e->kids) app->kids.push_back(convert(k, loc));
        // Collapse `(f a) b` shapes that can arise from parenthesized heads.
        if (app->kids[0]->kind == CKind::App) {
          auto inner = app->kids[0];
          std::vector<CorePtr> kids = inner->kids;
          kids.insert(kids.end(), app->kids.begin() + 1, app->kids.end());
          app->kids = std::move(kids);
        }
        return app;
      }
      case SKind::Lam: {
        size_t depth = loc.names.size();
        for (const auto& n : e->names) bindLocal(loc, n);
        CorePtr body = convert(e->kids[0], loc);
        loc.names.resize(depth);
        for (auto it = e->names.rbegin(); it != e->names.rend(); ++it) {
          auto lam = mkCore(CKind::Lam, e->span);
          lam->name = *it;
          lam->kids = {body};
          body = lam;
        }
        return body;
      }
      case SKind::Pi: {
        auto pi = mkCore(CKind::Pi, e->span);
        pi->kids.resize(2);
        pi->kids[0] = convert(e->kids[0], loc);
        if (e->names.empty()) {
          pi->kids[1] = convert(e->kids[1], loc);
        } else {
          pi->name = e->names[0];
          pi->erased = e->erased;
          if (e->polarity == PolarityMark::Plus) pi->declaredPolarity = Polarity::Pos;
          if (e->polarity == PolarityMark::Minus) pi->declaredPolarity = Polarity::Neg;
          size_t depth = loc.names.size();
          bindLocal(loc, pi->name);
          pi->kids[1] = convert(e->kids[1], loc);
          loc.names.resize(depth);
        }
        return pi;
      }
      case SKind::BoundedAll:
      case SKind::BoundedEx: {
        auto b = mkCore(e->kind == SKind::BoundedAll ? CKind::BoundedAll : CKind::BoundedEx,
                        e->span);
        b->name = e->names[0];
        b->size = sizeExprOf(e->kids[0], loc);
        size_t depth = loc.names.size();
        bindLocal(loc, b->name);
        b->kids = {convert(e->kids[1], loc)};
        loc.names.resize(depth);
        return b;
      }
      case SKind::Prod:
      case SKind::Pair: {
        auto p = mkCore(e->kind == SKind::Prod ? CKind::Prod : CKind::Pair, e->span);
        p->kids = {convert(e->kids[0], loc), convert(e->kids[1], loc)};
        return p;
      }
      case SKind::Case: {
        auto c = mkCore(CKind::Case, e->span);
        c->kids.push_back(convert(e->kids[0], loc));
        if (e->ascription) {
          c->hasAscription = true;
          c->kids.push_back(convert(*e->ascription, loc));
        }
        for (const auto& br : e->branches) {
          CoreBranch cb;
          size_t depth = loc.names.size();
          std::set<std::string> seen;
          cb.pattern = convertPattern(br.pattern, loc, seen);
          cb.body = convert(br.body, loc);
          loc.names.resize(depth);
          c->branches.push_back(std::move(cb));
        }
        return c;
      }
      case SKind::Succ: {
        SizeExpr s = sizeExprOf(e->kids[0], loc);
        return sizeToCore(s.succ(), e->span);
      }
      case SKind::Infty:
        return sizeToCore(SizeExpr::mkInfty(), e->span);
      case SKind::Measure:
        fail(ErrorCode::ScopeOther, e->span,
             "measure markers may only appear in a fun/cofun signature");
      case SKind::SetSort:
        return mkCore(CKind::SetSort, e->span);
      case SKind::SizeSort:
        return mkCore(CKind::SizeSort, e->span);
    }
    fail(ErrorCode::ScopeOther, e->span, "unexpected expression form");
  }

  CorePtr resolve(const std::string& name, Span sp, const Locals& loc) {
    if (loc.has(name)) {
      auto v = mkCore(CKind::Var, sp);
      v->name = name;
      return v;
    }
    auto it = globals_.find(name);
    if (it == globals_.end())
      fail(ErrorCode::UnboundIdentifier, sp, "unbound identifier '" + name + "'");
    switch (it->second) {
      case GlobalKind::Ctor: {
        auto c = mkCore(CKind::Con, sp);
        c->name = name;
        return c;
      }
      case GlobalKind::Syn:
        fail(ErrorCode::ScopeOther, sp,
             "pattern synonym '" + name + "' cannot be used as an expression");
      default: {
        auto d = mkCore(CKind::Def, sp);
        d->name = name;
        return d;
      }
    }
  }

  SizeExpr sizeExprOf(const SExprPtr& e, Locals& loc) {
    switch (e->kind) {
      case SKind::Infty:
        return SizeExpr::mkInfty();
      case SKind::Succ:
        return sizeExprOf(e->kids[0], loc).succ();
      case SKind::Var: {
        CorePtr r = resolve(e->name, e->span, loc);
        if (r->kind != CKind::Var)
          fail(ErrorCode::ScopeOther, e->span,
               "'" + e->name + "' is not a size variable");
        return SizeExpr::mkVar(e->name);
      }
      default:
        fail(ErrorCode::ScopeOther, e->span, "expected a size expression");
    }
  }

  // ---- patterns ----

  CorePatternPtr convertPattern(const SPatternPtr& p, Locals& loc, std::set<std::string>& seen) {
    switch (p->kind) {
      case SPatKind::Var: {
        // Bare identifiers always bind; constructor patterns are written
        // in parentheses with their size argument.
        if (seen.count(p->name))
          fail(ErrorCode::DuplicateDefinition, p->span,
               "pattern variable '" + p->name + "' is repeated");
        seen.insert(p->name);
        bindLocal(loc, p->name);
        auto v = mkCorePattern(CPatKind::Var, p->span);
        v->name = p->name;
        return v;
      }
      case SPatKind::Pair: {
        auto q = mkCorePattern(CPatKind::Pair, p->span);
        q->args = {convertPattern(p->args[0], loc, seen), convertPattern(p->args[1], loc, seen)};
        return q;
      }
      case SPatKind::Con: {
        auto it = globals_.find(p->name);
        if (it == globals_.end())
          fail(ErrorCode::UnboundIdentifier, p->span, "unknown constructor '" + p->name + "'");
        if (it->second == GlobalKind::Syn) return expandSynonym(p, loc, seen);
        if (it->second != GlobalKind::Ctor)
          fail(ErrorCode::ScopeOther, p->span, "'" + p->name + "' is not a constructor");
        size_t ctorIdx = 0;
        const Declaration* data = lookupCtor(partial_, p->name, &ctorIdx);
        const DataCtor& ctor = data->ctors[ctorIdx];
        if (p->args.size() != ctor.fieldTypes.size() + 1)
          fail(ErrorCode::ScopeOther, p->span,
               "constructor '" + p->name + "' expects a size variable and " +
                   std::to_string(ctor.fieldTypes.size()) + " arguments");
        auto q = mkCorePattern(CPatKind::Con, p->span);
        q->name = p->name;
        for (const auto& a : p->args) q->args.push_back(convertPattern(a, loc, seen));
        if (q->args[0]->kind != CPatKind::Var)
          fail(ErrorCode::ScopeOther, p->args[0]->span,
               "the first argument of a constructor pattern binds its size");
        return q;
      }
    }
    fail(ErrorCode::ScopeOther, p->span, "unexpected pattern form");
  }

  CorePatternPtr expandSynonym(const SPatternPtr& use, Locals& loc, std::set<std::string>& seen) {
    const Declaration* syn = findDecl(use->name);
    if (!syn) fail(ErrorCode::Internal, use->span, "synonym lookup failed");
    if (use->args.size() != syn->synParams.size())
      fail(ErrorCode::SynonymArity, use->span,
           "pattern synonym '" + use->name + "' expects " +
               std::to_string(syn->synParams.size()) + " arguments, got " +
               std::to_string(use->args.size()));
    std::map<std::string, CorePatternPtr> argMap;
    for (size_t i = 0; i < use->args.size(); ++i)
      argMap[syn->synParams[i]] = convertPattern(use->args[i], loc, seen);
    return instantiateSynRhs(syn->synRhs, argMap, use->span);
  }

  CorePatternPtr instantiateSynRhs(const CorePatternPtr& rhs,
                                   const std::map<std::string, CorePatternPtr>& argMap,
                                   Span useSpan) {
    if (rhs->kind == CPatKind::Var) {
      auto it = argMap.find(rhs->name);
      if (it != argMap.end()) return it->second;
      fail(ErrorCode::Internal, useSpan, "synonym parameter '" + rhs->name + "' missing");
    }
    auto q = mkCorePattern(rhs->kind, useSpan);
    q->name = rhs->name;
    for (const auto& a : rhs->args) q->args.push_back(instantiateSynRhs(a, argMap, useSpan));
    return q;
  }

  // ---- declarations ----

  struct FlatParam {
    std::string name;
    CorePtr type;
    bool erased;
    Polarity pol;
    Span span;
  };

  std::vector<FlatParam> flattenParams(const std::vector<SParam>& params, Locals& loc) {
    std::vector<FlatParam> out;
    for (const auto& p : params) {
      CorePtr t = convert(p.type, loc);
      for (const auto& n : p.names) {
        Polarity pol = p.polarity == PolarityMark::Plus    ? Polarity::Pos
                       : p.polarity == PolarityMark::Minus ? Polarity::Neg
                                                           : Polarity::Mixed;
        out.push_back({n, t, p.erased, pol, p.span});
        bindLocal(loc, n);
      }
    }
    return out;
  }

  Declaration dataDecl(const SDecl& d) {
    Declaration decl;
    decl.kind = DeclKind::Data;
    decl.name = d.name;
    decl.span = d.span;
    declareGlobal(d.name, GlobalKind::Data, d.span);

    Locals loc;
    auto params = flattenParams(d.params, loc);

    // The announced index type must be exactly `Size -> Set`.
    bool indexOk = d.type->kind == SKind::Pi && d.type->names.empty() &&
                   d.type->kids[0]->kind == SKind::SizeSort &&
                   d.type->kids[1]->kind == SKind::SetSort;
    if (!indexOk)
      fail(ErrorCode::ScopeOther, d.type->span,
           "a data declaration is indexed by `Size -> Set`");

    // D : (params) -> Size -> Set
    auto sizeToSet = mkCore(CKind::Pi, d.type->span);
    sizeToSet->kids = {mkCore(CKind::SizeSort, d.type->span), mkCore(CKind::SetSort, d.type->span)};
    CorePtr ty = sizeToSet;
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      auto pi = mkCore(CKind::Pi, it->span);
      pi->name = it->name;
      pi->erased = it->erased;
      pi->kids = {it->type, ty};
      ty = pi;
    }
    decl.type = ty;
    for (const auto& p : params) decl.paramPolarities.push_back(p.pol);
    decl.paramPolarities.push_back(Polarity::Pos);  // depth index

    for (const auto& c : d.ctors) {
      declareGlobal(c.name, GlobalKind::Ctor, c.span);
      decl.ctors.push_back(convertCtor(decl, params, c, loc));
    }
    partial_.push_back(decl);
    return decl;
  }

  DataCtor convertCtor(const Declaration& data, const std::vector<FlatParam>& params,
                       const SCtor& c, Locals& outer) {
    // Shape: [i : Size] -> T1 -> ... -> Tn -> D params ($ i)
    const SExprPtr& ty = c.type;
    if (ty->kind != SKind::Pi || !ty->erased || ty->names.size() != 1 ||
        ty->kids[0]->kind != SKind::SizeSort)
      fail(ErrorCode::ScopeOther, ty->span,
           "constructor '" + c.name + "' must start with a [i : Size] binder");
    DataCtor ctor;
    ctor.name = c.name;
    ctor.sizeBinder = ty->names[0];
    ctor.span = c.span;

    Locals loc = outer;
    bindLocal(loc, ctor.sizeBinder);

    SExprPtr rest = ty->kids[1];
    std::vector<CorePtr> fields;
    while (rest->kind == SKind::Pi) {
      fields.push_back(convert(rest->kids[0], loc));
      if (!rest->names.empty())
        fail(ErrorCode::ScopeOther, rest->span, "constructor fields are anonymous");
      rest = rest->kids[1];
    }
    CorePtr target = convert(rest, loc);
    validateCtorTarget(data, params, ctor, target);
    for (const auto& f : fields) validateRecOccurrences(data, params, ctor, f);
    ctor.fieldTypes = std::move(fields);
    return ctor;
  }

  void validateCtorTarget(const Declaration& data, const std::vector<FlatParam>& params,
                          const DataCtor& ctor, const CorePtr& target) {
    auto bad = [&](Span sp) {
      fail(ErrorCode::ScopeOther, sp,
           "constructor '" + ctor.name + "' must target " + data.name + " <params> ($ " +
               ctor.sizeBinder + ")");
    };
    if (target->kind != CKind::App || target->kids[0]->kind != CKind::Def ||
        target->kids[0]->name != data.name)
      bad(target->span);
    if (target->kids.size() != params.size() + 2) bad(target->span);
    for (size_t i = 0; i < params.size(); ++i) {
      const CorePtr& a = target->kids[i + 1];
      if (a->kind != CKind::Var || a->name != params[i].name) bad(a->span);
    }
    auto depth = toSizeExpr(target->kids.back());
    if (!depth || depth->infty || depth->var != ctor.sizeBinder || depth->offset != 1)
      bad(target->kids.back()->span);
  }

  // Recursive occurrences inside fields sit at depth exactly `i`.
  void validateRecOccurrences(const Declaration& data, const std::vector<FlatParam>& params,
                              const DataCtor& ctor, const CorePtr& e) {
    if (!e) return;
    if (e->kind == CKind::Def && e->name == data.name)
      fail(ErrorCode::ScopeOther, e->span,
           "recursive occurrence of " + data.name + " must be fully applied at depth " +
               ctor.sizeBinder);
    if (e->kind == CKind::App && e->kids[0]->kind == CKind::Def &&
        e->kids[0]->name == data.name) {
      bool ok = e->kids.size() == params.size() + 2;
      if (ok) {
        for (size_t i = 0; i < params.size() && ok; ++i) {
          const CorePtr& a = e->kids[i + 1];
          ok = a->kind == CKind::Var && a->name == params[i].name;
        }
        auto depth = toSizeExpr(e->kids.back());
        ok = ok && depth && !depth->infty && depth->var == ctor.sizeBinder && depth->offset == 0;
      }
      if (!ok)
        fail(ErrorCode::ScopeOther, e->span,
             "recursive occurrence of " + data.name + " must be " + data.name +
                 " <params> " + ctor.sizeBinder);
      return;  // head and params validated; nothing deeper to see
    }
    for (const auto& k : e->kids) validateRecOccurrences(data, params, ctor, k);
    for (const auto& b : e->branches) validateRecOccurrences(data, params, ctor, b.body);
  }

  Declaration funDecl(const SDecl& d) {
    Declaration decl;
    decl.kind = DeclKind::Fun;
    decl.name = d.name;
    decl.span = d.span;
    decl.isCofun = d.isCofun;
    declareGlobal(d.name, GlobalKind::Fun, d.span);

    Locals loc;
    decl.type = convertSignature(d.type, loc, decl);

    CorePtr cod;
    auto spine = typeSpine(decl.type, &cod);
    decl.isTypeLevel = cod && cod->kind == CKind::SetSort;
    for (const auto& b : spine)
      decl.paramPolarities.push_back(b.declaredPolarity.value_or(Polarity::Mixed));

    partial_.push_back(decl);  // self-recursion: name resolvable in bodies

    for (const auto& cl : d.clauses) {
      if (cl.head != d.name)
        fail(ErrorCode::ScopeOther, cl.span,
             "clause head '" + cl.head + "' does not match declaration '" + d.name + "'");
      Clause clause;
      clause.span = cl.span;
      Locals cloc;
      std::set<std::string> seen;
      for (const auto& p : cl.patterns) clause.patterns.push_back(convertPattern(p, cloc, seen));
      clause.body = convert(cl.body, cloc);
      decl.clauses.push_back(std::move(clause));
    }

    decl.selfRecursive = false;
    for (const auto& cl : decl.clauses) {
      std::set<std::string> fvs;  // Defs are not free vars; walk explicitly
      if (mentionsDef(cl.body, d.name)) decl.selfRecursive = true;
    }

    if (!decl.measureExplicit && decl.selfRecursive) {
      for (const auto& b : spine)
        if (b.isSize && !b.bounded) decl.measure.push_back(SizeExpr::mkVar(b.name));
      decl.measurePos = static_cast<int>(spine.size());
    }

    partial_.back() = decl;
    return decl;
  }

  bool mentionsDef(const CorePtr& e, const std::string& name) {
    if (!e) return false;
    if (e->kind == CKind::Def && e->name == name) return true;
    for (const auto& k : e->kids)
      if (mentionsDef(k, name)) return true;
    for (const auto& b : e->branches)
      if (mentionsDef(b.body, name)) return true;
    return false;
  }

  // Converts a fun signature, extracting the measure marker.
  CorePtr convertSignature(const SExprPtr& ty, Locals& loc, Declaration& decl) {
    if (ty->kind == SKind::Measure) {
      if (decl.measureExplicit)
        fail(ErrorCode::ScopeOther, ty->span, "a signature carries at most one measure");
      decl.measureExplicit = true;
      decl.measurePos = static_cast<int>(loc.names.size());
      for (size_t i = 0; i + 1 < ty->kids.size(); ++i) {
        SizeExpr s = measureSize(ty->kids[i], loc);
        decl.measure.push_back(s);
      }
      return convertSignature(ty->kids.back(), loc, decl);
    }
    if (ty->kind == SKind::Pi && !ty->names.empty()) {
      auto pi = mkCore(CKind::Pi, ty->span);
      pi->name = ty->names[0];
      pi->erased = ty->erased;
      if (ty->polarity == PolarityMark::Plus) pi->declaredPolarity = Polarity::Pos;
      if (ty->polarity == PolarityMark::Minus) pi->declaredPolarity = Polarity::Neg;
      pi->kids.resize(2);
      pi->kids[0] = convert(ty->kids[0], loc);
      size_t depth = loc.names.size();
      bindLocal(loc, pi->name);
      pi->kids[1] = convertSignature(ty->kids[1], loc, decl);
      loc.names.resize(depth);
      return pi;
    }
    if (ty->kind == SKind::Pi && ty->names.empty()) {
      auto pi = mkCore(CKind::Pi, ty->span);
      pi->kids.resize(2);
      pi->kids[0] = convert(ty->kids[0], loc);
      pi->kids[1] = convertSignature(ty->kids[1], loc, decl);
      return pi;
    }
    if (ty->kind == SKind::BoundedAll) {
      auto b = mkCore(CKind::BoundedAll, ty->span);
      b->name = ty->names[0];
      b->size = sizeExprOf(ty->kids[0], loc);
      size_t depth = loc.names.size();
      bindLocal(loc, b->name);
      b->kids = {convertSignature(ty->kids[1], loc, decl)};
      loc.names.resize(depth);
      return b;
    }
    return convert(ty, loc);
  }

  SizeExpr measureSize(const SExprPtr& e, Locals& loc) {
    switch (e->kind) {
      case SKind::Infty:
        return SizeExpr::mkInfty();
      case SKind::Succ:
        return measureSize(e->kids[0], loc).succ();
      case SKind::Var:
        if (!loc.has(e->name))
          fail(ErrorCode::UnboundSizeInMeasure, e->span,
               "measure mentions '" + e->name + "', which is not bound by the telescope");
        return SizeExpr::mkVar(e->name);
      default:
        fail(ErrorCode::UnboundSizeInMeasure, e->span,
             "measure components must be size expressions");
    }
  }

  Declaration letDecl(const SDecl& d) {
    Declaration decl;
    decl.kind = DeclKind::Let;
    decl.name = d.name;
    decl.span = d.span;

    Locals loc;
    auto params = flattenParams(d.params, loc);
    if (!params.empty() && !d.hasType)
      fail(ErrorCode::ScopeOther, d.span,
           "a let with parameters needs a type annotation");

    CorePtr body;
    {
      // Note: the let's own name is not in scope in its body.
      body = convert(d.body, loc);
    }
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      auto lam = mkCore(CKind::Lam, it->span);
      lam->name = it->name;
      lam->lamKind = it->erased ? ArgKind::Erased : ArgKind::Value;
      lam->kids = {body};
      body = lam;
    }
    decl.body = body;

    if (d.hasType) {
      Locals tloc;
      for (const auto& p : params) tloc.names.push_back(p.name);
      // Rebuild the annotation under the parameter scope.
      Locals ploc;
      auto params2 = flattenParams(d.params, ploc);
      CorePtr ann = convert(d.type, ploc);
      CorePtr ty = ann;
      for (auto it = params2.rbegin(); it != params2.rend(); ++it) {
        auto pi = mkCore(CKind::Pi, it->span);
        pi->name = it->name;
        pi->erased = it->erased;
        pi->kids = {it->type, ty};
        ty = pi;
      }
      decl.type = ty;
      decl.annotated = true;
    }

    declareGlobal(d.name, GlobalKind::Let, d.span);
    partial_.push_back(decl);
    return decl;
  }

  Declaration synDecl(const SDecl& d) {
    Declaration decl;
    decl.kind = DeclKind::PatternSyn;
    decl.name = d.name;
    decl.span = d.span;
    decl.synParams = d.synParams;

    {
      std::set<std::string> dup(d.synParams.begin(), d.synParams.end());
      if (dup.size() != d.synParams.size())
        fail(ErrorCode::DuplicateDefinition, d.span, "synonym parameters must be distinct");
    }

    decl.synRhs = convertSynPattern(d.synRhs, decl);
    declareGlobal(d.name, GlobalKind::Syn, d.span);
    partial_.push_back(decl);
    return decl;
  }

  CorePatternPtr convertSynPattern(const SPatternPtr& p, const Declaration& syn) {
    switch (p->kind) {
      case SPatKind::Var: {
        if (std::find(syn.synParams.begin(), syn.synParams.end(), p->name) ==
            syn.synParams.end())
          fail(ErrorCode::UnboundIdentifier, p->span,
               "synonym right-hand side mentions '" + p->name + "', not a parameter");
        auto v = mkCorePattern(CPatKind::Var, p->span);
        v->name = p->name;
        return v;
      }
      case SPatKind::Pair: {
        auto q = mkCorePattern(CPatKind::Pair, p->span);
        q->args = {convertSynPattern(p->args[0], syn), convertSynPattern(p->args[1], syn)};
        return q;
      }
      case SPatKind::Con: {
        auto it = globals_.find(p->name);
        if (it == globals_.end() || it->second != GlobalKind::Ctor)
          fail(ErrorCode::UnboundIdentifier, p->span,
               "synonym right-hand side must use a known constructor, got '" + p->name + "'");
        size_t idx = 0;
        const Declaration* data = lookupCtor(partial_, p->name, &idx);
        if (p->args.size() != data->ctors[idx].fieldTypes.size() + 1)
          fail(ErrorCode::SynonymArity, p->span,
               "constructor '" + p->name + "' takes a size variable and " +
                   std::to_string(data->ctors[idx].fieldTypes.size()) + " arguments");
        auto q = mkCorePattern(CPatKind::Con, p->span);
        q->name = p->name;
        for (const auto& a : p->args) q->args.push_back(convertSynPattern(a, syn));
        return q;
      }
    }
    fail(ErrorCode::Internal, p->span, "unexpected synonym pattern");
  }
};

} // namespace

ScopeResult scopeCheck(const std::vector<SDecl>& decls) {
  ScopeChecker checker;
  return checker.run(decls);
}

} // namespace sizedlang
