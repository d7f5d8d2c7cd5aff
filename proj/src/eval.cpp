#include "sizedlang/eval.hpp"

#include <cassert>
#include <set>

namespace sizedlang {

namespace {

std::shared_ptr<RExpr> mkRMut(RKind k) {
  auto e = std::make_shared<RExpr>();
  e->kind = k;
  return e;
}

RExprPtr runit() {
  static RExprPtr u = mkRMut(RKind::Unit);
  return u;
}

// Expressions that only describe types erase to the unit token.
bool erasesToUnit(const CorePtr& e, const Signature& sig) {
  switch (e->kind) {
    case CKind::SetSort:
    case CKind::SizeSort:
    case CKind::SizeVal:
    case CKind::Pi:
    case CKind::Prod:
    case CKind::BoundedAll:
    case CKind::BoundedEx:
      return true;
    case CKind::Def: {
      const Declaration* d = lookupDecl(sig, e->name);
      return d && (d->kind == DeclKind::Data || (d->kind == DeclKind::Fun && d->isTypeLevel));
    }
    case CKind::App:
      return erasesToUnit(e->kids[0], sig);
    default:
      return false;
  }
}

class Eraser {
public:
  Eraser(const Signature& sig, bool keepTokens) : sig_(sig), tokens_(keepTokens) {}

  RExprPtr expr(const CorePtr& e, std::set<std::string>& erasedVars) {
    if (erasesToUnit(e, sig_)) return runit();
    switch (e->kind) {
      case CKind::Var: {
        // References to erased binders have no runtime value. (The checker
        // performs no relevance analysis; such references only occur in
        // programs that use bracket binders in value positions.)
        if (!tokens_ && erasedVars.count(e->name)) return runit();
        auto r = mkRMut(RKind::Var);
        r->name = e->name;
        return r;
      }
      case CKind::Def: {
        auto r = mkRMut(RKind::Def);
        r->name = e->name;
        return r;
      }
      case CKind::Con: {
        auto r = mkRMut(RKind::Con);
        r->name = e->name;
        return r;
      }
      case CKind::App: {
        RExprPtr acc = expr(e->kids[0], erasedVars);
        std::vector<ArgKind> kinds = e->argKinds;
        if (kinds.size() != e->kids.size() - 1)
          kinds.assign(e->kids.size() - 1, ArgKind::Value);
        for (size_t i = 1; i < e->kids.size(); ++i) {
          ArgKind k = kinds[i - 1];
          if (k == ArgKind::Value) {
            auto app = mkRMut(RKind::App);
            app->kids = {acc, expr(e->kids[i], erasedVars)};
            acc = app;
          } else if (k == ArgKind::Size) {
            if (tokens_) {
              auto app = mkRMut(RKind::App);
              app->kids = {acc, runit()};
              acc = app;
            } else {
              auto f = mkRMut(RKind::Force);
              f->kids = {acc};
              acc = f;
            }
          } else {  // Erased
            if (tokens_) {
              auto app = mkRMut(RKind::App);
              app->kids = {acc, expr(e->kids[i], erasedVars)};
              acc = app;
            }
            // dropped entirely otherwise
          }
        }
        return acc;
      }
      case CKind::Lam: {
        if (e->lamKind == ArgKind::Size) {
          if (tokens_) {
            auto lam = mkRMut(RKind::Lam);
            lam->name = e->name;
            lam->sizeLam = true;
            lam->kids = {expr(e->kids[0], erasedVars)};
            return lam;
          }
          auto th = mkRMut(RKind::Thunk);
          th->kids = {expr(e->kids[0], erasedVars)};
          return th;
        }
        if (e->lamKind == ArgKind::Erased && !tokens_) {
          erasedVars.insert(e->name);
          RExprPtr body = expr(e->kids[0], erasedVars);
          erasedVars.erase(e->name);
          return body;
        }
        auto lam = mkRMut(RKind::Lam);
        lam->name = e->name;
        lam->kids = {expr(e->kids[0], erasedVars)};
        return lam;
      }
      case CKind::Pair: {
        if (e->exIntro) return expr(e->kids[1], erasedVars);  // witness dropped
        auto p = mkRMut(RKind::Pair);
        p->kids = {expr(e->kids[0], erasedVars), expr(e->kids[1], erasedVars)};
        return p;
      }
      case CKind::Case: {
        auto c = mkRMut(RKind::Case);
        c->kids = {expr(e->kids[0], erasedVars)};
        for (const auto& b : e->branches) {
          RBranch rb;
          rb.pattern = pattern(b.pattern);
          rb.body = expr(b.body, erasedVars);
          c->branches.push_back(std::move(rb));
        }
        return c;
      }
      default:
        return runit();
    }
  }

  RPatternPtr pattern(const CorePatternPtr& p) {
    switch (p->kind) {
      case CPatKind::Var: {
        auto r = std::make_shared<RPattern>();
        r->kind = RPatKind::Var;
        r->name = p->name;
        return r;
      }
      case CPatKind::Pair: {
        if (p->exPattern) {
          // The witness has no value component; in token mode its name must
          // still resolve, so it binds the unit token.
          auto payload = pattern(p->args[1]);
          if (tokens_) {
            auto r = std::make_shared<RPattern>(*payload);
            r->unitBinds.push_back(p->args[0]->name);
            return r;
          }
          return payload;
        }
        auto r = std::make_shared<RPattern>();
        r->kind = RPatKind::Pair;
        r->args = {pattern(p->args[0]), pattern(p->args[1])};
        return r;
      }
      case CPatKind::Con: {
        auto r = std::make_shared<RPattern>();
        r->kind = RPatKind::Con;
        r->name = p->name;
        if (tokens_) r->unitBinds.push_back(p->args[0]->name);
        for (size_t i = 1; i < p->args.size(); ++i) r->args.push_back(pattern(p->args[i]));
        return r;
      }
    }
    return nullptr;
  }

  RTClause clause(const Clause& cl, size_t* outArity, std::vector<ArgKind>* outKinds) {
    RTClause rc;
    std::set<std::string> erasedVars;
    if (tokens_) {
      for (const auto& p : cl.patterns) rc.params.push_back(pattern(p));
      rc.body = expr(cl.body, erasedVars);
      *outArity = rc.params.size();
      *outKinds = cl.paramKinds;
      return rc;
    }
    size_t split = cl.patterns.size();
    for (size_t i = 0; i < cl.patterns.size(); ++i) {
      if (cl.paramKinds[i] == ArgKind::Size) {
        split = i;
        break;
      }
    }
    for (size_t i = 0; i < split; ++i) {
      if (cl.paramKinds[i] == ArgKind::Erased) {
        erasedVars.insert(cl.patterns[i]->name);
        continue;
      }
      rc.params.push_back(pattern(cl.patterns[i]));
    }
    RExprPtr body = expr(cl.body, erasedVars);
    // Binders past the split are plain variables; rebuild delays inside out.
    for (size_t i = cl.patterns.size(); i-- > split;) {
      if (cl.paramKinds[i] == ArgKind::Size) {
        auto th = mkRMut(RKind::Thunk);
        th->kids = {body};
        body = th;
      } else if (cl.paramKinds[i] == ArgKind::Value) {
        auto lam = mkRMut(RKind::Lam);
        lam->name = cl.patterns[i]->name;
        lam->kids = {body};
        body = lam;
      }
      // erased binders vanish
    }
    rc.body = body;
    *outArity = rc.params.size();
    *outKinds = {};
    return rc;
  }

private:
  const Signature& sig_;
  bool tokens_;
};

} // namespace

RExprPtr erase(const CorePtr& e, const Signature& sig, bool keepTokens) {
  Eraser er(sig, keepTokens);
  std::set<std::string> erased;
  return er.expr(e, erased);
}

RTProgram eraseProgram(const Signature& sig, bool keepTokens) {
  RTProgram prog;
  Eraser er(sig, keepTokens);
  for (const auto& d : sig) {
    if (d.kind == DeclKind::Data) {
      for (const auto& c : d.ctors) prog.ctorArity[c.name] = c.fieldTypes.size();
      continue;
    }
    if (d.kind == DeclKind::Let) {
      RTDef def;
      std::set<std::string> erased;
      def.letBody = er.expr(d.body, erased);
      prog.defs[d.name] = std::move(def);
      continue;
    }
    if (d.kind == DeclKind::Fun && !d.isTypeLevel) {
      RTDef def;
      def.isFun = true;
      def.fun.name = d.name;
      size_t arity = 0;
      std::vector<ArgKind> kinds;
      for (const auto& cl : d.clauses)
        def.fun.clauses.push_back(er.clause(cl, &arity, &kinds));
      def.fun.arity = arity;
      def.fun.paramKinds = kinds;
      prog.defs[d.name] = std::move(def);
    }
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

ValuePtr unitValue() {
  static ValuePtr u = [] {
    auto v = std::make_shared<Value>();
    v->kind = VKind::Unit;
    return v;
  }();
  return u;
}

ValuePtr lookupEnv(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* n = env.get(); n; n = n->parent.get())
    if (n->name == name) return n->value;
  return nullptr;
}

EnvPtr extend(const EnvPtr& env, std::string name, ValuePtr v) {
  auto n = std::make_shared<EnvNode>();
  n->parent = env;
  n->name = std::move(name);
  n->value = std::move(v);
  return n;
}

} // namespace

void Evaluator::spend() {
  if (--fuel_ < 0) throw FuelExhausted{budget_};
}

ValuePtr Evaluator::evalDef(const std::string& name) {
  auto cached = defCache_.find(name);
  if (cached != defCache_.end()) return cached->second;
  auto it = prog_.defs.find(name);
  if (it == prog_.defs.end()) throw EvalError{"undefined runtime symbol '" + name + "'"};
  const RTDef& def = it->second;
  ValuePtr v;
  if (def.isFun) {
    if (def.fun.arity == 0) {
      // Nullary recursive definitions evaluate once and share their value;
      // corecursive structures built from them are forced at most once per
      // level thanks to thunk memoization.
      v = applyClauses(def.fun, {});
    } else {
      auto f = std::make_shared<Value>();
      f->kind = VKind::Fun;
      f->fun = &def.fun;
      f->name = name;
      return f;  // not cached; applications accumulate per call site
    }
  } else {
    v = eval(nullptr, def.letBody);
  }
  defCache_[name] = v;
  return v;
}

ValuePtr Evaluator::eval(const EnvPtr& env, const RExprPtr& e) {
  switch (e->kind) {
    case RKind::Var: {
      ValuePtr v = lookupEnv(env, e->name);
      if (!v) throw EvalError{"unbound runtime variable '" + e->name + "'"};
      return v;
    }
    case RKind::Def:
      return evalDef(e->name);
    case RKind::Con: {
      auto it = prog_.ctorArity.find(e->name);
      size_t arity = it == prog_.ctorArity.end() ? 0 : it->second;
      auto v = std::make_shared<Value>();
      v->kind = VKind::Con;
      v->name = e->name;
      v->fieldArity = arity;
      return v;
    }
    case RKind::App: {
      ValuePtr f = eval(env, e->kids[0]);
      ValuePtr a = eval(env, e->kids[1]);
      return apply(f, a);
    }
    case RKind::Lam: {
      auto v = std::make_shared<Value>();
      v->kind = VKind::Closure;
      v->env = env;
      v->param = e->name;
      v->body = e->kids[0];
      v->sizeClosure = e->sizeLam;
      return v;
    }
    case RKind::Thunk: {
      auto v = std::make_shared<Value>();
      v->kind = VKind::Thunk;
      v->env = env;
      v->body = e->kids[0];
      v->memo = std::make_shared<std::optional<ValuePtr>>();
      return v;
    }
    case RKind::Force:
      return force(eval(env, e->kids[0]));
    case RKind::Pair: {
      auto v = std::make_shared<Value>();
      v->kind = VKind::Pair;
      v->first = eval(env, e->kids[0]);
      v->second = eval(env, e->kids[1]);
      return v;
    }
    case RKind::Unit:
      return unitValue();
    case RKind::Case: {
      ValuePtr scrut = eval(env, e->kids[0]);
      for (const auto& b : e->branches) {
        EnvPtr benv = env;
        if (match(b.pattern, scrut, benv)) return eval(benv, b.body);
      }
      throw EvalError{"no clause matched at runtime; exhaustiveness checking is broken"};
    }
  }
  throw EvalError{"unhandled runtime expression"};
}

ValuePtr Evaluator::apply(const ValuePtr& f, const ValuePtr& a) {
  switch (f->kind) {
    case VKind::Closure: {
      spend();
      return eval(extend(f->env, f->param, a), f->body);
    }
    case VKind::Fun: {
      auto g = std::make_shared<Value>();
      *g = *f;
      g->args.push_back(a);
      if (g->args.size() == g->fun->arity) {
        spend();
        return applyClauses(*g->fun, g->args);
      }
      return g;
    }
    case VKind::Con: {
      if (f->args.size() >= f->fieldArity)
        throw EvalError{"constructor '" + f->name + "' applied to too many arguments"};
      auto g = std::make_shared<Value>();
      *g = *f;
      g->args.push_back(a);
      return g;
    }
    default:
      throw EvalError{"applied a non-function value"};
  }
}

ValuePtr Evaluator::force(const ValuePtr& v) {
  if (v->kind == VKind::Thunk) {
    if (v->memo && v->memo->has_value()) return **v->memo;
    spend();
    ValuePtr r = eval(v->env, v->body);
    if (v->memo) *v->memo = r;
    return r;
  }
  if (v->kind == VKind::Closure && v->sizeClosure) return apply(v, unitValue());
  if (v->kind == VKind::Fun) return apply(v, unitValue());
  throw EvalError{"forced a value that is not delayed"};
}

bool Evaluator::forceable(const ValuePtr& v) const {
  if (v->kind == VKind::Thunk) return true;
  if (v->kind == VKind::Closure && v->sizeClosure) return true;
  if (v->kind == VKind::Fun) {
    // Token mode: a partial application whose remaining binders are all
    // sizes is a delayed computation.
    const auto& kinds = v->fun->paramKinds;
    if (kinds.empty() || v->args.size() >= kinds.size()) return false;
    // Count how many value params have been consumed so far: arguments are
    // supplied positionally, so remaining kinds start at args.size().
    for (size_t i = v->args.size(); i < kinds.size(); ++i)
      if (kinds[i] != ArgKind::Size) return false;
    return true;
  }
  return false;
}

ValuePtr Evaluator::applyClauses(const RTFun& fun, const std::vector<ValuePtr>& args) {
  for (const auto& cl : fun.clauses) {
    EnvPtr env;
    bool ok = true;
    for (size_t i = 0; i < cl.params.size() && ok; ++i) ok = match(cl.params[i], args[i], env);
    if (ok) return eval(env, cl.body);
  }
  throw EvalError{"no clause of '" + fun.name + "' matched; exhaustiveness checking is broken"};
}

bool Evaluator::match(const RPatternPtr& p, const ValuePtr& v, EnvPtr& env) {
  for (const auto& n : p->unitBinds) env = extend(env, n, unitValue());
  switch (p->kind) {
    case RPatKind::Var:
      env = extend(env, p->name, v);
      return true;
    case RPatKind::Pair:
      if (v->kind != VKind::Pair) return false;
      return match(p->args[0], v->first, env) && match(p->args[1], v->second, env);
    case RPatKind::Con: {
      if (v->kind != VKind::Con || v->name != p->name) return false;
      if (v->args.size() != p->args.size()) return false;
      for (size_t i = 0; i < p->args.size(); ++i)
        if (!match(p->args[i], v->args[i], env)) return false;
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

bool ObservationTree::operator==(const ObservationTree& o) const {
  if (kind != o.kind || name != o.name || kids.size() != o.kids.size()) return false;
  for (size_t i = 0; i < kids.size(); ++i)
    if (!(kids[i] == o.kids[i])) return false;
  return true;
}

ObservationTree observe(Evaluator& ev, const ValuePtr& v, uint32_t depth) {
  if (ev.forceable(v)) {
    if (depth == 0) return {ObservationTree::Kind::Thunk, "", {}};
    return observe(ev, ev.force(v), depth - 1);
  }
  switch (v->kind) {
    case VKind::Con: {
      ObservationTree t{ObservationTree::Kind::Con, v->name, {}};
      for (const auto& a : v->args) t.kids.push_back(observe(ev, a, depth));
      return t;
    }
    case VKind::Pair: {
      ObservationTree t{ObservationTree::Kind::Pair, "", {}};
      t.kids.push_back(observe(ev, v->first, depth));
      t.kids.push_back(observe(ev, v->second, depth));
      return t;
    }
    case VKind::Unit:
      return {ObservationTree::Kind::Unit, "", {}};
    default:
      return {ObservationTree::Kind::Fun, "", {}};
  }
}

namespace {

// zero/succ towers print as numerals.
std::optional<uint64_t> asNumeral(const ObservationTree& t) {
  uint64_t n = 0;
  const ObservationTree* cur = &t;
  for (;;) {
    if (cur->kind != ObservationTree::Kind::Con) return std::nullopt;
    if (cur->name == "zero" && cur->kids.empty()) return n;
    if (cur->name == "succ" && cur->kids.size() == 1) {
      ++n;
      cur = &cur->kids[0];
      continue;
    }
    return std::nullopt;
  }
}

std::string render(const ObservationTree& t, bool atom) {
  if (auto n = asNumeral(t)) return std::to_string(*n);
  switch (t.kind) {
    case ObservationTree::Kind::Con: {
      if (t.kids.empty()) return t.name;
      std::string s = t.name;
      for (const auto& k : t.kids) s += " " + render(k, true);
      return atom ? "(" + s + ")" : s;
    }
    case ObservationTree::Kind::Pair:
      return "(" + render(t.kids[0], false) + ", " + render(t.kids[1], false) + ")";
    case ObservationTree::Kind::Thunk:
      return "<thunk>";
    case ObservationTree::Kind::Fun:
      return "<fun>";
    case ObservationTree::Kind::Unit:
      return "()";
  }
  return "?";
}

} // namespace

std::string renderObservation(const ObservationTree& t) { return render(t, false); }

std::vector<std::string> observationLines(const ObservationTree& t) {
  std::vector<std::string> lines;
  const ObservationTree* cur = &t;
  while (cur->kind == ObservationTree::Kind::Pair) {
    lines.push_back(render(cur->kids[0], false));
    cur = &cur->kids[1];
  }
  if (lines.empty()) lines.push_back(render(*cur, false));
  return lines;
}

std::optional<CorePtr> readbackObservation(const ObservationTree& t) {
  switch (t.kind) {
    case ObservationTree::Kind::Con: {
      auto con = mkCore(CKind::Con);
      con->name = t.name;
      if (t.kids.empty()) return con;
      auto app = mkCore(CKind::App);
      app->kids.push_back(con);
      for (const auto& k : t.kids) {
        auto sub = readbackObservation(k);
        if (!sub) return std::nullopt;
        app->kids.push_back(*sub);
      }
      return app;
    }
    case ObservationTree::Kind::Pair: {
      auto l = readbackObservation(t.kids[0]);
      auto r = readbackObservation(t.kids[1]);
      if (!l || !r) return std::nullopt;
      auto p = mkCore(CKind::Pair);
      p->kids = {*l, *r};
      return p;
    }
    default:
      return std::nullopt;
  }
}

} // namespace sizedlang
