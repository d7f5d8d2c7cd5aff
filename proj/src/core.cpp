#include "sizedlang/core.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <sstream>

namespace sizedlang {

// ---------------------------------------------------------------------------
// Sizes
// ---------------------------------------------------------------------------

SizeNormalForm normalizeSize(const SizeExpr& s) {
  return {s.infty, s.var, s.infty ? 0u : s.offset};
}

std::string printSize(const SizeExpr& s) {
  std::string out;
  for (uint32_t i = 0; i < s.offset; ++i) out += "$ ";
  out += s.infty ? "#" : s.var;
  return out;
}

// ---------------------------------------------------------------------------
// Polarity
// ---------------------------------------------------------------------------

Polarity composePolarity(Polarity outer, Polarity inner) {
  if (outer == Polarity::Mixed || inner == Polarity::Mixed) return Polarity::Mixed;
  if (outer == Polarity::Pos) return inner;
  return inner == Polarity::Pos ? Polarity::Neg : Polarity::Pos;
}

Polarity joinPolarity(Polarity a, Polarity b) {
  if (a == b) return a;
  return Polarity::Mixed;
}

std::string printPolarity(Polarity p) {
  switch (p) {
    case Polarity::Pos: return "+";
    case Polarity::Neg: return "-";
    case Polarity::Mixed: return "*";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

CorePtr mkCore(CKind k, Span sp) {
  auto e = std::make_shared<CoreExpr>();
  e->kind = k;
  e->span = sp;
  return e;
}

CorePatternPtr mkCorePattern(CPatKind k, Span sp) {
  auto p = std::make_shared<CorePattern>();
  p->kind = k;
  p->span = sp;
  return p;
}

const Declaration* lookupDecl(const Signature& sig, const std::string& name) {
  for (const auto& d : sig)
    if (d.name == name) return &d;
  return nullptr;
}

const Declaration* lookupCtor(const Signature& sig, const std::string& con, size_t* ctorIndex) {
  for (const auto& d : sig) {
    if (d.kind != DeclKind::Data) continue;
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      if (d.ctors[i].name == con) {
        if (ctorIndex) *ctorIndex = i;
        return &d;
      }
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Fresh names
// ---------------------------------------------------------------------------

namespace {
std::set<std::string> g_reserved;
std::mutex g_reservedMutex;
std::atomic<uint64_t> g_freshCounter{0};
} // namespace

void reserveNames(const std::set<std::string>& names) {
  std::lock_guard<std::mutex> lock(g_reservedMutex);
  g_reserved.insert(names.begin(), names.end());
}

std::string freshName(const std::string& base) {
  std::lock_guard<std::mutex> lock(g_reservedMutex);
  for (;;) {
    std::string cand = base + "_" + std::to_string(++g_freshCounter);
    if (!g_reserved.count(cand)) {
      g_reserved.insert(cand);
      return cand;
    }
  }
}

// ---------------------------------------------------------------------------
// Free variables and substitution
// ---------------------------------------------------------------------------

namespace {

void patternVars(const CorePatternPtr& p, std::set<std::string>& out) {
  if (p->kind == CPatKind::Var) {
    out.insert(p->name);
    return;
  }
  for (const auto& a : p->args) patternVars(a, out);
}

} // namespace

void freeVars(const CorePtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case CKind::Var:
      out.insert(e->name);
      return;
    case CKind::SizeVal:
      if (!e->size.infty) out.insert(e->size.var);
      return;
    case CKind::Lam: {
      std::set<std::string> inner;
      freeVars(e->kids[0], inner);
      inner.erase(e->name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case CKind::Pi: {
      freeVars(e->kids[0], out);
      std::set<std::string> inner;
      freeVars(e->kids[1], inner);
      if (!e->name.empty()) inner.erase(e->name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case CKind::BoundedAll:
    case CKind::BoundedEx: {
      if (!e->size.infty) out.insert(e->size.var);
      std::set<std::string> inner;
      freeVars(e->kids[0], inner);
      inner.erase(e->name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case CKind::Case: {
      for (const auto& k : e->kids) freeVars(k, out);
      for (const auto& b : e->branches) {
        std::set<std::string> bound;
        patternVars(b.pattern, bound);
        std::set<std::string> inner;
        freeVars(b.body, inner);
        for (const auto& n : bound) inner.erase(n);
        out.insert(inner.begin(), inner.end());
      }
      return;
    }
    default:
      for (const auto& k : e->kids) freeVars(k, out);
      return;
  }
}

SizeExpr substituteSize(const SizeExpr& s, const Subst& sub) {
  if (s.infty) return s;
  auto it = sub.sizes.find(s.var);
  if (it != sub.sizes.end()) return it->second.succ(s.offset);
  auto jt = sub.terms.find(s.var);
  if (jt != sub.terms.end()) {
    if (auto sz = toSizeExpr(jt->second)) return sz->succ(s.offset);
  }
  return s;
}

namespace {

CorePtr clone(const CoreExpr& e) { return std::make_shared<CoreExpr>(e); }

// Picks a replacement binder name when `name` would capture.
bool needsRename(const std::string& name, const Subst& s, const std::set<std::string>& imageFvs) {
  if (name.empty()) return false;
  if (s.terms.count(name) || s.sizes.count(name)) return false;  // shadowed, dropped below
  return imageFvs.count(name) > 0;
}

void imageFreeVars(const Subst& s, std::set<std::string>& out) {
  for (const auto& [k, v] : s.terms) freeVars(v, out);
  for (const auto& [k, v] : s.sizes)
    if (!v.infty) out.insert(v.var);
}

Subst dropBinder(const Subst& s, const std::string& name) {
  Subst r = s;
  r.terms.erase(name);
  r.sizes.erase(name);
  return r;
}

CorePatternPtr renamePattern(const CorePatternPtr& p, const std::map<std::string, std::string>& ren) {
  auto q = std::make_shared<CorePattern>(*p);
  if (p->kind == CPatKind::Var) {
    auto it = ren.find(p->name);
    if (it != ren.end()) q->name = it->second;
    return q;
  }
  q->args.clear();
  for (const auto& a : p->args) q->args.push_back(renamePattern(a, ren));
  return q;
}

} // namespace

CorePtr substitute(const CorePtr& e, const Subst& s) {
  if (!e || s.empty()) return e;
  switch (e->kind) {
    case CKind::Var: {
      auto it = s.terms.find(e->name);
      if (it != s.terms.end()) return it->second;
      auto jt = s.sizes.find(e->name);
      if (jt != s.sizes.end()) {
        auto sz = mkCore(CKind::SizeVal, e->span);
        sz->size = jt->second;
        return sz;
      }
      return e;
    }
    case CKind::SizeVal: {
      SizeExpr ns = substituteSize(e->size, s);
      if (ns == e->size) return e;
      auto r = clone(*e);
      r->size = ns;
      return r;
    }
    case CKind::Lam: {
      std::set<std::string> imgFvs;
      imageFreeVars(s, imgFvs);
      Subst inner = dropBinder(s, e->name);
      std::string binder = e->name;
      CorePtr body = e->kids[0];
      if (needsRename(binder, s, imgFvs)) {
        binder = freshName(e->name);
        Subst ren;
        ren.terms[e->name] = [&] {
          auto v = mkCore(CKind::Var, e->span);
          v->name = binder;
          return v;
        }();
        body = substitute(body, ren);
      }
      auto r = clone(*e);
      r->name = binder;
      r->kids = {substitute(body, inner)};
      return r;
    }
    case CKind::Pi: {
      std::set<std::string> imgFvs;
      imageFreeVars(s, imgFvs);
      Subst inner = e->name.empty() ? s : dropBinder(s, e->name);
      std::string binder = e->name;
      CorePtr cod = e->kids[1];
      if (needsRename(binder, s, imgFvs)) {
        binder = freshName(e->name);
        Subst ren;
        ren.terms[e->name] = [&] {
          auto v = mkCore(CKind::Var, e->span);
          v->name = binder;
          return v;
        }();
        cod = substitute(cod, ren);
      }
      auto r = clone(*e);
      r->name = binder;
      r->kids = {substitute(e->kids[0], s), substitute(cod, inner)};
      return r;
    }
    case CKind::BoundedAll:
    case CKind::BoundedEx: {
      std::set<std::string> imgFvs;
      imageFreeVars(s, imgFvs);
      Subst inner = dropBinder(s, e->name);
      std::string binder = e->name;
      CorePtr body = e->kids[0];
      if (needsRename(binder, s, imgFvs)) {
        binder = freshName(e->name);
        Subst ren;
        ren.sizes[e->name] = SizeExpr::mkVar(binder);
        body = substitute(body, ren);
      }
      auto r = clone(*e);
      r->name = binder;
      r->size = substituteSize(e->size, s);
      r->kids = {substitute(body, inner)};
      return r;
    }
    case CKind::Case: {
      auto r = clone(*e);
      r->kids.clear();
      for (const auto& k : e->kids) r->kids.push_back(substitute(k, s));
      r->branches.clear();
      std::set<std::string> imgFvs;
      imageFreeVars(s, imgFvs);
      for (const auto& b : e->branches) {
        std::set<std::string> bound;
        patternVars(b.pattern, bound);
        Subst inner = s;
        std::map<std::string, std::string> ren;
        for (const auto& n : bound) {
          inner.terms.erase(n);
          inner.sizes.erase(n);
          if (imgFvs.count(n) && !(s.terms.count(n) || s.sizes.count(n))) {
            ren[n] = freshName(n);
          }
        }
        CoreBranch nb;
        nb.pattern = b.pattern;
        CorePtr body = b.body;
        if (!ren.empty()) {
          nb.pattern = renamePattern(b.pattern, ren);
          Subst rs;
          for (const auto& [from, to] : ren) {
            auto v = mkCore(CKind::Var, b.body->span);
            v->name = to;
            rs.terms[from] = v;
          }
          body = substitute(body, rs);
        }
        nb.body = substitute(body, inner);
        r->branches.push_back(std::move(nb));
      }
      return r;
    }
    default: {
      if (e->kids.empty()) return e;
      auto r = clone(*e);
      r->kids.clear();
      for (const auto& k : e->kids) r->kids.push_back(substitute(k, s));
      return r;
    }
  }
}

std::optional<SizeExpr> toSizeExpr(const CorePtr& e) {
  if (!e) return std::nullopt;
  if (e->kind == CKind::SizeVal) return e->size;
  if (e->kind == CKind::Var) return SizeExpr::mkVar(e->name);
  return std::nullopt;
}

CorePtr sizeToCore(const SizeExpr& s, Span sp) {
  auto e = mkCore(CKind::SizeVal, sp);
  e->size = s;
  return e;
}

// ---------------------------------------------------------------------------
// Equality
// ---------------------------------------------------------------------------

bool coreEqual(const CorePtr& a, const CorePtr& b) {
  if (!a || !b) return a == b;
  // A bare size variable and its SizeVal wrapping denote the same thing.
  if (a->kind != b->kind) {
    auto sa = toSizeExpr(a);
    auto sb = toSizeExpr(b);
    if (sa && sb) return *sa == *sb;
    return false;
  }
  if (a->name != b->name || a->erased != b->erased) return false;
  if (a->kind == CKind::SizeVal || a->kind == CKind::BoundedAll || a->kind == CKind::BoundedEx)
    if (!(a->size == b->size)) return false;
  if (a->hasAscription != b->hasAscription) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!coreEqual(a->kids[i], b->kids[i])) return false;
  if (a->branches.size() != b->branches.size()) return false;
  for (size_t i = 0; i < a->branches.size(); ++i) {
    if (printCorePattern(a->branches[i].pattern) != printCorePattern(b->branches[i].pattern))
      return false;
    if (!coreEqual(a->branches[i].body, b->branches[i].body)) return false;
  }
  return true;
}

bool declEqual(const Declaration& a, const Declaration& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (!coreEqual(a.type, b.type)) return false;
  if (a.paramPolarities != b.paramPolarities) return false;
  if (a.ctors.size() != b.ctors.size()) return false;
  for (size_t i = 0; i < a.ctors.size(); ++i) {
    if (a.ctors[i].name != b.ctors[i].name || a.ctors[i].sizeBinder != b.ctors[i].sizeBinder)
      return false;
    if (a.ctors[i].fieldTypes.size() != b.ctors[i].fieldTypes.size()) return false;
    for (size_t j = 0; j < a.ctors[i].fieldTypes.size(); ++j)
      if (!coreEqual(a.ctors[i].fieldTypes[j], b.ctors[i].fieldTypes[j])) return false;
  }
  if (a.isCofun != b.isCofun || a.isTypeLevel != b.isTypeLevel) return false;
  if (a.measure != std::vector<SizeExpr>(b.measure) || a.measureExplicit != b.measureExplicit)
    return false;
  if (a.clauses.size() != b.clauses.size()) return false;
  for (size_t i = 0; i < a.clauses.size(); ++i) {
    const auto& ca = a.clauses[i];
    const auto& cb = b.clauses[i];
    if (ca.patterns.size() != cb.patterns.size()) return false;
    for (size_t j = 0; j < ca.patterns.size(); ++j)
      if (printCorePattern(ca.patterns[j]) != printCorePattern(cb.patterns[j])) return false;
    if (!coreEqual(ca.body, cb.body)) return false;
  }
  if ((a.body != nullptr) != (b.body != nullptr)) return false;
  if (a.body && !coreEqual(a.body, b.body)) return false;
  if (a.synParams != b.synParams) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing (surface-compatible)
// ---------------------------------------------------------------------------

namespace {

enum Prec { PArrow = 0, PProd = 1, PApp = 2, PAtom = 3 };

void printC(std::ostream& os, const CorePtr& e, int prec);

void wrap(std::ostream& os, const CorePtr& e, int prec, int mine) {
  if (mine < prec) {
    os << "(";
    printC(os, e, PArrow);
    os << ")";
  } else {
    printC(os, e, prec);
  }
}

void printC(std::ostream& os, const CorePtr& e, int prec) {
  switch (e->kind) {
    case CKind::SetSort: os << "Set"; return;
    case CKind::SizeSort: os << "Size"; return;
    case CKind::Var:
    case CKind::Def:
    case CKind::Con:
      os << e->name;
      return;
    case CKind::SizeVal:
      if (e->size.offset > 0) {
        if (PAtom < prec) {
          // `$ x` is an atom already; parens never hurt re-parsing
        }
        os << printSize(e->size);
      } else {
        os << printSize(e->size);
      }
      return;
    case CKind::App: {
      if (PApp < prec) { os << "("; printC(os, e, PApp); os << ")"; return; }
      wrap(os, e->kids[0], PAtom, PAtom);
      for (size_t i = 1; i < e->kids.size(); ++i) {
        os << " ";
        wrap(os, e->kids[i], PAtom, e->kids[i]->kind == CKind::SizeVal &&
                                             e->kids[i]->size.offset > 0
                                         ? PArrow   // force parens around `$ x`
                                         : PAtom);
      }
      return;
    }
    case CKind::Lam: {
      if (PArrow < prec) { os << "("; printC(os, e, PArrow); os << ")"; return; }
      os << "\\ " << e->name << " -> ";
      printC(os, e->kids[0], PArrow);
      return;
    }
    case CKind::Pi: {
      if (PArrow < prec) { os << "("; printC(os, e, PArrow); os << ")"; return; }
      if (e->name.empty()) {
        printC(os, e->kids[0], PProd);
      } else if (e->erased) {
        os << "[" << e->name << " : ";
        printC(os, e->kids[0], PArrow);
        os << "]";
      } else {
        if (e->declaredPolarity) os << printPolarity(*e->declaredPolarity);
        os << "(" << e->name << " : ";
        printC(os, e->kids[0], PArrow);
        os << ")";
      }
      os << " -> ";
      printC(os, e->kids[1], PArrow);
      return;
    }
    case CKind::BoundedAll: {
      if (PArrow < prec) { os << "("; printC(os, e, PArrow); os << ")"; return; }
      os << "[" << e->name << " < " << printSize(e->size) << "] -> ";
      printC(os, e->kids[0], PArrow);
      return;
    }
    case CKind::BoundedEx: {
      if (PArrow < prec) { os << "("; printC(os, e, PArrow); os << ")"; return; }
      os << "[" << e->name << " < " << printSize(e->size) << "] & ";
      printC(os, e->kids[0], PProd);
      return;
    }
    case CKind::Prod: {
      if (PProd < prec) { os << "("; printC(os, e, PArrow); os << ")"; return; }
      printC(os, e->kids[0], PApp);
      os << " & ";
      printC(os, e->kids[1], PProd);
      return;
    }
    case CKind::Pair:
      os << "(";
      printC(os, e->kids[0], PArrow);
      os << ", ";
      printC(os, e->kids[1], PArrow);
      os << ")";
      return;
    case CKind::Case: {
      os << "case ";
      printC(os, e->kids[0], PApp);
      if (e->hasAscription) {
        os << " : ";
        printC(os, e->kids[1], PArrow);
      }
      os << " { ";
      bool first = true;
      for (const auto& b : e->branches) {
        if (!first) os << "; ";
        first = false;
        os << printCorePattern(b.pattern) << " -> ";
        printC(os, b.body, PArrow);
      }
      os << " }";
      return;
    }
  }
}

} // namespace

std::string printCore(const CorePtr& e) {
  std::ostringstream os;
  printC(os, e, PArrow);
  return os.str();
}

std::string printCorePattern(const CorePatternPtr& p) {
  switch (p->kind) {
    case CPatKind::Var:
      return p->name;
    case CPatKind::Pair:
      return "(" + printCorePattern(p->args[0]) + ", " + printCorePattern(p->args[1]) + ")";
    case CPatKind::Con: {
      std::string s = "(" + p->name;
      for (const auto& a : p->args) s += " " + printCorePattern(a);
      return s + ")";
    }
  }
  return {};
}

namespace {

// Rebuilds the measure marker into the printed signature.
std::string printFunType(const Declaration& d) {
  if (!d.measureExplicit) return printCore(d.type);
  std::ostringstream os;
  CorePtr t = d.type;
  int binders = 0;
  std::function<void(const CorePtr&)> go = [&](const CorePtr& e) {
    if (binders == d.measurePos) {
      os << "|";
      for (size_t i = 0; i < d.measure.size(); ++i) {
        if (i) os << ", ";
        os << printSize(d.measure[i]);
      }
      os << "| -> ";
      os << printCore(e);
      return;
    }
    if (e->kind == CKind::Pi && !e->name.empty()) {
      if (e->erased)
        os << "[" << e->name << " : " << printCore(e->kids[0]) << "] -> ";
      else {
        if (e->declaredPolarity) os << printPolarity(*e->declaredPolarity);
        os << "(" << e->name << " : " << printCore(e->kids[0]) << ") -> ";
      }
      ++binders;
      go(e->kids[1]);
      return;
    }
    if (e->kind == CKind::BoundedAll) {
      os << "[" << e->name << " < " << printSize(e->size) << "] -> ";
      ++binders;
      go(e->kids[0]);
      return;
    }
    os << printCore(e);
  };
  go(t);
  return os.str();
}

} // namespace

std::string printDeclaration(const Declaration& d) {
  std::ostringstream os;
  switch (d.kind) {
    case DeclKind::Data: {
      os << "data " << d.name;
      // Parameters live in the pi spine of the declared type.
      CorePtr t = d.type;
      size_t idx = 0;
      while (t->kind == CKind::Pi && !t->name.empty() && t->kids[1]->kind != CKind::SetSort) {
        os << " ";
        Polarity p = idx < d.paramPolarities.size() ? d.paramPolarities[idx] : Polarity::Mixed;
        if (p == Polarity::Pos) os << "(+" << t->name;
        else if (p == Polarity::Neg) os << "(-" << t->name;
        else os << "(" << t->name;
        os << " : " << printCore(t->kids[0]) << ")";
        t = t->kids[1];
        ++idx;
      }
      os << " : " << printCore(t) << "\n{ ";
      bool first = true;
      for (const auto& c : d.ctors) {
        if (!first) os << "\n; ";
        first = false;
        os << c.name << " : [" << c.sizeBinder << " : Size] -> ";
        for (const auto& f : c.fieldTypes) {
          std::string fs = printCore(f);
          bool atomic = f->kind == CKind::Var || f->kind == CKind::Def ||
                        f->kind == CKind::SetSort || f->kind == CKind::App;
          os << (atomic ? fs : "(" + fs + ")") << " -> ";
        }
        // target
        os << d.name;
        CorePtr t2 = d.type;
        while (t2->kind == CKind::Pi && !t2->name.empty() && t2->kids[1]->kind != CKind::SetSort) {
          os << " " << t2->name;
          t2 = t2->kids[1];
        }
        os << " ($ " << c.sizeBinder << ")";
      }
      os << "\n}";
      return os.str();
    }
    case DeclKind::Fun: {
      os << (d.isCofun ? "cofun " : "fun ") << d.name << " : " << printFunType(d) << "\n{ ";
      bool first = true;
      for (const auto& c : d.clauses) {
        if (!first) os << "\n; ";
        first = false;
        os << d.name;
        for (const auto& p : c.patterns) os << " " << printCorePattern(p);
        os << " = " << printCore(c.body);
      }
      os << "\n}";
      return os.str();
    }
    case DeclKind::Let: {
      os << "let " << d.name;
      if (d.annotated) os << " : " << printCore(d.type);
      os << " = " << printCore(d.body);
      return os.str();
    }
    case DeclKind::PatternSyn: {
      os << "pattern " << d.name;
      for (const auto& p : d.synParams) os << " " << p;
      os << " = ";
      if (d.synRhs->kind == CPatKind::Con) {
        os << d.synRhs->name;
        for (const auto& a : d.synRhs->args) os << " " << printCorePattern(a);
      } else {
        os << printCorePattern(d.synRhs);
      }
      return os.str();
    }
  }
  return {};
}

std::string printSignature(const Signature& sig) {
  std::string out;
  for (const auto& d : sig) {
    out += printDeclaration(d);
    out += "\n\n";
  }
  return out;
}

} // namespace sizedlang
