#include "sizedlang/surface.hpp"

#include <sstream>

namespace sizedlang {

namespace {

// Precedence contexts, loosest to tightest.
enum Prec { PArrow = 0, PProd = 1, PApp = 2, PAtom = 3 };

void print(std::ostream& os, const SExprPtr& e, int prec);

void printParen(std::ostream& os, const SExprPtr& e, int prec, int mine) {
  if (mine < prec) {
    os << "(";
    print(os, e, PArrow);
    os << ")";
  } else {
    print(os, e, prec);
  }
}

const char* polMark(PolarityMark m) {
  switch (m) {
    case PolarityMark::Plus: return "+";
    case PolarityMark::Minus: return "-";
    default: return "";
  }
}

void print(std::ostream& os, const SExprPtr& e, int prec) {
  switch (e->kind) {
    case SKind::Var:
      os << e->name;
      return;
    case SKind::SetSort:
      os << "Set";
      return;
    case SKind::SizeSort:
      os << "Size";
      return;
    case SKind::Infty:
      os << "#";
      return;
    case SKind::Succ:
      os << "$ ";
      printParen(os, e->kids[0], PAtom, PAtom);
      return;
    case SKind::App: {
      if (PApp < prec) { os << "("; print(os, e, PApp); os << ")"; return; }
      print(os, e->kids[0], PAtom);
      for (size_t i = 1; i < e->kids.size(); ++i) {
        os << " ";
        printParen(os, e->kids[i], PAtom, PAtom);
      }
      return;
    }
    case SKind::Lam: {
      if (PArrow < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      os << "\\";
      for (const auto& n : e->names) os << " " << n;
      os << " -> ";
      print(os, e->kids[0], PArrow);
      return;
    }
    case SKind::Pi: {
      if (PArrow < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      if (e->names.empty()) {
        print(os, e->kids[0], PProd);
      } else if (e->erased) {
        os << "[" << e->names[0] << " : ";
        print(os, e->kids[0], PArrow);
        os << "]";
      } else {
        os << polMark(e->polarity) << "(" << e->names[0] << " : ";
        print(os, e->kids[0], PArrow);
        os << ")";
      }
      os << " -> ";
      print(os, e->kids[1], PArrow);
      return;
    }
    case SKind::BoundedAll: {
      if (PArrow < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      os << "[" << e->names[0] << " < ";
      print(os, e->kids[0], PApp);
      os << "] -> ";
      print(os, e->kids[1], PArrow);
      return;
    }
    case SKind::BoundedEx: {
      if (PArrow < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      os << "[" << e->names[0] << " < ";
      print(os, e->kids[0], PApp);
      os << "] & ";
      print(os, e->kids[1], PProd);
      return;
    }
    case SKind::Prod: {
      if (PProd < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      print(os, e->kids[0], PApp);
      os << " & ";
      print(os, e->kids[1], PProd);
      return;
    }
    case SKind::Pair:
      os << "(";
      print(os, e->kids[0], PArrow);
      os << ", ";
      print(os, e->kids[1], PArrow);
      os << ")";
      return;
    case SKind::Case: {
      os << "case ";
      print(os, e->kids[0], PApp);
      if (e->ascription) {
        os << " : ";
        print(os, *e->ascription, PArrow);
      }
      os << " { ";
      bool first = true;
      for (const auto& b : e->branches) {
        if (!first) os << "; ";
        first = false;
        os << printSPattern(b.pattern) << " -> ";
        print(os, b.body, PArrow);
      }
      os << " }";
      return;
    }
    case SKind::Measure: {
      if (PArrow < prec) { os << "("; print(os, e, PArrow); os << ")"; return; }
      os << "|";
      for (size_t i = 0; i + 1 < e->kids.size(); ++i) {
        if (i) os << ", ";
        print(os, e->kids[i], PApp);
      }
      os << "| -> ";
      print(os, e->kids.back(), PArrow);
      return;
    }
  }
}

} // namespace

std::string printSExpr(const SExprPtr& e) {
  std::ostringstream os;
  print(os, e, PArrow);
  return os.str();
}

std::string printSPattern(const SPatternPtr& p) {
  switch (p->kind) {
    case SPatKind::Var:
      return p->name;
    case SPatKind::Pair:
      return "(" + printSPattern(p->args[0]) + ", " + printSPattern(p->args[1]) + ")";
    case SPatKind::Con: {
      std::string s = "(" + p->name;
      for (const auto& a : p->args) s += " " + printSPattern(a);
      return s + ")";
    }
  }
  return {};
}

std::string printSDecl(const SDecl& d) {
  std::ostringstream os;
  auto params = [&] {
    for (const auto& p : d.params) {
      os << " ";
      if (p.erased) {
        os << "[";
      } else {
        os << polMark(p.polarity) << "(";
      }
      for (size_t i = 0; i < p.names.size(); ++i) {
        if (i) os << ", ";
        os << p.names[i];
      }
      os << " : " << printSExpr(p.type) << (p.erased ? "]" : ")");
    }
  };
  switch (d.kind) {
    case SDeclKind::Data: {
      os << "data " << d.name;
      params();
      os << " : " << printSExpr(d.type) << "\n{ ";
      bool first = true;
      for (const auto& c : d.ctors) {
        if (!first) os << "\n; ";
        first = false;
        os << c.name << " : " << printSExpr(c.type);
      }
      os << "\n}";
      return os.str();
    }
    case SDeclKind::Fun: {
      os << (d.isCofun ? "cofun " : "fun ") << d.name << " : " << printSExpr(d.type) << "\n{ ";
      bool first = true;
      for (const auto& c : d.clauses) {
        if (!first) os << "\n; ";
        first = false;
        os << c.head;
        for (const auto& p : c.patterns) os << " " << printSPattern(p);
        os << " = " << printSExpr(c.body);
      }
      os << "\n}";
      return os.str();
    }
    case SDeclKind::Let: {
      os << "let " << d.name;
      params();
      if (d.hasType) os << " : " << printSExpr(d.type);
      os << " = " << printSExpr(d.body);
      return os.str();
    }
    case SDeclKind::PatternSyn: {
      os << "pattern " << d.name;
      for (const auto& p : d.synParams) os << " " << p;
      os << " = ";
      // Top-level constructor synonyms print without the outer parens.
      if (d.synRhs->kind == SPatKind::Con) {
        os << d.synRhs->name;
        for (const auto& a : d.synRhs->args) os << " " << printSPattern(a);
      } else {
        os << printSPattern(d.synRhs);
      }
      return os.str();
    }
  }
  return {};
}

std::string printProgram(const std::vector<SDecl>& decls) {
  std::string out;
  for (const auto& d : decls) {
    out += printSDecl(d);
    out += "\n\n";
  }
  return out;
}

bool sexprEqual(const SExprPtr& a, const SExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->names != b->names ||
      a->erased != b->erased || a->polarity != b->polarity)
    return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!sexprEqual(a->kids[i], b->kids[i])) return false;
  if (a->ascription.has_value() != b->ascription.has_value()) return false;
  if (a->ascription && !sexprEqual(*a->ascription, *b->ascription)) return false;
  if (a->branches.size() != b->branches.size()) return false;
  for (size_t i = 0; i < a->branches.size(); ++i) {
    if (!spatternEqual(a->branches[i].pattern, b->branches[i].pattern)) return false;
    if (!sexprEqual(a->branches[i].body, b->branches[i].body)) return false;
  }
  return true;
}

bool spatternEqual(const SPatternPtr& a, const SPatternPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!spatternEqual(a->args[i], b->args[i])) return false;
  return true;
}

bool sdeclEqual(const SDecl& a, const SDecl& b) {
  if (a.kind != b.kind || a.name != b.name || a.hasType != b.hasType || a.isCofun != b.isCofun)
    return false;
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    const auto& pa = a.params[i];
    const auto& pb = b.params[i];
    if (pa.polarity != pb.polarity || pa.erased != pb.erased || pa.names != pb.names) return false;
    if (!sexprEqual(pa.type, pb.type)) return false;
  }
  if ((a.type != nullptr) != (b.type != nullptr)) return false;
  if (a.type && !sexprEqual(a.type, b.type)) return false;
  if (a.ctors.size() != b.ctors.size()) return false;
  for (size_t i = 0; i < a.ctors.size(); ++i) {
    if (a.ctors[i].name != b.ctors[i].name) return false;
    if (!sexprEqual(a.ctors[i].type, b.ctors[i].type)) return false;
  }
  if (a.clauses.size() != b.clauses.size()) return false;
  for (size_t i = 0; i < a.clauses.size(); ++i) {
    const auto& ca = a.clauses[i];
    const auto& cb = b.clauses[i];
    if (ca.head != cb.head || ca.patterns.size() != cb.patterns.size()) return false;
    for (size_t j = 0; j < ca.patterns.size(); ++j)
      if (!spatternEqual(ca.patterns[j], cb.patterns[j])) return false;
    if (!sexprEqual(ca.body, cb.body)) return false;
  }
  if ((a.body != nullptr) != (b.body != nullptr)) return false;
  if (a.body && !sexprEqual(a.body, b.body)) return false;
  if (a.synParams != b.synParams) return false;
  if ((a.synRhs != nullptr) != (b.synRhs != nullptr)) return false;
  if (a.synRhs && !spatternEqual(a.synRhs, b.synRhs)) return false;
  return true;
}

} // namespace sizedlang
