#include "sizedlang/polarity.hpp"

#include "sizedlang/scope.hpp"

namespace sizedlang {

namespace {

void join(std::optional<Polarity>& acc, std::optional<Polarity> p) {
  if (!p) return;
  acc = acc ? joinPolarity(*acc, *p) : *p;
}

std::optional<Polarity> sizeOcc(const std::string& target, const SizeExpr& s, Polarity ambient) {
  if (!s.infty && s.var == target) return ambient;
  return std::nullopt;
}

std::optional<Polarity> occ(const std::string& target, const CorePtr& e, Polarity ambient,
                            const Signature& sig) {
  if (!e) return std::nullopt;
  switch (e->kind) {
    case CKind::Var:
      if (e->name == target) return ambient;
      return std::nullopt;
    case CKind::SizeVal:
      return sizeOcc(target, e->size, ambient);
    case CKind::Pi: {
      std::optional<Polarity> acc;
      join(acc, occ(target, e->kids[0], composePolarity(ambient, Polarity::Neg), sig));
      if (e->name != target)  // shadowed in the codomain
        join(acc, occ(target, e->kids[1], ambient, sig));
      return acc;
    }
    case CKind::BoundedAll: {
      std::optional<Polarity> acc;
      join(acc, sizeOcc(target, e->size, composePolarity(ambient, Polarity::Neg)));
      if (e->name != target) join(acc, occ(target, e->kids[0], ambient, sig));
      return acc;
    }
    case CKind::BoundedEx: {
      std::optional<Polarity> acc;
      join(acc, sizeOcc(target, e->size, ambient));
      if (e->name != target) join(acc, occ(target, e->kids[0], ambient, sig));
      return acc;
    }
    case CKind::Prod:
    case CKind::Pair: {
      std::optional<Polarity> acc;
      join(acc, occ(target, e->kids[0], ambient, sig));
      join(acc, occ(target, e->kids[1], ambient, sig));
      return acc;
    }
    case CKind::Lam: {
      if (e->name == target) return std::nullopt;
      return occ(target, e->kids[0], ambient, sig);
    }
    case CKind::App: {
      std::optional<Polarity> acc;
      join(acc, occ(target, e->kids[0], ambient, sig));
      const Declaration* head = nullptr;
      if (e->kids[0]->kind == CKind::Def) head = lookupDecl(sig, e->kids[0]->name);
      for (size_t i = 1; i < e->kids.size(); ++i) {
        Polarity slot = Polarity::Mixed;  // unknown heads are conservative
        if (head && i - 1 < head->paramPolarities.size())
          slot = head->paramPolarities[i - 1];
        join(acc, occ(target, e->kids[i], composePolarity(ambient, slot), sig));
      }
      return acc;
    }
    case CKind::Case: {
      // Type-level case is not part of the corpus fragment; treat all
      // positions conservatively.
      std::optional<Polarity> acc;
      for (const auto& k : e->kids)
        join(acc, occ(target, k, Polarity::Mixed, sig));
      for (const auto& b : e->branches)
        join(acc, occ(target, b.body, Polarity::Mixed, sig));
      return acc;
    }
    default:
      return std::nullopt;
  }
}

Diag violation(const std::string& declName, const std::string& param, Polarity declared,
               std::optional<Polarity> computed, Span span) {
  std::string comp = computed ? printPolarity(*computed) : "unused";
  return {ErrorCode::PolarityViolation, span,
          "parameter '" + param + "' of '" + declName + "' is declared " +
              printPolarity(declared) + " but occurs at polarity " + comp};
}

} // namespace

std::optional<Polarity> occurrencePolarity(const std::string& target, const CorePtr& body,
                                           Polarity ambient, const Signature& sig) {
  return occ(target, body, ambient, sig);
}

std::vector<Diag> checkTypeDefPolarities(const Declaration& decl, const Signature& sig) {
  std::vector<Diag> errs;
  if (decl.kind != DeclKind::Fun || !decl.isTypeLevel) return errs;
  CorePtr cod;
  auto spine = typeSpine(decl.type, &cod);
  for (const auto& clause : decl.clauses) {
    // Clause patterns for a type-level definition are plain variables, one
    // per spine binder; relate them positionally.
    for (size_t i = 0; i < spine.size() && i < clause.patterns.size(); ++i) {
      if (clause.patterns[i]->kind != CPatKind::Var) continue;
      Polarity declared = i < decl.paramPolarities.size() ? decl.paramPolarities[i]
                                                          : Polarity::Mixed;
      auto computed =
          occurrencePolarity(clause.patterns[i]->name, clause.body, Polarity::Pos, sig);
      if (!computed) continue;  // unused parameters satisfy any declaration
      if (*computed != declared)
        errs.push_back(violation(decl.name, spine[i].name, declared, computed, decl.span));
    }
  }
  return errs;
}

std::vector<Diag> checkDataPolarities(const Declaration& decl, const Signature& sig) {
  std::vector<Diag> errs;
  if (decl.kind != DeclKind::Data) return errs;
  CorePtr cod;
  auto spine = typeSpine(decl.type, &cod);
  for (size_t i = 0; i < spine.size(); ++i) {
    if (spine[i].name.empty()) continue;  // the Size index position
    Polarity declared = decl.paramPolarities[i];
    for (const auto& ctor : decl.ctors) {
      std::optional<Polarity> computed;
      for (const auto& field : ctor.fieldTypes)
        join(computed, occurrencePolarity(spine[i].name, field, Polarity::Pos, sig));
      if (!computed) continue;
      if (*computed != declared && declared != Polarity::Mixed)
        errs.push_back(violation(decl.name, spine[i].name, declared, computed, ctor.span));
    }
  }
  return errs;
}

} // namespace sizedlang
