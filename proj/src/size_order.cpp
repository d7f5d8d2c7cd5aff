#include "sizedlang/size_order.hpp"

#include <limits>
#include <map>
#include <sstream>

namespace sizedlang {

namespace {

thread_local SizeOrderStats g_stats;
thread_local int g_measureDepth = 0;
thread_local ExplainSink g_explain;

struct Reach {
  // Minimal (offsets − steps) over hypothesis paths from the start variable,
  // per reachable base. A path of k hypothesis steps j < u accumulates the
  // bound offsets and spends one successor per step.
  std::map<std::string, int> toVar;
  bool toInfty = false;
  std::map<std::string, std::string> parent;  // for explanations
};

Reach reachability(const ConstraintCtx& ctx, const std::string& start) {
  Reach r;
  r.toVar[start] = 0;
  // Hypotheses form a DAG; iterate to a fixed point with a step cap as a
  // guard against malformed contexts.
  size_t cap = ctx.sizeHypotheses.size() + 1;
  for (size_t round = 0; round < cap; ++round) {
    bool changed = false;
    for (const auto& h : ctx.sizeHypotheses) {
      auto it = r.toVar.find(h.var);
      if (it == r.toVar.end()) continue;
      if (h.bound.infty) {
        if (!r.toInfty) {
          r.toInfty = true;
          changed = true;
        }
        continue;
      }
      int cand = it->second + static_cast<int>(h.bound.offset) - 1;
      auto jt = r.toVar.find(h.bound.var);
      if (jt == r.toVar.end() || cand < jt->second) {
        r.toVar[h.bound.var] = cand;
        r.parent[h.bound.var] = h.var;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return r;
}

// Derivability of s <= t from hypotheses alone (no "# is top" axiom).
bool leqCore(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t,
             std::string* how) {
  auto ns = normalizeSize(s);
  auto nt = normalizeSize(t);
  if (ns.baseIsInfty) {
    if (how) *how = "# <= #";
    return nt.baseIsInfty;  // offsets on # are absorbed
  }
  Reach r = reachability(ctx, ns.baseVar);
  if (nt.baseIsInfty) {
    if (how && r.toInfty) *how = "hypothesis chain reaches a bound of #";
    return r.toInfty;
  }
  auto it = r.toVar.find(nt.baseVar);
  if (it == r.toVar.end()) return false;
  bool ok = static_cast<int>(ns.offset) + it->second <= static_cast<int>(nt.offset);
  if (ok && how) {
    std::ostringstream os;
    std::string v = nt.baseVar;
    std::string chain = v;
    while (r.parent.count(v)) {
      v = r.parent.at(v);
      chain = v + " < " + chain;
    }
    os << "via " << chain;
    *how = os.str();
  }
  return ok;
}

void explain(const char* rel, const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t,
             bool result, const std::string& how) {
  if (!g_explain) return;
  std::ostringstream os;
  os << rel << ": " << printSize(s) << " vs " << printSize(t) << " -> "
     << (result ? "yes" : "no");
  if (result && !how.empty()) os << " (" << how << ")";
  g_explain(os.str());
}

} // namespace

SizeOrderStats& sizeOrderStats() { return g_stats; }
void resetSizeOrderStats() { g_stats = {}; }

MeasureScope::MeasureScope() { ++g_measureDepth; }
MeasureScope::~MeasureScope() { --g_measureDepth; }

void setExplainSink(ExplainSink sink) { g_explain = std::move(sink); }

bool leq(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t) {
  ++g_stats.queries;
  std::string how;
  bool result;
  if (normalizeSize(t).baseIsInfty && !normalizeSize(s).baseIsInfty) {
    result = true;
    how = "# is the top size";
  } else {
    result = leqCore(ctx, s, t, &how);
  }
  explain("leq", ctx, s, t, result, how);
  return result;
}

bool ltInst(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t) {
  ++g_stats.queries;
  auto ns = normalizeSize(s);
  auto nt = normalizeSize(t);
  if (ns.baseIsInfty && nt.baseIsInfty) {
    ++g_stats.inftyAdmissions;
    if (g_measureDepth > 0) ++g_stats.inftyAdmissionsInMeasure;
    explain("ltInst", ctx, s, t, true, "# < # admitted for instantiation");
    return true;
  }
  std::string how;
  bool result = leqCore(ctx, s.succ(), t, &how);
  explain("ltInst", ctx, s, t, result, how);
  return result;
}

bool ltMeasure(const ConstraintCtx& ctx, const SizeExpr& s, const SizeExpr& t) {
  ++g_stats.queries;
  auto ns = normalizeSize(s);
  auto nt = normalizeSize(t);
  if (ns.baseIsInfty && nt.baseIsInfty) {
    explain("ltMeasure", ctx, s, t, false, "");
    return false;
  }
  std::string how;
  bool result = leqCore(ctx, s.succ(), t, &how);
  explain("ltMeasure", ctx, s, t, result, how);
  return result;
}

} // namespace sizedlang
