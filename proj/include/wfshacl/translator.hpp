#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wfshacl/document.hpp"
#include "wfshacl/mu_eval.hpp"
#include "wfshacl/mu_formula.hpp"

namespace wfshacl {

/// Visited signed shape names; second is true for the barred form.
using Visited = std::set<std::pair<ShapeName, bool>>;

inline Visited pos(const Visited& S) {
  Visited out;
  for (const auto& e : S)
    if (!e.second) out.insert(e);
  return out;
}

/// X_s for s, Xbar_s for the barred form.
inline std::string var_name(const ShapeName& s, bool barred) { return (barred ? "Xbar_" : "X_") + s.str(); }

struct TranslationOptions {
  /// Maximum number of distinct formula nodes created.
  std::size_t node_budget = 2'000'000;
};

/// Positive and negated translation of shape expressions. Results for the
/// same (visited set, polarity, expression) are shared, so the output is a
/// DAG whose unfolding is the textbook formula.
class Translator {
 public:
  explicit Translator(ConstraintSet c, TranslationOptions opt = {}) : c_(std::move(c)), opt_(opt) {}

  MuFormula tr_pos(const Visited& S, const ShapeExpr& e) { return tr(S, e, true); }
  MuFormula tr_neg(const Visited& S, const ShapeExpr& e) { return tr(S, e, false); }

  const ConstraintSet& constraints() const { return c_; }
  std::size_t nodes_created() const { return created_; }

 private:
  using K = ShapeExpr::Kind;

  MuFormula tr(const Visited& S, const ShapeExpr& e, bool positive) {
    auto key = std::make_tuple(positive, S, e);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    MuFormula r = build(S, e, positive);
    if (++created_ > opt_.node_budget)
      throw Error(ErrorKind::TranslationBudget, "translation exceeded " + std::to_string(opt_.node_budget) + " nodes");
    memo_.emplace(std::move(key), r);
    return r;
  }

  MuFormula build(const Visited& S, const ShapeExpr& e, bool positive) {
    switch (e.kind()) {
      case K::Concept: return MuFormula::concept_lit(e.concept_name(), !positive);
      case K::Nominal: return MuFormula::nominal(e.nominal_id(), !positive);
      case K::And:
        return positive ? MuFormula::conj(tr(S, e.left(), true), tr(S, e.right(), true))
                        : MuFormula::disj(tr(S, e.left(), false), tr(S, e.right(), false));
      case K::Or:
        return positive ? MuFormula::disj(tr(S, e.left(), true), tr(S, e.right(), true))
                        : MuFormula::conj(tr(S, e.left(), false), tr(S, e.right(), false));
      case K::Exists:
        return positive ? MuFormula::diamond(e.role(), tr(S, e.body(), true))
                        : MuFormula::box(e.role(), tr(S, e.body(), false));
      case K::Forall:
        return positive ? MuFormula::box(e.role(), tr(S, e.body(), true))
                        : MuFormula::diamond(e.role(), tr(S, e.body(), false));
      case K::NegShape: {
        ShapeExpr s = ShapeExpr::shape(e.shape_name());
        return positive ? tr(S, s, false) : tr(pos(S), s, true);
      }
      case K::Shape: {
        ShapeName s = e.shape_name();
        bool barred = !positive;
        std::string x = var_name(s, barred);
        if (S.count({s, barred})) return MuFormula::var(x);
        Visited S2 = S;
        S2.insert({s, barred});
        MuFormula body = tr(S2, c_.body(s), positive);
        return positive ? MuFormula::mu(x, body) : MuFormula::nu(x, body);
      }
    }
    return MuFormula::bottom();
  }

  ConstraintSet c_;
  TranslationOptions opt_;
  std::size_t created_ = 0;
  std::map<std::tuple<bool, Visited, ShapeExpr>, MuFormula> memo_;
};

/// tr+ of a shape name over the closure of its definition.
inline MuFormula translate(const ConstraintSet& c, const ShapeName& s, TranslationOptions opt = {}) {
  Translator t(restrict_to(c, s), opt);
  return t.tr_pos({}, ShapeExpr::shape(s));
}

/// Binder-free-variable linter: no mu binder inside the body of a nu binder
/// may refer to that nu binder's variable.
inline bool has_limited_alternation(const MuFormula& f) {
  using K = MuFormula::Kind;
  // Walk with the stack of enclosing nu variables; entering a mu body, any
  // free occurrence of an enclosing nu variable is a violation.
  std::function<bool(const MuFormula&, std::vector<std::string>&)> go = [&](const MuFormula& g,
                                                                          std::vector<std::string>& nus) -> bool {
    switch (g.kind()) {
      case K::Mu: {
        auto fv = free_vars(g.body());
        for (const auto& x : nus)
          if (fv.count(x) && x != g.name()) return false;
        // Shadowed names are no longer the enclosing binder's variable.
        std::vector<std::string> inner;
        for (const auto& x : nus)
          if (x != g.name()) inner.push_back(x);
        return go(g.body(), inner);
      }
      case K::Nu: {
        std::vector<std::string> inner;
        for (const auto& x : nus)
          if (x != g.name()) inner.push_back(x);
        inner.push_back(g.name());
        return go(g.body(), inner);
      }
      case K::And:
      case K::Or: return go(g.left(), nus) && go(g.right(), nus);
      case K::Box:
      case K::Diamond: return go(g.body(), nus);
      default: return true;
    }
  };
  std::vector<std::string> none;
  return go(f, none);
}

/// `__fresh_p<n>` with the least n not used as a role name by any document.
inline RoleName fresh_role(const std::vector<const Document*>& docs) {
  std::set<RoleName> used;
  for (const auto* d : docs) {
    auto sig = d->signature();
    used.insert(sig.roles.begin(), sig.roles.end());
  }
  for (std::size_t n = 0;; ++n) {
    RoleName p("__fresh_p" + std::to_string(n));
    if (!used.count(p)) return p;
  }
}

/// Conjunction over targets of the per-target requirement; top when empty.
inline MuFormula theta(const Document& d, TranslationOptions opt = {}) {
  std::vector<MuFormula> parts;
  for (const auto& t : d.targets) {
    MuFormula body = translate(d.constraints, t.shape, opt);
    switch (t.kind()) {
      case Target::Kind::Node: parts.push_back(MuFormula::disj(MuFormula::nominal(t.node(), true), body)); break;
      case Target::Kind::Class:
        parts.push_back(MuFormula::disj(MuFormula::concept_lit(t.concept_name(), true), body));
        break;
      case Target::Kind::Role:
        parts.push_back(MuFormula::disj(dualize(MuFormula::diamond(t.role(), MuFormula::top())), body));
        break;
    }
  }
  return MuFormula::conj_all(parts);
}

inline const std::string kLambdaVar = "Z_doc";

/// Greatest fixpoint propagating theta along every role of d and along p,
/// in both directions.
inline MuFormula lambda(const Document& d, const RoleName& p, TranslationOptions opt = {}) {
  std::set<RoleName> roles = d.signature().roles;
  roles.insert(p);
  std::vector<MuFormula> parts{theta(d, opt)};
  MuFormula X = MuFormula::var(kLambdaVar);
  for (const auto& r : roles) parts.push_back(MuFormula::box(Role(r, true), X));
  for (const auto& r : roles) parts.push_back(MuFormula::box(Role(r), X));
  return MuFormula::nu(kLambdaVar, MuFormula::conj_all(parts));
}

/// Satisfiable iff d1 does not imply d2: every individual sees (a & Lambda1)
/// through p and some p-successor violates Lambda2. Lambda travels along p in
/// both directions, so all p-successors share one verdict.
inline MuFormula implication_formula(const Document& d1, const Document& d2, const RoleName& p,
                                     TranslationOptions opt = {}) {
  std::set<NodeId> I = d1.individuals();
  auto i2 = d2.individuals();
  I.insert(i2.begin(), i2.end());
  MuFormula l1 = lambda(d1, p, opt);
  std::vector<MuFormula> parts;
  for (const auto& a : I) parts.push_back(MuFormula::diamond(Role(p), MuFormula::conj(MuFormula::nominal(a), l1)));
  // Without individuals some p-successor still has to satisfy Lambda1.
  if (I.empty()) parts.push_back(MuFormula::diamond(Role(p), l1));
  parts.push_back(MuFormula::diamond(Role(p), dualize(lambda(d2, p, opt))));
  return MuFormula::conj_all(parts);
}

inline MuFormula implication_formula(const Document& d1, const Document& d2, TranslationOptions opt = {}) {
  return implication_formula(d1, d2, fresh_role({&d1, &d2}), opt);
}

/// Document satisfiability formula: the implication formula against the empty
/// document with its unsatisfiable last conjunct dropped.
inline MuFormula docsat_formula(const Document& d, const RoleName& p, TranslationOptions opt = {}) {
  MuFormula l = lambda(d, p, opt);
  std::vector<MuFormula> parts;
  for (const auto& a : d.individuals())
    parts.push_back(MuFormula::diamond(Role(p), MuFormula::conj(MuFormula::nominal(a), l)));
  if (parts.empty()) parts.push_back(MuFormula::diamond(Role(p), l));
  return MuFormula::conj_all(parts);
}

/// g plus one hub node with a p-edge to every node and a p self-loop.
inline std::pair<DataGraph, NodeId> with_hub(const DataGraph& g, const RoleName& p) {
  std::string name = "__hub";
  while (g.contains(NodeId(name))) name += "_";
  NodeId hub(name);
  std::set<RoleAssertion> extra{{p, hub, hub}};
  for (const auto& a : g.domain()) extra.insert({p, hub, a});
  return {g.with({}, extra), hub};
}

}  // namespace wfshacl
