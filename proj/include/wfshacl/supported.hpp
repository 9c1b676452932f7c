#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wfshacl/wf_engine.hpp"

namespace wfshacl {

/// True iff S is total and, for every s <- phi, the positive part of s equals
/// the lower evaluation of phi.
inline bool is_supported_model(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S) {
  if (!S.is_consistent() || !S.is_total(c.heads(), g.domain()))
    throw Error(ErrorKind::NotTotal, "supported-model check needs a consistent total assignment");
  detail::WfProgram w(g, c);
  detail::Interp I = w.program().from_assignment(S);
  detail::Interp T = w.t_op(I);
  for (int k : w.defined())
    if (T.pos[k] != I.pos[k]) return false;
  return true;
}

struct SupportedOptions {
  std::size_t budget_bits = 20;
};

/// All supported models, ordered lexicographically over the (shape, node)
/// bit vector with shapes and nodes in their natural order.
inline std::vector<ShapeAssignment> enumerate_supported_models(const DataGraph& g, const ConstraintSet& c,
                                                               SupportedOptions opt = {}) {
  const std::size_t n = g.size();
  const std::size_t bits = c.size() * n;
  if (bits > opt.budget_bits || bits >= 63)
    throw Error(ErrorKind::BudgetExceeded, std::to_string(bits) + " assignment bits exceed the budget of " +
                                               std::to_string(opt.budget_bits));
  detail::WfProgram w(g, c);
  const auto& defined = w.defined();
  std::vector<ShapeAssignment> out;
  detail::Interp I = w.program().empty_interp();
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t x = 0; x < total; ++x) {
    for (std::size_t j = 0; j < bits; ++j) {
      bool v = (x >> (bits - 1 - j)) & 1u;
      int k = defined[j / n];
      I.pos[k][j % n] = v;
      I.neg[k][j % n] = !v;
    }
    detail::Interp T = w.t_op(I);
    bool ok = true;
    for (int k : defined)
      if (T.pos[k] != I.pos[k]) {
        ok = false;
        break;
      }
    if (ok) out.push_back(w.program().to_assignment(I));
  }
  return out;
}

/// Ordered partition C_0, ..., C_k of a constraint set.
struct Stratification {
  std::vector<ConstraintSet> layers;
};

/// Dependency edges of one body: (shape, negative?).
inline std::vector<std::pair<ShapeName, bool>> dependencies(const ShapeExpr& body) {
  std::vector<std::pair<ShapeName, bool>> out;
  for (const auto& e : sub(body)) {
    if (e.kind() == ShapeExpr::Kind::Shape) out.push_back({e.shape_name(), false});
    if (e.kind() == ShapeExpr::Kind::NegShape) out.push_back({e.shape_name(), true});
  }
  return out;
}

/// A stratification exists iff no dependency cycle passes through a negative
/// edge. Layers are the least levels satisfying both conditions.
inline std::optional<Stratification> stratify(const ConstraintSet& c) {
  c.check_closed();
  const auto heads = c.heads();
  std::map<ShapeName, int> level;
  for (const auto& h : heads) level[h] = 0;
  // Bellman-Ford style longest path; more than |heads| rounds means a
  // negative edge sits on a cycle.
  for (std::size_t round = 0; round <= heads.size() + 1; ++round) {
    bool changed = false;
    for (const auto& h : heads)
      for (const auto& [t, neg] : dependencies(c.body(h))) {
        int need = level[t] + (neg ? 1 : 0);
        if (level[h] < need) {
          level[h] = need;
          changed = true;
        }
      }
    if (!changed) {
      int top = 0;
      for (const auto& [h, l] : level) top = std::max(top, l);
      Stratification st;
      if (heads.empty()) return st;
      st.layers.resize(top + 1);
      for (const auto& h : heads) st.layers[level[h]].define(h, c.body(h));
      return st;
    }
    if (round > heads.size()) break;
  }
  return std::nullopt;
}

/// Checks both layer conditions of a given stratification against c.
inline bool is_valid_stratification(const ConstraintSet& c, const Stratification& st) {
  std::map<ShapeName, int> level;
  std::size_t count = 0;
  for (std::size_t i = 0; i < st.layers.size(); ++i)
    for (const auto& [h, b] : st.layers[i].defs()) {
      if (!c.defines(h) || !(c.body(h) == b) || level.count(h)) return false;
      level[h] = static_cast<int>(i);
      ++count;
    }
  if (count != c.size()) return false;
  for (const auto& [h, b] : c.defs())
    for (const auto& [t, neg] : dependencies(b)) {
      if (neg && !(level[t] < level[h])) return false;
      if (!neg && !(level[t] <= level[h])) return false;
    }
  return true;
}

}  // namespace wfshacl
