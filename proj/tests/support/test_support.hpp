#pragma once

#include <random>
#include <string>
#include <vector>

#include "wfshacl/wfshacl.hpp"

#ifndef WFSHACL_FIXTURE_DIR
#error "WFSHACL_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace wfshacl::testing {

inline std::string fixture_path(const std::string& name) { return std::string(WFSHACL_FIXTURE_DIR) + "/" + name; }
inline DataGraph load_graph(const std::string& name) { return parse_graph(read_file(fixture_path(name))); }
inline Document load_doc(const std::string& name) { return parse_document(read_file(fixture_path(name))); }

inline DataGraph g1() { return load_graph("g1.graph"); }
inline DataGraph g2() { return load_graph("g2.graph"); }
inline Document ex1() { return load_doc("ex1.shacl"); }
inline ConstraintSet cex1() { return ex1().constraints; }
inline Document prop10() { return load_doc("prop10.shacl"); }

inline const std::vector<std::string>& fixture_documents() {
  static const std::vector<std::string> docs{"ex1.shacl",         "prop10.shacl",     "grid_supported.shacl",
                                             "grid_stable.shacl", "impl_a.shacl",     "impl_a_or_b.shacl",
                                             "impl_a_or_b_prime.shacl", "class_target.shacl", "role_target.shacl"};
  return docs;
}

inline ShapeAssignment assignment(std::initializer_list<Literal> ls) {
  ShapeAssignment S;
  for (const auto& l : ls) S.add(l);
  return S;
}
inline Literal P(const char* s, const char* a) { return Literal{ShapeName(s), NodeId(a), true}; }
inline Literal N(const char* s, const char* a) { return Literal{ShapeName(s), NodeId(a), false}; }

inline NodeSet nodes(std::initializer_list<const char*> xs) {
  NodeSet out;
  for (auto x : xs) out.insert(NodeId(x));
  return out;
}

/// Parameters for random instances.
struct RandomSpec {
  std::size_t max_nodes = 6;
  std::size_t max_defs = 8;
  std::vector<std::string> concepts{"A", "B"};
  std::vector<std::string> roles{"p", "r"};
  std::vector<std::string> nominals{"0"};
  double concept_density = 0.3;
  double edge_density = 0.25;
  bool inverse = true;
};

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::size_t between(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  std::mt19937_64& engine() { return rng_; }

  /// Nodes named 0..n-1; every listed nominal that falls in range is mentioned.
  DataGraph graph(const RandomSpec& spec, std::size_t n) {
    std::set<ConceptAssertion> cs;
    std::set<RoleAssertion> rs;
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& c : spec.concepts)
        if (chance(spec.concept_density)) cs.insert({ConceptName(c), NodeId(std::to_string(i))});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (const auto& r : spec.roles)
          if (chance(spec.edge_density)) rs.insert({RoleName(r), NodeId(std::to_string(i)), NodeId(std::to_string(j))});
    DataGraph g(cs, rs);
    for (std::size_t i = 0; i < n; ++i) {
      NodeId a(std::to_string(i));
      if (!g.contains(a)) cs.insert({ConceptName("Mark"), a});
    }
    return DataGraph(cs, rs);
  }

  Role role(const RandomSpec& spec) { return Role(RoleName(pick(spec.roles)), spec.inverse && chance(0.3)); }

  /// Constraint set already in normal form over shapes s0..s{k-1}.
  ConstraintSet normal_set(const RandomSpec& spec, std::size_t k) {
    ConstraintSet c;
    auto shape = [&] { return ShapeName("s" + std::to_string(below(k))); };
    for (std::size_t i = 0; i < k; ++i) {
      ShapeExpr body = ShapeExpr::concept_ref(ConceptName(pick(spec.concepts)));
      switch (below(7)) {
        case 0: break;
        case 1:
          if (!spec.nominals.empty()) body = ShapeExpr::nominal(NodeId(pick(spec.nominals)));
          break;
        case 2: body = ShapeExpr::neg(shape()); break;
        case 3: body = ShapeExpr::exists(role(spec), ShapeExpr::shape(shape())); break;
        case 4: body = ShapeExpr::forall(role(spec), ShapeExpr::shape(shape())); break;
        case 5: body = ShapeExpr::conj(ShapeExpr::shape(shape()), ShapeExpr::shape(shape())); break;
        default: body = ShapeExpr::disj(ShapeExpr::shape(shape()), ShapeExpr::shape(shape())); break;
      }
      c.define(ShapeName("s" + std::to_string(i)), body);
    }
    return c;
  }

  /// Nested bodies of bounded depth over shapes s0..s{k-1}.
  ShapeExpr expr(const RandomSpec& spec, std::size_t k, int depth) {
    auto shape = [&] { return ShapeName("s" + std::to_string(below(k))); };
    std::size_t choice = depth <= 0 ? below(4) : below(8);
    switch (choice) {
      case 0: return ShapeExpr::concept_ref(ConceptName(pick(spec.concepts)));
      case 1: return spec.nominals.empty() ? ShapeExpr::shape(shape()) : ShapeExpr::nominal(NodeId(pick(spec.nominals)));
      case 2: return ShapeExpr::neg(shape());
      case 3: return ShapeExpr::shape(shape());
      case 4: return ShapeExpr::conj(expr(spec, k, depth - 1), expr(spec, k, depth - 1));
      case 5: return ShapeExpr::disj(expr(spec, k, depth - 1), expr(spec, k, depth - 1));
      case 6: return ShapeExpr::exists(role(spec), expr(spec, k, depth - 1));
      default: return ShapeExpr::forall(role(spec), expr(spec, k, depth - 1));
    }
  }

  ConstraintSet general_set(const RandomSpec& spec, std::size_t k, int depth) {
    ConstraintSet c;
    for (std::size_t i = 0; i < k; ++i) c.define(ShapeName("s" + std::to_string(i)), expr(spec, k, depth));
    return c;
  }

  /// Normal-form set where negative references only point to lower levels.
  ConstraintSet stratified_set(const RandomSpec& spec, std::size_t k) {
    std::vector<std::size_t> level(k);
    std::size_t cur = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0 && chance(0.4)) ++cur;
      level[i] = cur;
    }
    auto pick_where = [&](std::size_t i, bool strict) -> std::optional<ShapeName> {
      std::vector<std::size_t> ok;
      for (std::size_t j = 0; j < k; ++j)
        if (strict ? level[j] < level[i] : level[j] <= level[i]) ok.push_back(j);
      if (ok.empty()) return std::nullopt;
      return ShapeName("s" + std::to_string(pick(ok)));
    };
    ConstraintSet c;
    for (std::size_t i = 0; i < k; ++i) {
      ShapeExpr body = ShapeExpr::concept_ref(ConceptName(pick(spec.concepts)));
      std::size_t form = below(7);
      auto a = pick_where(i, false), b = pick_where(i, false), n = pick_where(i, true);
      if (form == 1 && !spec.nominals.empty()) body = ShapeExpr::nominal(NodeId(pick(spec.nominals)));
      if (form == 2 && n) body = ShapeExpr::neg(*n);
      if (form == 3) body = ShapeExpr::exists(role(spec), ShapeExpr::shape(*a));
      if (form == 4) body = ShapeExpr::forall(role(spec), ShapeExpr::shape(*a));
      if (form == 5) body = ShapeExpr::conj(ShapeExpr::shape(*a), ShapeExpr::shape(*b));
      if (form == 6) body = ShapeExpr::disj(ShapeExpr::shape(*a), ShapeExpr::shape(*b));
      c.define(ShapeName("s" + std::to_string(i)), body);
    }
    return c;
  }

  /// Closed formula; variables only occur under their binders.
  MuFormula formula(const RandomSpec& spec, int depth, std::vector<std::string>& scope) {
    std::size_t choice = depth <= 0 ? below(3) : below(9);
    switch (choice) {
      case 0: return MuFormula::concept_lit(ConceptName(pick(spec.concepts)), chance(0.5));
      case 1:
        if (!scope.empty()) return MuFormula::var(pick(scope));
        return MuFormula::concept_lit(ConceptName(pick(spec.concepts)), chance(0.5));
      case 2:
        if (!spec.nominals.empty()) return MuFormula::nominal(NodeId(pick(spec.nominals)), chance(0.5));
        return chance(0.5) ? MuFormula::top() : MuFormula::bottom();
      case 3: return MuFormula::conj(formula(spec, depth - 1, scope), formula(spec, depth - 1, scope));
      case 4: return MuFormula::disj(formula(spec, depth - 1, scope), formula(spec, depth - 1, scope));
      case 5: return MuFormula::box(role(spec), formula(spec, depth - 1, scope));
      case 6: return MuFormula::diamond(role(spec), formula(spec, depth - 1, scope));
      default: {
        std::string x = "X" + std::to_string(scope.size());
        scope.push_back(x);
        MuFormula b = formula(spec, depth - 1, scope);
        scope.pop_back();
        return choice == 7 ? MuFormula::mu(x, b) : MuFormula::nu(x, b);
      }
    }
  }

  MuFormula formula(const RandomSpec& spec, int depth) {
    std::vector<std::string> scope;
    return formula(spec, depth, scope);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace wfshacl::testing
