#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "wfshacl/error.hpp"
#include "wfshacl/graph.hpp"
#include "wfshacl/shape_expr.hpp"

namespace wfshacl {

/// Head-unique set of constraints s <- phi.
class ConstraintSet {
 public:
  using Map = std::map<ShapeName, ShapeExpr>;

  ConstraintSet() = default;

  void define(ShapeName head, ShapeExpr body) {
    if (defs_.count(head)) throw Error(ErrorKind::DuplicateHead, "shape '" + head.str() + "' defined twice");
    defs_.emplace(std::move(head), std::move(body));
  }

  bool defines(const ShapeName& s) const { return defs_.count(s) > 0; }

  const ShapeExpr& body(const ShapeName& s) const {
    auto it = defs_.find(s);
    if (it == defs_.end()) throw Error(ErrorKind::UndefinedShape, "shape '" + s.str() + "' has no definition");
    return it->second;
  }

  const Map& defs() const { return defs_; }
  std::size_t size() const { return defs_.size(); }
  bool empty() const { return defs_.empty(); }

  std::vector<ShapeName> heads() const {
    std::vector<ShapeName> out;
    for (const auto& [h, _] : defs_) out.push_back(h);
    return out;
  }

  /// Every referenced shape name must have a definition.
  void check_closed() const {
    for (const auto& [h, b] : defs_)
      for (const auto& s : signature_of(b).shapes)
        if (!defines(s))
          throw Error(ErrorKind::UndefinedShape, "shape '" + s.str() + "' used in '" + h.str() + "' is not defined");
  }

  ExprSignature signature() const {
    ExprSignature sig;
    for (const auto& [h, b] : defs_) {
      sig.shapes.insert(h);
      sig.add(b);
    }
    return sig;
  }

  friend bool operator==(const ConstraintSet& a, const ConstraintSet& b) { return a.defs_ == b.defs_; }

 private:
  Map defs_;
};

struct Target {
  enum class Kind { Node, Class, Role };
  std::variant<NodeId, ConceptName, Role> subject;
  ShapeName shape;

  Kind kind() const { return static_cast<Kind>(subject.index()); }
  const NodeId& node() const { return std::get<NodeId>(subject); }
  const ConceptName& concept_name() const { return std::get<ConceptName>(subject); }
  const Role& role() const { return std::get<Role>(subject); }

  static Target on_node(NodeId a, ShapeName s) { return Target{std::move(a), std::move(s)}; }
  static Target on_class(ConceptName c, ShapeName s) { return Target{std::move(c), std::move(s)}; }
  static Target on_role(Role r, ShapeName s) { return Target{std::move(r), std::move(s)}; }

  friend bool operator==(const Target&, const Target&) = default;
};

struct Document {
  ConstraintSet constraints;
  std::vector<Target> targets;

  /// Rejects references to undefined shapes, in bodies and in targets.
  void check() const {
    constraints.check_closed();
    for (const auto& t : targets)
      if (!constraints.defines(t.shape))
        throw Error(ErrorKind::UndefinedShape, "target shape '" + t.shape.str() + "' is not defined");
  }

  ExprSignature signature() const {
    ExprSignature sig = constraints.signature();
    for (const auto& t : targets) {
      switch (t.kind()) {
        case Target::Kind::Node: sig.nominals.insert(t.node()); break;
        case Target::Kind::Class: sig.concepts.insert(t.concept_name()); break;
        case Target::Kind::Role:
          sig.roles.insert(t.role().name);
          sig.uses_inverse = sig.uses_inverse || t.role().inverted;
          break;
      }
    }
    return sig;
  }

  /// Individuals mentioned anywhere in the document.
  std::set<NodeId> individuals() const { return signature().nominals; }
};

/// Shape names reachable from s through the bodies, s included.
inline std::set<ShapeName> closure(const ConstraintSet& c, const ShapeName& s) {
  std::set<ShapeName> seen{s};
  std::deque<ShapeName> todo{s};
  while (!todo.empty()) {
    ShapeName cur = todo.front();
    todo.pop_front();
    for (const auto& t : signature_of(c.body(cur)).shapes)
      if (seen.insert(t).second) todo.push_back(t);
  }
  return seen;
}

inline ConstraintSet restrict_to(const ConstraintSet& c, const ShapeName& s) {
  ConstraintSet out;
  for (const auto& h : closure(c, s)) out.define(h, c.body(h));
  return out;
}

/// True iff the body has one of the seven normal forms.
inline bool is_normal_body(const ShapeExpr& e) {
  using K = ShapeExpr::Kind;
  switch (e.kind()) {
    case K::Concept:
    case K::Nominal:
    case K::NegShape: return true;
    case K::Shape: return false;
    case K::And:
    case K::Or: return e.left().kind() == K::Shape && e.right().kind() == K::Shape;
    case K::Forall:
    case K::Exists: return e.body().kind() == K::Shape;
  }
  return false;
}

inline bool is_normalized(const ConstraintSet& c) {
  for (const auto& [h, b] : c.defs())
    if (!is_normal_body(b)) return false;
  return true;
}

namespace detail {

class Normalizer {
 public:
  explicit Normalizer(const ConstraintSet& in) : in_(in) {}

  ConstraintSet run() {
    in_.check_closed();
    for (const auto& [h, b] : in_.defs()) {
      ShapeExpr nb = top(h, b);
      out_.define(h, nb);
    }
    return std::move(out_);
  }

 private:
  using K = ShapeExpr::Kind;

  ShapeExpr top(const ShapeName& head, const ShapeExpr& e) {
    switch (e.kind()) {
      case K::Concept:
      case K::Nominal:
      case K::NegShape: return e;
      case K::Shape: return ShapeExpr::disj(e, e);
      case K::And: {
        auto l = atom(head, e.left());
        return ShapeExpr::conj(l, atom(head, e.right()));
      }
      case K::Or: {
        auto l = atom(head, e.left());
        return ShapeExpr::disj(l, atom(head, e.right()));
      }
      case K::Forall: return ShapeExpr::forall(e.role(), atom(head, e.body()));
      case K::Exists: return ShapeExpr::exists(e.role(), atom(head, e.body()));
    }
    return e;
  }

  ShapeExpr atom(const ShapeName& head, const ShapeExpr& e) {
    if (e.kind() == K::Shape) return e;
    ShapeName fresh = fresh_name(head);
    ShapeExpr body = top(head, e);
    out_.define(fresh, body);
    return ShapeExpr::shape(fresh);
  }

  ShapeName fresh_name(const ShapeName& head) {
    std::size_t& n = counters_[head];
    for (;;) {
      ShapeName cand(head.str() + "#" + std::to_string(++n));
      if (!in_.defines(cand) && !out_.defines(cand)) return cand;
    }
  }

  const ConstraintSet& in_;
  ConstraintSet out_;
  std::map<ShapeName, std::size_t> counters_;
};

}  // namespace detail

/// Rewrites every body into one of the seven normal forms. Fresh names are
/// `<head>#<n>`; plain references s <- t become s <- t | t.
inline ConstraintSet normalize(const ConstraintSet& c) { return detail::Normalizer(c).run(); }

inline Document normalize(const Document& d) { return Document{normalize(d.constraints), d.targets}; }

inline bool check_compatible(const DataGraph& g, const Document& d) {
  for (const auto& a : d.individuals())
    if (!g.contains(a)) return false;
  return true;
}

inline void require_compatible(const DataGraph& g, const Document& d) {
  for (const auto& a : d.individuals())
    if (!g.contains(a))
      throw Error(ErrorKind::IncompatibleGraph, "node '" + a.str() + "' of the document does not occur in the graph");
}

}  // namespace wfshacl
