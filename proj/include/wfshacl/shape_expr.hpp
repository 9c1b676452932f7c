#pragma once

#include <memory>
#include <set>
#include <string>

#include "wfshacl/error.hpp"
#include "wfshacl/names.hpp"

namespace wfshacl {

/// Immutable shape expression. Children are shared, so copies are cheap.
class ShapeExpr {
 public:
  enum class Kind { Shape, Nominal, Concept, NegShape, And, Or, Forall, Exists };

  static ShapeExpr shape(ShapeName s) { return leaf(Kind::Shape, s.str()); }
  static ShapeExpr shape(const char* s) { return leaf(Kind::Shape, s); }
  static ShapeExpr nominal(NodeId a) { return leaf(Kind::Nominal, a.str()); }
  static ShapeExpr concept_ref(ConceptName c) { return leaf(Kind::Concept, c.str()); }
  static ShapeExpr neg(ShapeName s) { return leaf(Kind::NegShape, s.str()); }
  static ShapeExpr conj(ShapeExpr l, ShapeExpr r) { return binary(Kind::And, std::move(l), std::move(r)); }
  static ShapeExpr disj(ShapeExpr l, ShapeExpr r) { return binary(Kind::Or, std::move(l), std::move(r)); }
  static ShapeExpr forall(Role r, ShapeExpr body) { return modal(Kind::Forall, std::move(r), std::move(body)); }
  static ShapeExpr exists(Role r, ShapeExpr body) { return modal(Kind::Exists, std::move(r), std::move(body)); }

  Kind kind() const { return kind_; }
  bool is_binary() const { return kind_ == Kind::And || kind_ == Kind::Or; }
  bool is_modal() const { return kind_ == Kind::Forall || kind_ == Kind::Exists; }
  bool is_leaf() const { return !is_binary() && !is_modal(); }

  /// Token of a leaf (shape, nominal, concept, or negated shape).
  const std::string& name() const { return name_; }
  ShapeName shape_name() const { return ShapeName(name_); }
  NodeId nominal_id() const { return NodeId(name_); }
  ConceptName concept_name() const { return ConceptName(name_); }

  const Role& role() const { return role_; }
  const ShapeExpr& left() const { return *lhs_; }
  const ShapeExpr& right() const { return *rhs_; }
  const ShapeExpr& body() const { return *lhs_; }

  int compare(const ShapeExpr& o) const {
    if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
    if (is_leaf()) return natural_compare(name_, o.name_);
    if (is_modal()) {
      if (auto c = role_ <=> o.role_; c != 0) return c < 0 ? -1 : 1;
      return lhs_->compare(*o.lhs_);
    }
    if (int c = lhs_->compare(*o.lhs_); c != 0) return c;
    return rhs_->compare(*o.rhs_);
  }
  friend bool operator==(const ShapeExpr& a, const ShapeExpr& b) { return a.compare(b) == 0; }
  friend std::strong_ordering operator<=>(const ShapeExpr& a, const ShapeExpr& b) { return a.compare(b) <=> 0; }

  /// Text form accepted by the document parser.
  std::string to_string() const { return print(0, true); }

 private:
  ShapeExpr() = default;

  static ShapeExpr leaf(Kind k, std::string n) {
    ShapeExpr e;
    e.kind_ = k;
    e.name_ = std::move(n);
    return e;
  }
  static ShapeExpr binary(Kind k, ShapeExpr l, ShapeExpr r) {
    ShapeExpr e;
    e.kind_ = k;
    e.lhs_ = std::make_shared<const ShapeExpr>(std::move(l));
    e.rhs_ = std::make_shared<const ShapeExpr>(std::move(r));
    return e;
  }
  static ShapeExpr modal(Kind k, Role r, ShapeExpr body) {
    ShapeExpr e;
    e.kind_ = k;
    e.role_ = std::move(r);
    e.lhs_ = std::make_shared<const ShapeExpr>(std::move(body));
    return e;
  }

  // Precedence: | is 1, & is 2, atoms 3. Modal prefixes extend to the right,
  // so they only go unparenthesized at the tail of the enclosing text.
  std::string print(int min_prec, bool tail) const {
    switch (kind_) {
      case Kind::Shape: return name_;
      case Kind::Concept: return name_;
      case Kind::Nominal: return "<" + name_ + ">";
      case Kind::NegShape: return "!" + name_;
      case Kind::And:
      case Kind::Or: {
        int p = kind_ == Kind::Or ? 1 : 2;
        bool paren = p < min_prec;
        bool t = paren || tail;
        std::string s = lhs_->print(p, false) + (kind_ == Kind::Or ? " | " : " & ") + rhs_->print(p + 1, t);
        return paren ? "(" + s + ")" : s;
      }
      case Kind::Forall:
      case Kind::Exists: {
        std::string b = lhs_->is_binary() ? "(" + lhs_->print(0, true) + ")" : lhs_->print(3, true);
        std::string s = std::string(kind_ == Kind::Forall ? "all " : "some ") + role_.str() + " . " + b;
        return tail ? s : "(" + s + ")";
      }
    }
    return {};
  }

  Kind kind_ = Kind::Shape;
  std::string name_;
  Role role_;
  std::shared_ptr<const ShapeExpr> lhs_, rhs_;
};

/// Subexpression closure; sub(!s) contains both !s and s.
inline void collect_sub(const ShapeExpr& e, std::set<ShapeExpr>& out) {
  if (!out.insert(e).second) return;
  switch (e.kind()) {
    case ShapeExpr::Kind::NegShape: out.insert(ShapeExpr::shape(e.shape_name())); break;
    case ShapeExpr::Kind::And:
    case ShapeExpr::Kind::Or:
      collect_sub(e.left(), out);
      collect_sub(e.right(), out);
      break;
    case ShapeExpr::Kind::Forall:
    case ShapeExpr::Kind::Exists: collect_sub(e.body(), out); break;
    default: break;
  }
}

inline std::set<ShapeExpr> sub(const ShapeExpr& e) {
  std::set<ShapeExpr> out;
  collect_sub(e, out);
  return out;
}

/// Leaf names of one kind reachable in an expression. Negated shapes count as
/// references to their shape.
struct ExprSignature {
  std::set<ShapeName> shapes;
  std::set<ConceptName> concepts;
  std::set<RoleName> roles;
  std::set<NodeId> nominals;
  bool uses_inverse = false;

  void add(const ShapeExpr& e) {
    switch (e.kind()) {
      case ShapeExpr::Kind::Shape:
      case ShapeExpr::Kind::NegShape: shapes.insert(e.shape_name()); break;
      case ShapeExpr::Kind::Concept: concepts.insert(e.concept_name()); break;
      case ShapeExpr::Kind::Nominal: nominals.insert(e.nominal_id()); break;
      case ShapeExpr::Kind::And:
      case ShapeExpr::Kind::Or:
        add(e.left());
        add(e.right());
        break;
      case ShapeExpr::Kind::Forall:
      case ShapeExpr::Kind::Exists:
        roles.insert(e.role().name);
        uses_inverse = uses_inverse || e.role().inverted;
        add(e.body());
        break;
    }
  }
};

inline ExprSignature signature_of(const ShapeExpr& e) {
  ExprSignature s;
  s.add(e);
  return s;
}

}  // namespace wfshacl
