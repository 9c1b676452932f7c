#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wfshacl/document.hpp"
#include "wfshacl/graph.hpp"

namespace wfshacl {

enum class Polarity { Lower, Upper };

/// A shape atom s(a) with a sign.
struct Literal {
  ShapeName shape;
  NodeId node;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal& a, const Literal& b) {
    if (a.positive != b.positive) return a.positive ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.shape <=> b.shape; c != 0) return c;
    return a.node <=> b.node;
  }
  std::string str() const { return (positive ? "" : "¬") + shape.str() + "(" + node.str() + ")"; }
};

using Atom = std::pair<ShapeName, NodeId>;

/// Three-valued shape assignment: a set of positive and negative atoms.
class ShapeAssignment {
 public:
  ShapeAssignment() = default;

  void add(const Literal& l) { (l.positive ? pos_ : neg_).insert({l.shape, l.node}); }
  void add_positive(ShapeName s, NodeId a) { pos_.insert({std::move(s), std::move(a)}); }
  void add_negative(ShapeName s, NodeId a) { neg_.insert({std::move(s), std::move(a)}); }

  bool has_positive(const ShapeName& s, const NodeId& a) const { return pos_.count({s, a}) > 0; }
  bool has_negative(const ShapeName& s, const NodeId& a) const { return neg_.count({s, a}) > 0; }

  const std::set<Atom>& positive() const { return pos_; }
  const std::set<Atom>& negative() const { return neg_; }
  std::size_t size() const { return pos_.size() + neg_.size(); }
  bool empty() const { return pos_.empty() && neg_.empty(); }

  bool is_consistent() const {
    for (const auto& a : pos_)
      if (neg_.count(a)) return false;
    return true;
  }

  bool is_total(const std::vector<ShapeName>& shapes, const std::vector<NodeId>& domain) const {
    for (const auto& s : shapes)
      for (const auto& a : domain)
        if (!has_positive(s, a) && !has_negative(s, a)) return false;
    return true;
  }

  bool subset_of(const ShapeAssignment& o) const {
    return std::includes(o.pos_.begin(), o.pos_.end(), pos_.begin(), pos_.end()) &&
           std::includes(o.neg_.begin(), o.neg_.end(), neg_.begin(), neg_.end());
  }

  ShapeAssignment merged(const ShapeAssignment& o) const {
    ShapeAssignment r = *this;
    r.pos_.insert(o.pos_.begin(), o.pos_.end());
    r.neg_.insert(o.neg_.begin(), o.neg_.end());
    return r;
  }

  std::vector<Literal> literals() const {
    std::vector<Literal> out;
    for (const auto& [s, a] : pos_) out.push_back({s, a, true});
    for (const auto& [s, a] : neg_) out.push_back({s, a, false});
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Space-separated sorted literals, positives first; "∅" when empty.
  std::string str() const {
    if (empty()) return "∅";
    std::string out;
    for (const auto& l : literals()) {
      if (!out.empty()) out += ' ';
      out += l.str();
    }
    return out;
  }

  friend bool operator==(const ShapeAssignment&, const ShapeAssignment&) = default;

 private:
  std::set<Atom> pos_, neg_;
};

namespace detail {

/// Per-shape positive and negative extensions over a graph's domain.
struct Interp {
  std::vector<NodeBits> pos, neg;
};

/// Shape expressions compiled against one graph, with shape names resolved to
/// dense indices.
class ExprProgram {
 public:
  explicit ExprProgram(const DataGraph& g) : g_(g) {}

  int shape_index(const ShapeName& s) {
    auto [it, fresh] = index_.try_emplace(s, static_cast<int>(shapes_.size()));
    if (fresh) shapes_.push_back(s);
    return it->second;
  }
  std::optional<int> find_shape(const ShapeName& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<ShapeName>& shapes() const { return shapes_; }
  const DataGraph& graph() const { return g_; }

  int compile(const ShapeExpr& e) {
    using K = ShapeExpr::Kind;
    Op op;
    op.kind = e.kind();
    switch (e.kind()) {
      case K::Shape:
      case K::NegShape: op.shape = shape_index(e.shape_name()); break;
      case K::Concept: op.leaf = g_.extension(e.concept_name()); break;
      case K::Nominal:
        op.leaf = g_.empty_set();
        if (auto i = g_.index_of(e.nominal_id())) op.leaf.set(*i);
        break;
      case K::And:
      case K::Or:
        op.a = compile(e.left());
        op.b = compile(e.right());
        break;
      case K::Forall:
      case K::Exists:
        op.adj = &g_.successors(e.role());
        op.a = compile(e.body());
        break;
    }
    ops_.push_back(std::move(op));
    return static_cast<int>(ops_.size()) - 1;
  }

  Interp empty_interp() const {
    Interp I;
    I.pos.assign(shapes_.size(), g_.empty_set());
    I.neg.assign(shapes_.size(), g_.empty_set());
    return I;
  }

  NodeBits eval(int op_index, const Interp& I, Polarity pol) const {
    using K = ShapeExpr::Kind;
    const Op& op = ops_[op_index];
    switch (op.kind) {
      case K::Shape: return pol == Polarity::Lower ? I.pos[op.shape] : ~I.neg[op.shape];
      case K::NegShape: return pol == Polarity::Lower ? I.neg[op.shape] : ~I.pos[op.shape];
      case K::Concept:
      case K::Nominal: return op.leaf;
      case K::And: return eval(op.a, I, pol) & eval(op.b, I, pol);
      case K::Or: return eval(op.a, I, pol) | eval(op.b, I, pol);
      case K::Exists: {
        NodeBits inner = eval(op.a, I, pol);
        NodeBits out = g_.empty_set();
        for (std::size_t i = 0; i < out.size(); ++i)
          if ((*op.adj)[i].intersects(inner)) out.set(i);
        return out;
      }
      case K::Forall: {
        NodeBits inner = eval(op.a, I, pol);
        NodeBits out = g_.empty_set();
        for (std::size_t i = 0; i < out.size(); ++i)
          if ((*op.adj)[i].is_subset_of(inner)) out.set(i);
        return out;
      }
    }
    return g_.empty_set();
  }

  Interp from_assignment(const ShapeAssignment& S) {
    for (const auto& [s, a] : S.positive()) shape_index(s);
    for (const auto& [s, a] : S.negative()) shape_index(s);
    Interp I = empty_interp();
    for (const auto& [s, a] : S.positive())
      if (auto i = g_.index_of(a)) I.pos[*find_shape(s)].set(*i);
    for (const auto& [s, a] : S.negative())
      if (auto i = g_.index_of(a)) I.neg[*find_shape(s)].set(*i);
    return I;
  }

  ShapeAssignment to_assignment(const Interp& I) const {
    ShapeAssignment S;
    for (std::size_t k = 0; k < shapes_.size(); ++k) {
      for (auto i = I.pos[k].find_first(); i != NodeBits::npos; i = I.pos[k].find_next(i))
        S.add_positive(shapes_[k], g_.domain()[i]);
      for (auto i = I.neg[k].find_first(); i != NodeBits::npos; i = I.neg[k].find_next(i))
        S.add_negative(shapes_[k], g_.domain()[i]);
    }
    return S;
  }

 private:
  struct Op {
    ShapeExpr::Kind kind{};
    int a = -1, b = -1, shape = -1;
    NodeBits leaf;
    const std::vector<NodeBits>* adj = nullptr;
  };

  const DataGraph& g_;
  std::vector<Op> ops_;
  std::vector<ShapeName> shapes_;
  std::unordered_map<ShapeName, int> index_;
};

/// A constraint set compiled against a graph: body roots per defined shape.
class WfProgram {
 public:
  WfProgram(const DataGraph& g, const ConstraintSet& c) : prog_(g) {
    c.check_closed();
    for (const auto& [h, b] : c.defs()) defined_.push_back(prog_.shape_index(h));
    for (const auto& [h, b] : c.defs()) roots_.push_back(prog_.compile(b));
  }

  ExprProgram& program() { return prog_; }
  const ExprProgram& program() const { return prog_; }
  std::size_t n() const { return prog_.graph().size(); }

  Interp t_op(const Interp& S) const {
    Interp out = prog_.empty_interp();
    for (std::size_t k = 0; k < defined_.size(); ++k) out.pos[defined_[k]] = prog_.eval(roots_[k], S, Polarity::Lower);
    return out;
  }

  /// Greatest unfounded set, as the per-shape positive component of the result.
  std::vector<NodeBits> unfounded(const Interp& S) const {
    std::vector<NodeBits> U(prog_.shapes().size(), prog_.graph().empty_set());
    for (int k : defined_) U[k] = prog_.graph().full_set();
    for (;;) {
      Interp SU = S;
      for (std::size_t k = 0; k < U.size(); ++k) SU.neg[k] |= U[k];
      bool changed = false;
      std::vector<NodeBits> next = U;
      for (std::size_t k = 0; k < defined_.size(); ++k) {
        int s = defined_[k];
        next[s] = U[s] - prog_.eval(roots_[k], SU, Polarity::Upper);
        if (next[s] != U[s]) changed = true;
      }
      U = std::move(next);
      if (!changed) return U;
    }
  }

  Interp w_op(const Interp& S) const {
    Interp out = t_op(S);
    out.neg = unfounded(S);
    for (std::size_t k = 0; k < out.pos.size(); ++k)
      if (out.pos[k].intersects(out.neg[k]))
        throw Error(ErrorKind::EngineInvariant, "W produced an inconsistent assignment");
    return out;
  }

  /// Least fixpoint of W from the empty assignment; each new iterate is
  /// appended to trace when given.
  Interp fixpoint(std::vector<Interp>* trace = nullptr) const {
    Interp S = prog_.empty_interp();
    for (;;) {
      Interp next = w_op(S);
      if (next.pos == S.pos && next.neg == S.neg) return S;
      S = std::move(next);
      if (trace) trace->push_back(S);
    }
  }

  const std::vector<int>& defined() const { return defined_; }

 private:
  ExprProgram prog_;
  std::vector<int> defined_;
  std::vector<int> roots_;
};

}  // namespace detail

/// Lower or upper bound of an expression under a three-valued assignment.
inline NodeSet eval_expr(const ShapeExpr& e, const DataGraph& g, const ShapeAssignment& S, Polarity pol) {
  detail::ExprProgram p(g);
  int root = p.compile(e);
  detail::Interp I = p.from_assignment(S);
  return g.to_set(p.eval(root, I, pol));
}

inline ShapeAssignment t_operator(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S) {
  detail::WfProgram w(g, c);
  detail::Interp I = w.program().from_assignment(S);
  return w.program().to_assignment(w.t_op(I));
}

/// The greatest unfounded set, returned as plain atoms.
inline std::set<Atom> greatest_unfounded(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S) {
  detail::WfProgram w(g, c);
  detail::Interp I = w.program().from_assignment(S);
  auto U = w.unfounded(I);
  std::set<Atom> out;
  const auto& shapes = w.program().shapes();
  for (std::size_t k = 0; k < U.size(); ++k)
    for (auto i = U[k].find_first(); i != NodeBits::npos; i = U[k].find_next(i)) out.insert({shapes[k], g.domain()[i]});
  return out;
}

/// Definitional check: every s(a) in U has a outside Upper(C(s)) under S ∪ ¬.U.
inline bool is_unfounded(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S, const std::set<Atom>& U) {
  ShapeAssignment SU = S;
  for (const auto& [s, a] : U) {
    if (!c.defines(s)) return false;
    SU.add_negative(s, a);
  }
  for (const auto& [s, a] : U)
    if (eval_expr(c.body(s), g, SU, Polarity::Upper).count(a)) return false;
  return true;
}

inline ShapeAssignment w_operator(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S) {
  detail::WfProgram w(g, c);
  detail::Interp I = w.program().from_assignment(S);
  return w.program().to_assignment(w.w_op(I));
}

struct WfResult {
  ShapeAssignment model;
  std::vector<ShapeAssignment> trace;
};

inline WfResult well_founded_model(const DataGraph& g, const ConstraintSet& c) {
  detail::WfProgram w(g, c);
  std::vector<detail::Interp> steps;
  detail::Interp M = w.fixpoint(&steps);
  WfResult r;
  r.model = w.program().to_assignment(M);
  for (const auto& s : steps) r.trace.push_back(w.program().to_assignment(s));
  return r;
}

/// One line per iterate: `i: s(6) ¬t(6)`.
inline std::string format_trace(const std::vector<ShapeAssignment>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) out += std::to_string(i + 1) + ": " + trace[i].str() + "\n";
  return out;
}

/// Target conditions for node, class and role targets under an assignment.
inline bool validates(const DataGraph& g, const Document& d, const ShapeAssignment& S) {
  require_compatible(g, d);
  for (const auto& t : d.targets) {
    switch (t.kind()) {
      case Target::Kind::Node:
        if (!S.has_positive(t.shape, t.node())) return false;
        break;
      case Target::Kind::Class: {
        const NodeBits& ext = g.extension(t.concept_name());
        for (auto i = ext.find_first(); i != NodeBits::npos; i = ext.find_next(i))
          if (!S.has_positive(t.shape, g.domain()[i])) return false;
        break;
      }
      case Target::Kind::Role: {
        const auto& adj = g.successors(t.role());
        for (std::size_t i = 0; i < g.size(); ++i)
          if (adj[i].any() && !S.has_positive(t.shape, g.domain()[i])) return false;
        break;
      }
    }
  }
  return true;
}

/// Validation of a document under its well-founded model.
inline bool validates_wf(const DataGraph& g, const Document& d) {
  require_compatible(g, d);
  return validates(g, d, well_founded_model(g, d.constraints).model);
}

/// Nodes c with s(c) in the well-founded model of the closure of s.
inline NodeSet wf_extension(const DataGraph& g, const ConstraintSet& c, const ShapeName& s) {
  ConstraintSet cs = restrict_to(c, s);
  detail::WfProgram w(g, cs);
  detail::Interp M = w.fixpoint();
  return g.to_set(M.pos[*w.program().find_shape(s)]);
}

}  // namespace wfshacl
