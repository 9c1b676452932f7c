#pragma once

#include <algorithm>
#include <iterator>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfshacl/graph.hpp"
#include "wfshacl/mu_formula.hpp"

namespace wfshacl {

/// What formula evaluation reads from a structure. Diamonds and boxes may see
/// different edge sets and a concept's positive and negative literals may
/// disagree; this is how bounds over partially known graphs are computed.
/// For a concrete graph both coincide.
struct ModelView {
  std::size_t n = 0;
  std::map<std::string, NodeBits> concept_pos;  // missing: empty
  std::map<std::string, NodeBits> concept_neg;  // missing: full
  std::map<std::string, NodeBits> nominals;     // missing: empty
  std::map<Role, std::vector<NodeBits>> diamond_edges, box_edges;  // missing: no edges

  static ModelView of(const DataGraph& g) {
    ModelView v;
    v.n = g.size();
    for (const auto& c : g.concept_names()) {
      v.concept_pos[c.str()] = g.extension(c);
      v.concept_neg[c.str()] = ~g.extension(c);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      NodeBits b(g.size());
      b.set(i);
      v.nominals[g.domain()[i].str()] = b;
    }
    for (const auto& r : g.role_names())
      for (bool inv : {false, true}) {
        Role role(r, inv);
        v.diamond_edges[role] = g.successors(role);
        v.box_edges[role] = g.successors(role);
      }
    return v;
  }
};

using Valuation = std::map<std::string, NodeSet>;

namespace detail {

/// Formula compiled against a view. Variables resolve by name through an
/// environment that binders save and restore, which gives lexical scoping for
/// structural evaluation even when the DAG shares subformulas.
/// Fixpoint results are cached per binder, keyed by the values of its free
/// variables; inner fixpoints only recompute when an outer variable changes.
class MuEvaluator {
 public:
  MuEvaluator(const ModelView& view, const MuFormula& root) : view_(view) {
    empty_ = NodeBits(view.n);
    full_ = ~empty_;
    no_edges_.assign(view.n, empty_);
    root_ = compile(root);
  }

  /// Evaluates with the given variable values (indexed by view node).
  NodeBits run(const std::map<std::string, NodeBits>& valuation = {}) {
    env_.assign(var_ids_.size(), empty_);
    bound_.assign(var_ids_.size(), false);
    for (const auto& [x, bits] : valuation)
      if (auto it = var_ids_.find(x); it != var_ids_.end()) {
        env_[it->second] = bits;
        bound_[it->second] = true;
      }
    cache_.assign(nodes_.size(), {});
    return eval(root_);
  }

  /// Iterates the body of a root binder exactly steps times from the start set.
  NodeBits approximant(std::size_t steps, const std::map<std::string, NodeBits>& valuation) {
    const CNode& b = nodes_[root_];
    if (b.kind != MuFormula::Kind::Mu && b.kind != MuFormula::Kind::Nu)
      throw Error(ErrorKind::InvalidArgument, "approximants are defined for fixpoint formulas");
    run(valuation);
    NodeBits x = b.kind == MuFormula::Kind::Mu ? empty_ : full_;
    for (std::size_t i = 0; i < steps; ++i) {
      env_[b.var] = x;
      bound_[b.var] = true;
      cache_.assign(nodes_.size(), {});
      x = eval(b.a);
    }
    return x;
  }

  const std::vector<std::string>& unbound_names() const { return var_names_; }

 private:
  using K = MuFormula::Kind;

  struct CNode {
    K kind;
    int a = -1, b = -1, var = -1, owned = -1;
    const NodeBits* lit = nullptr;
    const std::vector<NodeBits>* adj = nullptr;
    std::vector<int> free;  // free variable ids, sorted
  };

  int var_id(const std::string& x) {
    auto [it, fresh] = var_ids_.try_emplace(x, static_cast<int>(var_ids_.size()));
    if (fresh) var_names_.push_back(x);
    return it->second;
  }

  const NodeBits* lit(const std::map<std::string, NodeBits>& m, const std::string& k, const NodeBits& dflt) {
    auto it = m.find(k);
    return it == m.end() ? &dflt : &it->second;
  }

  int compile(const MuFormula& f) {
    if (auto it = ids_.find(f.id()); it != ids_.end()) return it->second;
    CNode c;
    c.kind = f.kind();
    switch (f.kind()) {
      case K::True: c.lit = &full_; break;
      case K::False: c.lit = &empty_; break;
      case K::Concept: c.lit = lit(view_.concept_pos, f.name(), empty_); break;
      case K::NotConcept: c.lit = lit(view_.concept_neg, f.name(), full_); break;
      case K::Nominal: c.lit = lit(view_.nominals, f.name(), empty_); break;
      case K::NotNominal: {
        auto it = view_.nominals.find(f.name());
        owned_.push_back(it == view_.nominals.end() ? full_ : ~it->second);
        c.owned = static_cast<int>(owned_.size()) - 1;
        break;
      }
      case K::Var:
        c.var = var_id(f.name());
        c.free = {c.var};
        break;
      case K::And:
      case K::Or:
        c.a = compile(f.left());
        c.b = compile(f.right());
        c.free = merge(nodes_[c.a].free, nodes_[c.b].free);
        break;
      case K::Box:
      case K::Diamond: {
        const auto& m = f.kind() == K::Box ? view_.box_edges : view_.diamond_edges;
        auto it = m.find(f.role());
        c.adj = it == m.end() ? &no_edges_ : &it->second;
        c.a = compile(f.body());
        c.free = nodes_[c.a].free;
        break;
      }
      case K::Mu:
      case K::Nu:
        c.var = var_id(f.name());
        c.a = compile(f.body());
        c.free = nodes_[c.a].free;
        std::erase(c.free, c.var);
        break;
    }
    nodes_.push_back(std::move(c));
    int id = static_cast<int>(nodes_.size()) - 1;
    ids_.emplace(f.id(), id);
    return id;
  }

  static std::vector<int> merge(const std::vector<int>& x, const std::vector<int>& y) {
    std::vector<int> out;
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out;
  }

  std::vector<NodeBits::block_type> key_of(const CNode& c) const {
    std::vector<NodeBits::block_type> key;
    for (int v : c.free) boost::to_block_range(env_[v], std::back_inserter(key));
    return key;
  }

  NodeBits eval(int id) {
    const CNode& c = nodes_[id];
    switch (c.kind) {
      case K::True:
      case K::False:
      case K::Concept:
      case K::NotConcept:
      case K::Nominal: return *c.lit;
      case K::NotNominal: return owned_[c.owned];
      case K::Var:
        if (!bound_[c.var]) throw Error(ErrorKind::UnboundVariable, "variable '" + var_names_[c.var] + "' has no value");
        return env_[c.var];
      case K::And: {
        NodeBits l = eval(c.a);
        if (l.none()) return l;
        return l & eval(c.b);
      }
      case K::Or: {
        NodeBits l = eval(c.a);
        if (l.all()) return l;
        return l | eval(c.b);
      }
      case K::Diamond: {
        NodeBits inner = eval(c.a);
        NodeBits out = empty_;
        for (std::size_t i = 0; i < view_.n; ++i)
          if ((*c.adj)[i].intersects(inner)) out.set(i);
        return out;
      }
      case K::Box: {
        NodeBits inner = eval(c.a);
        NodeBits out = empty_;
        for (std::size_t i = 0; i < view_.n; ++i)
          if ((*c.adj)[i].is_subset_of(inner)) out.set(i);
        return out;
      }
      case K::Mu:
      case K::Nu: {
        auto key = key_of(c);
        auto& slot = cache_[id];
        if (auto it = slot.find(key); it != slot.end()) return it->second;
        NodeBits saved = env_[c.var];
        bool saved_bound = bound_[c.var];
        NodeBits x = c.kind == K::Mu ? empty_ : full_;
        bound_[c.var] = true;
        for (;;) {
          env_[c.var] = x;
          NodeBits y = eval(c.a);
          if (y == x) break;
          x = std::move(y);
        }
        env_[c.var] = saved;
        bound_[c.var] = saved_bound;
        slot.emplace(std::move(key), x);
        return x;
      }
    }
    return empty_;
  }

  struct KeyHash {
    std::size_t operator()(const std::vector<NodeBits::block_type>& k) const noexcept {
      std::size_t h = k.size();
      for (auto b : k) h = h * 1000003u ^ std::hash<NodeBits::block_type>{}(b);
      return h;
    }
  };

  const ModelView& view_;
  NodeBits empty_, full_;
  std::vector<NodeBits> no_edges_;
  std::vector<NodeBits> owned_;
  std::vector<CNode> nodes_;
  std::unordered_map<const void*, int> ids_;
  std::unordered_map<std::string, int> var_ids_;
  std::vector<std::string> var_names_;
  std::vector<NodeBits> env_;
  std::vector<bool> bound_;
  std::vector<std::unordered_map<std::vector<NodeBits::block_type>, NodeBits, KeyHash>> cache_;
  int root_ = -1;
};

inline std::map<std::string, NodeBits> to_bits(const DataGraph& g, const Valuation& v) {
  std::map<std::string, NodeBits> out;
  for (const auto& [x, s] : v) out[x] = g.to_bits(s);
  return out;
}

}  // namespace detail

/// Extension of a formula on a graph under a valuation of its free variables.
inline NodeSet eval(const MuFormula& f, const DataGraph& g, const Valuation& v = {}) {
  ModelView view = ModelView::of(g);
  detail::MuEvaluator ev(view, f);
  return g.to_set(ev.run(detail::to_bits(g, v)));
}

/// The alpha-th approximant of a fixpoint formula: mu^0 is empty, nu^0 is the domain.
inline NodeSet approximant(const MuFormula& f, std::size_t alpha, const DataGraph& g, const Valuation& v = {}) {
  ModelView view = ModelView::of(g);
  detail::MuEvaluator ev(view, f);
  return g.to_set(ev.approximant(alpha, detail::to_bits(g, v)));
}

}  // namespace wfshacl
