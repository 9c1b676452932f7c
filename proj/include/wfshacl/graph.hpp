#pragma once

#include <boost/dynamic_bitset.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "wfshacl/names.hpp"

namespace wfshacl {

/// Subset of a graph's domain, indexed by the graph's node order.
using NodeBits = boost::dynamic_bitset<>;

/// Canonical, naturally ordered node collection used in public results.
using NodeSet = std::set<NodeId>;

struct ConceptAssertion {
  ConceptName concept_name;
  NodeId node;
  friend bool operator==(const ConceptAssertion&, const ConceptAssertion&) = default;
  friend auto operator<=>(const ConceptAssertion&, const ConceptAssertion&) = default;
};

struct RoleAssertion {
  RoleName role;
  NodeId subject;
  NodeId object;
  friend bool operator==(const RoleAssertion&, const RoleAssertion&) = default;
  friend auto operator<=>(const RoleAssertion&, const RoleAssertion&) = default;
};

/// Finite set of concept and role assertions. The domain is exactly the set
/// of mentioned nodes; adjacency for every role and its inverse is indexed
/// once at construction.
class DataGraph {
 public:
  DataGraph() { index(); }
  DataGraph(std::set<ConceptAssertion> concepts, std::set<RoleAssertion> roles)
      : concepts_(std::move(concepts)), roles_(std::move(roles)) {
    index();
  }

  const std::set<ConceptAssertion>& concept_assertions() const { return concepts_; }
  const std::set<RoleAssertion>& role_assertions() const { return roles_; }

  const std::vector<NodeId>& domain() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::optional<std::size_t> index_of(const NodeId& a) const {
    auto it = pos_.find(a);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const NodeId& a) const { return pos_.count(a) > 0; }

  /// Extension of a concept; empty for unknown concepts.
  const NodeBits& extension(const ConceptName& c) const {
    auto it = concept_ext_.find(c);
    return it == concept_ext_.end() ? none_ : it->second;
  }

  /// successors(r)[i] is the set of r-successors of node i.
  const std::vector<NodeBits>& successors(const Role& r) const {
    auto it = adjacency_.find(r);
    return it == adjacency_.end() ? no_edges_ : it->second;
  }

  std::set<ConceptName> concept_names() const {
    std::set<ConceptName> out;
    for (const auto& ca : concepts_) out.insert(ca.concept_name);
    return out;
  }
  std::set<RoleName> role_names() const {
    std::set<RoleName> out;
    for (const auto& ra : roles_) out.insert(ra.role);
    return out;
  }

  NodeBits empty_set() const { return NodeBits(nodes_.size()); }
  NodeBits full_set() const { return ~NodeBits(nodes_.size()); }

  NodeSet to_set(const NodeBits& bits) const {
    NodeSet out;
    for (auto i = bits.find_first(); i != NodeBits::npos; i = bits.find_next(i)) out.insert(nodes_[i]);
    return out;
  }
  NodeBits to_bits(const NodeSet& set) const {
    NodeBits out(nodes_.size());
    for (const auto& a : set)
      if (auto i = index_of(a)) out.set(*i);
    return out;
  }

  /// Graph with the extra assertions added.
  DataGraph with(const std::set<ConceptAssertion>& extra_c, const std::set<RoleAssertion>& extra_r = {}) const {
    auto c = concepts_;
    auto r = roles_;
    c.insert(extra_c.begin(), extra_c.end());
    r.insert(extra_r.begin(), extra_r.end());
    return DataGraph(std::move(c), std::move(r));
  }

  friend bool operator==(const DataGraph& a, const DataGraph& b) {
    return a.concepts_ == b.concepts_ && a.roles_ == b.roles_;
  }

 private:
  void index() {
    std::set<NodeId> seen;
    for (const auto& ca : concepts_) seen.insert(ca.node);
    for (const auto& ra : roles_) {
      seen.insert(ra.subject);
      seen.insert(ra.object);
    }
    nodes_.assign(seen.begin(), seen.end());
    pos_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) pos_.emplace(nodes_[i], i);
    const std::size_t n = nodes_.size();
    none_ = NodeBits(n);
    no_edges_.assign(n, NodeBits(n));
    for (const auto& ca : concepts_) {
      auto [it, fresh] = concept_ext_.try_emplace(ca.concept_name, n);
      it->second.set(pos_.at(ca.node));
    }
    for (const auto& ra : roles_) {
      Role fwd(ra.role), bwd(ra.role, true);
      auto [f, f_new] = adjacency_.try_emplace(fwd, n, NodeBits(n));
      auto [b, b_new] = adjacency_.try_emplace(bwd, n, NodeBits(n));
      std::size_t s = pos_.at(ra.subject), o = pos_.at(ra.object);
      f->second[s].set(o);
      b->second[o].set(s);
    }
  }

  std::set<ConceptAssertion> concepts_;
  std::set<RoleAssertion> roles_;
  std::vector<NodeId> nodes_;
  std::map<NodeId, std::size_t> pos_;
  std::map<ConceptName, NodeBits> concept_ext_;
  std::map<Role, std::vector<NodeBits>> adjacency_;
  NodeBits none_;
  std::vector<NodeBits> no_edges_;
};

}  // namespace wfshacl
