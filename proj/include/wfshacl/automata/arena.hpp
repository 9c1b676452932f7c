#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfshacl/automata/two_ata.hpp"
#include "wfshacl/graph.hpp"

namespace wfshacl {

/// Finite k-ary tree (with shared subtrees) encoding a data graph. Node 0 is
/// the root and node 1 is the bottom node, whose children are all itself.
/// Root child i (1-based) encodes nominal a_i; an optional anonymous anchor
/// follows them. Below a graph node y sit all anonymous neighbours of y.
struct TreeEncoding {
  static constexpr std::size_t root = 0;
  static constexpr std::size_t bot = 1;

  struct Node {
    Symbol label;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    std::optional<NodeId> source;
  };
  std::vector<Node> nodes;

  /// Graph nodes that occur in the tree.
  std::set<NodeId> sources() const {
    std::set<NodeId> out;
    for (const auto& n : nodes)
      if (n.source) out.insert(*n.source);
    return out;
  }
};

/// Encodes g for automaton a, optionally with an anonymous anchor node placed
/// right after the nominals. Returns nullopt when g lacks a nominal or some
/// node would need more than k children.
inline std::optional<TreeEncoding> encode_graph(const TwoATA& a, const DataGraph& g,
                                                const std::optional<NodeId>& anchor = std::nullopt) {
  const GuessSpace& sp = a.space();
  const std::size_t k = a.branching();
  std::set<NodeId> nominal_set(sp.nominals.begin(), sp.nominals.end());
  for (const auto& n : sp.nominals)
    if (!g.contains(n)) return std::nullopt;
  if (anchor && (!g.contains(*anchor) || nominal_set.count(*anchor))) return std::nullopt;
  std::set<RoleName> names;
  for (const auto& r : sp.roles) names.insert(r.name);
  if (sp.nominals.size() + (anchor ? 1 : 0) > k) return std::nullopt;

  // Roles rho with x -rho-> y, over the automaton's role names.
  auto roles_between = [&](std::size_t x, std::size_t y) {
    std::set<Role> out;
    for (const auto& r : sp.roles)
      if (g.successors(r)[x].test(y)) out.insert(r);
    return out;
  };
  const auto& dom = g.domain();

  TreeEncoding enc;
  enc.nodes.push_back({Symbol::root(), std::nullopt, {}, std::nullopt});
  enc.nodes.push_back({Symbol::bottom(), std::nullopt, std::vector<std::size_t>(k, TreeEncoding::bot), std::nullopt});

  std::map<std::pair<std::size_t, std::optional<std::size_t>>, std::size_t> made;  // (y, context) -> tree node
  std::map<std::size_t, std::size_t> canonical;                                    // graph node -> first tree node
  std::deque<std::size_t> todo;
  auto make = [&](std::size_t y, std::optional<std::size_t> ctx) {
    auto key = std::make_pair(y, ctx);
    if (auto it = made.find(key); it != made.end()) return it->second;
    Symbol s;
    for (const auto& c : sp.concepts)
      if (g.extension(c).size() > y && g.extension(c).test(y)) s.concepts.insert(c);
    if (nominal_set.count(dom[y])) s.nominals.insert(dom[y]);
    if (ctx) s.roles = roles_between(*ctx, y);
    for (const auto& r : sp.roles)
      for (const auto& b : sp.nominals)
        if (g.successors(r)[y].test(*g.index_of(b))) s.markers.insert({r, b});
    std::size_t id = enc.nodes.size();
    enc.nodes.push_back({std::move(s), std::nullopt, {}, dom[y]});
    made.emplace(key, id);
    canonical.emplace(y, id);
    todo.push_back(id);
    return id;
  };

  std::vector<std::size_t> top;
  for (const auto& n : sp.nominals) top.push_back(make(*g.index_of(n), std::nullopt));
  if (anchor) top.push_back(make(*g.index_of(*anchor), std::nullopt));
  top.resize(k, TreeEncoding::bot);
  enc.nodes[TreeEncoding::root].children = top;
  for (std::size_t c : top)
    if (c != TreeEncoding::bot) enc.nodes[c].parent = TreeEncoding::root;

  while (!todo.empty()) {
    std::size_t u = todo.front();
    todo.pop_front();
    std::size_t y = *g.index_of(*enc.nodes[u].source);
    std::vector<std::size_t> kids;
    for (std::size_t z = 0; z < dom.size(); ++z) {
      if (nominal_set.count(dom[z])) continue;
      bool adjacent = false;
      for (const auto& r : sp.roles) adjacent = adjacent || g.successors(r)[y].test(z);
      if (adjacent) kids.push_back(make(z, y));
    }
    if (kids.size() > k) return std::nullopt;
    for (std::size_t c : kids)
      if (!enc.nodes[c].parent) enc.nodes[c].parent = canonical.at(y);
    kids.resize(k, TreeEncoding::bot);
    enc.nodes[u].children = std::move(kids);
  }
  // A shared child points back to the first tree node of its graph parent;
  // every tree node of one graph node describes the same neighbourhood.
  for (const auto& [key, id] : made)
    if (key.second) enc.nodes[id].parent = canonical.at(*key.second);
  return enc;
}

enum class Player { Eloise, Abelard };

/// Two-player game graph with priorities 0 and 1. Eloise wins a play iff
/// priority 1 occurs only finitely often.
struct GameArena {
  std::vector<Player> owner;
  std::vector<int> priority;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::string> labels;
  std::size_t initial = 0;

  std::size_t add(Player p, int prio, std::string label = {}) {
    owner.push_back(p);
    priority.push_back(prio);
    succ.emplace_back();
    labels.push_back(std::move(label));
    return owner.size() - 1;
  }
  std::size_t size() const { return owner.size(); }
};

/// Acceptance game of automaton a on the encoded tree. Positions are pairs
/// (tree node, state) and the subformulas of their transitions. Position
/// labels are filled in only on request.
inline GameArena arena_from_structure(const TwoATA& a, const TreeEncoding& enc, bool with_labels = false) {
  GameArena ar;
  const std::size_t win = ar.add(Player::Eloise, 0, "win");
  const std::size_t lose = ar.add(Player::Eloise, 1, "lose");
  ar.succ[win] = {win};
  ar.succ[lose] = {lose};

  constexpr std::size_t none = static_cast<std::size_t>(-1);
  const std::size_t states = a.size();
  std::vector<std::size_t> pos(enc.nodes.size() * states, none);
  std::deque<std::pair<std::size_t, std::size_t>> todo;
  auto state_pos = [&](std::size_t u, std::size_t q) {
    std::size_t& slot = pos[u * states + q];
    if (slot != none) return slot;
    slot = ar.add(Player::Eloise, a.priority(q), with_labels ? std::to_string(u) + ":" + a.state_name(q) : "");
    todo.emplace_back(u, q);
    return slot;
  };
  auto target = [&](std::size_t u, const PbfAtom& at) -> std::size_t {
    std::optional<std::size_t> v;
    if (at.dir.nominal) {
      v = enc.nodes[TreeEncoding::root].children.at(static_cast<std::size_t>(at.dir.value) - 1);
    } else if (at.dir.value == -1) {
      v = enc.nodes[u].parent;
    } else if (at.dir.value == 0) {
      v = u;
    } else {
      const auto& ch = enc.nodes[u].children;
      std::size_t j = static_cast<std::size_t>(at.dir.value);
      if (j <= ch.size()) v = ch[j - 1];
    }
    return v ? state_pos(*v, at.state) : lose;
  };
  std::function<std::size_t(std::size_t, const Pbf&)> formula = [&](std::size_t u, const Pbf& f) -> std::size_t {
    switch (f.kind()) {
      case Pbf::Kind::True: return win;
      case Pbf::Kind::False: return lose;
      case Pbf::Kind::Atom: return target(u, f.atom());
      case Pbf::Kind::And:
      case Pbf::Kind::Or: {
        std::size_t p = ar.add(f.kind() == Pbf::Kind::Or ? Player::Eloise : Player::Abelard, 0);
        std::vector<std::size_t> s;
        for (const auto& part : f.parts()) s.push_back(formula(u, part));
        ar.succ[p] = std::move(s);
        return p;
      }
    }
    return lose;
  };

  ar.initial = state_pos(TreeEncoding::root, a.initial());
  while (!todo.empty()) {
    auto [u, q] = todo.front();
    todo.pop_front();
    std::size_t p = pos[u * states + q];
    std::size_t f = formula(u, a.delta(q, enc.nodes[u].label));
    ar.succ[p] = {f};
  }
  return ar;
}

namespace detail {

// Positions of `alive` from which `who` forces a visit to `target`.
inline std::vector<char> attractor(const GameArena& ar, const std::vector<std::vector<std::size_t>>& pred,
                                   const std::vector<char>& alive, const std::vector<char>& target, Player who) {
  const std::size_t n = ar.size();
  std::vector<std::size_t> remaining(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (alive[v])
      for (std::size_t w : ar.succ[v]) remaining[v] += alive[w] ? 1 : 0;
  std::vector<char> in(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < n; ++v)
    if (alive[v] && target[v]) {
      in[v] = 1;
      stack.push_back(v);
    }
  while (!stack.empty()) {
    std::size_t w = stack.back();
    stack.pop_back();
    for (std::size_t v : pred[w]) {
      if (in[v] || !alive[v]) continue;
      if (ar.owner[v] == who || --remaining[v] == 0) {
        in[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return in;
}

}  // namespace detail

/// Winning region of Eloise. Every position needs a successor.
inline std::vector<bool> solve_cobuchi(const GameArena& ar) {
  const std::size_t n = ar.size();
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (ar.succ[v].empty()) throw Error(ErrorKind::InvalidArgument, "position " + std::to_string(v) + " has no successor");
    for (std::size_t w : ar.succ[v]) pred[w].push_back(v);
  }
  // Abelard's Buchi game on the priority-1 positions, peeling off Eloise's
  // attractor of the positions from which he cannot reach them.
  std::vector<char> alive(n, 1), f(n, 0), safe(n, 0);
  std::vector<bool> eloise(n, false);
  for (;;) {
    for (std::size_t v = 0; v < n; ++v) f[v] = alive[v] && ar.priority[v] == 1;
    std::vector<char> recur = detail::attractor(ar, pred, alive, f, Player::Abelard);
    bool any = false;
    for (std::size_t v = 0; v < n; ++v) {
      safe[v] = alive[v] && !recur[v];
      any = any || safe[v];
    }
    if (!any) break;
    std::vector<char> w = detail::attractor(ar, pred, alive, safe, Player::Eloise);
    for (std::size_t v = 0; v < n; ++v)
      if (w[v]) {
        alive[v] = 0;
        eloise[v] = true;
      }
  }
  return eloise;
}

/// Whether a accepts the encoded tree.
inline bool accepts(const TwoATA& a, const TreeEncoding& enc) {
  GameArena ar = arena_from_structure(a, enc);
  return solve_cobuchi(ar)[ar.initial];
}

}  // namespace wfshacl
