#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfshacl/document.hpp"
#include "wfshacl/mu_eval.hpp"
#include "wfshacl/mu_formula.hpp"
#include "wfshacl/translator.hpp"
#include "wfshacl/wf_engine.hpp"

namespace wfshacl {

/// Concept and role names a search may use.
struct GraphSignature {
  std::set<ConceptName> concepts;
  std::set<RoleName> roles;

  void add(const ExprSignature& s) {
    concepts.insert(s.concepts.begin(), s.concepts.end());
    roles.insert(s.roles.begin(), s.roles.end());
  }
  void add(const MuSignature& s) {
    concepts.insert(s.concepts.begin(), s.concepts.end());
    roles.insert(s.roles.begin(), s.roles.end());
  }
};

struct SearchBudget {
  /// Search states (partial assignments) visited before giving up.
  std::size_t max_states = 500'000'000;
  std::optional<std::chrono::milliseconds> wall;
};

struct SearchStats {
  std::size_t graphs_examined = 0;
  std::size_t states = 0;
  double elapsed_ms = 0;
  bool budget_exhausted = false;
};

/// Witness(graph) or NoWitnessUpTo(bound). For a witness, bound is its size;
/// otherwise it is the largest size that was searched completely.
struct SearchOutcome {
  std::optional<DataGraph> witness;
  std::optional<NodeId> witness_node;
  std::size_t bound = 0;
  SearchStats stats;

  bool found() const { return witness.has_value(); }
};

namespace detail {

/// Required nodes in natural order, then the smallest unused numerals.
inline std::vector<NodeId> pool_nodes(const std::set<NodeId>& required, std::size_t n) {
  std::vector<NodeId> pool(required.begin(), required.end());
  for (std::size_t k = 0; pool.size() < n; ++k) {
    NodeId a(std::to_string(k));
    if (!required.count(a)) pool.push_back(a);
  }
  return pool;
}

/// A concept name outside the signature, used to make otherwise isolated
/// nodes part of the domain.
inline ConceptName marker_concept(const GraphSignature& sig) {
  std::string m = "Thing";
  while (sig.concepts.count(ConceptName(m))) m += "_";
  return ConceptName(m);
}

/// Concept atom (c, v) or role atom (r, v, w) over pool indices.
struct PoolAtom {
  bool is_role = false;
  std::size_t symbol = 0;  // index into the concept or role list
  std::size_t v = 0, w = 0;
};

/// Atoms grouped by the larger pool index they touch; within a block,
/// concepts come first and self-loops last.
inline std::vector<PoolAtom> pool_atoms(std::size_t n, std::size_t concepts, const std::vector<std::size_t>& roles) {
  std::vector<PoolAtom> out;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t c = 0; c < concepts; ++c) out.push_back({false, c, v, v});
    for (std::size_t r : roles) {
      for (std::size_t w = 0; w < v; ++w) {
        out.push_back({true, r, w, v});
        out.push_back({true, r, v, w});
      }
      out.push_back({true, r, v, v});
    }
  }
  return out;
}

inline DataGraph materialize(const std::vector<PoolAtom>& atoms, const std::vector<bool>& value,
                             const std::vector<ConceptName>& concepts, const std::vector<RoleName>& roles,
                             const std::vector<NodeId>& pool, std::optional<ConceptName> marker) {
  std::set<ConceptAssertion> cs;
  std::set<RoleAssertion> rs;
  std::vector<bool> mentioned(pool.size(), false);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!value[j]) continue;
    const PoolAtom& a = atoms[j];
    if (a.is_role) rs.insert({roles[a.symbol], pool[a.v], pool[a.w]});
    else cs.insert({concepts[a.symbol], pool[a.v]});
    mentioned[a.v] = mentioned[a.w] = true;
  }
  if (marker)
    for (std::size_t v = 0; v < pool.size(); ++v)
      if (!mentioned[v]) cs.insert({*marker, pool[v]});
  return DataGraph(std::move(cs), std::move(rs));
}

/// Number of diamond occurrences per role in the unfolded formula tree,
/// saturating at cap.
inline std::map<Role, std::size_t> diamond_occurrences(const MuFormula& f, std::size_t cap) {
  std::unordered_map<const void*, std::map<Role, std::size_t>> memo;
  std::function<const std::map<Role, std::size_t>&(const MuFormula&)> go =
      [&](const MuFormula& g) -> const std::map<Role, std::size_t>& {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    std::map<Role, std::size_t> out;
    auto add = [&](const std::map<Role, std::size_t>& m) {
      for (const auto& [r, k] : m) out[r] = std::min(cap, out[r] + k);
    };
    if (g.is_binary()) {
      add(go(g.left()));
      add(go(g.right()));
    } else if (!g.is_literal()) {
      add(go(g.body()));
    }
    if (g.kind() == MuFormula::Kind::Diamond) out[g.role()] = std::min(cap, out[g.role()] + 1);
    return memo.emplace(g.id(), std::move(out)).first->second;
  };
  return go(f);
}

/// Whether the edges of one role can be charged to endpoints so that every
/// node pays for at most out_cap edges as source and in_cap as target.
inline bool chargeable(const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::size_t n, std::size_t out_cap,
                       std::size_t in_cap) {
  if (edges.empty()) return true;
  std::vector<std::size_t> out_deg(n, 0), in_deg(n, 0);
  for (auto [v, w] : edges) {
    ++out_deg[v];
    ++in_deg[w];
  }
  if (in_cap == 0) return std::all_of(out_deg.begin(), out_deg.end(), [&](std::size_t d) { return d <= out_cap; });
  if (out_cap == 0) return std::all_of(in_deg.begin(), in_deg.end(), [&](std::size_t d) { return d <= in_cap; });
  if (out_cap >= n || in_cap >= n) return true;
  // Bipartite matching of edges into slots: out slots of v are
  // [v*out_cap, (v+1)*out_cap), in slots follow after all out slots.
  const std::size_t in_base = n * out_cap;
  std::vector<int> owner(n * (out_cap + in_cap), -1);
  auto slots = [&](std::size_t e) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < out_cap; ++k) s.push_back(edges[e].first * out_cap + k);
    for (std::size_t k = 0; k < in_cap; ++k) s.push_back(in_base + edges[e].second * in_cap + k);
    return s;
  };
  std::vector<bool> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t e) {
    for (std::size_t s : slots(e)) {
      if (seen[s]) continue;
      seen[s] = true;
      if (owner[s] < 0 || augment(static_cast<std::size_t>(owner[s]))) {
        owner[s] = static_cast<int>(e);
        return true;
      }
    }
    return false;
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    seen.assign(owner.size(), false);
    if (!augment(e)) return false;
  }
  return true;
}

struct Verdict {
  bool holds = false;
  std::optional<NodeId> node;
};

/// A bounded witness search: some pool node must satisfy `some` and every
/// pool node must satisfy `all`; leaves are replayed through `verify`.
struct SearchProblem {
  GraphSignature sig;
  std::set<NodeId> required;
  std::optional<MuFormula> some, all;
  std::function<Verdict(const DataGraph&)> verify;
};

struct BudgetHit {};

/// Branch and bound over the atoms of a fixed-size pool. Partial assignments
/// are bounded by evaluating the goal formulas on the three-valued structure
/// in which diamonds see every edge that may still exist and boxes only the
/// edges that certainly exist (concept literals likewise). A pool size is
/// closed when this upper bound is empty on every branch.
///
/// Edges are additionally limited per node: a formula that holds in some graph
/// also holds in the subgraph keeping only the edges picked by a positional
/// winning strategy of the verifier, which picks one edge per node and diamond
/// of the unfolded formula. Edges of roles that occur in no diamond are
/// therefore never needed.
class BoundedSearch {
 public:
  BoundedSearch(SearchProblem p, SearchBudget budget) : p_(std::move(p)), budget_(budget) {
    concepts_.assign(p_.sig.concepts.begin(), p_.sig.concepts.end());
    roles_.assign(p_.sig.roles.begin(), p_.sig.roles.end());
    marker_ = marker_concept(p_.sig);
  }

  SearchOutcome run(std::size_t max_nodes) {
    start_ = std::chrono::steady_clock::now();
    SearchOutcome out;
    std::size_t first = std::max<std::size_t>(1, p_.required.size());
    out.bound = first - 1;
    try {
      for (std::size_t n = first; n <= max_nodes; ++n) {
        if (search_size(n)) {
          out.witness = witness_;
          out.witness_node = witness_node_;
          out.bound = n;
          break;
        }
        out.bound = n;
      }
    } catch (const BudgetHit&) {
      stats_.budget_exhausted = true;
    }
    stats_.elapsed_ms = elapsed_ms();
    out.stats = stats_;
    return out;
  }

 private:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  bool search_size(std::size_t n) {
    n_ = n;
    pool_ = pool_nodes(p_.required, n);
    // Degree caps from both goal formulas.
    std::map<Role, std::size_t> caps;
    for (const auto* f : {p_.some ? &*p_.some : nullptr, p_.all ? &*p_.all : nullptr}) {
      if (!f) continue;
      for (const auto& [r, k] : diamond_occurrences(*f, n)) caps[r] = std::min(n, caps[r] + k);
    }
    out_cap_.assign(roles_.size(), 0);
    in_cap_.assign(roles_.size(), 0);
    std::vector<std::size_t> live_roles;
    for (std::size_t i = 0; i < roles_.size(); ++i) {
      out_cap_[i] = caps.count(Role(roles_[i])) ? caps[Role(roles_[i])] : 0;
      in_cap_[i] = caps.count(Role(roles_[i], true)) ? caps[Role(roles_[i], true)] : 0;
      if (out_cap_[i] + in_cap_[i] > 0) live_roles.push_back(i);
    }
    atoms_ = pool_atoms(n, concepts_.size(), live_roles);
    value_.assign(atoms_.size(), false);

    // Fresh view: everything possible, nothing certain.
    some_.reset();
    all_.reset();
    view_ = ModelView{};
    view_.n = n;
    NodeBits full(n), none(n);
    full.set();
    for (const auto& c : concepts_) {
      view_.concept_pos[c.str()] = full;
      view_.concept_neg[c.str()] = full;
    }
    for (std::size_t i = 0; i < pool_.size(); ++i)
      if (p_.required.count(pool_[i])) {
        NodeBits b(n);
        b.set(i);
        view_.nominals[pool_[i].str()] = b;
      }
    for (std::size_t i = 0; i < roles_.size(); ++i) {
      bool live = out_cap_[i] + in_cap_[i] > 0;
      for (bool inv : {false, true}) {
        view_.diamond_edges[Role(roles_[i], inv)].assign(n, live ? full : none);
        view_.box_edges[Role(roles_[i], inv)].assign(n, none);
      }
    }
    if (p_.some) some_.emplace(view_, *p_.some);
    if (p_.all) all_.emplace(view_, *p_.all);
    certain_.assign(roles_.size(), {});
    return dfs(0);
  }

  bool bound_allows() {
    if (all_ && !all_->run().all()) return false;
    if (some_ && some_->run().none()) return false;
    return true;
  }

  void tick() {
    ++stats_.states;
    if (stats_.states > budget_.max_states) throw BudgetHit{};
    if (budget_.wall && (stats_.states & 1023u) == 0 && elapsed_ms() > static_cast<double>(budget_.wall->count()))
      throw BudgetHit{};
  }

  void set_atom(std::size_t j, bool v, bool undo) {
    const PoolAtom& a = atoms_[j];
    if (!a.is_role) {
      const std::string& c = concepts_[a.symbol].str();
      // false removes the possibility, true removes the doubt.
      (v ? view_.concept_neg[c] : view_.concept_pos[c])[a.v] = undo;
      return;
    }
    Role r(roles_[a.symbol]);
    if (v) {
      view_.box_edges[r][a.v][a.w] = !undo;
      view_.box_edges[r.inverse()][a.w][a.v] = !undo;
    } else {
      view_.diamond_edges[r][a.v][a.w] = undo;
      view_.diamond_edges[r.inverse()][a.w][a.v] = undo;
    }
  }

  bool dfs(std::size_t j) {
    tick();
    if (!bound_allows()) return false;
    if (j == atoms_.size()) return leaf();
    for (bool v : {false, true}) {
      if (v && atoms_[j].is_role) {
        auto& es = certain_[atoms_[j].symbol];
        es.push_back({atoms_[j].v, atoms_[j].w});
        bool ok = chargeable(es, n_, out_cap_[atoms_[j].symbol], in_cap_[atoms_[j].symbol]);
        if (!ok) {
          es.pop_back();
          continue;
        }
      }
      value_[j] = v;
      set_atom(j, v, false);
      bool found = dfs(j + 1);
      set_atom(j, v, true);
      value_[j] = false;
      if (v && atoms_[j].is_role) certain_[atoms_[j].symbol].pop_back();
      if (found) return true;
    }
    return false;
  }

  bool leaf() {
    ++stats_.graphs_examined;
    std::vector<RoleName> roles(roles_.begin(), roles_.end());
    DataGraph g = materialize(atoms_, value_, concepts_, roles, pool_, marker_);
    Verdict v = p_.verify(g);
    if (!v.holds)
      throw Error(ErrorKind::EngineInvariant,
                  "formula route accepts a graph the validation route rejects: " + to_inline_text(g));
    witness_ = g;
    witness_node_ = v.node;
    return true;
  }

  static std::string to_inline_text(const DataGraph& g) {
    std::string out;
    for (const auto& c : g.concept_assertions()) out += c.concept_name.str() + "(" + c.node.str() + ") ";
    for (const auto& r : g.role_assertions())
      out += r.role.str() + "(" + r.subject.str() + "," + r.object.str() + ") ";
    return out;
  }

  SearchProblem p_;
  SearchBudget budget_;
  std::vector<ConceptName> concepts_;
  std::vector<RoleName> roles_;
  ConceptName marker_;
  std::chrono::steady_clock::time_point start_;
  SearchStats stats_;

  std::size_t n_ = 0;
  std::vector<NodeId> pool_;
  std::vector<PoolAtom> atoms_;
  std::vector<bool> value_;
  std::vector<std::size_t> out_cap_, in_cap_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> certain_;
  ModelView view_;
  std::optional<MuEvaluator> some_, all_;
  std::optional<DataGraph> witness_;
  std::optional<NodeId> witness_node_;
};

inline SearchOutcome run_search(SearchProblem p, std::size_t max_nodes, SearchBudget budget) {
  return BoundedSearch(std::move(p), budget).run(max_nodes);
}

}  // namespace detail

/// Calls emit on every graph over the signature whose domain contains the
/// required nodes and has at most max_nodes elements, one per isomorphism
/// class with required nodes fixed. Anonymous nodes are named by the smallest
/// unused numerals. Emission stops when emit returns false; returns the
/// number of graphs emitted.
inline std::size_t enumerate_graphs(const GraphSignature& sig, const std::set<NodeId>& required, std::size_t max_nodes,
                                    const std::function<bool(const DataGraph&)>& emit) {
  if (required.size() > max_nodes)
    throw Error(ErrorKind::InvalidArgument, "more required nodes than the size bound allows");
  const std::size_t n = max_nodes, fixed = required.size();
  std::vector<NodeId> pool = detail::pool_nodes(required, n);
  std::vector<ConceptName> concepts(sig.concepts.begin(), sig.concepts.end());
  std::vector<RoleName> roles(sig.roles.begin(), sig.roles.end());
  std::vector<std::size_t> role_ids(roles.size());
  std::iota(role_ids.begin(), role_ids.end(), 0);
  auto atoms = detail::pool_atoms(n, concepts.size(), role_ids);
  const std::size_t A = atoms.size();
  if (A > 30) throw Error(ErrorKind::BudgetExceeded, std::to_string(A) + " atoms are too many to enumerate");

  // Position of every atom, to apply node permutations.
  std::map<std::tuple<bool, std::size_t, std::size_t, std::size_t>, std::size_t> where;
  for (std::size_t j = 0; j < A; ++j) where[{atoms[j].is_role, atoms[j].symbol, atoms[j].v, atoms[j].w}] = j;
  std::vector<std::vector<std::size_t>> perms;  // atom index maps, identity excluded
  std::vector<std::size_t> pi(n);
  std::iota(pi.begin(), pi.end(), 0);
  while (std::next_permutation(pi.begin() + static_cast<std::ptrdiff_t>(fixed), pi.end())) {
    std::vector<std::size_t> m(A);
    for (std::size_t j = 0; j < A; ++j) m[j] = where[{atoms[j].is_role, atoms[j].symbol, pi[atoms[j].v], pi[atoms[j].w]}];
    perms.push_back(std::move(m));
  }
  // Atom j is bit A-1-j, so atom 0 is the most significant.
  std::vector<std::uint64_t> touches(n, 0);
  for (std::size_t j = 0; j < A; ++j) {
    touches[atoms[j].v] |= std::uint64_t{1} << (A - 1 - j);
    touches[atoms[j].w] |= std::uint64_t{1} << (A - 1 - j);
  }
  std::size_t emitted = 0;
  std::vector<bool> value(A);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << A); ++mask) {
    bool ok = true;
    for (std::size_t v = 0; v < fixed && ok; ++v) ok = (mask & touches[v]) != 0;
    for (std::size_t k = 0; k < perms.size() && ok; ++k) {
      std::uint64_t image = 0;
      for (std::size_t j = 0; j < A; ++j)
        if (mask >> (A - 1 - j) & 1u) image |= std::uint64_t{1} << (A - 1 - perms[k][j]);
      ok = image <= mask;
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < A; ++j) value[j] = mask >> (A - 1 - j) & 1u;
    ++emitted;
    if (!emit(detail::materialize(atoms, value, concepts, roles, pool, std::nullopt))) break;
  }
  return emitted;
}

/// Bounded search for a graph in which some node conforms to s.
inline SearchOutcome shape_sat_bounded(const ConstraintSet& c, const ShapeName& s, std::size_t max_nodes,
                                       SearchBudget budget = {}) {
  ConstraintSet cs = restrict_to(c, s);
  detail::SearchProblem p;
  ExprSignature sig = cs.signature();
  p.sig.add(sig);
  p.required = sig.nominals;
  p.some = translate(cs, s);
  p.verify = [cs, s](const DataGraph& g) {
    NodeSet ext = wf_extension(g, cs, s);
    if (ext.empty()) return detail::Verdict{};
    return detail::Verdict{true, *ext.begin()};
  };
  return detail::run_search(std::move(p), max_nodes, budget);
}

/// How doc_sat_bounded confirms a candidate graph.
enum class DocRoute { Direct, Formula };

/// Whether the satisfiability formula of d holds at the hub of g extended by
/// a fresh role, which should coincide with validating d on g.
inline bool docsat_formula_holds(const DataGraph& g, const Document& d) {
  RoleName p = fresh_role({&d});
  auto [h, hub] = with_hub(g, p);
  return eval(docsat_formula(d, p), h).count(hub) > 0;
}

/// Bounded search for a graph validating d.
inline SearchOutcome doc_sat_bounded(const Document& d, std::size_t max_nodes, SearchBudget budget = {},
                                     DocRoute route = DocRoute::Direct) {
  d.check();
  detail::SearchProblem p;
  p.sig.add(d.signature());
  p.required = d.individuals();
  p.all = theta(d);
  p.verify = [d, route](const DataGraph& g) {
    bool ok = route == DocRoute::Direct ? validates_wf(g, d) : docsat_formula_holds(g, d);
    return detail::Verdict{ok, std::nullopt};
  };
  return detail::run_search(std::move(p), max_nodes, budget);
}

/// Bounded search for a counterexample: a graph validating d1 but not d2.
inline SearchOutcome implies_bounded(const Document& d1, const Document& d2, std::size_t max_nodes,
                                     SearchBudget budget = {}) {
  d1.check();
  d2.check();
  detail::SearchProblem p;
  p.sig.add(d1.signature());
  p.sig.add(d2.signature());
  p.required = d1.individuals();
  auto i2 = d2.individuals();
  p.required.insert(i2.begin(), i2.end());
  p.all = theta(d1);
  p.some = dualize(theta(d2));
  p.verify = [d1, d2](const DataGraph& g) {
    return detail::Verdict{validates_wf(g, d1) && !validates_wf(g, d2), std::nullopt};
  };
  return detail::run_search(std::move(p), max_nodes, budget);
}

/// Bounded search for a graph in which some node satisfies a closed formula.
/// Nominals of the formula are required to be nodes of the graph.
inline SearchOutcome formula_sat_bounded(const MuFormula& f, std::size_t max_nodes, SearchBudget budget = {}) {
  if (auto fv = free_vars(f); !fv.empty())
    throw Error(ErrorKind::FreeVariable, "formula has free variable '" + *fv.begin() + "'");
  detail::SearchProblem p;
  MuSignature sig = signature_of(f);
  p.sig.add(sig);
  p.required = sig.nominals;
  p.some = f;
  p.verify = [f](const DataGraph& g) {
    NodeSet ext = eval(f, g);
    if (ext.empty()) return detail::Verdict{};
    return detail::Verdict{true, *ext.begin()};
  };
  return detail::run_search(std::move(p), max_nodes, budget);
}

struct CrosscheckReport {
  NodeSet wf;  // nodes conforming to s in the well-founded model
  NodeSet mu;  // extension of the translated formula
  NodeSet disagreements;
  bool agree() const { return disagreements.empty(); }
};

/// Compares well-founded validation of s with evaluation of its translation.
inline CrosscheckReport crosscheck(const DataGraph& g, const ConstraintSet& c, const ShapeName& s) {
  CrosscheckReport r;
  r.wf = wf_extension(g, c, s);
  r.mu = eval(translate(c, s), g);
  std::set_symmetric_difference(r.wf.begin(), r.wf.end(), r.mu.begin(), r.mu.end(),
                                std::inserter(r.disagreements, r.disagreements.end()));
  return r;
}

}  // namespace wfshacl
