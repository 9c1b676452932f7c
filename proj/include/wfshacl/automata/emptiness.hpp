#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <vector>

#include "wfshacl/automata/arena.hpp"
#include "wfshacl/search.hpp"
#include "wfshacl/wf_engine.hpp"

namespace wfshacl {

/// Which guesses the automaton routes try for each structure.
enum class GuessScope { Dominant, All };

namespace detail {

inline GraphSignature automaton_signature(const GuessSpace& sp) {
  GraphSignature sig;
  sig.concepts = sp.concepts;
  for (const auto& r : sp.roles) sig.roles.insert(r.name);
  return sig;
}

/// Graph induced by the nodes in keep.
inline DataGraph induced(const DataGraph& g, const std::set<NodeId>& keep) {
  std::set<ConceptAssertion> c;
  std::set<RoleAssertion> r;
  for (const auto& ca : g.concept_assertions())
    if (keep.count(ca.node)) c.insert(ca);
  for (const auto& ra : g.role_assertions())
    if (keep.count(ra.subject) && keep.count(ra.object)) r.insert(ra);
  return DataGraph(std::move(c), std::move(r));
}

/// Calls visit(g, anchor, encoding, automaton, over) on every structure of at
/// most n nodes, smallest size first, until visit returns true. `over()`
/// charges one unit of work and reports an exhausted budget, which visit
/// should answer by returning true. Fills out.bound and stats.
template <class Visit>
void for_each_structure(const TwoATA& a, std::size_t n, const SearchBudget& budget, SearchOutcome& out,
                        bool with_anchor, Visit&& visit) {
  const GuessSpace& sp = a.space();
  TwoATA wide = a.with_branching(std::max(a.branching(), n + 1));
  GraphSignature sig = automaton_signature(sp);
  GraphSignature enum_sig = sig;
  enum_sig.concepts.insert(marker_concept(sig));
  std::set<NodeId> required(sp.nominals.begin(), sp.nominals.end());
  const ConceptName marker = marker_concept(sig);
  // The marker only exists to keep isolated nodes in the domain; on any other
  // node it merely duplicates a graph.
  auto canonical = [&](const DataGraph& g) {
    std::set<NodeId> busy;
    for (const auto& ca : g.concept_assertions())
      if (ca.concept_name != marker) busy.insert(ca.node);
    for (const auto& ra : g.role_assertions()) {
      busy.insert(ra.subject);
      busy.insert(ra.object);
    }
    for (const auto& ca : g.concept_assertions())
      if (ca.concept_name == marker && busy.count(ca.node)) return false;
    return true;
  };
  auto start = std::chrono::steady_clock::now();
  auto over = [&] {
    if (++out.stats.states > budget.max_states || (budget.wall && std::chrono::steady_clock::now() - start > *budget.wall))
      out.stats.budget_exhausted = true;
    return out.stats.budget_exhausted;
  };
  out.bound = 0;
  for (std::size_t m = required.size(); m <= n; ++m) {
    bool done = false;
    enumerate_graphs(enum_sig, required, m, [&](const DataGraph& g) {
      if (over()) {
        done = true;
        return false;
      }
      if (g.size() != m || !canonical(g)) return true;
      ++out.stats.graphs_examined;
      std::vector<std::optional<NodeId>> anchors{std::nullopt};
      if (with_anchor)
        for (const auto& v : g.domain())
          if (!required.count(v)) anchors.push_back(v);
      for (const auto& anchor : anchors) {
        auto enc = encode_graph(wide, g, anchor);
        // Structures with unreached nodes repeat a smaller one.
        if (!enc || enc->sources().size() != g.size()) continue;
        if (visit(g, anchor, *enc, wide, over)) {
          done = true;
          return false;
        }
      }
      return true;
    });
    out.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (done) {
      if (!out.stats.budget_exhausted) out.bound = m;
      return;
    }
    out.bound = m;
  }
}

}  // namespace detail

/// Searches structures of at most n nodes for one accepted by a. A witness is
/// the part of the graph the encoding reaches.
inline SearchOutcome bounded_emptiness(const TwoATA& a, std::size_t n, SearchBudget budget = {}) {
  SearchOutcome out;
  detail::for_each_structure(a, n, budget, out, true,
                             [&](const DataGraph& g, const std::optional<NodeId>& anchor, const TreeEncoding& enc,
                                 const TwoATA& wide, auto&& over) {
                               if (over()) return true;
                               if (!accepts(wide, enc)) return false;
                               out.witness = detail::induced(g, enc.sources());
                               out.witness_node = anchor;
                               return true;
                             });
  return out;
}

/// Guesses that dominate every other guess on g: the identity mapping, no
/// connections, and entries made of the label-forced part plus any subset of
/// the formulas the transitions look up at the edges entering each nominal.
/// Throws BudgetExceeded past `budget` guesses.
inline std::vector<Guess> dominant_guesses(const GuessSpace& sp, const DataGraph& g, std::size_t budget = 100'000) {
  using K = ShapeExpr::Kind;
  const std::size_t l = sp.nominals.size();
  std::set<ShapeExpr> universe(sp.universe.begin(), sp.universe.end());
  // Formulas read through a marker (rho, a): bodies of rho-modalities and
  // their negations, universals over rho-, and negated shapes whose
  // definition is an rho- existential.
  auto read_through = [&](const Role& rho, std::set<ShapeExpr>& out) {
    auto add = [&](const ShapeExpr& e) {
      if (universe.count(e)) out.insert(e);
    };
    for (const auto& e : sp.universe) {
      if (e.is_modal() && e.role() == rho) {
        add(e.body());
        if (e.body().kind() == K::Shape) add(ShapeExpr::neg(e.body().shape_name()));
      }
      if (e.kind() == K::Forall && e.role() == rho.inverse()) add(e);
      if (e.kind() == K::NegShape && sp.constraints.defines(e.shape_name())) {
        const ShapeExpr& b = sp.constraints.body(e.shape_name());
        if (b.kind() == K::Exists && b.role() == rho.inverse()) add(e);
      }
    }
  };
  std::vector<std::set<ShapeExpr>> forced(l);
  std::vector<std::vector<ShapeExpr>> free(l);
  std::size_t bits = 0;
  for (std::size_t i = 0; i < l; ++i) {
    forced[i].insert(ShapeExpr::nominal(sp.nominals[i]));
    auto idx = g.index_of(sp.nominals[i]);
    if (!idx) continue;
    for (const auto& c : sp.concepts)
      if (g.extension(c).size() > *idx && g.extension(c).test(*idx)) forced[i].insert(ShapeExpr::concept_ref(c));
    std::set<ShapeExpr> read;
    for (const auto& rho : sp.roles) {
      const auto& into = g.successors(rho.inverse());
      if (*idx < into.size() && into[*idx].any()) read_through(rho, read);
    }
    for (const auto& e : read)
      if (!forced[i].count(e)) free[i].push_back(e);
    bits += free[i].size();
  }
  if (bits >= 63 || (std::size_t{1} << bits) > budget) throw Error(ErrorKind::BudgetExceeded, "too many dominant guesses");

  std::vector<Guess> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << bits); ++mask) {
    Guess gs;
    std::size_t bit = 0;
    for (std::size_t i = 0; i < l; ++i) {
      gs.mapping.push_back(i);
      std::set<ShapeExpr> gamma = forced[i];
      for (const auto& e : free[i])
        if (mask >> bit++ & 1u) gamma.insert(e);
      gs.list.push_back(std::move(gamma));
    }
    out.push_back(std::move(gs));
  }
  return out;
}

namespace detail {

inline SearchOutcome automaton_route(std::shared_ptr<const GuessSpace> sp, std::size_t n, SearchBudget budget,
                                     GuessScope scope, bool with_anchor) {
  // Any guess fixes the structures to search, which depend on the space only.
  Guess probe;
  probe.mapping.resize(sp->nominals.size());
  for (std::size_t i = 0; i < probe.mapping.size(); ++i) {
    probe.mapping[i] = i;
    probe.list.push_back(std::set<ShapeExpr>{ShapeExpr::nominal(sp->nominals[i])});
  }
  TwoATA base(sp, probe, default_branching(*sp));
  std::vector<Guess> all;
  if (scope == GuessScope::All) enumerate_guesses(*sp, [&](const Guess& g) {
      all.push_back(g);
      return true;
    });
  SearchOutcome out;
  for_each_structure(base, n, budget, out, with_anchor,
                     [&](const DataGraph& g, const std::optional<NodeId>& anchor, const TreeEncoding& enc,
                         const TwoATA& wide, auto&& over) {
                       const std::vector<Guess> guesses = scope == GuessScope::All ? all : dominant_guesses(*sp, g);
                       for (const auto& gs : guesses) {
                         if (over()) return true;
                         TwoATA a(sp, gs, wide.branching());
                         if (!accepts(a, enc)) continue;
                         out.witness = induced(g, enc.sources());
                         out.witness_node = anchor;
                         return true;
                       }
                       return false;
                     });
  return out;
}

}  // namespace detail

/// Bounded satisfiability of shape s against c through the automata: some
/// guess automaton accepts the encoding of a structure of at most n nodes.
inline SearchOutcome automaton_sat_bounded(const ConstraintSet& c, const ShapeName& s, std::size_t n,
                                           SearchBudget budget = {}, GuessScope scope = GuessScope::Dominant) {
  auto sp = std::make_shared<const GuessSpace>(guess_space(c, s));
  SearchOutcome out = detail::automaton_route(sp, n, budget, scope, true);
  if (out.witness) {
    NodeSet ext = wf_extension(*out.witness, restrict_to(c, s), s);
    if (!ext.empty()) out.witness_node = *ext.begin();
  }
  return out;
}

/// Bounded satisfiability of a document through the automata.
inline SearchOutcome automaton_docsat_bounded(const Document& d, std::size_t n, SearchBudget budget = {},
                                              GuessScope scope = GuessScope::Dominant) {
  auto sp = std::make_shared<const GuessSpace>(guess_space(d));
  SearchOutcome out = detail::automaton_route(sp, n, budget, scope, false);
  out.witness_node.reset();
  return out;
}

}  // namespace wfshacl
