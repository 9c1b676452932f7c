#include <gtest/gtest.h>

#include <chrono>

#include "support/test_support.hpp"

using namespace wfshacl;
using namespace wfshacl::testing;

namespace {

GraphSignature gsig(std::initializer_list<const char*> concepts, std::initializer_list<const char*> roles) {
  GraphSignature s;
  for (auto c : concepts) s.concepts.insert(ConceptName(c));
  for (auto r : roles) s.roles.insert(RoleName(r));
  return s;
}

// Isomorphism classes counted the slow way: every labelled graph over the
// pool, keyed by its smallest relabelling of the anonymous nodes.
std::size_t brute_force_count(const GraphSignature& sig, const std::set<NodeId>& required, std::size_t n) {
  std::vector<NodeId> pool(required.begin(), required.end());
  for (std::size_t k = 0; pool.size() < n; ++k)
    if (!required.count(NodeId(std::to_string(k)))) pool.push_back(NodeId(std::to_string(k)));
  std::vector<std::string> atoms;
  std::vector<std::vector<std::size_t>> ends;
  for (const auto& c : sig.concepts)
    for (std::size_t v = 0; v < n; ++v) {
      atoms.push_back("c" + c.str());
      ends.push_back({v});
    }
  for (const auto& r : sig.roles)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = 0; w < n; ++w) {
        atoms.push_back("r" + r.str());
        ends.push_back({v, w});
      }
  std::set<std::set<std::string>> classes;
  const std::size_t fixed = required.size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << atoms.size()); ++m) {
    std::vector<bool> mentioned(n, false);
    for (std::size_t j = 0; j < atoms.size(); ++j)
      if (m >> j & 1u)
        for (auto v : ends[j]) mentioned[v] = true;
    bool ok = true;
    for (std::size_t v = 0; v < fixed; ++v) ok = ok && mentioned[v];
    if (!ok) continue;
    std::vector<std::size_t> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::optional<std::set<std::string>> best;
    do {
      std::set<std::string> key;
      for (std::size_t j = 0; j < atoms.size(); ++j)
        if (m >> j & 1u) {
          std::string k = atoms[j];
          for (auto v : ends[j]) k += "," + std::to_string(pi[v]);
          key.insert(k);
        }
      if (!best || key < *best) best = key;
    } while (std::next_permutation(pi.begin() + static_cast<std::ptrdiff_t>(fixed), pi.end()));
    classes.insert(*best);
  }
  return classes.size();
}

// Any graph over the signature plus a marker concept with at most n nodes.
bool exists_graph(const GraphSignature& sig, const std::set<NodeId>& required, std::size_t n,
                  const std::function<bool(const DataGraph&)>& pred) {
  GraphSignature with_marker = sig;
  with_marker.concepts.insert(ConceptName("Zmark"));
  bool found = false;
  enumerate_graphs(with_marker, required, n, [&](const DataGraph& g) {
    found = !g.empty() && pred(g);
    return !found;
  });
  return found;
}

RandomSpec small_spec() {
  RandomSpec spec;
  spec.concepts = {"A"};
  spec.roles = {"r"};
  return spec;
}

Document random_document(Random& rnd, const RandomSpec& spec, std::size_t k) {
  Document d;
  d.constraints = rnd.normal_set(spec, k);
  std::size_t targets = rnd.below(3);
  for (std::size_t i = 0; i < targets; ++i) {
    ShapeName s("s" + std::to_string(rnd.below(k)));
    switch (rnd.below(3)) {
      case 0: d.targets.push_back(Target::on_node(NodeId(rnd.pick(spec.nominals)), s)); break;
      case 1: d.targets.push_back(Target::on_class(ConceptName(rnd.pick(spec.concepts)), s)); break;
      default: d.targets.push_back(Target::on_role(rnd.role(spec), s)); break;
    }
  }
  return d;
}

}  // namespace

TEST(EnumerateGraphs, SingleConceptOneNode) {
  std::vector<DataGraph> seen;
  enumerate_graphs(gsig({"A"}, {}), {}, 1, [&](const DataGraph& g) {
    seen.push_back(g);
    return true;
  });
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_TRUE(seen[0].empty());
  EXPECT_EQ(seen[1], parse_graph("A(0)"));
}

TEST(EnumerateGraphs, IncludesTwoCycles) {
  bool cycle = false;
  enumerate_graphs(gsig({}, {"p"}), {NodeId("a")}, 2, [&](const DataGraph& g) {
    cycle = cycle || g == parse_graph("p(a,0) p(0,a)");
    return true;
  });
  EXPECT_TRUE(cycle);
}

TEST(EnumerateGraphs, RequiredNodesAreAlwaysPresent) {
  enumerate_graphs(gsig({"A"}, {"p"}), {NodeId("a"), NodeId("b")}, 3, [&](const DataGraph& g) {
    EXPECT_TRUE(g.contains(NodeId("a")) && g.contains(NodeId("b")));
    return true;
  });
}

TEST(EnumerateGraphs, CountsMatchBruteForce) {
  struct Case {
    GraphSignature sig;
    std::set<NodeId> required;
    std::size_t n;
  };
  std::vector<Case> cases{{gsig({"A"}, {"p"}), {}, 2},
                          {gsig({"A"}, {"p"}), {NodeId("a")}, 2},
                          {gsig({"A", "B"}, {}), {}, 3},
                          {gsig({"A"}, {"p"}), {}, 3},
                          {gsig({}, {"p", "r"}), {NodeId("a")}, 2}};
  for (const auto& c : cases) {
    std::size_t got = enumerate_graphs(c.sig, c.required, c.n, [](const DataGraph&) { return true; });
    EXPECT_EQ(got, brute_force_count(c.sig, c.required, c.n));
  }
}

TEST(EnumerateGraphs, DeterministicOrderAndNoDuplicates) {
  std::vector<std::string> a, b;
  auto sig = gsig({"A"}, {"p"});
  enumerate_graphs(sig, {}, 2, [&](const DataGraph& g) {
    a.push_back(to_text(g));
    return true;
  });
  enumerate_graphs(sig, {}, 2, [&](const DataGraph& g) {
    b.push_back(to_text(g));
    return true;
  });
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), a.size());
}

TEST(ShapeSat, Example1HasOneNodeWitness) {
  SearchOutcome o = shape_sat_bounded(cex1(), ShapeName("s"), 7);
  ASSERT_TRUE(o.found());
  EXPECT_EQ(*o.witness, parse_graph("A(0)"));
  EXPECT_EQ(o.bound, 1u);
  EXPECT_EQ(o.witness_node, NodeId("0"));
}

TEST(ShapeSat, Prop10HasNoModelUpToSix) {
  auto t0 = std::chrono::steady_clock::now();
  SearchOutcome o = shape_sat_bounded(prop10().constraints, ShapeName("s"), 6);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_FALSE(o.found());
  EXPECT_EQ(o.bound, 6u);
  EXPECT_FALSE(o.stats.budget_exhausted);
  RecordProperty("seconds", std::to_string(secs));
}

TEST(ShapeSat, ForcedContradiction) {
  ConstraintSet c = parse_document("s <- A & !t\nt <- A\n").constraints;
  SearchOutcome o = shape_sat_bounded(c, ShapeName("s"), 3);
  EXPECT_FALSE(o.found());
  EXPECT_EQ(o.bound, 3u);
}

TEST(ShapeSat, BudgetGivesPartialBound) {
  SearchBudget tiny;
  tiny.max_states = 50;
  SearchOutcome o = shape_sat_bounded(prop10().constraints, ShapeName("s"), 6, tiny);
  EXPECT_FALSE(o.found());
  EXPECT_TRUE(o.stats.budget_exhausted);
  EXPECT_LT(o.bound, 6u);
}

TEST(ShapeSat, WallClockBudget) {
  SearchBudget quick;
  quick.wall = std::chrono::milliseconds(0);
  SearchOutcome o = shape_sat_bounded(prop10().constraints, ShapeName("s"), 6, quick);
  EXPECT_TRUE(o.stats.budget_exhausted);
  EXPECT_LT(o.bound, 6u);
}

// The search must agree with plain enumeration, which does not rely on the
// degree limit or on the three-valued bounds.
TEST(ShapeSat, AgreesWithExhaustiveEnumeration) {
  Random rnd(61);
  RandomSpec spec;
  spec.concepts = {"A", "B"};
  for (int i = 0; i < 150; ++i) {
    ConstraintSet c = rnd.normal_set(spec, rnd.between(1, 6));
    ShapeName s("s" + std::to_string(rnd.below(c.size())));
    ConstraintSet cs = restrict_to(c, s);
    auto sig = cs.signature();
    GraphSignature g;
    g.add(sig);
    bool expected = exists_graph(g, sig.nominals, 2, [&](const DataGraph& h) { return !wf_extension(h, cs, s).empty(); });
    SearchOutcome o = shape_sat_bounded(c, s, 2);
    EXPECT_EQ(o.found(), expected) << to_text(cs) << "shape " << s.str();
    if (o.found()) {
      EXPECT_FALSE(wf_extension(*o.witness, cs, s).empty());
    }
  }
}

TEST(ShapeSat, AgreesWithExhaustiveEnumerationAtThreeNodes) {
  Random rnd(62);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 60; ++i) {
    ConstraintSet c = rnd.normal_set(spec, rnd.between(1, 6));
    ShapeName s("s" + std::to_string(rnd.below(c.size())));
    ConstraintSet cs = restrict_to(c, s);
    auto sig = cs.signature();
    GraphSignature g;
    g.add(sig);
    bool expected = exists_graph(g, sig.nominals, 3, [&](const DataGraph& h) { return !wf_extension(h, cs, s).empty(); });
    EXPECT_EQ(shape_sat_bounded(c, s, 3).found(), expected) << to_text(cs) << "shape " << s.str();
  }
}

TEST(ShapeSat, BoundsAreMonotone) {
  Random rnd(63);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 40; ++i) {
    ConstraintSet c = rnd.normal_set(spec, rnd.between(1, 6));
    ShapeName s("s" + std::to_string(rnd.below(c.size())));
    SearchOutcome small = shape_sat_bounded(c, s, 2), large = shape_sat_bounded(c, s, 4);
    if (small.found()) {
      ASSERT_TRUE(large.found());
      EXPECT_EQ(large.bound, small.bound);
    }
    if (!large.found()) {
      EXPECT_FALSE(small.found());
    }
  }
}

TEST(DocSat, FixturesAndTrivialCases) {
  SearchOutcome o = doc_sat_bounded(ex1(), 3);
  ASSERT_TRUE(o.found());
  EXPECT_TRUE(validates_wf(*o.witness, ex1()));
  EXPECT_TRUE(doc_sat_bounded(Document{}, 1).found());
  Document unsat = parse_document("s <- A & !t\nt <- A\ntarget node <a> s\n");
  SearchOutcome u = doc_sat_bounded(unsat, 3);
  EXPECT_FALSE(u.found());
  EXPECT_EQ(u.bound, 3u);
}

TEST(DocSat, Prop10DocumentHasNoSmallModel) {
  Document d = prop10();
  d.targets.push_back(Target::on_node(NodeId("a"), ShapeName("s")));
  SearchOutcome o = doc_sat_bounded(d, 4);
  EXPECT_FALSE(o.found());
  EXPECT_EQ(o.bound, 4u);
}

TEST(DocSat, RoutesAgree) {
  Random rnd(64);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 80; ++i) {
    Document d = random_document(rnd, spec, rnd.between(1, 5));
    SearchOutcome direct = doc_sat_bounded(d, 3);
    SearchOutcome formula = doc_sat_bounded(d, 3, {}, DocRoute::Formula);
    EXPECT_EQ(direct.found(), formula.found()) << to_text(d);
    if (direct.found()) {
      EXPECT_TRUE(validates_wf(*direct.witness, d));
      EXPECT_TRUE(docsat_formula_holds(*direct.witness, d));
    }
  }
}

TEST(DocSat, FormulaRouteMatchesValidationOnRandomGraphs) {
  Random rnd(65);
  RandomSpec spec;
  for (int i = 0; i < 200; ++i) {
    Document d = random_document(rnd, spec, rnd.between(1, 5));
    DataGraph g = rnd.graph(spec, rnd.between(1, 5));
    if (!check_compatible(g, d)) continue;
    EXPECT_EQ(docsat_formula_holds(g, d), validates_wf(g, d)) << to_text(d) << to_text(g);
  }
}

TEST(DocSat, AgreesWithExhaustiveEnumeration) {
  Random rnd(66);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 80; ++i) {
    Document d = random_document(rnd, spec, rnd.between(1, 5));
    GraphSignature g;
    g.add(d.signature());
    bool expected = exists_graph(g, d.individuals(), 2, [&](const DataGraph& h) { return validates_wf(h, d); });
    EXPECT_EQ(doc_sat_bounded(d, 2).found(), expected) << to_text(d);
  }
}

TEST(Implies, Reflexive) {
  for (const auto& name : fixture_documents()) {
    Document d = load_doc(name);
    SearchOutcome o = implies_bounded(d, d, 4);
    EXPECT_FALSE(o.found()) << name;
    EXPECT_EQ(o.bound, 4u) << name;
  }
}

TEST(Implies, ContainmentHolds) {
  SearchOutcome o = implies_bounded(load_doc("impl_a.shacl"), load_doc("impl_a_or_b_prime.shacl"), 4);
  EXPECT_FALSE(o.found());
  EXPECT_EQ(o.bound, 4u);
}

TEST(Implies, CounterexampleIsOneNode) {
  SearchOutcome o = implies_bounded(load_doc("impl_a_or_b.shacl"), load_doc("impl_a.shacl"), 3);
  ASSERT_TRUE(o.found());
  EXPECT_EQ(to_inline(*o.witness), "{B(a)}");
}

TEST(Implies, EmptyDocumentIsImplied) {
  EXPECT_FALSE(implies_bounded(ex1(), Document{}, 3).found());
  EXPECT_FALSE(implies_bounded(load_doc("class_target.shacl"), Document{}, 3).found());
}

TEST(Implies, AgreesWithExhaustiveEnumeration) {
  Random rnd(67);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 80; ++i) {
    Document d1 = random_document(rnd, spec, rnd.between(1, 4));
    Document d2 = random_document(rnd, spec, rnd.between(1, 4));
    GraphSignature g;
    g.add(d1.signature());
    g.add(d2.signature());
    std::set<NodeId> req = d1.individuals();
    for (const auto& a : d2.individuals()) req.insert(a);
    bool expected =
        exists_graph(g, req, 2, [&](const DataGraph& h) { return validates_wf(h, d1) && !validates_wf(h, d2); });
    SearchOutcome o = implies_bounded(d1, d2, 2);
    EXPECT_EQ(o.found(), expected) << to_text(d1) << "--\n" << to_text(d2);
    if (o.found()) {
      EXPECT_TRUE(validates_wf(*o.witness, d1));
      EXPECT_FALSE(validates_wf(*o.witness, d2));
    }
  }
}

TEST(FormulaSat, Examples) {
  EXPECT_TRUE(formula_sat_bounded(parse_mu_formula("A & <p> !A"), 2).found());
  EXPECT_FALSE(formula_sat_bounded(parse_mu_formula("A & !A"), 3).found());
  EXPECT_FALSE(formula_sat_bounded(parse_mu_formula("nu X . (<r> X & mu Y . [r-] Y)"), 5).found());
  SearchOutcome o = formula_sat_bounded(parse_mu_formula("@a & <p> @a"), 2);
  ASSERT_TRUE(o.found());
  EXPECT_EQ(*o.witness, parse_graph("p(a,a)"));
  EXPECT_THROW(formula_sat_bounded(MuFormula::var("X"), 2), Error);
}

TEST(FormulaSat, AgreesWithExhaustiveEnumeration) {
  Random rnd(68);
  RandomSpec spec = small_spec();
  for (int i = 0; i < 100; ++i) {
    MuFormula f = rnd.formula(spec, 4);
    MuSignature ms = signature_of(f);
    GraphSignature g;
    g.add(ms);
    bool expected = exists_graph(g, ms.nominals, 2, [&](const DataGraph& h) { return !eval(f, h).empty(); });
    EXPECT_EQ(formula_sat_bounded(f, 2).found(), expected) << f.to_string();
  }
}

TEST(Crosscheck, Examples) {
  CrosscheckReport r1 = crosscheck(g1(), cex1(), ShapeName("s"));
  EXPECT_TRUE(r1.agree());
  EXPECT_EQ(r1.wf, nodes({"0", "1", "2", "3", "4", "5", "6"}));
  CrosscheckReport r2 = crosscheck(g2(), cex1(), ShapeName("s"));
  EXPECT_TRUE(r2.agree());
  EXPECT_TRUE(r2.wf.empty());
}
