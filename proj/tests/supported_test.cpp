#include <gtest/gtest.h>

#include "support/test_support.hpp"

using namespace wfshacl;
using namespace wfshacl::testing;

namespace {

const ShapeAssignment S1 = assignment({P("s", "0"), P("s", "1"), N("t", "0"), N("t", "1")});
const ShapeAssignment S2 = assignment({N("s", "0"), N("s", "1"), P("t", "0"), P("t", "1")});

// Independent one-step check written against eval_expr only.
bool supported_by_definition(const DataGraph& g, const ConstraintSet& c, const ShapeAssignment& S) {
  for (const auto& [h, body] : c.defs()) {
    NodeSet lower = eval_expr(body, g, S, Polarity::Lower);
    for (const auto& a : g.domain())
      if (S.has_positive(h, a) != (lower.count(a) > 0)) return false;
  }
  return true;
}

}  // namespace

TEST(SupportedModel, Example2Members) {
  EXPECT_TRUE(is_supported_model(g2(), cex1(), S1));
  EXPECT_TRUE(is_supported_model(g2(), cex1(), S2));
  EXPECT_FALSE(is_supported_model(g2(), cex1(), assignment({P("s", "0"), N("s", "1"), N("t", "0"), N("t", "1")})));
}

TEST(SupportedModel, PartialAssignmentRejected) {
  try {
    is_supported_model(g2(), cex1(), assignment({P("s", "0")}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotTotal);
  }
}

TEST(SupportedModel, Example2EnumerationInCanonicalOrder) {
  auto models = enumerate_supported_models(g2(), cex1());
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(models[0], S2);
  EXPECT_EQ(models[1], S1);
}

TEST(SupportedModel, BudgetIsEnforced) {
  try {
    enumerate_supported_models(g1(), cex1(), SupportedOptions{10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
  }
}

TEST(SupportedModel, EnumerationMatchesBruteForce) {
  Random rnd(31);
  RandomSpec spec;
  for (int i = 0; i < 60; ++i) {
    std::size_t k = rnd.between(1, 3);
    ConstraintSet c = rnd.normal_set(spec, k);
    DataGraph g = rnd.graph(spec, rnd.between(1, 3));
    std::vector<Atom> atoms;
    for (const auto& s : c.heads())
      for (const auto& a : g.domain()) atoms.push_back({s, a});
    std::vector<ShapeAssignment> expected;
    for (std::uint32_t m = 0; m < (1u << atoms.size()); ++m) {
      ShapeAssignment S;
      // Most significant bit first gives the canonical order.
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        bool v = m >> (atoms.size() - 1 - j) & 1u;
        v ? S.add_positive(atoms[j].first, atoms[j].second) : S.add_negative(atoms[j].first, atoms[j].second);
      }
      if (supported_by_definition(g, c, S)) expected.push_back(S);
    }
    EXPECT_EQ(enumerate_supported_models(g, c), expected) << to_text(c) << to_text(g);
  }
}

TEST(Stratify, Examples) {
  EXPECT_FALSE(stratify(cex1()).has_value());
  auto empty = stratify(ConstraintSet{});
  ASSERT_TRUE(empty.has_value());
  EXPECT_TRUE(empty->layers.empty());
  auto st = stratify(prop10().constraints);
  ASSERT_TRUE(st.has_value());
  ASSERT_EQ(st->layers.size(), 3u);
  EXPECT_TRUE(st->layers[0].defines(ShapeName("s''")));
  EXPECT_TRUE(st->layers[1].defines(ShapeName("s'")));
  EXPECT_TRUE(st->layers[2].defines(ShapeName("s")));
  EXPECT_TRUE(is_valid_stratification(prop10().constraints, *st));
}

TEST(Stratify, GridSetsAreNotStratified) {
  EXPECT_FALSE(stratify(load_doc("grid_stable.shacl").constraints).has_value());
  // Only positive self-loops on the tile choices, negation points downward.
  EXPECT_TRUE(stratify(load_doc("grid_supported.shacl").constraints).has_value());
}

TEST(Stratify, RandomStratifiedSetsAreAccepted) {
  Random rnd(32);
  RandomSpec spec;
  for (int i = 0; i < 100; ++i) {
    ConstraintSet c = rnd.stratified_set(spec, rnd.between(1, 8));
    auto st = stratify(c);
    ASSERT_TRUE(st.has_value()) << to_text(c);
    EXPECT_TRUE(is_valid_stratification(c, *st));
  }
}

TEST(Stratify, WellFoundedModelIsTotalAndSupported) {
  Random rnd(33);
  RandomSpec spec;
  for (int i = 0; i < 200; ++i) {
    ConstraintSet c = rnd.stratified_set(spec, rnd.between(1, 8));
    DataGraph g = rnd.graph(spec, rnd.between(1, 5));
    ShapeAssignment M = well_founded_model(g, c).model;
    ASSERT_TRUE(M.is_total(c.heads(), g.domain())) << to_text(c) << to_text(g);
    EXPECT_TRUE(is_supported_model(g, c, M));
  }
}
