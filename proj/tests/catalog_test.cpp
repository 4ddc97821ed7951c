#include <gtest/gtest.h>

#include "pseries/catalog.hpp"

namespace pseries {
namespace {

TEST(Catalog, RemarkModuleFirstBlockIsOnePlusPi) {
  auto ex = build_remark_module(3, 10);
  const auto& g1 = ex.action.generators()[0];
  // Rows of (g1 - 1) on the first o-block: pi shifts 1 -> pi -> pi^2 -> pi^3 -> p.
  const long expected[4][4] = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {3, 0, 0, 0}};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(g1(r, c) - (r == c ? 1 : 0), expected[r][c]);
  EXPECT_EQ(ex.action.generators().size(), 4u);
  EXPECT_EQ(ex.ambient.dim(), 16u);
  ASSERT_TRUE(ex.expected);
  EXPECT_EQ(ex.expected->rates.size(), 16u);
  EXPECT_EQ(ex.expected->rates.front(), make_fraction(1, 4));
  EXPECT_EQ(ex.expected->rates.back(), make_fraction(1, 2));
}

TEST(Catalog, RemarkModuleFixedSpace) {
  auto ex = build_remark_module(2, 10);
  const auto fixed = remark_fixed_coordinates();
  for (std::size_t k = 0; k < 16; ++k) {
    Vector e(16, Integer(0));
    e[k] = 1;
    bool is_fixed = true;
    for (const auto& g : ex.action.generators()) {
      auto img = (PadicMatrix(g.context(), Grid{e}) * g).row(0);
      if (img != e) is_fixed = false;
    }
    EXPECT_EQ(is_fixed, std::find(fixed.begin(), fixed.end(), k) != fixed.end()) << "coordinate " << k;
  }
}

TEST(Catalog, GmBookkeeping) {
  auto g1 = build_Gm_lattice(1, 2, 10);
  EXPECT_EQ(g1.ambient.dim(), 2u);
  EXPECT_EQ(g1.expected->rates, (std::vector<Fraction>{make_fraction(1, 2), make_fraction(1, 2)}));
  auto g2 = build_Gm_lattice(2, 2, 10);
  EXPECT_EQ(g2.ambient.dim(), 5u);
  EXPECT_EQ(1 + g2.ambient.dim(), 6u);
  EXPECT_EQ(g2.extra_weight, 1);
  EXPECT_EQ(g2.expected->rates.front(), make_fraction(1, 3));
  EXPECT_EQ(g2.expected->rates.back(), make_fraction(1, 2));
  ASSERT_TRUE(g2.spectrum_bounds);
  EXPECT_EQ(g2.spectrum_bounds->lower, 6u);
  EXPECT_EQ(g2.spectrum_bounds->upper, 24u);
  EXPECT_EQ(build_Gm_lattice(3, 3, 10).ambient.dim(), 10u);
  // Last basis vector of the 3-block maps to itself plus p times the first.
  const auto& y = g2.action.generators()[0];
  EXPECT_EQ(y(4, 2), 2);
  EXPECT_EQ(y(2, 3), 1);
}

TEST(Catalog, EisensteinAndNames) {
  auto e1 = build_eisenstein(1, 5, 10);
  EXPECT_EQ(e1.action.generators()[0](0, 0), 6);
  for (const auto& name : catalog_names()) {
    auto ex = catalog_example(name, 3, 12);
    EXPECT_EQ(ex.name, name);
    EXPECT_TRUE(ex.action.unipotence_verified());
  }
  EXPECT_THROW(catalog_example("Gmx", 2), InvalidInput);
  EXPECT_THROW(catalog_example("nothing", 2), InvalidInput);
}

TEST(Catalog, RandomBlockActionsAreSeedStable) {
  auto shape = random_shape(9);
  auto a = random_block_action(shape, 77, 3, 20);
  auto b = random_block_action(shape, 77, 3, 20);
  ASSERT_EQ(a.action.generators().size(), b.action.generators().size());
  for (std::size_t t = 0; t < a.action.generators().size(); ++t)
    EXPECT_EQ(a.action.generators()[t], b.action.generators()[t]);
  auto c = random_block_action(shape, 78, 3, 20);
  bool differs = false;
  for (std::size_t t = 0; t < a.action.generators().size(); ++t)
    differs = differs || !(a.action.generators()[t] == c.action.generators()[t]);
  EXPECT_TRUE(differs || shape.size() == 1);
}

TEST(Catalog, RandomShapesAreValid) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto shape = random_shape(seed);
    int d = 0;
    for (const auto& b : shape) d += b.size;
    EXPECT_GE(d, 1);
    EXPECT_LE(d, 6);
    EXPECT_NO_THROW(random_block_action(shape, seed, 2, 12));
  }
  EXPECT_THROW(random_block_action({}, 1, 2), InvalidShape);
  EXPECT_THROW(random_block_action({{0, BlockKind::Identity, 1}}, 1, 2), InvalidShape);
  EXPECT_THROW(random_block_action({{5, BlockKind::Jordan, 1}, {4, BlockKind::Identity, 1}}, 1, 2), InvalidShape);
}

}  // namespace
}  // namespace pseries
