#include <gtest/gtest.h>

#include <random>

#include "pseries/catalog.hpp"
#include "pseries/strata.hpp"
#include "test_support.hpp"

namespace pseries {
namespace {

std::vector<std::pair<int, int>> samples_of(int n, auto f) {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= n; ++i) out.emplace_back(i, f(i));
  return out;
}

RateVector rates_of(std::initializer_list<std::pair<long, long>> qs) {
  std::vector<Fraction> v;
  for (auto [n, m] : qs) v.push_back(make_fraction(n, m));
  return RateVector::from(std::move(v));
}

// 1 + pi^a on Z_p[pi], pi^s = p, written out directly: pi sends basis k to k+1
// and the last basis vector to p times the first.
PadicMatrix ramified_unit(const Context& ctx, int s, int a) {
  const auto n = static_cast<std::size_t>(s);
  PadicMatrix pi(ctx, n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) pi.set(k, k + 1, 1);
  pi.set(n - 1, 0, Integer(ctx->prime()));
  auto g = PadicMatrix::identity(ctx, n);
  auto pw = PadicMatrix::identity(ctx, n);
  for (int k = 0; k < a; ++k) pw = pw * pi;
  return g + pw;
}

TEST(FitRational, Examples) {
  auto shifted = fit_rational(samples_of(20, [](int i) { return i - 1; }), 4);
  EXPECT_EQ(shifted.rate, 1);
  EXPECT_EQ(shifted.residual, 1);
  auto half = fit_rational(samples_of(20, [](int i) { return i / 2; }), 4);
  EXPECT_EQ(half.rate, make_fraction(1, 2));
  EXPECT_EQ(half.residual, 0);
  auto two_thirds = fit_rational(samples_of(40, [](int i) { return 2 * i / 3 + 1; }), 8);
  EXPECT_EQ(two_thirds.rate, make_fraction(2, 3));
  EXPECT_EQ(two_thirds.residual, 1);
  EXPECT_THROW(fit_rational(samples_of(6, [](int i) { return i; }), 4), InvalidInput);
  EXPECT_THROW(fit_rational(samples_of(20, [](int i) { return i; }), 0), InvalidInput);
  // A kink from slope 0 to slope 1 halfway has no rational fit within 1.
  EXPECT_THROW(fit_rational(samples_of(40, [](int i) { return i <= 20 ? 0 : i - 20; }), 8, 1), NoStableFit);
}

TEST(FitRational, ConstantOffsetsAreFree) {
  // Slope 1 with a start-up dip, and slope 1/3 shifted by 3.
  auto transient = samples_of(62, [](int i) { return i <= 3 ? 0 : i - 1; });
  const auto t = fit_rational(transient, 30);
  EXPECT_EQ(t.rate, 1);
  EXPECT_EQ(t.spread, 2);
  const auto shifted = fit_rational(samples_of(62, [](int i) { return i / 3 + 3; }), 30, 4);
  EXPECT_EQ(shifted.rate, make_fraction(1, 3));
  EXPECT_EQ(shifted.spread, 0);
  EXPECT_EQ(shifted.residual, 3);
  // With a spread slack of 1, a smaller denominator within one step wins.
  auto close = samples_of(64, [](int i) { return 4 * i / 9; });
  EXPECT_EQ(fit_rational(close, 16).rate, make_fraction(4, 9));
  EXPECT_EQ(fit_rational(close, 16, std::nullopt, 1).rate, make_fraction(3, 7));
}

// Every rational n/m with m <= D fitted from exact floors is recovered.
TEST(FitRational, RecoversExactFloors) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const long m = 1 + static_cast<long>(rng() % 12);
    const long n = 1 + static_cast<long>(rng() % static_cast<unsigned long>(m));
    const long shift = static_cast<long>(rng() % 2);
    auto s = samples_of(64, [&](int i) { return static_cast<int>(i * n / m + shift); });
    const auto fit = fit_rational(s, 16);
    EXPECT_EQ(fit.rate, make_fraction(n, m)) << n << "/" << m << " shift " << shift;
    EXPECT_LE(fit.residual, shift);
  }
}

TEST(EstimateRates, Catalog) {
  struct Case {
    std::string name;
    unsigned long p;
  };
  for (const auto& c : std::vector<Case>{{"Gm1", 2}, {"Gm2", 3}, {"eisenstein3", 5}, {"trivial", 2}, {"unipotent2", 3}}) {
    auto ex = catalog_example(c.name, c.p, 34);
    auto tr = lower_p_series(ex.ambient, ex.action, 32);
    ASSERT_TRUE(ex.expected) << c.name;
    EXPECT_EQ(estimate_rates(tr, 8).rates, ex.expected->rates) << c.name;
  }
}

TEST(DetectCycle, Examples) {
  auto trivial = catalog_example("trivial", 3, 20);
  auto c1 = detect_cycle(lower_p_series(trivial.ambient, trivial.action, 10));
  ASSERT_TRUE(c1);
  EXPECT_EQ(c1->j, 0);
  EXPECT_EQ(c1->m, 1);
  EXPECT_EQ(c1->n, 1);

  for (int e = 1; e <= 4; ++e) {
    auto ex = build_eisenstein(e, 2, 24);
    auto c = detect_cycle(lower_p_series(ex.ambient, ex.action, 20));
    ASSERT_TRUE(c) << "e = " << e;
    EXPECT_EQ(c->j, 0);
    EXPECT_EQ(c->m, e);
    EXPECT_EQ(c->n, 1);
    EXPECT_EQ(c->rate(), make_fraction(1, e));
  }

  auto uni = build_unipotent2(5, 20);
  auto cu = detect_cycle(lower_p_series(uni.ambient, uni.action, 10));
  ASSERT_TRUE(cu);
  EXPECT_EQ(cu->j, 1);
  EXPECT_EQ(cu->m, 1);
  EXPECT_EQ(cu->n, 1);
}

TEST(Stratify, UnipotentIsOneEquivalent) {
  auto ex = build_unipotent2(3, 34);
  auto tr = lower_p_series(ex.ambient, ex.action, 32);
  auto s = stratify(tr, ex.action);
  EXPECT_EQ(s.status, StrataStatus::ExactCycle);
  EXPECT_EQ(s.rates().rates, (std::vector<Fraction>{1, 1}));
  EXPECT_EQ(s.c, 1);
  EXPECT_EQ(certify_equivalence(tr, s), 1);
  // The fitted route lands on the same rates and an equally good frame.
  auto f = extract_frame(tr, estimate_rates(tr), ex.action);
  EXPECT_EQ(f.status, StrataStatus::CertifiedWindow);
  EXPECT_EQ(f.rates(), s.rates());
  EXPECT_LE(f.c, 1);
}

TEST(Stratify, WrongRatesAreRejected) {
  auto ex = build_eisenstein(2, 3, 34);
  auto tr = lower_p_series(ex.ambient, ex.action, 32);
  const auto wrong = rates_of({{1, 1}, {1, 1}});
  EXPECT_THROW(extract_frame(tr, wrong, ex.action), FrameRejected);
  Stratification s(ex.ambient, PadicMatrix::identity(ex.ambient.context(), 2), wrong);
  s.window_hi = 32;
  EXPECT_FALSE(certify_equivalence(tr, s));
  EXPECT_THROW(extract_frame(tr, rates_of({{1, 2}}), ex.action), DimensionMismatch);
}

TEST(Stratify, GmCertifiedWindow) {
  auto ex = build_Gm_lattice(2, 2, 66);
  auto tr = lower_p_series(ex.ambient, ex.action, 64);
  auto s = stratify(tr, ex.action);
  EXPECT_EQ(s.status, StrataStatus::CertifiedWindow);
  EXPECT_EQ(s.rates().rates, ex.expected->rates);
  EXPECT_EQ(s.rates().sigma, Fraction(2));
  EXPECT_GE(2 * s.window_hi, tr.i_max);
  auto c = certify_equivalence(tr, s);
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, s.c);
  EXPECT_TRUE(envelope_holds(tr, s));
  ASSERT_EQ(s.boundary_depths.size(), 4u);
  EXPECT_FALSE(s.boundary_depths[0]);
  EXPECT_TRUE(s.boundary_depths[2]);
}

// Approximate terms are invariant over the window, and so are prefix spans at
// rate boundaries modulo the recorded depth.
TEST(Stratify, TermsAndPrefixesAreInvariant) {
  for (const auto& name : {"remark27", "Gm2", "Gm3"}) {
    auto ex = catalog_example(name, 2, 66);
    auto tr = lower_p_series(ex.ambient, ex.action, 64);
    auto s = stratify(tr, ex.action);
    for (int i = s.window_lo; i <= s.window_hi; ++i) EXPECT_TRUE(check_invariance(s.term(i), ex.action)) << name;
    for (std::size_t e = 1; e < s.dim(); ++e)
      if (auto depth = s.boundary_depths[e - 1]) {
        EXPECT_TRUE(check_invariance(s.prefix(e, *depth), ex.action));
      }
    EXPECT_TRUE(envelope_holds(tr, s)) << name << " deviation " << envelope_deviation(tr, s);
  }
}

// The exact-cycle shortcut and the fit/frame route agree on rates.
TEST(Stratify, CycleAndFitAgree) {
  for (const auto& name : {"eisenstein2", "eisenstein3", "Gm1", "trivial", "unipotent2"}) {
    auto ex = catalog_example(name, 3, 50);
    auto tr = lower_p_series(ex.ambient, ex.action, 48);
    auto cyc = detect_cycle(tr);
    ASSERT_TRUE(cyc) << name;
    EXPECT_EQ(cycle_stratification(tr, *cyc).rates(), estimate_rates(tr)) << name;
  }
}

// Rates read off the frame alone (orders of x_k modulo lambda_i) reproduce the
// fitted rates at either anchor.
TEST(Stratify, RatesAreDeterminedByTheFrame) {
  for (const auto& name : {"remark27", "Gm2"}) {
    auto ex = catalog_example(name, 2, 66);
    auto tr = lower_p_series(ex.ambient, ex.action, 64);
    const auto rates = estimate_rates(tr);
    for (int a : anchor_indices(rates, tr.i_max)) {
      StrataOptions opt;
      opt.anchor = a;
      auto s = extract_frame(tr, rates, ex.action, opt);
      EXPECT_EQ(frame_rates(tr, s, 8), rates) << name << " anchor " << a;
    }
  }
}

TEST(AnchorIndices, Examples) {
  EXPECT_EQ(anchor_indices(rates_of({{1, 4}, {1, 2}}), 64), (std::vector<int>{64, 60}));
  EXPECT_EQ(anchor_indices(rates_of({{1, 3}, {1, 2}}), 64), (std::vector<int>{60, 54}));
  EXPECT_EQ(anchor_indices(rates_of({{1, 5}, {1, 7}}), 20), (std::vector<int>{20}));
}

// Oracle: 1 + pi^a on Z_p[pi] of degree s has lambda_i = pi^{ia}, so every
// coordinate grows at a/s; block sums take the union.
TEST(Stratify, UncoupledBlocksMatchBlockwiseRates) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const unsigned long p = std::vector<unsigned long>{2, 3, 5}[trial % 3];
    auto ctx = PadicContext::make(p, 50);
    std::vector<PadicMatrix> blocks;
    std::vector<Fraction> expected;
    int d = 0;
    while (d < 5) {
      const int s = 1 + static_cast<int>(rng() % 3);
      const int a = 1 + static_cast<int>(rng() % static_cast<unsigned long>(s));
      blocks.push_back(ramified_unit(ctx, s, a));
      for (int k = 0; k < s; ++k) expected.push_back(make_fraction(a, s));
      d += s;
    }
    const auto dd = static_cast<std::size_t>(d);
    PadicMatrix g(ctx, dd, dd);
    std::size_t off = 0;
    for (const auto& b : blocks) {
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.rows(); ++c) g.set(off + r, off + c, b(r, c));
      off += b.rows();
    }
    auto action = GroupAction::make(ctx, dd, {g});
    auto tr = lower_p_series(Lattice::ambient(ctx, dd), action, 48);
    auto s = stratify(tr, action);
    EXPECT_EQ(s.rates(), RateVector::from(expected)) << "trial " << trial;
    EXPECT_TRUE(envelope_holds(tr, s));
  }
}

// Rates do not depend on the choice of invariant lattice within the
// commensurability class.
TEST(Stratify, RatesAreStableUnderCommensurableLattices) {
  std::mt19937_64 rng(11);
  for (const auto& name : {"Gm2", "eisenstein3", "unipotent2"}) {
    auto ex = catalog_example(name, 3, 54);
    const auto& ctx = ex.action.context();
    Grid extra{testing::random_matrix(rng, ctx, 1, ex.ambient.dim()).row(0)};
    auto sub = invariant_closure(adjoin(ex.ambient.scaled(2), extra), ex.action);
    auto base = stratify(lower_p_series(ex.ambient, ex.action, 48), ex.action);
    auto tr = lower_p_series(sub, ex.action, 48);
    EXPECT_EQ(estimate_rates(tr), base.rates()) << name;
  }
}

TEST(Stratify, RandomBlockActions) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const unsigned long p = std::vector<unsigned long>{2, 3, 5}[seed % 3];
    auto ex = random_block_action(random_shape(seed, 5), seed, p, 50);
    auto tr = lower_p_series(ex.ambient, ex.action, 48);
    auto s = stratify(tr, ex.action);
    const auto c = certify_equivalence(tr, s);
    ASSERT_TRUE(c) << "seed " << seed;
    EXPECT_EQ(*c, s.c) << "seed " << seed;
    EXPECT_TRUE(envelope_holds(tr, s)) << "seed " << seed;
    for (const auto& r : s.rates().rates) {
      EXPECT_GE(r, make_fraction(1, static_cast<long>(s.dim())));
      EXPECT_LE(r, 1);
    }
  }
}

TEST(StrataSplit, RemarkModuleQuotientHasRateOneHalf) {
  auto ex = build_remark_module(2, 66);
  auto tr = lower_p_series(ex.ambient, ex.action, 64);
  auto s = stratify(tr, ex.action);
  ASSERT_EQ(s.rates().rates[7], make_fraction(1, 4));
  ASSERT_EQ(s.rates().rates[8], make_fraction(1, 2));
  auto split = strata_split(s, ex.action, 8);
  EXPECT_TRUE(check_invariance(split.sub, ex.action));
  EXPECT_EQ(split.sub_action.dim(), 8u);
  EXPECT_EQ(split.quotient_action.dim(), 8u);
  const int n = split.depth - 2;
  ASSERT_GE(n, 10);
  auto qtr = lower_p_series(Lattice::ambient(split.quotient_action.context(), 8), split.quotient_action, n);
  EXPECT_EQ(estimate_rates(qtr).rates, std::vector<Fraction>(8, make_fraction(1, 2)));
  EXPECT_THROW(strata_split(s, ex.action, 4), NotABoundary);
  EXPECT_THROW(strata_split(s, ex.action, 0), InvalidInput);
  EXPECT_THROW(strata_split(s, ex.action, 16), InvalidInput);
}

TEST(StrataSplit, GmSplitsIntoBlocks) {
  auto ex = build_Gm_lattice(2, 3, 122);
  auto tr = lower_p_series(ex.ambient, ex.action, 120);
  auto s = stratify(tr, ex.action);
  auto split = strata_split(s, ex.action, 3);
  const int n = split.depth - 2;
  ASSERT_GE(n, 16);
  auto sub_tr = lower_p_series(Lattice::ambient(split.sub_action.context(), 3), split.sub_action, n);
  auto quo_tr = lower_p_series(Lattice::ambient(split.quotient_action.context(), 2), split.quotient_action, n);
  EXPECT_EQ(estimate_rates(sub_tr, 6).rates, std::vector<Fraction>(3, make_fraction(1, 3)));
  EXPECT_EQ(estimate_rates(quo_tr, 6).rates, std::vector<Fraction>(2, make_fraction(1, 2)));
  EXPECT_THROW(strata_split(s, ex.action, 1), NotABoundary);
}

TEST(FixedSpace, RemarkModule) {
  auto ex = build_remark_module(3, 12);
  auto fixed = fixed_space(ex.action);
  ASSERT_EQ(fixed.size(), 8u);
  const auto spanned = adjoin(ex.ambient.scaled(10), fixed);
  for (std::size_t k : remark_fixed_coordinates()) {
    Vector e(16, Integer(0));
    e[k] = 1;
    EXPECT_TRUE(spanned.contains(e)) << k;
  }
  EXPECT_TRUE(fixed_space(build_Gm_lattice(1, 2, 12).action).empty());
  EXPECT_EQ(fixed_space(catalog_example("trivial", 5, 8).action).size(), 3u);
}

TEST(Inductive, CandidatesContainTheTrueRates) {
  auto ex = build_remark_module(2, 50);
  auto full = stratify(lower_p_series(ex.ambient, ex.action, 48), ex.action);
  for (std::size_t k : {4u, 12u}) {
    Vector v(16, Integer(0));
    v[k] = 1;
    auto ic = inductive_candidates(ex.action, v, 40);
    EXPECT_EQ(ic.quotient_rates.dim(), 15u);
    EXPECT_EQ(ic.status, StrataStatus::Heuristic);
    select_candidate(ic, full.rates());
    ASSERT_TRUE(ic.selected) << "fixed coordinate " << k;
    EXPECT_EQ(ic.candidates[*ic.selected], full.rates());
    EXPECT_LE(ic.candidates.size(), 3u);
  }
  Vector moved(16, Integer(0));
  moved[0] = 1;
  EXPECT_THROW(quotient_by_fixed_vector(ex.action, moved), NotInvariant);
}

}  // namespace
}  // namespace pseries
