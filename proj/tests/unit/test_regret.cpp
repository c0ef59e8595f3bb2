#include <gtest/gtest.h>

#include <cmath>

#include "mmregret/distributions.hpp"
#include "mmregret/error.hpp"
#include "mmregret/regret.hpp"
#include "reference_values.hpp"

using namespace mmr;

TEST(ExPostRegret, SurplusMinusRevenue) {
  const auto c = validate_config(Matrix{{1}, {1}});
  const RegretReport r = ex_post_regret(MechanismId::Ssprr, c, ValueProfile{Matrix{{0.8}, {0.5}}});
  EXPECT_NEAR(r.total, ref::kRegret08_05, 1e-15);
  ASSERT_EQ(r.per_good.size(), 1u);
  EXPECT_FALSE(r.se.has_value());
  const RegretReport none = ex_post_regret(MechanismId::Ssprr, c, ValueProfile{Matrix{{0.3}, {0.2}}});
  EXPECT_NEAR(none.total, 0.3, 1e-15);
}

TEST(ExPostRegret, IdentityLikeThreeByThree) {
  const auto c = validate_config(Matrix{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const ValueProfile v{Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  EXPECT_NEAR(ex_post_regret(MechanismId::Ssprr, c, v).total, ref::k3OverE, 1e-12);
  EXPECT_EQ(grand_bundle_full_info_revenue(v), 1.0);
  EXPECT_EQ(full_surplus(c, v) - grand_bundle_full_info_revenue(v), 2.0);
}

TEST(ExPostRegret, ExactOnTheWorstCaseSupport) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  const auto sel = select_bidders(c);
  for (const auto& v : sample_worst_case(c, sel, 20000, 5)) {
    const RegretReport r = ex_post_regret(MechanismId::Ssprr, c, v);
    for (std::size_t j = 0; j < c.goods(); ++j) EXPECT_NEAR(r.per_good[j], c.max_bound(j) / std::exp(1.0), 1e-12);
  }
}

TEST(ExPostRegret, NeverAboveCap) {
  const auto c = validate_config(Matrix{{1, 2, 0.5}, {3, 1, 0.7}, {0.2, 2.5, 1}});
  const double cap = regret_cap_formula(c);
  for (const auto& v : sample_iid_uniform(c, 20000, 6)) {
    EXPECT_LE(ex_post_regret(MechanismId::Ssprr, c, v).total, cap + 1e-12);
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeTheEstimate) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  const RegretReport one = expected_regret_mc(MechanismId::Ssprr, DistributionKind::IidUniform, c, 50000, 17, 1);
  const RegretReport four = expected_regret_mc(MechanismId::Ssprr, DistributionKind::IidUniform, c, 50000, 17, 4);
  EXPECT_EQ(one.total, four.total);
  EXPECT_EQ(one.se, four.se);
  EXPECT_EQ(one.per_good, four.per_good);
  EXPECT_EQ(one.n, std::optional<std::size_t>(50000));
}

TEST(MonteCarlo, IidUniformMatchesClosedForm) {
  const auto c = validate_config(Matrix{{1}, {1}});
  const RegretReport r = expected_regret_mc(MechanismId::Ssprr, DistributionKind::IidUniform, c, 400000, 3, 4);
  ASSERT_TRUE(r.se.has_value());
  EXPECT_NEAR(r.total, ref::kIidUniformRegret, 4 * *r.se);
}

TEST(MonteCarlo, WorstCaseHasZeroVarianceForTheMinimaxMechanism) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  const RegretReport r = expected_regret_mc(MechanismId::Ssprr, DistributionKind::WorstCase, c, 10000, 1, 2);
  EXPECT_NEAR(r.total, ref::k5OverE, 1e-12);
  EXPECT_NEAR(*r.se, 0.0, 1e-12);
}

TEST(MonteCarlo, TraceEndsAtTheFinalEstimate) {
  const auto c = validate_config(Matrix{{1}, {2}});
  MonteCarloOptions opts;
  opts.threads = 3;
  opts.checkpoints = {100, 1000, 5000};
  const MonteCarloResult r = expected_regret_mc_traced(MechanismId::Ssprr, DistributionKind::IidUniform, c, 5000, 8, opts);
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace.back().n, 5000u);
  EXPECT_EQ(r.trace.back().mean, r.report.total);
  const RegretReport small = expected_regret_mc(MechanismId::Ssprr, DistributionKind::IidUniform, c, 1000, 8, 1);
  EXPECT_EQ(r.trace[1].mean, small.total);
}

TEST(Quadrature, WorstCaseExpectedRegretEqualsCap) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  EXPECT_NEAR(expected_regret_quadrature_worst_case(MechanismId::Ssprr, c, 64), ref::k5OverE, 1e-9);
  const auto bundle = validate_config(Matrix{{1, 1}});
  EXPECT_NEAR(expected_regret_quadrature_worst_case(MechanismId::GrandBundle1B, bundle, 256), ref::k2OverE, 1e-6);
  EXPECT_THROW(expected_regret_quadrature_worst_case(MechanismId::Ssprr, c, 10), Error);
  const auto wide = validate_config(Matrix{{1}, {1}, {1}, {1}, {1}});
  EXPECT_THROW(expected_regret_quadrature_worst_case(MechanismId::Ssprr, wide, 64), Error);
}

TEST(Quadrature, AnonymousReserveDoesWorseUnderAsymmetry) {
  const auto c = validate_config(Matrix{{1}, {3}});
  // Nature keeps only bidder 1 here, so the anonymous rule coincides with the minimax one.
  EXPECT_NEAR(expected_regret_quadrature_worst_case(MechanismId::AnonymousSsprr, c, 128),
              expected_regret_quadrature_worst_case(MechanismId::Ssprr, c, 128), 1e-12);
}

TEST(Search, AttainsTheCapWithoutExceedingIt) {
  for (const Matrix& b : {Matrix{{1}}, Matrix{{1}, {1}}, Matrix{{1, 2}, {3, 1}}}) {
    const auto c = validate_config(b);
    const double cap = regret_cap_formula(c);
    const SearchResult r = adversarial_profile_search(MechanismId::Ssprr, c, 5000, 12);
    EXPECT_GE(r.value, cap - 1e-6);
    EXPECT_LE(r.max_probe, cap + 1e-9);
    EXPECT_NEAR(ex_post_regret(MechanismId::Ssprr, c, r.profile).total, r.value, 1e-15);
  }
}

TEST(Search, DeterministicAndBudgetChecked) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  SearchOptions one, many;
  many.threads = 4;
  const SearchResult a = adversarial_profile_search(MechanismId::Ssprr, c, 3000, 5, one);
  const SearchResult b = adversarial_profile_search(MechanismId::Ssprr, c, 3000, 5, many);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.profile, b.profile);
  EXPECT_THROW(adversarial_profile_search(MechanismId::Ssprr, c, 10, 5), Error);
}

TEST(Search, AnonymousRuleSharesTheWorstCase) {
  // The anonymous rule is dominated profile by profile yet has the same worst case.
  const auto c = validate_config(Matrix{{1}, {3}});
  const SearchResult r = adversarial_profile_search(MechanismId::AnonymousSsprr, c, 5000, 3);
  EXPECT_NEAR(r.value, regret_cap_formula(c), 1e-6);
  EXPECT_LE(r.max_probe, regret_cap_formula(c) + 1e-9);
}
