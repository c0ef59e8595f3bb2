#include <gtest/gtest.h>

#include <cmath>

#include "mmregret/audit.hpp"
#include "mmregret/error.hpp"
#include "mmregret/regret.hpp"
#include "reference_values.hpp"

using namespace mmr;

namespace {

double utility(MechanismId id, const MarketConfig& c, const Matrix& truth, const Matrix& report, std::size_t i) {
  const Outcome o = evaluate(id, c, ValueProfile{report});
  double u = -o.payment(i);
  for (std::size_t j = 0; j < c.goods(); ++j) u += truth(i, j) * o.allocation(i, j);
  return u;
}

}  // namespace

TEST(DeviationGridAxis, IncludesSpecialPoints) {
  const DeviationGrid g{5};
  const auto a = g.axis(2.0);
  EXPECT_EQ(a.front(), 0.0);
  EXPECT_EQ(a.back(), 2.0);
  EXPECT_EQ(a.size(), 6u);  // 0, .5, 1, 1.5, 2 and 2/e
  EXPECT_NE(std::find(a.begin(), a.end(), 2.0 / std::exp(1.0)), a.end());
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  const auto mid = DeviationGrid{4, false}.axis(1.0);
  EXPECT_EQ(mid.front(), 0.0);
  EXPECT_EQ(mid[1], 0.125);
  EXPECT_EQ(DeviationGrid{3}.axis(0.0), std::vector<double>{0.0});
  EXPECT_THROW(DeviationGrid{1}.axis(1.0), Error);
}

TEST(Dsic, ExampleDeviation) {
  const auto c = validate_config(Matrix{{1}, {1}});
  const Matrix truth{{0.8}, {0.5}};
  EXPECT_NEAR(utility(MechanismId::Ssprr, c, truth, truth, 0), ref::kUtilTruth, 1e-15);
  EXPECT_NEAR(utility(MechanismId::Ssprr, c, truth, Matrix{{0.6}, {0.5}}, 0), ref::kUtilDev06, 1e-15);
}

TEST(Dsic, NoViolationsForAnyMechanism) {
  const DeviationGrid grid{20};
  const auto multi = validate_config(Matrix{{1, 2}, {3, 1}, {0.5, 2}});
  EXPECT_TRUE(verify_dsic(MechanismId::Ssprr, multi, grid).passed());
  EXPECT_TRUE(verify_dsic(MechanismId::AnonymousSsprr, multi, grid).passed());
  const auto single = validate_config(Matrix{{1, 2, 0.5}});
  const AuditReport bundle = verify_dsic(MechanismId::GrandBundle1B, single, grid);
  EXPECT_TRUE(bundle.passed());
  EXPECT_EQ(bundle.decomposition, "bundle_sums");
  EXPECT_TRUE(verify_dsic(MechanismId::PostedSeparate1B, single, grid).passed());
  EXPECT_TRUE(verify_dsic(MechanismId::DigitalGoods, digital_goods_config(std::vector<double>{1, 2, 0.5}), grid).passed());
}

TEST(Dsic, DecompositionMatchesFullVectorAudit) {
  const DeviationGrid grid{4};
  const auto c = validate_config(Matrix{{1, 2}, {0.5, 1.5}});
  for (MechanismId id : {MechanismId::Ssprr, MechanismId::AnonymousSsprr}) {
    const AuditReport per_good = verify_dsic(id, c, grid);
    const AuditReport full = verify_dsic_full(id, c, grid);
    EXPECT_EQ(per_good.passed(), full.passed());
    EXPECT_NEAR(per_good.max_violation, full.max_violation, 1e-12);
  }
  const auto b = validate_config(Matrix{{1, 2}});
  const AuditReport sums = verify_dsic(MechanismId::GrandBundle1B, b, DeviationGrid{8});
  const AuditReport full = verify_dsic_full(MechanismId::GrandBundle1B, b, DeviationGrid{8});
  EXPECT_EQ(sums.passed(), full.passed());
  EXPECT_NEAR(sums.max_violation, full.max_violation, 1e-12);
}

TEST(Dsic, NegativeToleranceFlagsIndifferentDeviations) {
  // With a tolerance below zero every check counts, so the reporting path is exercised.
  DeviationGrid grid{3};
  grid.tolerance = -2.0;  // below any utility difference on a unit market
  const auto c = validate_config(Matrix{{1}, {1}});
  const AuditReport r = verify_dsic(MechanismId::Ssprr, c, grid, 2);
  EXPECT_EQ(r.violation_count, r.checks);
  EXPECT_LE(r.violations.size(), kMaxListed);
  EXPECT_TRUE(std::is_sorted(r.violations.begin(), r.violations.end(), [](const auto& x, const auto& y) {
    return std::tie(x.good, x.profile, x.bidder, x.deviation) < std::tie(y.good, y.profile, y.bidder, y.deviation);
  }));
}

TEST(Dsic, ThreadCountDoesNotChangeTheReport) {
  DeviationGrid grid{6};
  grid.tolerance = -1.0;
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  const AuditReport a = verify_dsic(MechanismId::Ssprr, c, grid, 1);
  const AuditReport b = verify_dsic(MechanismId::Ssprr, c, grid, 4);
  EXPECT_EQ(a.violation_count, b.violation_count);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t k = 0; k < a.violations.size(); ++k) EXPECT_EQ(a.violations[k].profile, b.violations[k].profile);
}

TEST(Dsic, ScalingKeepsTheVerdict) {
  const DeviationGrid grid{10};
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  EXPECT_EQ(verify_dsic(MechanismId::Ssprr, c, grid).passed(),
            verify_dsic(MechanismId::Ssprr, scale_config(c, 7.0), grid).passed());
}

TEST(Participation, ZeroReportIsExactlyNeutral) {
  const DeviationGrid grid{15};
  const auto multi = validate_config(Matrix{{1, 2}, {3, 1}});
  for (MechanismId id : {MechanismId::Ssprr, MechanismId::AnonymousSsprr}) {
    const AuditReport r = verify_participation_security(id, multi, grid);
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.zero_report_exact);
  }
  const AuditReport b = verify_participation_security(MechanismId::GrandBundle1B, validate_config(Matrix{{1, 2}}), grid);
  EXPECT_TRUE(b.passed());
  EXPECT_TRUE(b.zero_report_exact);
}

TEST(Participation, TruthfulPayoffVanishesAtThreshold) {
  const auto c = validate_config(Matrix{{1}});
  EXPECT_NEAR(utility(MechanismId::Ssprr, c, Matrix{{ref::kInvE}}, Matrix{{ref::kInvE}}, 0), 0.0, 1e-16);
  const auto b = validate_config(Matrix{{1, 1}});
  EXPECT_EQ(utility(MechanismId::GrandBundle1B, b, Matrix{{0.3, 0.4}}, Matrix{{0.3, 0.4}}, 0), 0.0);
}

TEST(Dominance, BidderSpecificReservesDominateAnonymous) {
  const auto c = validate_config(Matrix{{1}, {3}});
  const DominanceReport r = compare_ex_post_regret(MechanismId::Ssprr, MechanismId::AnonymousSsprr, c, DeviationGrid{});
  EXPECT_TRUE(r.weakly_dominated_everywhere);
  EXPECT_GT(r.strict_witness_count, 0u);
  EXPECT_FALSE(r.strict_witnesses.empty());
  EXPECT_LE(r.max_violation, 1e-9);
  const ValueProfile w{Matrix{{0.9}, {0.2}}};
  EXPECT_NEAR(ex_post_regret(MechanismId::Ssprr, c, w).total, ref::kInvE, 1e-15);
  EXPECT_NEAR(ex_post_regret(MechanismId::AnonymousSsprr, c, w).total, 0.9, 1e-15);

  const DominanceReport rev = compare_ex_post_regret(MechanismId::AnonymousSsprr, MechanismId::Ssprr, c, DeviationGrid{});
  EXPECT_FALSE(rev.weakly_dominated_everywhere);
  EXPECT_GT(rev.max_violation, 0.0);
}

TEST(Dominance, SymmetricBoundsMakeTheRulesIdentical) {
  const DominanceReport r = compare_ex_post_regret(MechanismId::Ssprr, MechanismId::AnonymousSsprr,
                                                   validate_config(Matrix{{1}, {1}}), DeviationGrid{});
  EXPECT_TRUE(r.weakly_dominated_everywhere);
  EXPECT_EQ(r.strict_witness_count, 0u);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(Dominance, PerGoodMatchesFullGrid) {
  const auto c = validate_config(Matrix{{1, 2}, {3, 1}});
  const DeviationGrid grid{5};
  for (auto [a, b] : {std::pair{MechanismId::Ssprr, MechanismId::AnonymousSsprr},
                      std::pair{MechanismId::AnonymousSsprr, MechanismId::Ssprr}}) {
    const DominanceReport fast = compare_ex_post_regret(a, b, c, grid);
    const DominanceReport full = compare_ex_post_regret_full(a, b, c, grid);
    EXPECT_EQ(fast.weakly_dominated_everywhere, full.weakly_dominated_everywhere);
    EXPECT_NEAR(fast.max_violation, full.max_violation, 1e-12);
    EXPECT_EQ(fast.strict_witnesses.empty(), full.strict_witnesses.empty());
    for (const auto& w : fast.strict_witnesses) {
      EXPECT_LT(ex_post_regret(a, c, w).total, ex_post_regret(b, c, w).total - grid.tolerance);
    }
  }
}

TEST(Dominance, BundleAgainstSeparatePrices) {
  // Bundling couples the goods, so the comparison runs on whole profiles.
  const auto c = validate_config(Matrix{{1, 1}});
  const DominanceReport r = compare_ex_post_regret(MechanismId::GrandBundle1B, MechanismId::PostedSeparate1B, c,
                                                   DeviationGrid{10});
  EXPECT_EQ(r.decomposition, "full");
  EXPECT_EQ(r.weakly_dominated_everywhere, r.max_violation <= 1e-9);
}

TEST(Audit, FullGridLimit) {
  const auto c = validate_config(Matrix{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  try {
    verify_dsic_full(MechanismId::Ssprr, c, DeviationGrid{50});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
  }
}
