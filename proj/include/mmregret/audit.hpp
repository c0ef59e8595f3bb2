#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mmregret/market.hpp"
#include "mmregret/mechanisms.hpp"

namespace mmr {

/// Finite deviation grid: G points per (bidder, good) over [0, bound], plus bound/e and bound.
struct DeviationGrid {
  std::size_t points = 50;
  bool includes_boundary = true;  // false: cell midpoints instead of an inclusive linspace
  double tolerance = 1e-9;

  /// Sorted, duplicate-free points for one upper bound. Throws OutOfRange for G < 2.
  std::vector<double> axis(double bound) const;
};

enum class AuditKind { Dsic, ParticipationSecurity };

struct AuditViolation {
  std::optional<std::size_t> good;  // set when the check ran on one good's column
  std::size_t bidder = 0;
  std::vector<double> profile;      // true values (one column, or the flattened matrix)
  std::vector<double> deviation;    // bidder's report (one entry, or the bidder's row)
  double truthful_utility = 0.0;
  double deviant_utility = 0.0;
  double gap = 0.0;                 // how far the inequality fails
};

struct AuditReport {
  AuditKind kind = AuditKind::Dsic;
  MechanismId mechanism = MechanismId::Ssprr;
  std::string decomposition;        // "per_good", "bundle_sums" or "full"
  std::size_t grid_resolution = 0;
  std::size_t checks = 0;
  std::size_t violation_count = 0;
  std::vector<AuditViolation> violations;  // first kMaxListed in lexicographic order
  double max_violation = 0.0;       // largest gain from deviating (>= 0)
  /// Participation only: every zero report paid and received exactly nothing.
  bool zero_report_exact = true;

  bool passed() const { return violation_count == 0; }
};

struct DominanceReport {
  MechanismId a = MechanismId::Ssprr;
  MechanismId b = MechanismId::AnonymousSsprr;
  std::string decomposition;
  std::size_t grid_resolution = 0;
  bool weakly_dominated_everywhere = false;  // regret(a) <= regret(b) + tol on the grid
  std::vector<ValueProfile> strict_witnesses;
  std::size_t strict_witness_count = 0;
  double max_violation = 0.0;                // max of regret(a) - regret(b), floored at 0
};

inline constexpr std::size_t kMaxListed = 200;

AuditReport verify_dsic(MechanismId mechanism, const MarketConfig& config, const DeviationGrid& grid,
                        unsigned threads = 1);
AuditReport verify_participation_security(MechanismId mechanism, const MarketConfig& config,
                                          const DeviationGrid& grid, unsigned threads = 1);
DominanceReport compare_ex_post_regret(MechanismId a, MechanismId b, const MarketConfig& config,
                                       const DeviationGrid& grid, unsigned threads = 1);

/// Reference implementations over whole value matrices with no decomposition.
/// Throw DimensionTooLarge when more than max_evaluations mechanism calls would be needed.
AuditReport verify_dsic_full(MechanismId mechanism, const MarketConfig& config, const DeviationGrid& grid,
                             std::size_t max_evaluations = 5'000'000);
DominanceReport compare_ex_post_regret_full(MechanismId a, MechanismId b, const MarketConfig& config,
                                            const DeviationGrid& grid, std::size_t max_evaluations = 5'000'000);

std::string to_string(AuditKind kind);

}  // namespace mmr
