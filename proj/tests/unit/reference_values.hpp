#pragma once

// Reference values computed independently at 30 significant digits (mpmath) and frozen here.
namespace ref {

inline constexpr double kInvE = 0.367879441171442321595523770161;
inline constexpr double k2OverE = 0.735758882342884643191047540323;
inline constexpr double k3OverE = 1.10363832351432696478657131048;
inline constexpr double k4OverE = 1.47151776468576928638209508065;
inline constexpr double k5OverE = 1.83939720585721160797761885081;
inline constexpr double kOneMinusInvE = 0.632120558828557678404476229839;

// Two bidders, bounds 1 and 1, reports 0.8 and 0.5.
inline constexpr double kQ08 = 0.776856448685790300;             // 1 + ln 0.8
inline constexpr double kT08_05 = 0.453426409720027345;          // 0.8 + 0.5 ln 0.5
inline constexpr double kRegret08_05 = 0.346573590279972655;     // -0.5 ln 0.5
// Bounds 1 and 3, reports 0.5 and 2.0: the top bidder clears 3/e alone.
inline constexpr double kTopQ = 0.594534891891835618;             // 1 + ln(2/3)
inline constexpr double kTopT = 0.896361676485673035;             // 2 - 3/e
// Single bidder, bounds (1, 2), bundle rule.
inline constexpr double kBundleQHalf = 0.306852819440054691;      // 1 + ln(1.5/3)
inline constexpr double kBundleTHalf = 0.396361676485673035;      // 1.5 - 3/e
inline constexpr double kBundleTTop = 1.89636167648567304;        // 3 - 3/e
inline constexpr double kDigitalTHalf = 0.132120558828557678;     // 0.5 - 1/e
inline constexpr double kCdfHalf = 0.264241117657115357;          // 1 - 2/e
// Truthful vs deviating utility, bidder 0 with value 0.8 facing 0.5, bounds (1, 1).
inline constexpr double kUtilTruth = 0.168058749228604850;
inline constexpr double kUtilDev06 = 0.137913091267180108;
// Expected regret of the reserve auction with two iid U[0,1] bidders.
inline constexpr double kIidUniformRegret = 0.323317814412306202;

}  // namespace ref
