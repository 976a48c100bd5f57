#pragma once

#include <string>

// Values frozen from independent oracles (direct summation, quadrature,
// seeded sweeps). Regenerate only if the model changes on purpose.
namespace fixtures {

inline std::string data(const std::string& name) { return std::string(PENSIONLAB_DATA_DIR) + "/" + name; }

// sum_{k=0}^{19} 1000 * 0.5^(k/20)
inline constexpr double kGeometricTotal_1000_500 = 14678.394436608236;

// sigma giving d = 0.5% at c = h = 2.5%:
//   seeded bisection of monte_carlo_devaluation (40 years x 5000 paths, seed 20220401)
inline constexpr double kSigmaStarSeeded = 0.013308;
//   quadrature of E[log(1 + min(X, h)) - log(1 + X)], X ~ N(c, sigma)
inline constexpr double kSigmaStarQuadrature = 0.013406;
inline constexpr unsigned long long kMcSeed = 20220401ULL;

// One-year loss, 40-year-old on 40k, c = 2.5%, d = 0.5%, AF 40, linear.
inline constexpr double kOneYear40 = 0.2605568320663616;
inline constexpr double kOneYear40Delay2 = 0.2531065701031405;

// Modeller profile (AF 56.7, one pre-reform year, d = 0.8%) at c = 2.8%,
// independent re-implementation of the annual-step model.
inline constexpr double kCell42_52500 = 0.39386524842993337;
inline constexpr double kCell37_27500 = 0.2725259416340843;
inline constexpr double kCell52_67500_money = 86530.6189919567;
inline constexpr double kDob1985_30000 = 0.2943276354976418;

// Frozen output of `pensionlab calibrate` (data/assumptions.conf).
inline constexpr double kCalibratedAnnuityFactor = 56.7;

}  // namespace fixtures
