#pragma once

#include <cstdint>
#include <string>

namespace pensionlab {

struct CapRule {
    enum class Kind { Soft, Hard };

    Kind kind = Kind::Soft;
    // Soft
    double full_match_to = 0.05;
    double half_match_to = 0.15;
    double max_uplift = 0.10;
    // Hard
    double cap = 0.025;
    int delay_years = 0;

    static CapRule soft(double full = 0.05, double half = 0.15, double max = 0.10);
    static CapRule hard(double cap, int delay_years = 0);

    void validate() const;
};

enum class ThresholdIndexation { FullCPI, CappedCPI };

struct SchemeRules {
    std::string id;
    std::string label;
    int accrual_denominator = 75;
    double db_dc_threshold = 60000.0;
    ThresholdIndexation threshold_indexation = ThresholdIndexation::FullCPI;
    double threshold_cap = 0.025;  // only read for CappedCPI
    CapRule cap_rule;
    // metadata, never read by the projection
    double member_rate = 0.0;
    double employer_rate = 0.0;

    void validate() const;
};

// How d is obtained for a hard cap.
//   Formula      1 - d = (1 + h - a)/(1 + c) with the assumptions' cpi_adjustment
//   UukPublished UUK's quoted figures (0.5% at c=2.5%, 0.8% at c=2.8%),
//                the formula with a=0.5% elsewhere
//   UssImplied   the formula with a=0.59% (USS's implied adjustment)
//   Fixed        fixed_devaluation as given
enum class DevaluationBasis { Formula, UukPublished, UssImplied, Fixed };

struct EconomicAssumptions {
    std::string id = "default";
    double cpi_mean = 0.025;
    double salary_growth = 0.04;
    double dc_growth = 0.0477;
    double annuity_factor = 40.0;
    double cpi_adjustment = 0.005;
    double dc_contribution_rate = 0.20;
    DevaluationBasis devaluation_basis = DevaluationBasis::Formula;
    double fixed_devaluation = 0.0;
    // Years of accrual before start_date, counted on the baseline rules.
    double pre_reform_years = 0.0;
    bool modeller_rounding = false;

    void validate() const;

    // Annual real-terms erosion of anything indexed under a hard cap `cap`,
    // clamped at 0.
    double devaluation(double cap) const;
};

inline constexpr double kUssImpliedAdjustment = 0.0059;
inline constexpr double kUukAdjustment = 0.005;
inline constexpr double kMinCpi = 0.0;
inline constexpr double kMaxCpi = 0.05;
inline constexpr double kMinAnnuityFactor = 20.0;
inline constexpr double kMaxAnnuityFactor = 80.0;

// 1 - d = (1 + h - a) / (1 + c). Unclamped.
double annual_devaluation(double h, double a, double c);
double implied_adjustment(double h, double d, double c);
double capped_uplift(double cpi, const CapRule& rule);
double erosion_factor(double d, double n);
double average_retirement_erosion(double d, int career_years = 40, int retirement_years = 20);
double accrual_only_reduction(double old_denominator, double new_denominator);

// Real-terms annual erosion of a tranche indexed under `rules` (0 under the
// soft cap for c <= 5%).
double tranche_devaluation(const SchemeRules& rules, const EconomicAssumptions& assumptions);
// Real-terms annual shrink of the DB/DC threshold.
double threshold_devaluation(const SchemeRules& rules, const EconomicAssumptions& assumptions);

double monte_carlo_devaluation(double h, double c, double sigma, int years, int paths,
                               std::uint64_t seed);

std::string to_string(CapRule::Kind k);
std::string to_string(ThresholdIndexation t);
std::string to_string(DevaluationBasis b);
DevaluationBasis parse_devaluation_basis(const std::string& s);

}  // namespace pensionlab
