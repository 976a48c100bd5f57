#pragma once

#include <array>
#include <string>

#include "pensionlab/date.hpp"
#include "pensionlab/scheme_core.hpp"

namespace pensionlab {

enum class DcOption { Annuity, Drawdown, Cash };
enum class Interpolation { Linear, Geometric };

inline constexpr Date kReformDate{2022, 4, 1};
inline constexpr int kRetirementPayments = 20;

struct MemberScenario {
    Date date_of_birth;
    double salary = 0.0;  // at start_date
    Date start_date = kReformDate;
    double retirement_age = 66.0;
    DcOption dc_option = DcOption::Annuity;

    void validate() const;
    double years_to_retirement() const;
};

// Incomes are annual, in today's money at start_date.
struct ProjectionResult {
    double income_66 = 0.0;
    double income_86 = 0.0;
    double db_66 = 0.0;
    double dc_66 = 0.0;
    double db_86 = 0.0;
    double service_years = 0.0;
    std::string rules_id;
    std::string assumptions_id;
    std::string scenario_key;

    bool has_future_service() const { return service_years > 0; }
};

struct LossMetrics {
    double percent_loss = 0.0;
    double monetary_loss = 0.0;
    double old_total = 0.0;
    double new_total = 0.0;
    Interpolation interpolation = Interpolation::Linear;
    bool geometric_fallback = false;
};

ProjectionResult project_member(const MemberScenario& s, const SchemeRules& rules,
                                const EconomicAssumptions& a);
// `baseline` governs the pre_reform_years of accrual.
ProjectionResult project_member(const MemberScenario& s, const SchemeRules& rules,
                                const SchemeRules& baseline, const EconomicAssumptions& a);

// Sum of the 20 payments at ages 66..85. Geometric with I86 = 0 falls back to
// linear and sets *fell_back.
double retirement_income_total(double income_66, double income_86, Interpolation method,
                               bool* fell_back = nullptr);

// Payments at ages 66..86 (21 points), endpoints equal to income_66/income_86.
std::array<double, 21> income_trajectory(const ProjectionResult& r, Interpolation method);

LossMetrics future_loss(const ProjectionResult& old_result, const ProjectionResult& new_result,
                        Interpolation method);

struct Comparison {
    ProjectionResult old_result;
    ProjectionResult new_result;
    LossMetrics loss;
};

// Both sides accrue any pre-reform years on rules_old.
Comparison compare_rules(const MemberScenario& s, const SchemeRules& rules_old,
                         const SchemeRules& rules_new, const EconomicAssumptions& a,
                         Interpolation method = Interpolation::Linear);

// Loss attributable to the single year of accrual starting at start_date.
// Ignores pre_reform_years.
double one_year_contribution_loss(const MemberScenario& s, const SchemeRules& rules_old,
                                  const SchemeRules& rules_new, const EconomicAssumptions& a,
                                  Interpolation method = Interpolation::Linear);

std::string to_string(DcOption o);
std::string to_string(Interpolation m);
DcOption parse_dc_option(const std::string& s);
Interpolation parse_interpolation(const std::string& s);

}  // namespace pensionlab
