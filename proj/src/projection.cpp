#include "pensionlab/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pensionlab/errors.hpp"

namespace pensionlab {

void MemberScenario::validate() const {
    if (!is_valid(date_of_birth)) throw ValidationError("date_of_birth", "invalid date_of_birth");
    if (!is_valid(start_date)) throw ValidationError("start_date", "invalid start_date");
    require_finite(salary, "salary");
    if (salary < 0) throw ValidationError("salary", "salary must be >= 0");
    require_finite(retirement_age, "retirement_age");
    if (retirement_age <= 0) throw ValidationError("retirement_age", "retirement_age must be > 0");
    if (days_from_civil(date_of_birth) > days_from_civil(start_date))
        throw ValidationError("date_of_birth", "date_of_birth is after start_date");
    if (dc_option != DcOption::Annuity)
        throw UnsupportedOption("dc_option", "dc_option '" + to_string(dc_option) +
                                                 "' is not supported; only annuity is implemented");
}

double MemberScenario::years_to_retirement() const {
    return retirement_age - age_at(date_of_birth, start_date);
}

namespace {

std::string scenario_key(const MemberScenario& s) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(s.date_of_birth) << '|' << s.salary << '|' << to_string(s.start_date) << '|'
       << s.retirement_age;
    return os.str();
}

struct RuleTerms {
    const SchemeRules* rules;
    double d_tranche;
    double d_threshold;
    bool hard;
};

RuleTerms terms(const SchemeRules& r, const EconomicAssumptions& a) {
    return {&r, tranche_devaluation(r, a), threshold_devaluation(r, a),
            r.cap_rule.kind == CapRule::Kind::Hard};
}

// Annual steps from start_date - pre_reform over `horizon` years of service
// (the whole career when horizon < 0). Time t is measured from the start of
// accrual; L = pre-reform years.
ProjectionResult accrue(const MemberScenario& s, const SchemeRules& rules, const SchemeRules& baseline,
                        const EconomicAssumptions& a, double pre_reform, int max_steps) {
    s.validate();
    rules.validate();
    baseline.validate();
    a.validate();

    ProjectionResult out;
    out.rules_id = rules.id;
    out.assumptions_id = a.id;
    out.scenario_key = scenario_key(s);

    const double L = pre_reform;
    const double T = s.years_to_retirement() + L;
    if (T <= 0) return out;
    out.service_years = T;

    const double c = a.cpi_mean;
    const double salary_real = (1 + a.salary_growth) / (1 + c);
    const double dc_real = (1 + a.dc_growth) / (1 + c);
    const RuleTerms post = terms(rules, a);
    const RuleTerms pre = terms(baseline, a);

    int steps = static_cast<int>(std::ceil(T - 1e-12));
    if (max_steps >= 0) steps = std::min(steps, max_steps);

    double db66 = 0, db86 = 0, pot = 0;
    for (int t = 0; t < steps; ++t) {
        const double w = std::min(1.0, T - t);
        const bool before_reform = t < L - 1e-12;
        const RuleTerms& rt = before_reform ? pre : post;
        const double since_reform = t - L;

        const double pay = s.salary * std::pow(salary_real, since_reform);
        const double threshold =
            rt.rules->db_dc_threshold * std::pow(1 - rt.d_threshold, std::max(0.0, since_reform));
        const double tranche = w * std::min(pay, threshold) / rt.rules->accrual_denominator;

        double erode_from = t;
        if (rt.hard) erode_from = std::max<double>(t, L + rt.rules->cap_rule.delay_years);
        const double n = std::max(0.0, T - erode_from);
        db66 += tranche * std::pow(1 - rt.d_tranche, n);
        db86 += tranche * std::pow(1 - rt.d_tranche, n + kRetirementPayments);

        pot += w * a.dc_contribution_rate * std::max(0.0, pay - threshold) * std::pow(dc_real, T - t - w);
    }

    double dc = pot / a.annuity_factor;
    if (a.modeller_rounding) {
        auto r10 = [](double x) { return std::round(x / 10.0) * 10.0; };
        dc = r10(dc);
        double i66 = r10(db66 + dc), i86 = r10(db86 + dc);
        db66 = i66 - dc;
        db86 = i86 - dc;
    }
    out.db_66 = db66;
    out.db_86 = db86;
    out.dc_66 = dc;
    out.income_66 = db66 + dc;
    out.income_86 = db86 + dc;
    return out;
}

}  // namespace

ProjectionResult project_member(const MemberScenario& s, const SchemeRules& rules,
                                const EconomicAssumptions& a) {
    return accrue(s, rules, rules, a, a.pre_reform_years, -1);
}

ProjectionResult project_member(const MemberScenario& s, const SchemeRules& rules,
                                const SchemeRules& baseline, const EconomicAssumptions& a) {
    return accrue(s, rules, baseline, a, a.pre_reform_years, -1);
}

double retirement_income_total(double i66, double i86, Interpolation method, bool* fell_back) {
    require_finite(i66, "income_66");
    require_finite(i86, "income_86");
    if (i66 < 0 || i86 < 0) throw ValidationError("income", "incomes must be >= 0");
    if (fell_back) *fell_back = false;
    if (method == Interpolation::Geometric && i66 > 0 && i86 > 0) {
        double s = 0;
        for (int k = 0; k < kRetirementPayments; ++k)
            s += i66 * std::pow(i86 / i66, double(k) / kRetirementPayments);
        return s;
    }
    if (method == Interpolation::Geometric && i66 > 0 && fell_back) *fell_back = true;
    double s = 0;
    for (int k = 0; k < kRetirementPayments; ++k) s += i66 + (i86 - i66) * k / kRetirementPayments;
    return s;
}

std::array<double, 21> income_trajectory(const ProjectionResult& r, Interpolation method) {
    std::array<double, 21> out{};
    const bool geo = method == Interpolation::Geometric && r.income_66 > 0 && r.income_86 > 0;
    for (int k = 0; k <= kRetirementPayments; ++k) {
        double f = double(k) / kRetirementPayments;
        out[k] = geo ? r.income_66 * std::pow(r.income_86 / r.income_66, f)
                     : r.income_66 + (r.income_86 - r.income_66) * f;
    }
    out[kRetirementPayments] = r.income_86;
    return out;
}

LossMetrics future_loss(const ProjectionResult& o, const ProjectionResult& n, Interpolation method) {
    if (o.scenario_key != n.scenario_key || o.assumptions_id != n.assumptions_id)
        throw ValidationError("scenario", "results come from different scenarios or assumptions");
    LossMetrics m;
    m.interpolation = method;
    bool fb_old = false, fb_new = false;
    m.old_total = retirement_income_total(o.income_66, o.income_86, method, &fb_old);
    m.new_total = retirement_income_total(n.income_66, n.income_86, method, &fb_new);
    m.geometric_fallback = fb_old || fb_new;
    if (m.old_total > 0) {
        m.monetary_loss = m.old_total - m.new_total;
        m.percent_loss = m.monetary_loss / m.old_total;
    }
    return m;
}

Comparison compare_rules(const MemberScenario& s, const SchemeRules& rules_old,
                         const SchemeRules& rules_new, const EconomicAssumptions& a,
                         Interpolation method) {
    Comparison c;
    c.old_result = project_member(s, rules_old, rules_old, a);
    c.new_result = project_member(s, rules_new, rules_old, a);
    c.loss = future_loss(c.old_result, c.new_result, method);
    return c;
}

double one_year_contribution_loss(const MemberScenario& s, const SchemeRules& rules_old,
                                  const SchemeRules& rules_new, const EconomicAssumptions& a,
                                  Interpolation method) {
    s.validate();
    if (s.years_to_retirement() < 1 - 1e-12)
        throw ValidationError("date_of_birth", "one-year loss needs at least one year to retirement");
    ProjectionResult o = accrue(s, rules_old, rules_old, a, 0.0, 1);
    ProjectionResult n = accrue(s, rules_new, rules_new, a, 0.0, 1);
    return future_loss(o, n, method).percent_loss;
}

std::string to_string(DcOption o) {
    switch (o) {
        case DcOption::Annuity: return "annuity";
        case DcOption::Drawdown: return "drawdown";
        case DcOption::Cash: return "cash";
    }
    return "annuity";
}

std::string to_string(Interpolation m) { return m == Interpolation::Linear ? "linear" : "geometric"; }

DcOption parse_dc_option(const std::string& s) {
    if (s == "annuity") return DcOption::Annuity;
    if (s == "drawdown") return DcOption::Drawdown;
    if (s == "cash") return DcOption::Cash;
    throw ValidationError("dc_option", "dc_option must be annuity, drawdown or cash");
}

Interpolation parse_interpolation(const std::string& s) {
    if (s == "linear") return Interpolation::Linear;
    if (s == "geometric") return Interpolation::Geometric;
    throw ValidationError("interp", "interpolation must be linear or geometric");
}

}  // namespace pensionlab
