#include "pensionlab/scheme_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pensionlab/errors.hpp"

namespace pensionlab {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw ValidationError(field, std::string(field) + " must be finite");
}

CapRule CapRule::soft(double full, double half, double max) {
    CapRule r;
    r.kind = Kind::Soft;
    r.full_match_to = full;
    r.half_match_to = half;
    r.max_uplift = max;
    return r;
}

CapRule CapRule::hard(double cap, int delay_years) {
    CapRule r;
    r.kind = Kind::Hard;
    r.cap = cap;
    r.delay_years = delay_years;
    return r;
}

void CapRule::validate() const {
    if (kind == Kind::Soft) {
        require_finite(full_match_to, "full_match_to");
        require_finite(half_match_to, "half_match_to");
        require_finite(max_uplift, "max_uplift");
        if (full_match_to < 0 || full_match_to > half_match_to)
            throw ValidationError("full_match_to", "need 0 <= full_match_to <= half_match_to");
        if (max_uplift < full_match_to)
            throw ValidationError("max_uplift", "max_uplift must be >= full_match_to");
    } else {
        require_finite(cap, "cap");
        if (cap < 0) throw ValidationError("cap", "hard cap must be >= 0");
        if (delay_years < 0) throw ValidationError("delay_years", "delay_years must be >= 0");
    }
}

void SchemeRules::validate() const {
    if (accrual_denominator <= 0)
        throw ValidationError("accrual_denominator", "accrual_denominator must be positive");
    require_finite(db_dc_threshold, "db_dc_threshold");
    if (db_dc_threshold < 0) throw ValidationError("db_dc_threshold", "threshold must be >= 0");
    require_finite(threshold_cap, "threshold_cap");
    if (threshold_cap < 0) throw ValidationError("threshold_cap", "threshold_cap must be >= 0");
    for (auto [v, f] : {std::pair{member_rate, "member_rate"}, {employer_rate, "employer_rate"}}) {
        require_finite(v, f);
        if (v < 0 || v > 1) throw ValidationError(f, std::string(f) + " must lie in [0, 1]");
    }
    cap_rule.validate();
}

void EconomicAssumptions::validate() const {
    require_finite(cpi_mean, "cpi");
    if (cpi_mean < kMinCpi || cpi_mean > kMaxCpi)
        throw ValidationError("cpi", "cpi must lie in [0, 0.05] (modeller range)");
    require_finite(salary_growth, "salary_growth");
    require_finite(dc_growth, "dc_growth");
    if (salary_growth <= -1) throw ValidationError("salary_growth", "salary_growth must be > -1");
    if (dc_growth <= -1) throw ValidationError("dc_growth", "dc_growth must be > -1");
    require_finite(annuity_factor, "annuity_factor");
    if (annuity_factor < kMinAnnuityFactor || annuity_factor > kMaxAnnuityFactor)
        throw ValidationError("annuity_factor", "annuity_factor must lie in [20, 80]");
    require_finite(cpi_adjustment, "cpi_adjustment");
    require_finite(dc_contribution_rate, "dc_contribution_rate");
    if (dc_contribution_rate < 0 || dc_contribution_rate > 1)
        throw ValidationError("dc_contribution_rate", "dc_contribution_rate must lie in [0, 1]");
    require_finite(fixed_devaluation, "fixed_devaluation");
    if (fixed_devaluation < 0 || fixed_devaluation >= 1)
        throw ValidationError("fixed_devaluation", "fixed_devaluation must lie in [0, 1)");
    require_finite(pre_reform_years, "pre_reform_years");
    if (pre_reform_years < 0) throw ValidationError("pre_reform_years", "pre_reform_years must be >= 0");
}

namespace {

bool near(double x, double y) { return std::abs(x - y) < 1e-9; }

double eq1_clamped(double h, double a, double c) { return std::max(0.0, annual_devaluation(h, a, c)); }

}  // namespace

double EconomicAssumptions::devaluation(double cap) const {
    switch (devaluation_basis) {
        case DevaluationBasis::Fixed:
            return fixed_devaluation;
        case DevaluationBasis::Formula:
            return eq1_clamped(cap, cpi_adjustment, cpi_mean);
        case DevaluationBasis::UssImplied:
            return eq1_clamped(cap, kUssImpliedAdjustment, cpi_mean);
        case DevaluationBasis::UukPublished:
            if (near(cap, 0.025)) {
                if (near(cpi_mean, 0.025)) return 0.005;
                if (near(cpi_mean, 0.028)) return 0.008;
            }
            return eq1_clamped(cap, kUukAdjustment, cpi_mean);
    }
    return 0.0;
}

double annual_devaluation(double h, double a, double c) {
    require_finite(h, "h");
    require_finite(a, "a");
    require_finite(c, "c");
    if (1 + c <= 0) throw ValidationError("c", "need 1 + c > 0");
    return 1.0 - (1.0 + h - a) / (1.0 + c);
}

double implied_adjustment(double h, double d, double c) {
    require_finite(h, "h");
    require_finite(d, "d");
    require_finite(c, "c");
    if (d >= 1) throw ValidationError("d", "d must be < 1");
    return 1.0 + h - (1.0 - d) * (1.0 + c);
}

double capped_uplift(double cpi, const CapRule& rule) {
    require_finite(cpi, "cpi");
    if (cpi < -1) throw ValidationError("cpi", "cpi must be >= -1");
    if (cpi <= 0) return 0.0;
    if (rule.kind == CapRule::Kind::Hard) return std::min(cpi, rule.cap);
    double u = cpi <= rule.full_match_to
                   ? cpi
                   : rule.full_match_to + 0.5 * (std::min(cpi, rule.half_match_to) - rule.full_match_to);
    return std::min(rule.max_uplift, u);
}

double erosion_factor(double d, double n) {
    require_finite(d, "d");
    require_finite(n, "n");
    if (d >= 1) throw ValidationError("d", "d must be < 1");
    if (n < 0) throw ValidationError("n", "n must be >= 0");
    return std::pow(1.0 - d, n);
}

double average_retirement_erosion(double d, int career_years, int retirement_years) {
    if (career_years < 0 || retirement_years < 0)
        throw ValidationError("years", "career_years and retirement_years must be >= 0");
    double s = 0;
    for (int n = career_years; n <= career_years + retirement_years; ++n) s += erosion_factor(d, n);
    return 1.0 - s / (retirement_years + 1);
}

double accrual_only_reduction(double old_denominator, double new_denominator) {
    if (!(old_denominator > 0) || !(new_denominator > 0))
        throw ValidationError("denominator", "denominators must be positive");
    return 1.0 - old_denominator / new_denominator;
}

double tranche_devaluation(const SchemeRules& rules, const EconomicAssumptions& a) {
    if (rules.cap_rule.kind == CapRule::Kind::Hard) return a.devaluation(rules.cap_rule.cap);
    double c = a.cpi_mean;
    return std::max(0.0, 1.0 - (1.0 + capped_uplift(c, rules.cap_rule)) / (1.0 + c));
}

double threshold_devaluation(const SchemeRules& rules, const EconomicAssumptions& a) {
    if (rules.threshold_indexation == ThresholdIndexation::FullCPI) return 0.0;
    return a.devaluation(rules.threshold_cap);
}

double monte_carlo_devaluation(double h, double c, double sigma, int years, int paths,
                               std::uint64_t seed) {
    require_finite(h, "h");
    require_finite(c, "c");
    require_finite(sigma, "sigma");
    if (sigma < 0) throw ValidationError("sigma", "sigma must be >= 0");
    if (years < 1) throw ValidationError("years", "years must be >= 1");
    if (paths < 1) throw ValidationError("paths", "paths must be >= 1");
    CapRule cap = CapRule::hard(h);
    if (sigma == 0) {
        // Every draw equals c; skip the sampler so the result is exact.
        return 1.0 - (1.0 + capped_uplift(c, cap)) / (1.0 + c);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> cpi(c, sigma);
    double log_sum = 0;
    for (int p = 0; p < paths; ++p)
        for (int y = 0; y < years; ++y) {
            double x = std::max(cpi(rng), -0.99);
            log_sum += std::log1p(capped_uplift(x, cap)) - std::log1p(x);
        }
    return 1.0 - std::exp(log_sum / (double(paths) * years));
}

std::string to_string(CapRule::Kind k) { return k == CapRule::Kind::Soft ? "soft" : "hard"; }

std::string to_string(ThresholdIndexation t) {
    return t == ThresholdIndexation::FullCPI ? "full_cpi" : "capped_cpi";
}

std::string to_string(DevaluationBasis b) {
    switch (b) {
        case DevaluationBasis::Formula: return "formula";
        case DevaluationBasis::UukPublished: return "uuk";
        case DevaluationBasis::UssImplied: return "uss";
        case DevaluationBasis::Fixed: return "fixed";
    }
    return "formula";
}

DevaluationBasis parse_devaluation_basis(const std::string& s) {
    if (s == "formula") return DevaluationBasis::Formula;
    if (s == "uuk") return DevaluationBasis::UukPublished;
    if (s == "uss") return DevaluationBasis::UssImplied;
    if (s == "fixed") return DevaluationBasis::Fixed;
    throw ValidationError("devaluation", "devaluation must be one of uuk, uss, formula, fixed");
}

}  // namespace pensionlab
