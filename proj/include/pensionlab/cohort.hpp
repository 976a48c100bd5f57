#pragma once

#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "pensionlab/projection.hpp"

namespace pensionlab {

// [low, high) in GBP or years. Open bands have high = +inf.
struct Band {
    std::string label;
    double low = 0.0;
    double high = 0.0;
    bool open = false;
};

struct HeatMap {
    std::vector<Band> salary_bands;
    std::vector<Band> age_bands;
    std::vector<std::vector<long long>> counts;  // [salary][age]

    long long total() const;
};

Band parse_salary_band(const std::string& label);
Band parse_age_band(const std::string& label);

HeatMap load_heatmap(std::istream& in);
HeatMap load_heatmap_file(const std::string& path);

struct Midpoints {
    std::vector<double> salary;
    std::vector<double> age;
};

inline constexpr double kTopSalaryMidpoint = 200000.0;
inline constexpr double kTopAgeMidpoint = 65.5;

Midpoints band_midpoints(const HeatMap& h);

enum class Metric { Percent, Money };

struct CellLoss {
    std::size_t salary_index = 0;
    std::size_t age_index = 0;
    long long count = 0;
    double percent_loss = 0.0;   // fraction, positive = cut
    double monetary_loss = 0.0;  // GBP per person, positive = cut
};

struct LossGrid {
    std::vector<Band> salary_bands;
    std::vector<Band> age_bands;
    std::vector<std::vector<CellLoss>> cells;  // [salary][age]

    long long population() const;
};

// Grid of published values (signed negative percent or negative GBP k),
// weighted by `counts`. Band labels must match the heat map.
LossGrid load_loss_grid(std::istream& in, Metric metric, const HeatMap& counts);
LossGrid load_loss_grid_file(const std::string& path, Metric metric, const HeatMap& counts);
// Overlay a second published grid's metric onto `grid`.
void merge_loss_grid(LossGrid& grid, const LossGrid& other, Metric metric);

// DOB placing the member exactly `age` years old at `at`.
Date birth_date_for_age(double age, const Date& at = kReformDate);

struct CellResult {
    double percent_loss = 0.0;
    double monetary_loss = 0.0;
};

CellResult evaluate_cell(double age_mid, double salary_mid, const SchemeRules& rules_old,
                         const SchemeRules& rules_new, const EconomicAssumptions& a,
                         Interpolation method = Interpolation::Linear);

LossGrid cohort_losses(const HeatMap& h, const SchemeRules& rules_old, const SchemeRules& rules_new,
                       const EconomicAssumptions& a, Interpolation method = Interpolation::Linear);

// Smallest value whose cumulative weight reaches q * total.
double weighted_quantile(const std::vector<double>& values, const std::vector<double>& weights, double q);
double weighted_mean(const std::vector<double>& values, const std::vector<double>& weights);

struct Bin {
    double low = 0.0;
    double high = 0.0;
};

// Left-closed fixed-width bins anchored at 0.
long bin_index(double value, double width);
Bin mode_bin(const std::vector<double>& values, const std::vector<double>& weights, double width);

using CellPredicate = std::function<bool(const Band& salary, const Band& age)>;

// Keeps whole bands: rows/columns with at least one selected cell are kept and
// unselected cells get count 0.
LossGrid filter_cohort(const LossGrid& g, const CellPredicate& keep);
bool under_40(const Band& salary, const Band& age);
bool under_40k(const Band& salary, const Band& age);
bool age_40_plus(const Band& salary, const Band& age);
bool salary_40k_plus(const Band& salary, const Band& age);

double global_monetary_loss(const LossGrid& g);

struct Histogram {
    Metric metric = Metric::Percent;
    double bin_width = 0.0;
    long first_bin = 0;
    std::vector<std::string> groups;
    std::vector<std::vector<long long>> counts;  // [bin][group]

    Bin bin(std::size_t i) const;
    long long total() const;
};

enum class GroupBy { Salary, Age };

Histogram histogram(const LossGrid& g, Metric metric, double bin_width, GroupBy group_by);

inline constexpr double kPercentBinWidth = 0.05;
inline constexpr double kMoneyBinWidth = 50000.0;

struct CohortDistribution {
    Metric metric = Metric::Percent;
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
    double mean = 0.0;
    Bin mode;
    double global_monetary_loss = 0.0;
    long long population = 0;
};

CohortDistribution summarize(const LossGrid& g, Metric metric);

double global_one_year_loss(const HeatMap& h, const SchemeRules& rules_old, const SchemeRules& rules_new,
                            const EconomicAssumptions& a, Interpolation method = Interpolation::Linear);

struct Persona {
    std::string name;
    double age = 0.0;
    double salary = 0.0;
    // published "our value" at CPI 2.5%, 2.8%, 3.0%
    double published_loss[3] = {0, 0, 0};
};

const std::vector<Persona>& personas();
const Persona& persona(const std::string& name);

// Interpolates linearly in salary between the two cells of the persona's age
// band whose midpoints bracket the persona's salary.
double persona_check(const std::string& name, const HeatMap& h, const SchemeRules& rules_old,
                     const SchemeRules& rules_new, const EconomicAssumptions& a,
                     Interpolation method = Interpolation::Linear);
double persona_from_grid(const std::string& name, const LossGrid& g);

struct CalibrationResult {
    double annuity_factor = 0.0;
    double mad = 0.0;  // percentage points
};

// Fits a single annuity factor minimising mean absolute deviation between the
// engine's percent grid and `target` over salary bands with low >= min_salary.
CalibrationResult calibrate_annuity_factor(const HeatMap& h, const LossGrid& target,
                                           const SchemeRules& rules_old, const SchemeRules& rules_new,
                                           EconomicAssumptions a, double min_salary = 60000.0,
                                           double lo = kMinAnnuityFactor, double hi = kMaxAnnuityFactor);

std::string to_string(Metric m);

}  // namespace pensionlab
