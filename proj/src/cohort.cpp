#include "pensionlab/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "pensionlab/errors.hpp"

namespace pensionlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

// Splits a CSV line; fields may be double-quoted (for "1,234" style counts).
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_number(std::string s, double& out) {
    s.erase(std::remove(s.begin(), s.end(), ','), s.end());
    if (!s.empty() && s.rfind("\xC2\xA3", 0) == 0) s.erase(0, 2);  // pound sign
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == s.size() && std::isfinite(out);
}

// Reads non-comment, non-blank lines.
std::vector<std::vector<std::string>> read_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        rows.push_back(split_csv(line));
    }
    return rows;
}

std::string where(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

void check_increasing(const std::vector<Band>& bands, const char* what) {
    for (std::size_t i = 1; i < bands.size(); ++i)
        if (!(bands[i].low > bands[i - 1].low) || bands[i - 1].open)
            throw ParseError(std::string(what) + " bands not strictly increasing at '" + bands[i].label + "'");
}

struct Layout {
    std::vector<Band> salary, age;
    std::vector<std::vector<double>> values;
};

Layout read_grid(std::istream& in) {
    auto rows = read_rows(in);
    if (rows.empty()) throw ParseError("empty grid file");
    Layout g;
    const auto& header = rows[0];
    if (header.size() < 2) throw ParseError("header needs a label column and at least one age band");
    for (std::size_t j = 1; j < header.size(); ++j) {
        try {
            g.age.push_back(parse_age_band(header[j]));
        } catch (const ParseError& e) {
            throw ParseError(where(0, j) + ": " + e.what());
        }
    }
    check_increasing(g.age, "age");
    if (rows.size() < 2) throw ParseError("grid has no salary rows");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size())
            throw ParseError("row " + std::to_string(i + 1) + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(r.size()));
        try {
            g.salary.push_back(parse_salary_band(r[0]));
        } catch (const ParseError& e) {
            throw ParseError(where(i, 0) + ": " + e.what());
        }
        std::vector<double> vals;
        for (std::size_t j = 1; j < r.size(); ++j) {
            double v = 0;
            if (!parse_number(r[j], v)) throw ParseError(where(i, j) + ": not a number: '" + r[j] + "'");
            vals.push_back(v);
        }
        g.values.push_back(std::move(vals));
    }
    check_increasing(g.salary, "salary");
    return g;
}

double band_mid(const Band& b, double open_value) { return b.open ? open_value : 0.5 * (b.low + b.high); }

}  // namespace

long long HeatMap::total() const {
    long long s = 0;
    for (const auto& r : counts) s = std::accumulate(r.begin(), r.end(), s);
    return s;
}

long long LossGrid::population() const {
    long long s = 0;
    for (const auto& r : cells)
        for (const auto& c : r) s += c.count;
    return s;
}

// "0-5k", "145-150k", "150k+", "50,000-55,000", "£50-55k"
Band parse_salary_band(const std::string& raw) {
    std::string s = trim(raw);
    for (auto p = s.find("\xC2\xA3"); p != std::string::npos; p = s.find("\xC2\xA3")) s.erase(p, 2);
    s.erase(std::remove(s.begin(), s.end(), ','), s.end());
    if (s.empty()) throw ParseError("empty salary band label");
    bool k = false;
    auto scale = [&](std::string t) {
        if (!t.empty() && (t.back() == 'k' || t.back() == 'K')) {
            k = true;
            t.pop_back();
        }
        double v = 0;
        if (!parse_number(t, v)) throw ParseError("unknown salary band label '" + raw + "'");
        return v;
    };
    Band b;
    b.label = trim(raw);
    if (s.back() == '+') {
        b.low = scale(s.substr(0, s.size() - 1));
        if (k) b.low *= 1000;
        b.high = kInf;
        b.open = true;
        return b;
    }
    auto dash = s.find('-');
    if (dash == std::string::npos || dash == 0) throw ParseError("unknown salary band label '" + raw + "'");
    double lo = scale(s.substr(0, dash));
    double hi = scale(s.substr(dash + 1));
    if (k) {
        lo *= 1000;
        hi *= 1000;
    }
    if (!(hi > lo) || lo < 0) throw ParseError("salary band '" + raw + "' is empty or negative");
    b.low = lo;
    b.high = hi;
    return b;
}

// "<=25" (read as ages 20-24), "25-29", "65+". Bands are in whole
// years so "25-29" covers [25, 30).
Band parse_age_band(const std::string& raw) {
    std::string s = trim(raw);
    Band b;
    b.label = s;
    double v = 0;
    if (s.rfind("<=", 0) == 0 && parse_number(s.substr(2), v)) {
        b.low = v - 5;
        b.high = v;
        return b;
    }
    if (!s.empty() && s.back() == '+' && parse_number(s.substr(0, s.size() - 1), v)) {
        b.low = v;
        b.high = kInf;
        b.open = true;
        return b;
    }
    auto dash = s.find('-');
    double lo = 0, hi = 0;
    if (dash != std::string::npos && dash > 0 && parse_number(s.substr(0, dash), lo) &&
        parse_number(s.substr(dash + 1), hi) && hi >= lo && lo >= 0) {
        b.low = lo;
        b.high = hi + 1;
        return b;
    }
    throw ParseError("unknown age band label '" + raw + "'");
}

HeatMap load_heatmap(std::istream& in) {
    Layout g = read_grid(in);
    HeatMap h;
    h.salary_bands = std::move(g.salary);
    h.age_bands = std::move(g.age);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        std::vector<long long> row;
        for (std::size_t j = 0; j < g.values[i].size(); ++j) {
            double v = g.values[i][j];
            if (v < 0) throw ParseError(where(i + 1, j + 1) + ": negative count");
            if (v != std::floor(v)) throw ParseError(where(i + 1, j + 1) + ": count is not an integer");
            row.push_back(static_cast<long long>(v));
        }
        h.counts.push_back(std::move(row));
    }
    return h;
}

HeatMap load_heatmap_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open heat map '" + path + "'");
    return load_heatmap(f);
}

Midpoints band_midpoints(const HeatMap& h) {
    Midpoints m;
    for (const auto& b : h.salary_bands) m.salary.push_back(band_mid(b, kTopSalaryMidpoint));
    for (const auto& b : h.age_bands) m.age.push_back(band_mid(b, kTopAgeMidpoint));
    return m;
}

LossGrid load_loss_grid(std::istream& in, Metric metric, const HeatMap& counts) {
    Layout g = read_grid(in);
    auto same = [](const std::vector<Band>& a, const std::vector<Band>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].low != b[i].low || a[i].high != b[i].high) return false;
        return true;
    };
    if (!same(g.salary, counts.salary_bands) || !same(g.age, counts.age_bands))
        throw ParseError("loss grid bands do not match the heat map");
    LossGrid out;
    out.salary_bands = counts.salary_bands;
    out.age_bands = counts.age_bands;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        std::vector<CellLoss> row;
        for (std::size_t j = 0; j < g.values[i].size(); ++j) {
            CellLoss c;
            c.salary_index = i;
            c.age_index = j;
            c.count = counts.counts[i][j];
            // Files carry cuts as negative numbers.
            if (metric == Metric::Percent)
                c.percent_loss = -g.values[i][j] / 100.0;
            else
                c.monetary_loss = -g.values[i][j] * 1000.0;
            row.push_back(c);
        }
        out.cells.push_back(std::move(row));
    }
    return out;
}

LossGrid load_loss_grid_file(const std::string& path, Metric metric, const HeatMap& counts) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open loss grid '" + path + "'");
    return load_loss_grid(f, metric, counts);
}

void merge_loss_grid(LossGrid& grid, const LossGrid& other, Metric metric) {
    if (grid.cells.size() != other.cells.size()) throw ValidationError("grid", "grid shapes differ");
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (grid.cells[i].size() != other.cells[i].size()) throw ValidationError("grid", "grid shapes differ");
        for (std::size_t j = 0; j < grid.cells[i].size(); ++j) {
            if (metric == Metric::Percent)
                grid.cells[i][j].percent_loss = other.cells[i][j].percent_loss;
            else
                grid.cells[i][j].monetary_loss = other.cells[i][j].monetary_loss;
        }
    }
}

Date birth_date_for_age(double age, const Date& at) {
    return add_months(at, -static_cast<int>(std::lround(age * 12.0)));
}

CellResult evaluate_cell(double age_mid, double salary_mid, const SchemeRules& rules_old,
                         const SchemeRules& rules_new, const EconomicAssumptions& a, Interpolation method) {
    MemberScenario s;
    s.start_date = kReformDate;
    s.date_of_birth = birth_date_for_age(age_mid, s.start_date);
    s.salary = salary_mid;
    Comparison c = compare_rules(s, rules_old, rules_new, a, method);
    return {c.loss.percent_loss, c.loss.monetary_loss};
}

LossGrid cohort_losses(const HeatMap& h, const SchemeRules& rules_old, const SchemeRules& rules_new,
                       const EconomicAssumptions& a, Interpolation method) {
    Midpoints m = band_midpoints(h);
    LossGrid g;
    g.salary_bands = h.salary_bands;
    g.age_bands = h.age_bands;
    for (std::size_t i = 0; i < m.salary.size(); ++i) {
        std::vector<CellLoss> row;
        for (std::size_t j = 0; j < m.age.size(); ++j) {
            CellResult r = evaluate_cell(m.age[j], m.salary[i], rules_old, rules_new, a, method);
            row.push_back({i, j, h.counts[i][j], r.percent_loss, r.monetary_loss});
        }
        g.cells.push_back(std::move(row));
    }
    return g;
}

namespace {

void check_weights(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.empty()) throw ValidationError("values", "empty input");
    if (values.size() != weights.size()) throw ValidationError("weights", "values and weights differ in length");
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) throw ValidationError("weights", "weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0)) throw ValidationError("weights", "total weight must be positive");
}

}  // namespace

double weighted_quantile(const std::vector<double>& values, const std::vector<double>& weights, double q) {
    check_weights(values, weights);
    if (!(q > 0 && q < 1)) throw ValidationError("q", "q must lie in (0, 1)");
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double target = q * total * (1 - 1e-12);
    double cum = 0;
    for (auto i : idx) {
        cum += weights[i];
        if (weights[i] > 0 && cum >= target) return values[i];
    }
    return values[idx.back()];
}

double weighted_mean(const std::vector<double>& values, const std::vector<double>& weights) {
    check_weights(values, weights);
    double s = 0, w = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += values[i] * weights[i];
        w += weights[i];
    }
    return s / w;
}

long bin_index(double value, double width) {
    if (!(width > 0)) throw ValidationError("bin_width", "bin width must be positive");
    // Tolerance keeps published whole-percent values (0.35) on their bin edge.
    return static_cast<long>(std::floor(value / width + 1e-9));
}

Bin mode_bin(const std::vector<double>& values, const std::vector<double>& weights, double width) {
    check_weights(values, weights);
    std::map<long, double> mass;
    for (std::size_t i = 0; i < values.size(); ++i) mass[bin_index(values[i], width)] += weights[i];
    long best = mass.begin()->first;
    double best_w = -1;
    for (const auto& [b, w] : mass)
        if (w > best_w) {
            best = b;
            best_w = w;
        }
    return {best * width, (best + 1) * width};
}

LossGrid filter_cohort(const LossGrid& g, const CellPredicate& keep) {
    LossGrid out;
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < g.salary_bands.size(); ++i)
        for (std::size_t j = 0; j < g.age_bands.size(); ++j)
            if (keep(g.salary_bands[i], g.age_bands[j])) {
                if (std::find(rows.begin(), rows.end(), i) == rows.end()) rows.push_back(i);
                if (std::find(cols.begin(), cols.end(), j) == cols.end()) cols.push_back(j);
            }
    std::sort(cols.begin(), cols.end());
    for (auto j : cols) out.age_bands.push_back(g.age_bands[j]);
    for (auto i : rows) {
        out.salary_bands.push_back(g.salary_bands[i]);
        std::vector<CellLoss> row;
        for (std::size_t jj = 0; jj < cols.size(); ++jj) {
            CellLoss c = g.cells[i][cols[jj]];
            if (!keep(g.salary_bands[i], g.age_bands[cols[jj]])) c.count = 0;
            c.salary_index = out.salary_bands.size() - 1;
            c.age_index = jj;
            row.push_back(c);
        }
        out.cells.push_back(std::move(row));
    }
    return out;
}

bool under_40(const Band&, const Band& age) { return age.high <= 40; }
bool under_40k(const Band& salary, const Band&) { return salary.high <= 40000; }
bool age_40_plus(const Band& s, const Band& a) { return !under_40(s, a); }
bool salary_40k_plus(const Band& s, const Band& a) { return !under_40k(s, a); }

double global_monetary_loss(const LossGrid& g) {
    double s = 0;
    for (const auto& r : g.cells)
        for (const auto& c : r) s += double(c.count) * c.monetary_loss;
    return s;
}

namespace {

double metric_value(const CellLoss& c, Metric m) { return m == Metric::Percent ? c.percent_loss : c.monetary_loss; }

void flatten(const LossGrid& g, Metric m, std::vector<double>& v, std::vector<double>& w) {
    for (const auto& r : g.cells)
        for (const auto& c : r) {
            v.push_back(metric_value(c, m));
            w.push_back(double(c.count));
        }
}

}  // namespace

Bin Histogram::bin(std::size_t i) const {
    long b = first_bin + static_cast<long>(i);
    return {b * bin_width, (b + 1) * bin_width};
}

long long Histogram::total() const {
    long long s = 0;
    for (const auto& r : counts) s = std::accumulate(r.begin(), r.end(), s);
    return s;
}

Histogram histogram(const LossGrid& g, Metric metric, double bin_width, GroupBy group_by) {
    if (!(bin_width > 0)) throw ValidationError("bin_width", "bin width must be positive");
    Histogram h;
    h.metric = metric;
    h.bin_width = bin_width;
    const auto& bands = group_by == GroupBy::Salary ? g.salary_bands : g.age_bands;
    for (const auto& b : bands) h.groups.push_back(b.label);
    long lo = 0, hi = 0;
    bool any = false;
    for (const auto& r : g.cells)
        for (const auto& c : r) {
            long b = bin_index(metric_value(c, metric), bin_width);
            lo = any ? std::min(lo, b) : std::min(0L, b);
            hi = any ? std::max(hi, b) : std::max(0L, b);
            any = true;
        }
    h.first_bin = lo;
    h.counts.assign(static_cast<std::size_t>(hi - lo + 1), std::vector<long long>(bands.size(), 0));
    for (const auto& r : g.cells)
        for (const auto& c : r) {
            auto bi = static_cast<std::size_t>(bin_index(metric_value(c, metric), bin_width) - lo);
            auto gi = group_by == GroupBy::Salary ? c.salary_index : c.age_index;
            h.counts[bi][gi] += c.count;
        }
    return h;
}

CohortDistribution summarize(const LossGrid& g, Metric metric) {
    std::vector<double> v, w;
    flatten(g, metric, v, w);
    CohortDistribution d;
    d.metric = metric;
    d.q1 = weighted_quantile(v, w, 0.25);
    d.q2 = weighted_quantile(v, w, 0.50);
    d.q3 = weighted_quantile(v, w, 0.75);
    d.mean = weighted_mean(v, w);
    d.mode = mode_bin(v, w, metric == Metric::Percent ? kPercentBinWidth : kMoneyBinWidth);
    d.global_monetary_loss = global_monetary_loss(g);
    d.population = g.population();
    return d;
}

double global_one_year_loss(const HeatMap& h, const SchemeRules& rules_old, const SchemeRules& rules_new,
                            const EconomicAssumptions& a, Interpolation method) {
    Midpoints m = band_midpoints(h);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < m.salary.size(); ++i)
        for (std::size_t j = 0; j < m.age.size(); ++j) {
            MemberScenario s;
            s.date_of_birth = birth_date_for_age(m.age[j], s.start_date);
            s.salary = m.salary[i];
            // Cells with under a year to go have no full year of accrual.
            if (s.years_to_retirement() < 1 - 1e-12) continue;
            double w = double(h.counts[i][j]);
            num += w * one_year_contribution_loss(s, rules_old, rules_new, a, method);
            den += w;
        }
    if (!(den > 0)) throw ValidationError("heatmap", "no members with a full year to retirement");
    return num / den;
}

const std::vector<Persona>& personas() {
    static const std::vector<Persona> p = {
        {"Aria", 37, 30000, {0.25, 0.29, 0.33}},
        {"Bryn", 43, 50000, {0.35, 0.39, 0.41}},
        {"Chloe", 51, 70000, {0.31, 0.34, 0.36}},
    };
    return p;
}

const Persona& persona(const std::string& name) {
    for (const auto& p : personas())
        if (p.name == name) return p;
    throw ValidationError("persona", "unknown persona '" + name + "' (Aria, Bryn, Chloe)");
}

namespace {

struct Bracket {
    std::size_t age_index, lo, hi;
    double t;
};

Bracket bracket(const Persona& p, const std::vector<Band>& salary_bands, const std::vector<Band>& age_bands) {
    std::vector<double> mids;
    for (const auto& b : salary_bands) mids.push_back(band_mid(b, kTopSalaryMidpoint));
    std::size_t j = age_bands.size();
    for (std::size_t k = 0; k < age_bands.size(); ++k)
        if (p.age >= age_bands[k].low && p.age < age_bands[k].high) j = k;
    if (j == age_bands.size()) throw ValidationError("persona", "persona age outside the age bands");
    for (std::size_t i = 0; i + 1 < mids.size(); ++i)
        if (mids[i] <= p.salary && p.salary <= mids[i + 1])
            return {j, i, i + 1, (p.salary - mids[i]) / (mids[i + 1] - mids[i])};
    throw ValidationError("persona", "persona salary outside the salary midpoints");
}

}  // namespace

double persona_check(const std::string& name, const HeatMap& h, const SchemeRules& rules_old,
                     const SchemeRules& rules_new, const EconomicAssumptions& a, Interpolation method) {
    const Persona& p = persona(name);
    Bracket b = bracket(p, h.salary_bands, h.age_bands);
    Midpoints m = band_midpoints(h);
    double lo = evaluate_cell(m.age[b.age_index], m.salary[b.lo], rules_old, rules_new, a, method).percent_loss;
    double hi = evaluate_cell(m.age[b.age_index], m.salary[b.hi], rules_old, rules_new, a, method).percent_loss;
    return lo + (hi - lo) * b.t;
}

double persona_from_grid(const std::string& name, const LossGrid& g) {
    Bracket b = bracket(persona(name), g.salary_bands, g.age_bands);
    double lo = g.cells[b.lo][b.age_index].percent_loss;
    double hi = g.cells[b.hi][b.age_index].percent_loss;
    return lo + (hi - lo) * b.t;
}

CalibrationResult calibrate_annuity_factor(const HeatMap& h, const LossGrid& target, const SchemeRules& rules_old,
                                           const SchemeRules& rules_new, EconomicAssumptions a, double min_salary,
                                           double lo, double hi) {
    if (!(hi > lo)) throw ValidationError("annuity_factor", "empty calibration range");
    Midpoints m = band_midpoints(h);
    auto mad = [&](double af) {
        a.annuity_factor = af;
        double s = 0;
        int n = 0;
        for (std::size_t i = 0; i < m.salary.size(); ++i) {
            if (h.salary_bands[i].low < min_salary) continue;
            for (std::size_t j = 0; j < m.age.size(); ++j) {
                double p = evaluate_cell(m.age[j], m.salary[i], rules_old, rules_new, a).percent_loss;
                s += std::abs(p - target.cells[i][j].percent_loss);
                ++n;
            }
        }
        if (n == 0) throw ValidationError("min_salary", "no salary bands above min_salary");
        return 100.0 * s / n;
    };
    // Coarse scan, then golden-section refinement around the best point.
    double best = lo, best_v = mad(lo);
    for (double af = lo + 0.5; af <= hi + 1e-9; af += 0.5) {
        double v = mad(af);
        if (v < best_v) {
            best = af;
            best_v = v;
        }
    }
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double x0 = std::max(lo, best - 0.5), x3 = std::min(hi, best + 0.5);
    double x1 = x3 - phi * (x3 - x0), x2 = x0 + phi * (x3 - x0);
    double f1 = mad(x1), f2 = mad(x2);
    for (int it = 0; it < 30; ++it) {
        if (f1 < f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - phi * (x3 - x0);
            f1 = mad(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + phi * (x3 - x0);
            f2 = mad(x2);
        }
    }
    double x = 0.5 * (x0 + x3), fx = mad(x);
    if (fx > best_v) return {best, best_v};
    return {x, fx};
}

std::string to_string(Metric m) { return m == Metric::Percent ? "percent" : "money"; }

}  // namespace pensionlab
