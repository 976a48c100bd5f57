#include "pensionlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pensionlab/config.hpp"
#include "pensionlab/errors.hpp"

namespace pensionlab {

using nlohmann::json;

namespace published {

const std::vector<ErosionColumn>& erosion_table() {
    static const std::vector<ErosionColumn> t = {
        {0.021, 0.004, "uss", false, {-8, -15, -21, -18}},
        {0.025, 0.005, "uuk", false, {-10, -18, -26, -22}},
        {0.025, 0.0058, "uss", false, {-11, -21, -29, -25}},
        {0.028, 0.008, "uuk", false, {-15, -27, -38, -33}},
        {0.028, 0.0087, "uss", true, {-15, -29, -41, -35}},
    };
    return t;
}

}  // namespace published

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    // No "-0.00".
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void write_loss_grid_csv(std::ostream& out, const LossGrid& g, Metric metric) {
    out << (metric == Metric::Percent ? "# percent loss of future pension; cuts are negative\n"
                                      : "# loss in GBP thousands, today's money; cuts are negative\n");
    out << "salary_band";
    for (const auto& b : g.age_bands) out << ',' << b.label;
    out << '\n';
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        out << g.salary_bands[i].label;
        for (const auto& c : g.cells[i])
            out << ','
                << (metric == Metric::Percent ? fixed(-100.0 * c.percent_loss, 4) : fixed(-c.monetary_loss / 1000.0, 4));
        out << '\n';
    }
}

void write_heatmap_csv(std::ostream& out, const HeatMap& h) {
    out << "salary_band";
    for (const auto& b : h.age_bands) out << ',' << b.label;
    out << '\n';
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << h.salary_bands[i].label;
        for (auto c : h.counts[i]) out << ',' << c;
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    const bool pct = h.metric == Metric::Percent;
    out << (pct ? "# members per loss bin (percent, positive = cut, left-closed)\n"
                : "# members per loss bin (GBP thousands, positive = cut, left-closed)\n");
    out << "bin_low,bin_high";
    for (const auto& g : h.groups) out << ',' << g;
    out << '\n';
    const double scale = pct ? 100.0 : 0.001;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        Bin b = h.bin(i);
        out << fixed(b.low * scale, 0) << ',' << fixed(b.high * scale, 0);
        for (auto c : h.counts[i]) out << ',' << c;
        out << '\n';
    }
}

json to_json(const CohortDistribution& d) {
    return {{"metric", to_string(d.metric)},
            {"q1", d.q1},
            {"q2", d.q2},
            {"q3", d.q3},
            {"mean", d.mean},
            {"mode_bin", {d.mode.low, d.mode.high}},
            {"global_monetary_loss", d.global_monetary_loss},
            {"population", d.population}};
}

json to_json(const SchemeRules& r) {
    json cap = {{"kind", to_string(r.cap_rule.kind)}};
    if (r.cap_rule.kind == CapRule::Kind::Soft) {
        cap["full_match_to"] = r.cap_rule.full_match_to;
        cap["half_match_to"] = r.cap_rule.half_match_to;
        cap["max_uplift"] = r.cap_rule.max_uplift;
    } else {
        cap["cap"] = r.cap_rule.cap;
        cap["delay_years"] = r.cap_rule.delay_years;
    }
    json j = {{"id", r.id},
              {"label", r.label},
              {"accrual_denominator", r.accrual_denominator},
              {"db_dc_threshold", r.db_dc_threshold},
              {"threshold_indexation", to_string(r.threshold_indexation)},
              {"cap_rule", cap},
              {"member_rate", r.member_rate},
              {"employer_rate", r.employer_rate}};
    if (r.threshold_indexation == ThresholdIndexation::CappedCPI) j["threshold_cap"] = r.threshold_cap;
    return j;
}

json to_json(const ProjectionResult& r) {
    return {{"income_66", r.income_66},
            {"income_86", r.income_86},
            {"db_66", r.db_66},
            {"dc_66", r.dc_66},
            {"db_86", r.db_86},
            {"service_years", r.service_years},
            {"rules_id", r.rules_id},
            {"assumptions_id", r.assumptions_id}};
}

json to_json(const LossMetrics& m) {
    return {{"percent_loss", m.percent_loss},
            {"monetary_loss", m.monetary_loss},
            {"old_total", m.old_total},
            {"new_total", m.new_total},
            {"interpolation", to_string(m.interpolation)},
            {"geometric_fallback", m.geometric_fallback}};
}

void render_text(std::ostream& out, const Table& t) {
    std::vector<std::size_t> w(t.header.size(), 0);
    for (std::size_t j = 0; j < t.header.size(); ++j) w[j] = t.header[j].size();
    for (const auto& r : t.rows)
        for (std::size_t j = 0; j < r.size() && j < w.size(); ++j) w[j] = std::max(w[j], r[j].size());
    out << t.title << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j) out << "  ";
            if (j == 0)
                out << std::left << std::setw(static_cast<int>(w[j])) << cells[j];
            else
                out << std::right << std::setw(static_cast<int>(w[j])) << cells[j];
        }
        out << '\n';
    };
    line(t.header);
    std::size_t total = 0;
    for (auto x : w) total += x + 2;
    out << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
    for (const auto& r : t.rows) line(r);
    for (const auto& n : t.notes) out << "  " << n << '\n';
}

void render_csv(std::ostream& out, const Table& t) {
    out << "# " << t.title << '\n';
    for (const auto& n : t.notes) out << "# " << n << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) out << (j ? "," : "") << cells[j];
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

json render_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t j = 0; j < r.size() && j < t.header.size(); ++j) o[t.header[j]] = r[j];
        rows.push_back(o);
    }
    return {{"title", t.title}, {"columns", t.header}, {"rows", rows}, {"notes", t.notes}};
}

namespace {

std::string pct(double fraction, int dp = 1) { return fixed(100.0 * fraction, dp); }
std::string cpi_label(double c) { return fixed(100.0 * c, 1) + "%"; }

}  // namespace

Table erosion_table() {
    Table t;
    t.title = "Pension value erosion under a 2.5% hard cap (percent, cuts negative)";
    t.header = {"cpi", "basis", "d_quoted", "d_formula", "d_used", "20y", "40y", "60y", "avg_66_86", "published_20y", "published_40y",
                "published_60y", "published_avg", "max_delta_pp"};
    for (const auto& col : published::erosion_table()) {
        const double a = col.basis == "uuk" ? kUukAdjustment : kUssImpliedAdjustment;
        const double d = col.derived ? annual_devaluation(0.025, a, col.cpi) : col.d;
        double v[4] = {-(1 - erosion_factor(d, 20)), -(1 - erosion_factor(d, 40)), -(1 - erosion_factor(d, 60)),
                       -average_retirement_erosion(d)};
        double worst = 0;
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(100 * v[k] - col.loss[k]));
        t.rows.push_back({cpi_label(col.cpi), col.basis, fixed(100 * col.d, 2) + "%",
                          fixed(100 * annual_devaluation(0.025, a, col.cpi), 3) + "%", fixed(100 * d, 3) + "%", pct(v[0]), pct(v[1]),
                          pct(v[2]), pct(v[3]), std::to_string(col.loss[0]), std::to_string(col.loss[1]),
                          std::to_string(col.loss[2]), std::to_string(col.loss[3]), fixed(worst, 2)});
    }
    t.notes = {"d_formula: 1 - (1 + h - a)/(1 + c) with h = 2.5% and a = 0.5% (uuk) or 0.59% (uss)",
               "d_used: the quoted d, except the 2.8% uss column whose quoted 0.87% is itself a rounded formula value"};
    return t;
}

Table oneyear_table(const HeatMap& h, const std::string& profile) {
    const auto& reg = PresetRegistry::bundled();
    const auto& old_rules = reg.get("uss2021");
    const SchemeRules* news[2] = {&reg.get("uuk2021"), &reg.get("uuk2022_adjusted")};
    const DevaluationBasis bases[2] = {DevaluationBasis::UukPublished, DevaluationBasis::UssImplied};
    Table t;
    t.title = "Global percent loss from one year's contribution (heat-map weighted)";
    t.header = {"cpi", "devaluation", "delay", "loss", "published", "delta_pp"};
    for (int ci = 0; ci < 3; ++ci) {
        EconomicAssumptions a = AssumptionProfiles::bundled().get(profile, published::kCpis[ci]);
        for (int b = 0; b < 2; ++b)
            for (int n = 0; n < 2; ++n) {
                a.devaluation_basis = bases[b];
                double loss = global_one_year_loss(h, old_rules, *news[n], a);
                double target = published::kOneYear[ci][2 * b + n];
                t.rows.push_back({cpi_label(published::kCpis[ci]), b ? "uss" : "uuk", n ? "2y" : "none", pct(loss, 2),
                                  fixed(target, 1), fixed(100 * loss - target, 2)});
            }
    }
    t.notes = {"assumptions profile: " + profile, "rules: uss2021 -> uuk2021 (no delay), uuk2022_adjusted (2y delay)"};
    return t;
}

Table quartiles_table(const HeatMap& h, const std::string& profile) {
    const auto& reg = PresetRegistry::bundled();
    Table t;
    t.title = "Distribution of loss across the membership (engine vs published)";
    t.header = {"group", "metric", "cpi", "q1", "q2", "q3", "mean", "mode", "published_q1", "published_q2",
                "published_q3", "published_mean", "published_mode", "global_bn", "published_global_bn"};
    for (int ci = 0; ci < 3; ++ci) {
        EconomicAssumptions a = AssumptionProfiles::bundled().get(profile, published::kCpis[ci]);
        LossGrid g = cohort_losses(h, reg.get("uss2021"), reg.get("uuk2021"), a);
        struct Row {
            const char* group;
            Metric m;
            const published::Quartiles* target;
            bool under40;
        } rows[] = {{"all", Metric::Percent, &published::kPercentAll[ci], false},
                    {"under40", Metric::Percent, &published::kPercentUnder40[ci], true},
                    {"all", Metric::Money, &published::kMoneyAll[ci], false},
                    {"under40", Metric::Money, &published::kMoneyUnder40[ci], true}};
        for (const auto& r : rows) {
            LossGrid sub = r.under40 ? filter_cohort(g, under_40) : g;
            CohortDistribution d = summarize(sub, r.m);
            const bool p = r.m == Metric::Percent;
            auto v = [&](double x) { return p ? fixed(100 * x, 1) : fixed(x / 1000, 1); };
            const double mode_w = p ? 5 : 50;
            t.rows.push_back({r.group, p ? "percent" : "gbp_k", cpi_label(published::kCpis[ci]), v(d.q1), v(d.q2), v(d.q3),
                              v(d.mean), v(d.mode.low) + "-" + v(d.mode.high), fixed(r.target->q1, 0),
                              fixed(r.target->q2, 0), fixed(r.target->q3, 0), fixed(r.target->mean, 0),
                              fixed(r.target->mode_low, 0) + "-" + fixed(r.target->mode_low + mode_w, 0),
                              fixed(d.global_monetary_loss / 1e9, 2),
                              fixed(published::kGlobalLoss[ci][r.under40 ? 1 : 0], 1)});
        }
    }
    t.notes = {"assumptions profile: " + profile, "rules: uss2021 -> uuk2021"};
    return t;
}

Table replay_table(const HeatMap& h, const LossGrid& grid) {
    (void)h;
    Table t;
    t.title = "Statistics replayed from the published CPI 2.8% grids";
    t.header = {"group", "metric", "q1", "q2", "q3", "mean", "mode", "global_bn"};
    for (bool u40 : {false, true})
        for (Metric m : {Metric::Percent, Metric::Money}) {
            LossGrid sub = u40 ? filter_cohort(grid, under_40) : grid;
            CohortDistribution d = summarize(sub, m);
            const bool p = m == Metric::Percent;
            auto v = [&](double x) { return p ? fixed(100 * x, 1) : fixed(x / 1000, 1); };
            t.rows.push_back({u40 ? "under40" : "all", p ? "percent" : "gbp_k", v(d.q1), v(d.q2), v(d.q3), v(d.mean),
                              v(d.mode.low) + "-" + v(d.mode.high), fixed(d.global_monetary_loss / 1e9, 2)});
        }
    return t;
}

Table personas_table(const HeatMap& h, const std::string& profile) {
    const auto& reg = PresetRegistry::bundled();
    Table t;
    t.title = "Persona percent loss (interpolated between heat-map cells)";
    t.header = {"persona", "age", "salary", "cpi", "loss", "published", "delta_pp"};
    for (const auto& p : personas())
        for (int ci = 0; ci < 3; ++ci) {
            EconomicAssumptions a = AssumptionProfiles::bundled().get(profile, published::kCpis[ci]);
            double loss = persona_check(p.name, h, reg.get("uss2021"), reg.get("uuk2021"), a);
            t.rows.push_back({p.name, fixed(p.age, 0), fixed(p.salary, 0), cpi_label(published::kCpis[ci]), pct(loss, 1),
                              pct(p.published_loss[ci], 0), fixed(100 * (loss - p.published_loss[ci]), 2)});
        }
    t.notes = {"assumptions profile: " + profile};
    return t;
}

}  // namespace pensionlab

namespace pensionlab {

Table parse_csv_table(std::istream& in) {
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!have_header) {
                std::string text = line.size() > 2 ? line.substr(2) : "";
                if (t.title.empty())
                    t.title = text;
                else
                    t.notes.push_back(text);
            }
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t p; (p = line.find(',', start)) != std::string::npos; start = p + 1)
            cells.push_back(line.substr(start, p - start));
        cells.push_back(line.substr(start));
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
        } else {
            if (cells.size() != t.header.size())
                throw std::runtime_error("csv row " + std::to_string(t.rows.size() + 2) + ": expected " +
                                         std::to_string(t.header.size()) + " fields");
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw std::runtime_error("csv has no header row");
    return t;
}

}  // namespace pensionlab


namespace pensionlab {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
}

template <class Fn>
std::string capture(Fn fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

}  // namespace

std::string cpi_tag(double cpi) { return "cpi" + fixed(100 * cpi, 1); }

nlohmann::json summarize_grid(const LossGrid& g) {
    json out = json::object();
    struct Group {
        const char* name;
        CellPredicate keep;
    } groups[] = {{"all", [](const Band&, const Band&) { return true; }}, {"under40", under_40}, {"under40k", under_40k}};
    for (const auto& grp : groups) {
        LossGrid sub = filter_cohort(g, grp.keep);
        out[grp.name] = {{"percent", to_json(summarize(sub, Metric::Percent))},
                         {"money", to_json(summarize(sub, Metric::Money))}};
    }
    const double total = global_monetary_loss(g);
    out["under40_share"] = total > 0 ? global_monetary_loss(filter_cohort(g, under_40)) / total : 0.0;
    // Share of sub-40k members losing more than 15%.
    LossGrid low = filter_cohort(g, under_40k);
    double over = 0;
    for (const auto& r : low.cells)
        for (const auto& c : r)
            if (c.percent_loss > 0.15) over += double(c.count);
    out["under40k_share_over_15pct"] = low.population() > 0 ? over / double(low.population()) : 0.0;
    return out;
}

nlohmann::json run_cohort(const CohortRun& run) {
    namespace fs = std::filesystem;
    const auto& reg = PresetRegistry::bundled();
    SchemeRules rules_old = reg.get(run.rules_old);
    SchemeRules rules_new = reg.get(run.rules_new);
    if (run.delay_years) {
        if (rules_new.cap_rule.kind != CapRule::Kind::Hard)
            throw ValidationError("delay-years", "--delay-years needs a hard-cap new rule set");
        rules_new.cap_rule.delay_years = *run.delay_years;
    }
    if (run.cpis.empty()) throw ValidationError("cpi", "no CPI values given");
    for (double c : run.cpis)
        if (!(c >= kMinCpi && c <= kMaxCpi)) throw ValidationError("cpi", "cpi must lie in [0, 0.05]");
    if (run.replay)
        for (double c : run.cpis)
            if (std::abs(c - kReplayCpi) > 1e-12)
                throw ValidationError("cpi", "published grids exist only for CPI 2.8%");

    HeatMap h = load_heatmap_file(run.heatmap_path);
    if (h.total() <= 0) throw std::runtime_error("heat map '" + run.heatmap_path + "' has no members");
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + run.out_dir + "': " + ec.message());

    json summary = {{"mode", run.replay ? "replay" : "engine"},
                    {"rules_old", rules_old.id},
                    {"rules_new", rules_new.id},
                    {"delay_years", rules_new.cap_rule.kind == CapRule::Kind::Hard ? rules_new.cap_rule.delay_years : 0},
                    {"interpolation", to_string(run.interpolation)},
                    {"population", h.total()},
                    {"runs", json::array()}};
    if (!run.replay) summary["profile"] = run.profile;

    json csv_rows = json::array();
    for (double c : run.cpis) {
        LossGrid g;
        json meta = {{"cpi", c}};
        if (run.replay) {
            g = load_loss_grid_file(run.replay_percent_path, Metric::Percent, h);
            merge_loss_grid(g, load_loss_grid_file(run.replay_money_path, Metric::Money, h), Metric::Money);
        } else {
            EconomicAssumptions a = AssumptionProfiles::bundled().get(run.profile, c);
            if (run.devaluation) a.devaluation_basis = *run.devaluation;
            a.modeller_rounding = a.modeller_rounding || run.modeller_rounding;
            g = cohort_losses(h, rules_old, rules_new, a, run.interpolation);
            meta["annuity_factor"] = a.annuity_factor;
            meta["devaluation"] = to_string(a.devaluation_basis);
            meta["devaluation_rate"] = tranche_devaluation(rules_new, a);
            meta["pre_reform_years"] = a.pre_reform_years;
            meta["modeller_rounding"] = a.modeller_rounding;
        }
        const std::string tag = cpi_tag(c);
        const fs::path dir(run.out_dir);
        write_file(dir / ("grid_percent_" + tag + ".csv"), capture([&](auto& os) { write_loss_grid_csv(os, g, Metric::Percent); }));
        write_file(dir / ("grid_gbpk_" + tag + ".csv"), capture([&](auto& os) { write_loss_grid_csv(os, g, Metric::Money); }));
        for (auto [m, mname] : {std::pair{Metric::Percent, "percent"}, {Metric::Money, "gbpk"}})
            for (auto [gb, gname] : {std::pair{GroupBy::Salary, "salary"}, {GroupBy::Age, "age"}}) {
                Histogram hist = histogram(g, m, m == Metric::Percent ? kPercentBinWidth : kMoneyBinWidth, gb);
                write_file(dir / ("hist_" + std::string(mname) + "_by_" + gname + "_" + tag + ".csv"),
                           capture([&](auto& os) { write_histogram_csv(os, hist); }));
            }
        json s = summarize_grid(g);
        s["meta"] = meta;
        write_file(dir / ("summary_" + tag + ".json"), s.dump(2) + "\n");
        summary["runs"].push_back(s);
    }

    Table t;
    t.title = "cohort summary (loss positive; percent as fraction, money in GBP)";
    t.header = {"cpi", "group", "metric", "q1", "q2", "q3", "mean", "mode_low", "mode_high", "global_loss", "population"};
    for (const auto& r : summary["runs"]) {
        for (const char* grp : {"all", "under40", "under40k"})
            for (const char* m : {"percent", "money"}) {
                const json& d = r[grp][m];
                const int dp = std::string(m) == "percent" ? 6 : 2;
                t.rows.push_back({fixed(r["meta"]["cpi"].get<double>(), 4), grp, m, fixed(d["q1"], dp), fixed(d["q2"], dp),
                                  fixed(d["q3"], dp), fixed(d["mean"], dp), fixed(d["mode_bin"][0], dp),
                                  fixed(d["mode_bin"][1], dp), fixed(d["global_monetary_loss"], 0),
                                  std::to_string(d["population"].get<long long>())});
            }
    }
    write_file(fs::path(run.out_dir) / "summary.csv", capture([&](auto& os) { render_csv(os, t); }));
    write_file(fs::path(run.out_dir) / "summary.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace pensionlab
