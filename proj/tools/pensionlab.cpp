// pensionlab command line: project | cohort | tables | calibrate | mc | serve
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pensionlab/cohort.hpp"
#include "pensionlab/config.hpp"
#include "pensionlab/errors.hpp"
#include "pensionlab/report.hpp"
#include "pensionlab/service.hpp"

using namespace pensionlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_cpis(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != item.size()) throw UsageError("--cpi: not a number: '" + item + "'");
        if (!(v >= kMinCpi && v <= kMaxCpi)) throw UsageError("--cpi " + item + " outside the modeller range [0, 0.05]");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("--cpi: no values");
    return out;
}

std::pair<std::string, std::string> parse_rules(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("--rules expects OLD:NEW, e.g. uss2021:uuk2021");
    std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    for (const auto& id : {a, b})
        if (!PresetRegistry::bundled().contains(id)) throw UsageError("--rules: unknown preset '" + id + "'");
    return {a, b};
}

struct Common {
    std::string rules = "uss2021:uuk2021";
    std::string cpi;  // empty: subcommand default
    std::string interp = "linear";
    std::string devaluation;
    std::string profile = kModellerProfile;
    std::string format = "text";
    std::string heatmap;
    int delay_years = -1;
    bool modeller_rounding = false;
};

void add_common(CLI::App* app, Common& c, bool with_heatmap) {
    app->add_option("--rules", c.rules, "Rule presets OLD:NEW")->capture_default_str();
    app->add_option("--interp", c.interp, "Retirement income interpolation")
        ->check(CLI::IsMember({"linear", "geometric"}))
        ->capture_default_str();
    app->add_option("--devaluation", c.devaluation, "Hard-cap devaluation basis")
        ->check(CLI::IsMember({"uuk", "uss", "formula"}));
    app->add_option("--profile", c.profile, "Assumptions profile")->capture_default_str();
    app->add_option("--delay-years", c.delay_years, "Override the new rules' hard-cap delay")->check(CLI::NonNegativeNumber);
    app->add_flag("--modeller-rounding", c.modeller_rounding, "Round incomes to the nearest GBP 10");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();
    if (with_heatmap) app->add_option("--heatmap", c.heatmap, "Heat-map CSV (default: bundled)");
}

EconomicAssumptions assumptions_for(const Common& c, double cpi) {
    if (!AssumptionProfiles::bundled().contains(c.profile)) throw UsageError("--profile: unknown profile '" + c.profile + "'");
    EconomicAssumptions a = AssumptionProfiles::bundled().get(c.profile, cpi);
    if (!c.devaluation.empty()) a.devaluation_basis = parse_devaluation_basis(c.devaluation);
    a.modeller_rounding = a.modeller_rounding || c.modeller_rounding;
    return a;
}

SchemeRules with_delay(SchemeRules r, int delay) {
    if (delay < 0) return r;
    if (r.cap_rule.kind != CapRule::Kind::Hard) throw UsageError("--delay-years needs a hard-cap new rule set");
    r.cap_rule.delay_years = delay;
    return r;
}

std::string default_heatmap(const std::string& given) {
    return given.empty() ? (std::filesystem::path(data_dir()) / "heatmap.csv").string() : given;
}

void emit(const Table& t, const std::string& format) {
    if (format == "json")
        std::cout << render_json(t).dump(2) << '\n';
    else if (format == "csv")
        render_csv(std::cout, t);
    else
        render_text(std::cout, t);
}

int cmd_project(const Common& c, const std::string& dob, double salary, const std::string& start, double retirement_age,
                const std::string& dc_option) {
    auto [old_id, new_id] = parse_rules(c.rules);
    const auto& reg = PresetRegistry::bundled();
    SchemeRules rules_old = reg.get(old_id);
    SchemeRules rules_new = with_delay(reg.get(new_id), c.delay_years);
    MemberScenario s;
    try {
        s.date_of_birth = parse_date(dob);
        if (!start.empty()) s.start_date = parse_date(start);
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    s.salary = salary;
    s.retirement_age = retirement_age;
    s.dc_option = parse_dc_option(dc_option);
    const Interpolation method = parse_interpolation(c.interp);

    json out = json::array();
    Table t;
    t.title = "Projection " + old_id + " -> " + new_id + " (today's money)";
    t.header = {"cpi", "old_income_66", "old_income_86", "new_income_66", "new_income_86", "new_db_66", "new_dc_66",
                "percent_loss", "monetary_loss"};
    for (double cpi : parse_cpis(c.cpi)) {
        EconomicAssumptions a = assumptions_for(c, cpi);
        Comparison cmp = compare_rules(s, rules_old, rules_new, a, method);
        out.push_back({{"cpi", cpi},
                       {"old", to_json(cmp.old_result)},
                       {"new", to_json(cmp.new_result)},
                       {"loss", to_json(cmp.loss)}});
        t.rows.push_back({fixed(cpi, 4), fixed(cmp.old_result.income_66, 2), fixed(cmp.old_result.income_86, 2),
                          fixed(cmp.new_result.income_66, 2), fixed(cmp.new_result.income_86, 2),
                          fixed(cmp.new_result.db_66, 2), fixed(cmp.new_result.dc_66, 2),
                          fixed(100 * cmp.loss.percent_loss, 2) + "%", fixed(cmp.loss.monetary_loss, 2)});
    }
    t.notes = {"profile: " + c.profile + ", interpolation: " + c.interp};
    if (c.format == "json")
        std::cout << (out.size() == 1 ? out[0] : out).dump(2) << '\n';
    else
        emit(t, c.format);
    return kExitOk;
}

int cmd_cohort(const Common& c, const std::string& out_dir, bool replay, const std::string& replay_pct,
               const std::string& replay_gbp) {
    CohortRun run;
    auto [old_id, new_id] = parse_rules(c.rules);
    run.rules_old = old_id;
    run.rules_new = new_id;
    // --replay without --cpi means the one CPI the published grids cover.
    if (!c.cpi.empty())
        run.cpis = parse_cpis(c.cpi);
    else if (replay)
        run.cpis = {kReplayCpi};
    run.heatmap_path = default_heatmap(c.heatmap);
    run.out_dir = out_dir;
    run.profile = c.profile;
    if (!AssumptionProfiles::bundled().contains(c.profile)) throw UsageError("--profile: unknown profile '" + c.profile + "'");
    run.interpolation = parse_interpolation(c.interp);
    if (!c.devaluation.empty()) run.devaluation = parse_devaluation_basis(c.devaluation);
    if (c.delay_years >= 0) run.delay_years = c.delay_years;
    run.modeller_rounding = c.modeller_rounding;
    run.replay = replay;
    const std::string dd = data_dir();
    run.replay_percent_path = replay_pct.empty() ? (std::filesystem::path(dd) / "loss_pct_cpi28.csv").string() : replay_pct;
    run.replay_money_path = replay_gbp.empty() ? (std::filesystem::path(dd) / "loss_gbpk_cpi28.csv").string() : replay_gbp;
    if (replay) {
        for (double x : run.cpis)
            if (std::abs(x - kReplayCpi) > 1e-12) throw UsageError("--replay: published grids exist only for --cpi 0.028");
    }
    json summary = run_cohort(run);
    if (c.format == "json") {
        std::cout << summary.dump(2) << '\n';
        return kExitOk;
    }
    Table t;
    t.title = std::string(replay ? "Replayed" : "Engine") + " cohort summary, " + old_id + " -> " + new_id;
    t.header = {"cpi", "mean_all", "q1", "q2", "q3", "mode", "mean_under40", "global_bn", "under40_bn", "under40_share"};
    for (const auto& r : summary["runs"]) {
        const auto& p = r["all"]["percent"];
        auto pc = [](const json& v) { return fixed(100 * v.get<double>(), 1); };
        t.rows.push_back({fixed(100 * r["meta"]["cpi"].get<double>(), 1) + "%", pc(p["mean"]), pc(p["q1"]), pc(p["q2"]),
                          pc(p["q3"]), pc(p["mode_bin"][0]) + "-" + pc(p["mode_bin"][1]), pc(r["under40"]["percent"]["mean"]),
                          fixed(r["all"]["money"]["global_monetary_loss"].get<double>() / 1e9, 2),
                          fixed(r["under40"]["money"]["global_monetary_loss"].get<double>() / 1e9, 2),
                          fixed(r["under40_share"].get<double>(), 3)});
    }
    t.notes = {"files written to " + out_dir};
    emit(t, c.format);
    return kExitOk;
}

int cmd_tables(const std::string& name, const Common& c) {
    const std::string hm = default_heatmap(c.heatmap);
    if (name == "erosion") {
        emit(erosion_table(), c.format);
        return kExitOk;
    }
    HeatMap h = load_heatmap_file(hm);
    if (name == "oneyear")
        emit(oneyear_table(h, c.profile == kModellerProfile ? kPublishedProfile : c.profile), c.format);
    else if (name == "quartiles")
        emit(quartiles_table(h, c.profile), c.format);
    else if (name == "personas")
        emit(personas_table(h, c.profile), c.format);
    else if (name == "replay") {
        const std::string dd = data_dir();
        LossGrid g = load_loss_grid_file((std::filesystem::path(dd) / "loss_pct_cpi28.csv").string(), Metric::Percent, h);
        merge_loss_grid(g, load_loss_grid_file((std::filesystem::path(dd) / "loss_gbpk_cpi28.csv").string(), Metric::Money, h),
                        Metric::Money);
        emit(replay_table(h, g), c.format);
    } else {
        throw UsageError("unknown table '" + name + "' (erosion, oneyear, quartiles, personas, replay)");
    }
    return kExitOk;
}

int cmd_calibrate(const Common& c, double min_salary) {
    auto [old_id, new_id] = parse_rules(c.rules);
    const auto& reg = PresetRegistry::bundled();
    HeatMap h = load_heatmap_file(default_heatmap(c.heatmap));
    LossGrid target =
        load_loss_grid_file((std::filesystem::path(data_dir()) / "loss_pct_cpi28.csv").string(), Metric::Percent, h);
    EconomicAssumptions a = assumptions_for(c, kReplayCpi);
    CalibrationResult r = calibrate_annuity_factor(h, target, reg.get(old_id), reg.get(new_id), a, min_salary);
    json out = {{"annuity_factor", r.annuity_factor}, {"mad_pp", r.mad}, {"profile", c.profile}, {"min_salary", min_salary}};
    if (c.format == "json")
        std::cout << out.dump(2) << '\n';
    else
        std::cout << "annuity_factor " << fixed(r.annuity_factor, 2) << "  (MAD " << fixed(r.mad, 3)
                  << " pp over salary bands >= " << fixed(min_salary, 0) << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pensionlab: pension projection and cohort loss analysis"};
    app.require_subcommand(1);
    Common common;

    auto* project = app.add_subcommand("project", "Project one member under two rule sets");
    std::string dob, start;
    double salary = -1, retirement_age = 66;
    std::string dc_option = "annuity";
    project->add_option("--dob", dob, "Date of birth YYYY-MM-DD")->required();
    project->add_option("--salary", salary, "Salary at start date (GBP/year)")->required()->check(CLI::NonNegativeNumber);
    project->add_option("--cpi", common.cpi, "CPI (comma list)")->required();
    project->add_option("--start-date", start, "Start date (default 2022-04-01)");
    project->add_option("--retirement-age", retirement_age, "Retirement age")->capture_default_str();
    project->add_option("--dc-option", dc_option, "DC option")->check(CLI::IsMember({"annuity", "drawdown", "cash"}));
    add_common(project, common, false);

    auto* cohort = app.add_subcommand("cohort", "Evaluate the heat-map cohort and write reports");
    std::string out_dir = "out", replay_pct, replay_gbp;
    bool replay = false;
    cohort->add_option("--cpi", common.cpi, "CPI values (comma list; default 0.025,0.028,0.03, or 0.028 with --replay)");
    cohort->add_option("--out", out_dir, "Output directory")->capture_default_str();
    cohort->add_flag("--replay", replay, "Use the published CPI 2.8% grids instead of the engine");
    cohort->add_option("--replay-percent", replay_pct, "Percent grid for --replay");
    cohort->add_option("--replay-gbp", replay_gbp, "GBP k grid for --replay");
    add_common(cohort, common, true);

    auto* tables = app.add_subcommand("tables", "Reproduce a named table with published targets");
    std::string table_name;
    tables->add_option("name", table_name, "erosion | oneyear | quartiles | personas | replay")->required();
    add_common(tables, common, true);

    auto* calibrate = app.add_subcommand("calibrate", "Fit the annuity factor to the CPI 2.8% grid");
    double min_salary = 60000;
    calibrate->add_option("--min-salary", min_salary, "Lowest salary band used in the fit")->capture_default_str();
    add_common(calibrate, common, true);

    auto* mc = app.add_subcommand("mc", "Monte Carlo devaluation oracle");
    double mc_h = 0.025, mc_c = 0.025, mc_sigma = 0.01;
    int mc_years = 40, mc_paths = 20000;
    std::uint64_t seed = 20220401;
    mc->add_option("--cap", mc_h, "Hard cap h")->capture_default_str();
    mc->add_option("--cpi", mc_c, "Mean CPI c")->capture_default_str();
    mc->add_option("--sigma", mc_sigma, "CPI standard deviation")->capture_default_str()->check(CLI::NonNegativeNumber);
    mc->add_option("--years", mc_years, "Years per path")->capture_default_str()->check(CLI::PositiveNumber);
    mc->add_option("--paths", mc_paths, "Paths")->capture_default_str()->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "RNG seed")->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
    std::string host = "0.0.0.0";
    int port = -1;
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--port", port, "Port (default $PENSIONLAB_PORT or 8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*project) return cmd_project(common, dob, salary, start, retirement_age, dc_option);
        if (*cohort) return cmd_cohort(common, out_dir, replay, replay_pct, replay_gbp);
        if (*tables) return cmd_tables(table_name, common);
        if (*calibrate) return cmd_calibrate(common, min_salary);
        if (*mc) {
            double d = monte_carlo_devaluation(mc_h, mc_c, mc_sigma, mc_years, mc_paths, seed);
            std::cout << "d " << fixed(100 * d, 4) << "%  (closed form with a = 0: "
                      << fixed(100 * std::max(0.0, annual_devaluation(mc_h, 0, mc_c)), 4) << "%)\n";
            return kExitOk;
        }
        if (*serve) {
            int p = port > 0 ? port : service::port_from_env();
            return service::serve(host, p) ? kExitOk : (std::cerr << "pensionlab: cannot bind " << host << ":" << p << "\n", kExitRuntime);
        }
    } catch (const UsageError& e) {
        std::cerr << "pensionlab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "pensionlab: " << e.field() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pensionlab: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
