#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pensionlab/cohort.hpp"

namespace pensionlab {

// Published figures the tables are compared against.
namespace published {

struct ErosionColumn {
    double cpi;
    double d;  // as quoted
    std::string basis;
    bool derived;  // quoted d is a rounded formula value; use the formula
    int loss[4];  // 20y, 40y, 60y, average 66-86; signed percent
};
const std::vector<ErosionColumn>& erosion_table();

inline constexpr double kCpis[3] = {0.025, 0.028, 0.030};
// [cpi][uuk none, uuk 2y, uss none, uss 2y], percent
inline constexpr double kOneYear[3][4] = {
    {27.2, 26.6, 28.7, 28.0}, {32.0, 31.1, 33.4, 32.4}, {35.0, 33.9, 36.3, 35.1}};

struct Quartiles {
    double q1, q2, q3, mean, mode_low;
};
// Percent for percent tables, GBP thousands for money tables.
inline constexpr Quartiles kPercentAll[3] = {{22, 29, 33, 27, 30}, {26, 33, 37, 31, 35}, {28, 35, 40, 33, 40}};
inline constexpr Quartiles kPercentUnder40[3] = {{26, 32, 35, 30, 30}, {30, 37, 40, 35, 35}, {33, 39, 43, 38, 40}};
inline constexpr Quartiles kMoneyAll[3] = {{31, 78, 125, 82, 0}, {36, 85, 149, 90, 0}, {38, 89, 140, 94, 0}};
inline constexpr Quartiles kMoneyUnder40[3] = {{81, 136, 157, 121, 100}, {91, 149, 173, 133, 150}, {97, 154, 181, 139, 150}};
// GBP bn, all staff and under 40
inline constexpr double kGlobalLoss[3][2] = {{16.1, 8.5}, {17.6, 9.4}, {18.4, 9.8}};

}  // namespace published

// Grid CSV: header row of age bands, salary band rows. Cuts are written as
// signed negative numbers (percent or GBP thousands). Leading '#' lines are
// comments and are skipped by load_loss_grid.
void write_loss_grid_csv(std::ostream& out, const LossGrid& g, Metric metric);
void write_heatmap_csv(std::ostream& out, const HeatMap& h);
void write_histogram_csv(std::ostream& out, const Histogram& h);

nlohmann::json to_json(const CohortDistribution& d);
nlohmann::json to_json(const SchemeRules& r);
nlohmann::json to_json(const ProjectionResult& r);
nlohmann::json to_json(const LossMetrics& m);

struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;
};

void render_text(std::ostream& out, const Table& t);
void render_csv(std::ostream& out, const Table& t);
nlohmann::json render_json(const Table& t);

// `profile` names the assumptions profile used for engine-computed columns.
Table erosion_table();
Table oneyear_table(const HeatMap& h, const std::string& profile = "published");
Table quartiles_table(const HeatMap& h, const std::string& profile = "modeller");
Table replay_table(const HeatMap& h, const LossGrid& published_grid);
Table personas_table(const HeatMap& h, const std::string& profile = "modeller");

std::string fixed(double v, int decimals);

// Reads CSV written by render_csv / write_histogram_csv: '#' lines skipped,
// first row is the header.
Table parse_csv_table(std::istream& in);

struct CohortRun {
    std::vector<double> cpis = {0.025, 0.028, 0.030};
    std::string heatmap_path;
    std::string out_dir = "out";
    std::string rules_old = "uss2021";
    std::string rules_new = "uuk2021";
    std::string profile = "modeller";
    Interpolation interpolation = Interpolation::Linear;
    std::optional<DevaluationBasis> devaluation;
    std::optional<int> delay_years;
    bool modeller_rounding = false;
    // Replay: statistics from the published grids instead of the engine.
    bool replay = false;
    std::string replay_percent_path;
    std::string replay_money_path;
};

inline constexpr double kReplayCpi = 0.028;

// Evaluates (or replays) each CPI, writes grids, histograms and summaries into
// out_dir, and returns the combined summary.
nlohmann::json run_cohort(const CohortRun& run);

nlohmann::json summarize_grid(const LossGrid& g);
std::string cpi_tag(double cpi);

}  // namespace pensionlab
