// Thin bindings: numeric helpers directly, everything structured as JSON text
// (decoded on the Python side).
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pensionlab/cohort.hpp"
#include "pensionlab/config.hpp"
#include "pensionlab/errors.hpp"
#include "pensionlab/report.hpp"
#include "pensionlab/service.hpp"

namespace py = pybind11;
using namespace pensionlab;

namespace {

std::string heatmap_path(const std::string& p) { return p.empty() ? data_dir() + "/heatmap.csv" : p; }

std::string reply_text(const service::Reply& r) {
    if (r.status == 422) throw py::type_error(r.body.dump());
    if (r.status != 200) throw py::value_error(r.body.dump());
    return r.body.dump();
}

std::string replay_summary(const std::string& heatmap, const std::string& percent, const std::string& money) {
    HeatMap h = load_heatmap_file(heatmap_path(heatmap));
    LossGrid g = load_loss_grid_file(percent.empty() ? data_dir() + "/loss_pct_cpi28.csv" : percent, Metric::Percent, h);
    merge_loss_grid(g, load_loss_grid_file(money.empty() ? data_dir() + "/loss_gbpk_cpi28.csv" : money, Metric::Money, h),
                    Metric::Money);
    nlohmann::json s = summarize_grid(g);
    s["global_monetary_loss"] = global_monetary_loss(g);
    return s.dump();
}

std::string cohort_summary(double cpi, const std::string& rules_old, const std::string& rules_new,
                           const std::string& profile, const std::string& heatmap) {
    const auto& reg = PresetRegistry::bundled();
    HeatMap h = load_heatmap_file(heatmap_path(heatmap));
    LossGrid g = cohort_losses(h, reg.get(rules_old), reg.get(rules_new), AssumptionProfiles::bundled().get(profile, cpi));
    nlohmann::json s = summarize_grid(g);
    s["global_monetary_loss"] = global_monetary_loss(g);
    return s.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("annual_devaluation", &annual_devaluation, py::arg("h"), py::arg("a"), py::arg("c"));
    m.def("implied_adjustment", &implied_adjustment, py::arg("h"), py::arg("d"), py::arg("c"));
    m.def("erosion_factor", &erosion_factor, py::arg("d"), py::arg("years"));
    m.def("average_retirement_erosion", &average_retirement_erosion, py::arg("d"), py::arg("career_years") = 40,
          py::arg("retirement_years") = 20);
    m.def("monte_carlo_devaluation", &monte_carlo_devaluation, py::arg("h"), py::arg("c"), py::arg("sigma"),
          py::arg("years"), py::arg("paths"), py::arg("seed"));
    m.def("weighted_quantile", &weighted_quantile, py::arg("values"), py::arg("weights"), py::arg("q"));

    m.def("_project", [](const std::string& body) { return reply_text(service::project(body)); });
    m.def("_presets", [] { return reply_text(service::presets()); });
    m.def("_erosion", [](const std::map<std::string, std::string>& q) { return reply_text(service::erosion(q)); });
    m.def("_schema", [] { return reply_text(service::schema()); });
    m.def("_replay_summary", &replay_summary, py::arg("heatmap") = "", py::arg("percent") = "", py::arg("money") = "");
    m.def("_cohort_summary", &cohort_summary, py::arg("cpi"), py::arg("rules_old") = "uss2021",
          py::arg("rules_new") = "uuk2021", py::arg("profile") = std::string(kModellerProfile), py::arg("heatmap") = "");
}
