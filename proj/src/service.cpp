#include "pensionlab/service.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "bundled_config.hpp"
#include "httplib.h"
#include "pensionlab/config.hpp"
#include "pensionlab/errors.hpp"
#include "pensionlab/projection.hpp"
#include "pensionlab/report.hpp"

namespace pensionlab::service {

using nlohmann::json;

namespace {

Reply error(int status, const std::string& field, const std::string& message) {
    return {status, {{"field", field}, {"message", message}}};
}

double get_number(const json& obj, const std::string& key, const std::string& path, double dflt, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw ValidationError(path, path + " is required");
        return dflt;
    }
    if (!it->is_number()) throw ValidationError(path, path + " must be a number");
    return it->get<double>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& dflt,
                       bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw ValidationError(path, path + " is required");
        return dflt;
    }
    if (!it->is_string()) throw ValidationError(path, path + " must be a string");
    return it->get<std::string>();
}

Date get_date(const json& obj, const std::string& key, const Date& dflt, bool required) {
    std::string s = get_string(obj, key, key, "", required);
    if (s.empty()) return dflt;
    try {
        return parse_date(s);
    } catch (const ValidationError& e) {
        throw ValidationError(key, e.what());
    }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ValidationError(prefix + it.key(), "unknown field '" + prefix + it.key() + "'");
    }
}

json trajectory(const ProjectionResult& r, Interpolation m) {
    json pts = json::array();
    auto tr = income_trajectory(r, m);
    for (int k = 0; k < 21; ++k) pts.push_back({{"age", 66 + k}, {"income", tr[k]}});
    return pts;
}

}  // namespace

Reply project(const std::string& request_body) {
    json req;
    try {
        req = json::parse(request_body);
    } catch (const json::parse_error& e) {
        return error(400, "body", std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object()) return error(400, "body", "request must be a JSON object");
    try {
        reject_unknown(req,
                       {"date_of_birth", "salary", "start_date", "retirement_age", "dc_option", "cpi", "rules_old",
                        "rules_new", "profile", "delay_years", "interpolation", "assumptions"},
                       "");
        MemberScenario s;
        s.date_of_birth = get_date(req, "date_of_birth", {}, true);
        s.salary = get_number(req, "salary", "salary", 0, true);
        s.start_date = get_date(req, "start_date", kReformDate, false);
        s.retirement_age = get_number(req, "retirement_age", "retirement_age", 66, false);
        const double cpi = get_number(req, "cpi", "cpi", 0.025, false);
        if (!(cpi >= kMinCpi && cpi <= kMaxCpi))
            throw ValidationError("cpi", "cpi must lie in [0, 0.05] (modeller range)");

        const auto& reg = PresetRegistry::bundled();
        const std::string old_id = get_string(req, "rules_old", "rules_old", "uss2021", false);
        const std::string new_id = get_string(req, "rules_new", "rules_new", "uuk2021", false);
        if (!reg.contains(old_id)) throw ValidationError("rules_old", "unknown rule preset '" + old_id + "'");
        if (!reg.contains(new_id)) throw ValidationError("rules_new", "unknown rule preset '" + new_id + "'");
        SchemeRules rules_old = reg.get(old_id);
        SchemeRules rules_new = reg.get(new_id);
        if (req.contains("delay_years")) {
            const auto& v = req["delay_years"];
            if (!v.is_number_integer() || v.get<long>() < 0)
                throw ValidationError("delay_years", "delay_years must be a non-negative integer");
            if (rules_new.cap_rule.kind != CapRule::Kind::Hard)
                throw ValidationError("delay_years", "delay_years needs a hard-cap rules_new");
            rules_new.cap_rule.delay_years = v.get<int>();
        }

        const std::string profile = get_string(req, "profile", "profile", kModellerProfile, false);
        if (!AssumptionProfiles::bundled().contains(profile))
            throw ValidationError("profile", "unknown assumptions profile '" + profile + "'");
        EconomicAssumptions a = AssumptionProfiles::bundled().get(profile, cpi);
        if (req.contains("assumptions")) {
            const json& o = req["assumptions"];
            if (!o.is_object()) throw ValidationError("assumptions", "assumptions must be an object");
            reject_unknown(o,
                           {"salary_growth", "dc_growth", "annuity_factor", "cpi_adjustment", "dc_contribution_rate",
                            "devaluation", "fixed_devaluation", "pre_reform_years", "modeller_rounding"},
                           "assumptions.");
            auto n = [&](const char* k, double cur) { return get_number(o, k, std::string("assumptions.") + k, cur, false); };
            a.salary_growth = n("salary_growth", a.salary_growth);
            a.dc_growth = n("dc_growth", a.dc_growth);
            a.annuity_factor = n("annuity_factor", a.annuity_factor);
            a.cpi_adjustment = n("cpi_adjustment", a.cpi_adjustment);
            a.dc_contribution_rate = n("dc_contribution_rate", a.dc_contribution_rate);
            a.fixed_devaluation = n("fixed_devaluation", a.fixed_devaluation);
            a.pre_reform_years = n("pre_reform_years", a.pre_reform_years);
            if (o.contains("devaluation")) {
                try {
                    a.devaluation_basis = parse_devaluation_basis(get_string(o, "devaluation", "assumptions.devaluation", "", true));
                } catch (const ValidationError& e) {
                    throw ValidationError("assumptions.devaluation", e.what());
                }
            }
            if (o.contains("modeller_rounding")) {
                if (!o["modeller_rounding"].is_boolean())
                    throw ValidationError("assumptions.modeller_rounding", "modeller_rounding must be a boolean");
                a.modeller_rounding = o["modeller_rounding"].get<bool>();
            }
            a.id = profile + "+overrides";
        }
        try {
            a.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(e.field() == "cpi" ? "cpi" : "assumptions." + e.field(), e.what());
        }

        const std::string dc = get_string(req, "dc_option", "dc_option", "annuity", false);
        s.dc_option = parse_dc_option(dc);
        s.validate();

        Comparison lin = compare_rules(s, rules_old, rules_new, a, Interpolation::Linear);
        LossMetrics geo = future_loss(lin.old_result, lin.new_result, Interpolation::Geometric);
        const Interpolation headline =
            parse_interpolation(get_string(req, "interpolation", "interpolation", "linear", false));
        const LossMetrics& chosen = headline == Interpolation::Linear ? lin.loss : geo;

        json body = {
            {"old", to_json(lin.old_result)},
            {"new", to_json(lin.new_result)},
            {"loss", {{"linear", to_json(lin.loss)}, {"geometric", to_json(geo)}}},
            {"percent_loss", chosen.percent_loss},
            {"monetary_loss", chosen.monetary_loss},
            {"trajectory", {{"old", trajectory(lin.old_result, headline)}, {"new", trajectory(lin.new_result, headline)}}},
            {"rules", {{"old", to_json(rules_old)}, {"new", to_json(rules_new)}}},
            {"assumptions",
             {{"id", a.id},
              {"cpi", a.cpi_mean},
              {"salary_growth", a.salary_growth},
              {"dc_growth", a.dc_growth},
              {"annuity_factor", a.annuity_factor},
              {"cpi_adjustment", a.cpi_adjustment},
              {"dc_contribution_rate", a.dc_contribution_rate},
              {"devaluation", to_string(a.devaluation_basis)},
              {"devaluation_rate", tranche_devaluation(rules_new, a)},
              {"pre_reform_years", a.pre_reform_years},
              {"modeller_rounding", a.modeller_rounding}}},
        };
        return {200, body};
    } catch (const UnsupportedOption& e) {
        return error(422, e.field(), e.what());
    } catch (const ValidationError& e) {
        return error(400, e.field(), e.what());
    }
}

Reply presets() {
    json arr = json::array();
    for (const auto& r : PresetRegistry::bundled().all()) arr.push_back(to_json(r));
    return {200, {{"presets", arr}}};
}

Reply erosion(const std::map<std::string, std::string>& query) {
    auto parse = [&](const std::string& key, double& out) {
        auto it = query.find(key);
        if (it == query.end()) throw ValidationError(key, key + " is required");
        std::size_t pos = 0;
        try {
            out = std::stod(it->second, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != it->second.size() || !std::isfinite(out)) throw ValidationError(key, key + " must be a number");
    };
    try {
        double d = 0, years = 0;
        parse("d", d);
        parse("years", years);
        if (!(d < 1) || d < 0) throw ValidationError("d", "d must lie in [0, 1)");
        if (years < 0 || years > 200 || years != std::floor(years))
            throw ValidationError("years", "years must be an integer in [0, 200]");
        json pts = json::array();
        for (int n = 0; n <= static_cast<int>(years); ++n) pts.push_back({{"n", n}, {"factor", erosion_factor(d, n)}});
        return {200, {{"d", d}, {"years", static_cast<int>(years)}, {"points", pts}}};
    } catch (const ValidationError& e) {
        return error(400, e.field(), e.what());
    }
}

Reply schema() { return {200, json::parse(kApiSchema)}; }

int port_from_env() {
    const char* env = std::getenv("PENSIONLAB_PORT");
    if (!env || !*env) return kDefaultPort;
    char* end = nullptr;
    long p = std::strtol(env, &end, 10);
    if (*end || p <= 0 || p > 65535) throw ValidationError("PENSIONLAB_PORT", "PENSIONLAB_PORT must be a port number");
    return static_cast<int>(p);
}

struct Server::Impl {
    httplib::Server srv;
};

Server::Server() : impl_(std::make_unique<Impl>()) {
    httplib::Server& srv = impl_->srv;
    const char* origin_env = std::getenv("PENSIONLAB_CORS_ORIGIN");
    const std::string origin = origin_env && *origin_env ? origin_env : "*";

    srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    auto send = [](httplib::Response& res, const Reply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    srv.Post("/api/project", [send](const httplib::Request& req, httplib::Response& res) { send(res, project(req.body)); });
    srv.Get("/api/presets", [send](const httplib::Request&, httplib::Response& res) { send(res, presets()); });
    srv.Get("/api/schema", [send](const httplib::Request&, httplib::Response& res) { send(res, schema()); });
    srv.Get("/api/erosion", [send](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> q;
        for (const auto& [k, v] : req.params) q[k] = v;
        send(res, erosion(q));
    });
    srv.set_error_handler([send](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404) send(res, error(404, "path", "no route for " + req.path));
    });
    srv.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string msg = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            msg = e.what();
        } catch (...) {
        }
        send(res, error(500, "server", msg));
    });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    if (port == 0) return impl_->srv.bind_to_any_port(host);
    return impl_->srv.bind_to_port(host, port) ? port : -1;
}

bool Server::run() { return impl_->srv.listen_after_bind(); }

void Server::stop() { impl_->srv.stop(); }

bool serve(const std::string& host, int port) {
    Server s;
    const int bound = s.bind(host, port);
    if (bound < 0) return false;
    std::cerr << "pensionlab: listening on " << host << ":" << bound << "\n";
    return s.run();
}

}  // namespace pensionlab::service
