#include "pensionlab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "bundled_config.hpp"
#include "pensionlab/errors.hpp"

namespace pensionlab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::string& need(const ConfigSection& s, const std::string& section, const std::string& key) {
    auto it = s.find(key);
    if (it == s.end()) throw ParseError("[" + section + "] missing key '" + key + "'");
    return it->second;
}

double num(const std::string& section, const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw ParseError("[" + section + "] " + key + ": not a number: '" + v + "'");
    return x;
}

double num_or(const ConfigSection& s, const std::string& section, const std::string& key, double dflt) {
    auto it = s.find(key);
    return it == s.end() ? dflt : num(section, key, it->second);
}

bool flag(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("[" + section + "] " + key + ": expected true/false");
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
    ConfigFile out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError("line " + std::to_string(lineno) + ": bad section header");
            out.emplace_back(trim(line.substr(1, line.size() - 2)), ConfigSection{});
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos || out.empty())
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value inside a section");
        out.back().second[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

PresetRegistry PresetRegistry::from_config(const ConfigFile& cfg) {
    PresetRegistry reg;
    for (const auto& [id, s] : cfg) {
        SchemeRules r;
        r.id = id;
        r.label = s.count("label") ? s.at("label") : id;
        r.accrual_denominator = static_cast<int>(num(id, "accrual_denominator", need(s, id, "accrual_denominator")));
        r.db_dc_threshold = num(id, "db_dc_threshold", need(s, id, "db_dc_threshold"));
        const auto& ti = need(s, id, "threshold_indexation");
        if (ti == "full_cpi") {
            r.threshold_indexation = ThresholdIndexation::FullCPI;
        } else if (ti == "capped_cpi") {
            r.threshold_indexation = ThresholdIndexation::CappedCPI;
            r.threshold_cap = num(id, "threshold_cap", need(s, id, "threshold_cap"));
        } else {
            throw ParseError("[" + id + "] threshold_indexation must be full_cpi or capped_cpi");
        }
        const auto& cap = need(s, id, "cap");
        if (cap == "soft") {
            r.cap_rule = CapRule::soft(num_or(s, id, "full_match_to", 0.05), num_or(s, id, "half_match_to", 0.15),
                                       num_or(s, id, "max_uplift", 0.10));
        } else if (cap == "hard") {
            r.cap_rule = CapRule::hard(num(id, "cap_rate", need(s, id, "cap_rate")),
                                       static_cast<int>(num_or(s, id, "delay_years", 0)));
        } else {
            throw ParseError("[" + id + "] cap must be soft or hard");
        }
        r.employer_rate = num_or(s, id, "employer_rate", 0);
        r.member_rate = num_or(s, id, "member_rate", 0);
        try {
            r.validate();
        } catch (const ValidationError& e) {
            throw ParseError("[" + id + "] " + e.what());
        }
        if (reg.contains(id)) throw ParseError("duplicate preset '" + id + "'");
        reg.presets_.push_back(r);
    }
    return reg;
}

const PresetRegistry& PresetRegistry::bundled() {
    static const PresetRegistry reg = [] {
        std::istringstream in(bundled_presets_text());
        return from_config(parse_config(in));
    }();
    return reg;
}

const SchemeRules& PresetRegistry::get(const std::string& id) const {
    for (const auto& p : presets_)
        if (p.id == id) return p;
    throw ValidationError("rules", "unknown rule preset '" + id + "'");
}

bool PresetRegistry::contains(const std::string& id) const {
    return std::any_of(presets_.begin(), presets_.end(), [&](const auto& p) { return p.id == id; });
}

AssumptionProfiles AssumptionProfiles::from_config(const ConfigFile& cfg) {
    AssumptionProfiles out;
    for (const auto& [name, s] : cfg) {
        EconomicAssumptions a;
        a.id = name;
        a.cpi_mean = num_or(s, name, "cpi", a.cpi_mean);
        a.salary_growth = num_or(s, name, "salary_growth", a.salary_growth);
        a.dc_growth = num_or(s, name, "dc_growth", a.dc_growth);
        a.annuity_factor = num_or(s, name, "annuity_factor", a.annuity_factor);
        a.cpi_adjustment = num_or(s, name, "cpi_adjustment", a.cpi_adjustment);
        a.dc_contribution_rate = num_or(s, name, "dc_contribution_rate", a.dc_contribution_rate);
        a.fixed_devaluation = num_or(s, name, "fixed_devaluation", a.fixed_devaluation);
        a.pre_reform_years = num_or(s, name, "pre_reform_years", a.pre_reform_years);
        if (s.count("devaluation")) a.devaluation_basis = parse_devaluation_basis(s.at("devaluation"));
        if (s.count("modeller_rounding")) a.modeller_rounding = flag(name, "modeller_rounding", s.at("modeller_rounding"));
        try {
            a.validate();
        } catch (const ValidationError& e) {
            throw ParseError("[" + name + "] " + e.what());
        }
        out.profiles_.push_back(a);
    }
    return out;
}

const AssumptionProfiles& AssumptionProfiles::bundled() {
    static const AssumptionProfiles p = [] {
        std::istringstream in(bundled_assumptions_text());
        return from_config(parse_config(in));
    }();
    return p;
}

EconomicAssumptions AssumptionProfiles::get(const std::string& name, double cpi) const {
    for (auto a : profiles_)
        if (a.id == name) {
            a.cpi_mean = cpi;
            return a;
        }
    throw ValidationError("profile", "unknown assumptions profile '" + name + "'");
}

bool AssumptionProfiles::contains(const std::string& name) const {
    return std::any_of(profiles_.begin(), profiles_.end(), [&](const auto& a) { return a.id == name; });
}

std::vector<std::string> AssumptionProfiles::names() const {
    std::vector<std::string> out;
    for (const auto& a : profiles_) out.push_back(a.id);
    return out;
}

const std::string& bundled_presets_text() {
    static const std::string s = kBundledPresets;
    return s;
}

const std::string& bundled_assumptions_text() {
    static const std::string s = kBundledAssumptions;
    return s;
}

std::string data_dir() {
    if (const char* env = std::getenv("PENSIONLAB_DATA"); env && *env) return env;
    return PENSIONLAB_DATA_DIR;
}

}  // namespace pensionlab
