#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pensionlab/scheme_core.hpp"

namespace pensionlab {

// INI-style key-value text: `[section]` headers, `key = value` lines,
// `#` comments.
using ConfigSection = std::map<std::string, std::string>;
using ConfigFile = std::vector<std::pair<std::string, ConfigSection>>;

ConfigFile parse_config(std::istream& in);

class PresetRegistry {
public:
    static PresetRegistry from_config(const ConfigFile& cfg);
    // The presets file compiled into the library.
    static const PresetRegistry& bundled();

    const SchemeRules& get(const std::string& id) const;
    bool contains(const std::string& id) const;
    const std::vector<SchemeRules>& all() const { return presets_; }

private:
    std::vector<SchemeRules> presets_;
};

class AssumptionProfiles {
public:
    static AssumptionProfiles from_config(const ConfigFile& cfg);
    static const AssumptionProfiles& bundled();

    // Copy of the named profile with cpi_mean set.
    EconomicAssumptions get(const std::string& name, double cpi) const;
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::vector<EconomicAssumptions> profiles_;
};

// "published": the modeller's stated inputs (AF 40, no pre-reform year).
// "modeller": calibrated emulation of the modeller's grid output.
inline constexpr const char* kPublishedProfile = "published";
inline constexpr const char* kModellerProfile = "modeller";

const std::string& bundled_presets_text();
const std::string& bundled_assumptions_text();

// Directory holding the heat map and golden grids: $PENSIONLAB_DATA, else the
// source tree's data/ directory.
std::string data_dir();

}  // namespace pensionlab
