#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "entsim/polarization.hpp"
#include "entsim/spectral.hpp"
#include "entsim/temporal.hpp"
#include "entsim/units.hpp"

namespace entsim {

// layout metadata carried through configs and reports; nothing downstream
// consumes it numerically
struct ChipGeometry {
    double poling_period_um = 9.08;
    double waveguide_width_um = 7.0;
    double coupler_length_um = 480.0;
    double branch_angle_deg = 0.6;
    double input_pitch_um = 80.0;
    double output_pitch_um = 127.0;

    void validate() const;
};

struct DetectionConfig {
    double mean_total = 1e5;          // expected coincidences over the whole run
    double background_rate = 0.0;     // accidental coincidences per second, per setting
    double integration_seconds = 1.0; // per setting
    std::uint64_t seed = 12345;
    int n_bootstrap = 200;

    void validate() const;
};

struct SourceConfig {
    SplitterParams splitter;
    PumpConfig pump;
    PhaseMatchingSpec pm_wg1;
    PhaseMatchingSpec pm_wg2;
    std::optional<std::pair<FilterSpec, FilterSpec>> filters; // signal, idler
    WalkoffSpec walkoff;
    std::optional<Meters> fiber_length_override;
    ChipGeometry chip_geometry;
    DetectionConfig detection;

    void validate() const;
};

// the published device: 99.6%/3.2% splitter, 777.22 nm pulsed pump,
// 0.306/0.359 nm phase matching at 1554.44 nm, 0.25 nm rectangular filters
SourceConfig default_config();

struct ConfigError {
    std::string path;    // dotted field path, e.g. "pump.phase"
    std::string message;

    std::string format() const { return path + ": " + message; }
};

struct ConfigResult {
    std::optional<SourceConfig> config; // engaged iff errors empty
    std::vector<ConfigError> errors;

    bool ok() const { return errors.empty(); }
};

// parses and checks a config document, collecting every problem found rather
// than stopping at the first; config is only populated when errors is empty
ConfigResult validate_config(const std::string& json_text);
ConfigResult validate_config_json(const nlohmann::json& doc);

// throws std::runtime_error listing all errors
SourceConfig load_config(const std::string& path);

nlohmann::json config_to_json(const SourceConfig& config);
std::string config_to_text(const SourceConfig& config);

} // namespace entsim
