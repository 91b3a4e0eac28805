#include "entsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "entsim/csv.hpp"

namespace entsim {

namespace {

using nlohmann::json;

constexpr double k_pi = 3.14159265358979323846;

// canonical units: nm, mm, m, um, ps, s, deg, rad, 1, 1/s
enum class Dim { LengthNm, LengthMm, LengthM, LengthUm, TimePs, TimeS, AngleDeg, AngleRad, One, PerSecond };

const char* dim_desc(Dim d) {
    switch (d) {
        case Dim::LengthNm:
        case Dim::LengthMm:
        case Dim::LengthM:
        case Dim::LengthUm: return "length";
        case Dim::TimePs:
        case Dim::TimeS: return "time";
        case Dim::AngleDeg:
        case Dim::AngleRad: return "angle";
        case Dim::One: return "dimensionless ('1')";
        case Dim::PerSecond: return "rate ('1/s')";
    }
    return "?";
}

std::optional<double> unit_factor(Dim d, const std::string& u) {
    auto pick = [&](std::initializer_list<std::pair<const char*, double>> table)
        -> std::optional<double> {
        for (const auto& [name, f] : table)
            if (u == name) return f;
        return std::nullopt;
    };
    switch (d) {
        case Dim::LengthNm: return pick({{"nm", 1.0}, {"pm", 1e-3}, {"um", 1e3}});
        case Dim::LengthMm: return pick({{"mm", 1.0}, {"cm", 10.0}, {"m", 1e3}, {"um", 1e-3}});
        case Dim::LengthM: return pick({{"m", 1.0}, {"mm", 1e-3}, {"cm", 1e-2}, {"km", 1e3}});
        case Dim::LengthUm: return pick({{"um", 1.0}, {"nm", 1e-3}, {"mm", 1e3}});
        case Dim::TimePs: return pick({{"ps", 1.0}, {"fs", 1e-3}, {"ns", 1e3}, {"s", 1e12}});
        case Dim::TimeS: return pick({{"s", 1.0}, {"ms", 1e-3}});
        case Dim::AngleDeg: return pick({{"deg", 1.0}, {"rad", 180.0 / k_pi}});
        case Dim::AngleRad: return pick({{"rad", 1.0}, {"deg", k_pi / 180.0}});
        case Dim::One: return pick({{"1", 1.0}});
        case Dim::PerSecond: return pick({{"1/s", 1.0}, {"Hz", 1.0}});
    }
    return std::nullopt;
}

struct Ctx {
    std::vector<ConfigError> errors;

    void err(const std::string& path, const std::string& message) {
        errors.push_back({path, message});
    }
};

std::string join_path(const std::string& parent, const char* key) {
    return parent.empty() ? std::string(key) : parent + "." + key;
}

const json* get_member(Ctx& ctx, const json& obj, const std::string& parent, const char* key,
                       bool required) {
    if (!obj.contains(key)) {
        if (required) ctx.err(join_path(parent, key), "missing required field");
        return nullptr;
    }
    return &obj.at(key);
}

void check_unknown(Ctx& ctx, const json& obj, const std::string& path,
                   std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) ctx.err(join_path(path, it.key().c_str()), "unknown field");
    }
}

// {value, unit} pair -> canonical units
double quantity(Ctx& ctx, const json& obj, const std::string& parent, const char* key, Dim dim,
                bool required = true, double fallback = 0.0) {
    const json* m = get_member(ctx, obj, parent, key, required);
    if (!m) return fallback;
    const std::string path = join_path(parent, key);
    if (!m->is_object()) {
        ctx.err(path, "expected an object of the form {\"value\": <number>, \"unit\": <string>}");
        return fallback;
    }
    check_unknown(ctx, *m, path, {"value", "unit"});
    if (!m->contains("value") || !(*m)["value"].is_number()) {
        ctx.err(path, "missing or non-numeric 'value'");
        return fallback;
    }
    if (!m->contains("unit") || !(*m)["unit"].is_string()) {
        ctx.err(path, "missing or non-string 'unit'");
        return fallback;
    }
    const std::string u = (*m)["unit"].get<std::string>();
    const auto factor = unit_factor(dim, u);
    if (!factor) {
        ctx.err(path, "unit '" + u + "' is not a valid " + dim_desc(dim) + " unit here");
        return fallback;
    }
    return (*m)["value"].get<double>() * *factor;
}

std::string get_string(Ctx& ctx, const json& obj, const std::string& parent, const char* key,
                       const std::string& fallback = {}) {
    const json* m = get_member(ctx, obj, parent, key, true);
    if (!m) return fallback;
    if (!m->is_string()) {
        ctx.err(join_path(parent, key), "expected a string");
        return fallback;
    }
    return m->get<std::string>();
}

long long get_integer(Ctx& ctx, const json& obj, const std::string& parent, const char* key,
                      long long fallback) {
    const json* m = get_member(ctx, obj, parent, key, true);
    if (!m) return fallback;
    if (!m->is_number_integer() && !m->is_number_unsigned()) {
        ctx.err(join_path(parent, key), "expected an integer");
        return fallback;
    }
    return m->get<long long>();
}

SplitterParams parse_splitter(Ctx& ctx, const json& obj, const std::string& path) {
    SplitterParams s;
    check_unknown(ctx, obj, path, {"t_h", "t_v"});
    s.t_h = quantity(ctx, obj, path, "t_h", Dim::One, true, s.t_h);
    s.t_v = quantity(ctx, obj, path, "t_v", Dim::One, true, s.t_v);
    return s;
}

PumpConfig parse_pump(Ctx& ctx, const json& obj, const std::string& path) {
    PumpConfig p;
    check_unknown(ctx, obj, path,
                  {"center_wavelength", "bandwidth_fwhm", "phase", "weight_1", "weight_2",
                   "regime", "cw_linewidth_floor"});
    p.center_wavelength =
        quantity(ctx, obj, path, "center_wavelength", Dim::LengthNm, true, p.center_wavelength);
    p.bandwidth_fwhm =
        quantity(ctx, obj, path, "bandwidth_fwhm", Dim::LengthNm, true, p.bandwidth_fwhm);
    p.phase = quantity(ctx, obj, path, "phase", Dim::AngleRad, true, p.phase);
    p.weight_1 = quantity(ctx, obj, path, "weight_1", Dim::One, true, p.weight_1);
    p.weight_2 = quantity(ctx, obj, path, "weight_2", Dim::One, true, p.weight_2);
    const std::string regime = get_string(ctx, obj, path, "regime", "pulsed");
    if (regime == "pulsed") p.regime = PumpConfig::Regime::Pulsed;
    else if (regime == "cw") p.regime = PumpConfig::Regime::Cw;
    else ctx.err(join_path(path, "regime"), "must be 'pulsed' or 'cw', got '" + regime + "'");
    if (obj.contains("cw_linewidth_floor"))
        p.cw_linewidth_floor = quantity(ctx, obj, path, "cw_linewidth_floor", Dim::LengthNm, false,
                                        p.cw_linewidth_floor);
    return p;
}

PhaseMatchingSpec parse_pm(Ctx& ctx, const json& obj, const std::string& path) {
    PhaseMatchingSpec pm;
    check_unknown(ctx, obj, path, {"center_wavelength", "fwhm", "orientation", "profile"});
    pm.center_wavelength =
        quantity(ctx, obj, path, "center_wavelength", Dim::LengthNm, true, pm.center_wavelength);
    pm.fwhm = quantity(ctx, obj, path, "fwhm", Dim::LengthNm, true, pm.fwhm);
    pm.orientation_deg =
        quantity(ctx, obj, path, "orientation", Dim::AngleDeg, true, pm.orientation_deg);
    const std::string profile = get_string(ctx, obj, path, "profile", "sinc_squared_amplitude");
    if (profile == "sinc_squared_amplitude") pm.profile = PmProfile::SincSquaredAmplitude;
    else if (profile == "gaussian") pm.profile = PmProfile::Gaussian;
    else
        ctx.err(join_path(path, "profile"),
                "must be 'sinc_squared_amplitude' or 'gaussian', got '" + profile + "'");
    return pm;
}

FilterSpec parse_filter(Ctx& ctx, const json& obj, const std::string& path) {
    FilterSpec f{1554.44, 0.25, FilterShape::Rectangular};
    check_unknown(ctx, obj, path, {"center_wavelength", "bandwidth_fwhm", "shape"});
    f.center_wavelength =
        quantity(ctx, obj, path, "center_wavelength", Dim::LengthNm, true, f.center_wavelength);
    f.bandwidth_fwhm =
        quantity(ctx, obj, path, "bandwidth_fwhm", Dim::LengthNm, true, f.bandwidth_fwhm);
    const std::string shape = get_string(ctx, obj, path, "shape", "rectangular");
    if (shape == "rectangular") f.shape = FilterShape::Rectangular;
    else if (shape == "gaussian") f.shape = FilterShape::Gaussian;
    else ctx.err(join_path(path, "shape"), "must be 'rectangular' or 'gaussian', got '" + shape + "'");
    return f;
}

WalkoffSpec parse_walkoff(Ctx& ctx, const json& obj, const std::string& path,
                          std::optional<Meters>& fiber_override) {
    WalkoffSpec w;
    check_unknown(ctx, obj, path,
                  {"group_indices", "delta_group_index", "chip_length", "poled_length",
                   "fiber_birefringence", "coherence_time", "fiber_length_override"});
    const bool has_pair = obj.contains("group_indices");
    const bool has_delta = obj.contains("delta_group_index");
    if (has_pair == has_delta) {
        ctx.err(path, "exactly one of 'group_indices' and 'delta_group_index' must be given");
    } else if (has_pair) {
        const json& gi = obj.at("group_indices");
        const std::string gpath = join_path(path, "group_indices");
        if (!gi.is_object()) {
            ctx.err(gpath, "expected an object with 'horizontal' and 'vertical'");
        } else {
            check_unknown(ctx, gi, gpath, {"horizontal", "vertical"});
            const double h = quantity(ctx, gi, gpath, "horizontal", Dim::One, true, 0.0);
            const double v = quantity(ctx, gi, gpath, "vertical", Dim::One, true, 0.0);
            w.group_indices = std::make_pair(h, v);
        }
    } else {
        w.delta_group_index = quantity(ctx, obj, path, "delta_group_index", Dim::One, true, 0.0);
    }
    w.chip_length = Millimeters{quantity(ctx, obj, path, "chip_length", Dim::LengthMm, true, 0.0)};
    w.poled_length = Millimeters{quantity(ctx, obj, path, "poled_length", Dim::LengthMm, true, 0.0)};
    w.fiber_birefringence = quantity(ctx, obj, path, "fiber_birefringence", Dim::One, true, 0.0);
    w.coherence_time = Picoseconds{quantity(ctx, obj, path, "coherence_time", Dim::TimePs, true, 0.0)};
    if (obj.contains("fiber_length_override"))
        fiber_override =
            Meters{quantity(ctx, obj, path, "fiber_length_override", Dim::LengthM, false, 0.0)};
    return w;
}

ChipGeometry parse_chip(Ctx& ctx, const json& obj, const std::string& path) {
    ChipGeometry g;
    check_unknown(ctx, obj, path,
                  {"poling_period", "waveguide_width", "coupler_length", "branch_angle",
                   "input_pitch", "output_pitch"});
    g.poling_period_um =
        quantity(ctx, obj, path, "poling_period", Dim::LengthUm, true, g.poling_period_um);
    g.waveguide_width_um =
        quantity(ctx, obj, path, "waveguide_width", Dim::LengthUm, true, g.waveguide_width_um);
    g.coupler_length_um =
        quantity(ctx, obj, path, "coupler_length", Dim::LengthUm, true, g.coupler_length_um);
    g.branch_angle_deg =
        quantity(ctx, obj, path, "branch_angle", Dim::AngleDeg, true, g.branch_angle_deg);
    g.input_pitch_um = quantity(ctx, obj, path, "input_pitch", Dim::LengthUm, true, g.input_pitch_um);
    g.output_pitch_um =
        quantity(ctx, obj, path, "output_pitch", Dim::LengthUm, true, g.output_pitch_um);
    return g;
}

DetectionConfig parse_detection(Ctx& ctx, const json& obj, const std::string& path) {
    DetectionConfig d;
    check_unknown(ctx, obj, path,
                  {"mean_total", "background_rate", "integration_seconds", "seed", "n_bootstrap"});
    d.mean_total = quantity(ctx, obj, path, "mean_total", Dim::One, true, d.mean_total);
    d.background_rate =
        quantity(ctx, obj, path, "background_rate", Dim::PerSecond, true, d.background_rate);
    d.integration_seconds =
        quantity(ctx, obj, path, "integration_seconds", Dim::TimeS, true, d.integration_seconds);
    const long long seed = get_integer(ctx, obj, path, "seed", (long long)d.seed);
    if (seed < 0) ctx.err(join_path(path, "seed"), "must be nonnegative");
    else d.seed = std::uint64_t(seed);
    d.n_bootstrap = int(get_integer(ctx, obj, path, "n_bootstrap", d.n_bootstrap));
    return d;
}

json quantity_json(double value, const char* unit) {
    return json{{"value", value}, {"unit", unit}};
}

} // namespace

void ChipGeometry::validate() const {
    for (double v : {poling_period_um, waveguide_width_um, coupler_length_um, input_pitch_um,
                     output_pitch_um})
        if (!(v > 0.0)) throw std::invalid_argument("chip_geometry lengths must be positive");
    if (!(branch_angle_deg > 0.0 && branch_angle_deg < 90.0))
        throw std::invalid_argument("chip_geometry.branch_angle must lie in (0, 90) degrees");
}

void DetectionConfig::validate() const {
    if (!(mean_total > 0.0)) throw std::invalid_argument("detection.mean_total must be positive");
    if (!(background_rate >= 0.0))
        throw std::invalid_argument("detection.background_rate must be nonnegative");
    if (!(integration_seconds > 0.0))
        throw std::invalid_argument("detection.integration_seconds must be positive");
    if (n_bootstrap < 100)
        throw std::invalid_argument("detection.n_bootstrap must be at least 100");
}

void SourceConfig::validate() const {
    splitter.validate();
    pump.validate();
    pm_wg1.validate();
    pm_wg2.validate();
    if (filters) {
        filters->first.validate();
        filters->second.validate();
    }
    walkoff.validate();
    if (fiber_length_override && !(fiber_length_override->value >= 0.0))
        throw std::invalid_argument("walkoff.fiber_length_override must be nonnegative");
    chip_geometry.validate();
    detection.validate();
}

SourceConfig default_config() {
    SourceConfig c;
    c.splitter = SplitterParams{0.996, 0.032};

    c.pump.phase = 0.0;
    c.pump.weight_1 = 1.0;
    c.pump.weight_2 = 1.0;
    c.pump.center_wavelength = 777.22;
    c.pump.bandwidth_fwhm = 0.3;
    c.pump.regime = PumpConfig::Regime::Pulsed;
    c.pump.cw_linewidth_floor = 1e-3;

    c.pm_wg1 = PhaseMatchingSpec{1554.44, 0.306, -33.5, PmProfile::SincSquaredAmplitude};
    c.pm_wg2 = PhaseMatchingSpec{1554.44, 0.359, -33.5, PmProfile::SincSquaredAmplitude};

    c.filters = std::make_pair(FilterSpec{1554.44, 0.25, FilterShape::Rectangular},
                               FilterSpec{1554.44, 0.25, FilterShape::Rectangular});

    c.walkoff.delta_group_index = 0.07544;
    c.walkoff.chip_length = Millimeters{49.0};
    c.walkoff.poled_length = Millimeters{24.0};
    c.walkoff.fiber_birefringence = 4.016e-4;
    c.walkoff.coherence_time = Picoseconds{6.04};

    c.chip_geometry = ChipGeometry{};
    c.detection = DetectionConfig{};
    return c;
}

ConfigResult validate_config_json(const nlohmann::json& doc) {
    Ctx ctx;
    SourceConfig cfg;
    if (!doc.is_object()) {
        ctx.err("", "top-level document must be a JSON object");
        return {std::nullopt, std::move(ctx.errors)};
    }
    check_unknown(ctx, doc, "",
                  {"splitter", "pump", "pm_wg1", "pm_wg2", "filters", "walkoff", "chip_geometry",
                   "detection"});

    struct Section {
        const char* key;
        bool required;
    };
    auto section = [&](const char* key, bool required) -> const json* {
        const json* s = get_member(ctx, doc, "", key, required);
        if (s && !s->is_object()) {
            ctx.err(key, "expected an object");
            return nullptr;
        }
        return s;
    };

    if (const json* s = section("splitter", true)) cfg.splitter = parse_splitter(ctx, *s, "splitter");
    if (const json* s = section("pump", true)) cfg.pump = parse_pump(ctx, *s, "pump");
    if (const json* s = section("pm_wg1", true)) cfg.pm_wg1 = parse_pm(ctx, *s, "pm_wg1");
    if (const json* s = section("pm_wg2", true)) cfg.pm_wg2 = parse_pm(ctx, *s, "pm_wg2");
    if (const json* s = section("filters", false)) {
        check_unknown(ctx, *s, "filters", {"signal", "idler"});
        const json* fs = get_member(ctx, *s, "filters", "signal", true);
        const json* fi = get_member(ctx, *s, "filters", "idler", true);
        FilterSpec a, b;
        if (fs && fs->is_object()) a = parse_filter(ctx, *fs, "filters.signal");
        else if (fs) ctx.err("filters.signal", "expected an object");
        if (fi && fi->is_object()) b = parse_filter(ctx, *fi, "filters.idler");
        else if (fi) ctx.err("filters.idler", "expected an object");
        if (fs && fi) cfg.filters = std::make_pair(a, b);
    }
    if (const json* s = section("walkoff", true))
        cfg.walkoff = parse_walkoff(ctx, *s, "walkoff", cfg.fiber_length_override);
    if (const json* s = section("chip_geometry", true))
        cfg.chip_geometry = parse_chip(ctx, *s, "chip_geometry");
    if (const json* s = section("detection", true))
        cfg.detection = parse_detection(ctx, *s, "detection");

    if (ctx.errors.empty()) {
        // structural parse clean; now the semantic invariants
        auto semantic = [&](const char* path, auto&& fn) {
            try {
                fn();
            } catch (const std::exception& e) {
                ctx.err(path, e.what());
            }
        };
        semantic("splitter", [&] { cfg.splitter.validate(); });
        semantic("pump", [&] { cfg.pump.validate(); });
        semantic("pm_wg1", [&] { cfg.pm_wg1.validate(); });
        semantic("pm_wg2", [&] { cfg.pm_wg2.validate(); });
        if (cfg.filters) {
            semantic("filters.signal", [&] { cfg.filters->first.validate(); });
            semantic("filters.idler", [&] { cfg.filters->second.validate(); });
        }
        semantic("walkoff", [&] { cfg.walkoff.validate(); });
        semantic("chip_geometry", [&] { cfg.chip_geometry.validate(); });
        semantic("detection", [&] { cfg.detection.validate(); });
        if (cfg.fiber_length_override && !(cfg.fiber_length_override->value >= 0.0))
            ctx.err("walkoff.fiber_length_override", "must be nonnegative");
    }

    if (!ctx.errors.empty()) return {std::nullopt, std::move(ctx.errors)};
    return {std::move(cfg), {}};
}

ConfigResult validate_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        return {std::nullopt, {{"", std::string("invalid JSON: ") + e.what()}}};
    }
    return validate_config_json(doc);
}

SourceConfig load_config(const std::string& path) {
    ConfigResult r = validate_config(csv::read_text_file(path));
    if (!r.ok()) {
        std::string msg = "config '" + path + "' is invalid:";
        for (const auto& e : r.errors) msg += "\n  " + e.format();
        throw std::runtime_error(msg);
    }
    return *std::move(r.config);
}

nlohmann::json config_to_json(const SourceConfig& c) {
    json pump = {
        {"center_wavelength", quantity_json(c.pump.center_wavelength, "nm")},
        {"bandwidth_fwhm", quantity_json(c.pump.bandwidth_fwhm, "nm")},
        {"phase", quantity_json(c.pump.phase, "rad")},
        {"weight_1", quantity_json(c.pump.weight_1, "1")},
        {"weight_2", quantity_json(c.pump.weight_2, "1")},
        {"regime", c.pump.regime == PumpConfig::Regime::Cw ? "cw" : "pulsed"},
        {"cw_linewidth_floor", quantity_json(c.pump.cw_linewidth_floor, "nm")},
    };
    auto pm_json = [](const PhaseMatchingSpec& pm) {
        return json{
            {"center_wavelength", quantity_json(pm.center_wavelength, "nm")},
            {"fwhm", quantity_json(pm.fwhm, "nm")},
            {"orientation", quantity_json(pm.orientation_deg, "deg")},
            {"profile",
             pm.profile == PmProfile::Gaussian ? "gaussian" : "sinc_squared_amplitude"},
        };
    };
    auto filter_json = [](const FilterSpec& f) {
        return json{
            {"center_wavelength", quantity_json(f.center_wavelength, "nm")},
            {"bandwidth_fwhm", quantity_json(f.bandwidth_fwhm, "nm")},
            {"shape", f.shape == FilterShape::Gaussian ? "gaussian" : "rectangular"},
        };
    };
    json walkoff = {
        {"chip_length", quantity_json(c.walkoff.chip_length.value, "mm")},
        {"poled_length", quantity_json(c.walkoff.poled_length.value, "mm")},
        {"fiber_birefringence", quantity_json(c.walkoff.fiber_birefringence, "1")},
        {"coherence_time", quantity_json(c.walkoff.coherence_time.value, "ps")},
    };
    if (c.walkoff.group_indices) {
        walkoff["group_indices"] = json{
            {"horizontal", quantity_json(c.walkoff.group_indices->first, "1")},
            {"vertical", quantity_json(c.walkoff.group_indices->second, "1")},
        };
    } else if (c.walkoff.delta_group_index) {
        walkoff["delta_group_index"] = quantity_json(*c.walkoff.delta_group_index, "1");
    }
    if (c.fiber_length_override)
        walkoff["fiber_length_override"] = quantity_json(c.fiber_length_override->value, "m");

    json doc = {
        {"splitter",
         {{"t_h", quantity_json(c.splitter.t_h, "1")}, {"t_v", quantity_json(c.splitter.t_v, "1")}}},
        {"pump", pump},
        {"pm_wg1", pm_json(c.pm_wg1)},
        {"pm_wg2", pm_json(c.pm_wg2)},
        {"walkoff", walkoff},
        {"chip_geometry",
         {
             {"poling_period", quantity_json(c.chip_geometry.poling_period_um, "um")},
             {"waveguide_width", quantity_json(c.chip_geometry.waveguide_width_um, "um")},
             {"coupler_length", quantity_json(c.chip_geometry.coupler_length_um, "um")},
             {"branch_angle", quantity_json(c.chip_geometry.branch_angle_deg, "deg")},
             {"input_pitch", quantity_json(c.chip_geometry.input_pitch_um, "um")},
             {"output_pitch", quantity_json(c.chip_geometry.output_pitch_um, "um")},
         }},
        {"detection",
         {
             {"mean_total", quantity_json(c.detection.mean_total, "1")},
             {"background_rate", quantity_json(c.detection.background_rate, "1/s")},
             {"integration_seconds", quantity_json(c.detection.integration_seconds, "s")},
             {"seed", c.detection.seed},
             {"n_bootstrap", c.detection.n_bootstrap},
         }},
    };
    if (c.filters)
        doc["filters"] = json{{"signal", filter_json(c.filters->first)},
                              {"idler", filter_json(c.filters->second)}};
    return doc;
}

std::string config_to_text(const SourceConfig& config) {
    return config_to_json(config).dump(2) + "\n";
}

} // namespace entsim
