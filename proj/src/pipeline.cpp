#include "entsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "entsim/csv.hpp"
#include "entsim/random.hpp"

namespace entsim {

namespace {

constexpr double k_pi = 3.14159265358979323846;

// ---------------------------------------------------------------- reference

struct RefValue {
    const char* description;
    double value;
    double tolerance;
    CheckKind kind;
};

const std::map<std::string, RefValue>& reference_values() {
    static const std::map<std::string, RefValue> table = {
        {"splitter.p_singlet_phi0",
         {"singlet projection at the published splitting ratios, phase 0", 0.942, 0.001,
          CheckKind::Within}},
        {"splitter.p_triplet_phipi",
         {"triplet projection at the published splitting ratios, phase pi", 0.987, 0.001,
          CheckKind::Within}},
        {"walkoff.effective_length_mm", {"effective birefringent length", 37.0, 0.0, CheckKind::Within}},
        {"walkoff.delay_ps", {"polarization walk-off delay", 9.31, 0.01, CheckKind::Within}},
        {"walkoff.fiber_length_m", {"compensation fiber length", 6.95, 0.01, CheckKind::Within}},
        {"shg.fwhm_wg1_nm", {"guide-1 tuning-curve FWHM", 0.306, 0.005, CheckKind::Within}},
        {"shg.fwhm_wg2_nm", {"guide-2 tuning-curve FWHM", 0.359, 0.005, CheckKind::Within}},
        {"shg.curve_overlap",
         {"amplitude overlap of the two tuning curves", 0.97, 0.02, CheckKind::Within}},
        {"jsa.pulsed.exchange_overlap",
         {"pulsed-pump exchange overlap, unfiltered", 0.44, 0.08, CheckKind::Within}},
        {"jsa.pulsed.filtered_exchange_overlap",
         {"pulsed-pump exchange overlap behind the 0.25 nm filters", 0.95, 0.0, CheckKind::AtLeast}},
        {"jsa.cw.exchange_overlap", {"cw-pump exchange overlap", 0.99, 0.0, CheckKind::AtLeast}},
        {"tomo.pulsed.fidelity_predicted",
         {"predicted fidelity, pulsed pump behind filters", 0.973, 0.03, CheckKind::Within}},
        {"tomo.cw.fidelity_published",
         {"published cw fidelity (reported only; the model omits cw-specific noise)", 0.941, 0.0,
          CheckKind::Report}},
        {"chsh.werner_s_at_f0973", {"Werner-line CHSH at fidelity 0.973", 2.726, 1e-3, CheckKind::Within}},
        {"chsh.werner_s_at_f0941", {"Werner-line CHSH at fidelity 0.941", 2.606, 1e-3, CheckKind::Within}},
        {"chsh.pulsed.s_published_bound",
         {"Werner-line CHSH at the pulsed fidelity dominates the published S", 2.694, 0.0,
          CheckKind::AtLeast}},
        {"chsh.cw.s_published_bound",
         {"Werner-line CHSH at the cw fidelity dominates the published S", 2.597, 0.0,
          CheckKind::AtLeast}},
    };
    return table;
}

bool evaluate(const CheckRow& r) {
    switch (r.kind) {
        case CheckKind::Within: return std::abs(r.computed - r.expected) <= r.tolerance;
        case CheckKind::AtLeast: return r.computed >= r.expected - r.tolerance;
        case CheckKind::AtMost: return r.computed <= r.expected + r.tolerance;
        case CheckKind::Report: return true;
    }
    return false;
}

CheckRow ref_row(const std::string& id, double computed) {
    const RefValue& rv = reference_values().at(id);
    CheckRow r{id, rv.description, "reference", computed, rv.value, rv.tolerance, rv.kind, true};
    r.pass = evaluate(r);
    return r;
}

CheckRow model_row(const std::string& id, const std::string& description, double computed,
                   double expected, double tolerance, CheckKind kind = CheckKind::Within) {
    CheckRow r{id, description, "model", computed, expected, tolerance, kind, true};
    r.pass = evaluate(r);
    return r;
}

CheckRow exact_row(const std::string& id, const std::string& description, double computed,
                   double expected) {
    CheckRow r{id, description, "exact", computed, expected, 0.0, CheckKind::Within, true};
    r.pass = evaluate(r);
    return r;
}

CheckRow report_row(const std::string& id, const std::string& description, double computed) {
    return {id, description, "model", computed, 0.0, 0.0, CheckKind::Report, true};
}

// ------------------------------------------------------------------ helpers

SourceConfig to_regime(SourceConfig c, PumpConfig::Regime regime) {
    if (c.pump.regime == regime) return c;
    c.pump.regime = regime;
    if (regime == PumpConfig::Regime::Cw) c.pump.bandwidth_fwhm = 0.0;
    else if (c.pump.bandwidth_fwhm == 0.0) c.pump.bandwidth_fwhm = 0.3; // nm, pulsed fallback
    return c;
}

std::vector<double> shared_curve_axis(const PhaseMatchingSpec& a, const PhaseMatchingSpec& b) {
    const double reach = 3.5 * std::max(a.fwhm, b.fwhm);
    const double lo = std::min(a.center_wavelength, b.center_wavelength) - reach;
    const double hi = std::max(a.center_wavelength, b.center_wavelength) + reach;
    const int n = 2001;
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[std::size_t(i)] = lo + (hi - lo) * i / (n - 1);
    return axis;
}

JsaGrid downsample(const JsaGrid& in, int stride) {
    if (stride <= 1) return in;
    JsaGrid out;
    const int n = in.n();
    for (int i = 0; i < n; i += stride) {
        out.signal_axis.push_back(in.signal_axis[std::size_t(i)]);
        out.idler_axis.push_back(in.idler_axis[std::size_t(i)]);
    }
    for (int i = 0; i < n; i += stride)
        for (int j = 0; j < n; j += stride) out.amplitude.push_back(in.at(i, j));
    out.renormalize();
    return out;
}

struct GuideSpectral {
    JsaGrid jsa;
    std::optional<JsaGrid> filtered;
    double exchange;
    double filtered_exchange; // equals exchange when unfiltered
    double transmission;      // 1 when unfiltered
    double principal_deg;
    double schmidt_coarse;    // on a stride-reduced grid; cubic-cost guard
};

GuideSpectral analyze_guide(const PhaseMatchingSpec& pm, const SourceConfig& cfg,
                            const GridSpec& grid, kernels::Exec exec) {
    GuideSpectral g;
    g.jsa = build_jsa(pm, cfg.pump, grid, exec);
    g.exchange = exchange_overlap(g.jsa, exec);
    g.principal_deg = principal_axis_angle_deg(g.jsa);
    const int stride = std::max(1, grid.points / 256);
    g.schmidt_coarse = schmidt_number(downsample(g.jsa, stride));
    if (cfg.filters) {
        FilteredJsa f = apply_filter(g.jsa, cfg.filters->first, cfg.filters->second);
        g.filtered_exchange = exchange_overlap(f.jsa, exec);
        g.transmission = f.heralding_transmission;
        g.filtered = std::move(f.jsa);
    } else {
        g.filtered_exchange = g.exchange;
        g.transmission = 1.0;
    }
    return g;
}

// ---------------------------------------------------------------- scenarios

struct Sink {
    std::string dir; // empty disables writing

    bool on() const { return !dir.empty(); }
    std::string path(const std::string& file) const {
        return (std::filesystem::path(dir) / file).string();
    }
};

void run_shg_overlap(const SourceConfig& cfg, const RunOptions&, ScenarioResult& res,
                     const Sink& sink) {
    const auto axis = shared_curve_axis(cfg.pm_wg1, cfg.pm_wg2);
    const ShgCurve s1 = shg_curve(cfg.pm_wg1, axis);
    const ShgCurve s2 = shg_curve(cfg.pm_wg2, axis);
    const double overlap = curve_overlap(s1, s2, OverlapMetric::Amplitude);

    res.checks.push_back(ref_row("shg.fwhm_wg1_nm", s1.fitted_fwhm));
    res.checks.push_back(ref_row("shg.fwhm_wg2_nm", s2.fitted_fwhm));
    res.checks.push_back(ref_row("shg.curve_overlap", overlap));
    res.checks.push_back(report_row("shg.center_wg1_nm", "fitted guide-1 center", s1.fitted_center));
    res.checks.push_back(report_row("shg.center_wg2_nm", "fitted guide-2 center", s2.fitted_center));
    res.checks.push_back(report_row("shg.curve_overlap_intensity",
                                    "intensity-metric overlap of the tuning curves",
                                    curve_overlap(s1, s2, OverlapMetric::Intensity)));

    if (sink.on()) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < axis.size(); ++i)
            rows.push_back({csv::format_double(axis[i]), csv::format_double(s1.intensity[i]),
                            csv::format_double(s2.intensity[i])});
        csv::write_table(sink.path("shg_curves.csv"),
                         {"wavelength_nm", "intensity_wg1", "intensity_wg2"}, rows);
    }
}

void run_splitter_sweep(const SourceConfig& cfg, const RunOptions&, ScenarioResult& res,
                        const Sink& sink) {
    PumpConfig phi0 = cfg.pump;
    phi0.phase = 0.0;
    PumpConfig phipi = cfg.pump;
    phipi.phase = k_pi;

    res.checks.push_back(ref_row(
        "splitter.p_singlet_phi0",
        bell_projection_probability(output_state(phi0, cfg.splitter), Bell::PsiMinus)));
    res.checks.push_back(ref_row(
        "splitter.p_triplet_phipi",
        bell_projection_probability(output_state(phipi, cfg.splitter), Bell::PsiPlus)));

    const SplitterParams ideal{1.0, 0.0};
    res.checks.push_back(exact_row(
        "splitter.p_ideal", "singlet projection of the lossless asymmetric splitter",
        bell_projection_probability(output_state(phi0, ideal), Bell::PsiMinus), 1.0));

    const int n = 50;
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[std::size_t(i)] = double(i) / (n - 1);
    std::vector<double> p0(std::size_t(n) * n), ppi(std::size_t(n) * n);
    int violations = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const SplitterParams s{axis[std::size_t(i)], axis[std::size_t(j)]};
            const double a = bell_projection_probability(output_state(phi0, s), Bell::PsiMinus);
            const double b = bell_projection_probability(output_state(phipi, s), Bell::PsiPlus);
            p0[std::size_t(i) * n + j] = a;
            ppi[std::size_t(i) * n + j] = b;
            const bool interior = i > 0 && i < n - 1 && j > 0 && j < n - 1;
            // the triplet surface must dominate: strictly inside, within FP
            // noise where a transmissivity hits 0 or 1 and the surfaces touch
            if (interior ? !(a < b) : a > b + 1e-12) ++violations;
        }
    }
    res.checks.push_back(exact_row("splitter.ordering_violations",
                                   "grid points where the phase-0 surface fails to decay faster",
                                   double(violations), 0.0));

    if (sink.on()) {
        auto dump = [&](const std::string& file, const std::vector<double>& p) {
            std::vector<std::string> header{"t_h"};
            for (double tv : axis) header.push_back(csv::format_double(tv));
            std::vector<std::vector<std::string>> rows;
            for (int i = 0; i < n; ++i) {
                std::vector<std::string> row{csv::format_double(axis[std::size_t(i)])};
                for (int j = 0; j < n; ++j)
                    row.push_back(csv::format_double(p[std::size_t(i) * n + j]));
                rows.push_back(std::move(row));
            }
            csv::write_table(sink.path(file), header, rows);
        };
        dump("surface_phi0.csv", p0);
        dump("surface_phipi.csv", ppi);
    }
}

void run_walkoff_budget(const SourceConfig& cfg, const RunOptions&, ScenarioResult& res,
                        const Sink& sink) {
    const WalkoffBudget b = walkoff_budget(cfg.walkoff, cfg.fiber_length_override);

    res.checks.push_back(ref_row("walkoff.effective_length_mm", b.effective_len.value));
    res.checks.push_back(ref_row("walkoff.delay_ps", b.delay.value));
    res.checks.push_back(ref_row("walkoff.fiber_length_m", b.fiber_length.value));
    if (b.fiber_overridden) {
        res.checks.push_back(
            report_row("walkoff.residual_ps", "residual delay with the fiber override", b.residual.value));
        res.checks.push_back(report_row("walkoff.residual_factor",
                                        "temporal indistinguishability with the fiber override",
                                        b.residual_factor));
    } else {
        res.checks.push_back(exact_row("walkoff.residual_ps",
                                       "residual delay with the derived compensation fiber",
                                       b.residual.value, 0.0));
        res.checks.push_back(exact_row("walkoff.residual_factor",
                                       "temporal indistinguishability with the derived fiber",
                                       b.residual_factor, 1.0));
    }

    if (sink.on()) {
        std::vector<std::vector<std::string>> rows;
        for (const BudgetRow& row : b.rows())
            rows.push_back({row.quantity, csv::format_double(row.value), row.unit});
        csv::write_table(sink.path("budget.csv"), {"quantity", "value", "unit"}, rows);
    }
}

void write_guide_artifacts(const Sink& sink, const char* tag, const GuideSpectral& g) {
    if (!sink.on()) return;
    const int stride = std::max(1, g.jsa.n() / 64);
    csv::write_jsa(sink.path(std::string("jsa_") + tag + ".csv"), g.jsa, stride);
    if (g.filtered)
        csv::write_jsa(sink.path(std::string("jsa_") + tag + "_filtered.csv"), *g.filtered, stride);
}

void run_jsa_pulsed(const SourceConfig& base, const RunOptions& o, ScenarioResult& res,
                    const Sink& sink) {
    const SourceConfig cfg = to_regime(base, PumpConfig::Regime::Pulsed);
    const GridSpec grid = analysis_grid(cfg);
    const GuideSpectral g1 = analyze_guide(cfg.pm_wg1, cfg, grid, o.exec);
    const GuideSpectral g2 = analyze_guide(cfg.pm_wg2, cfg, grid, o.exec);
    const double exchange = 0.5 * (g1.exchange + g2.exchange);

    // the estimate must already be grid-converged: halving the resolution may
    // only move it inside the convergence budget
    GridSpec half = grid;
    half.points = grid.points / 2;
    const double exchange_half =
        0.5 * (exchange_overlap(build_jsa(cfg.pm_wg1, cfg.pump, half, o.exec), o.exec) +
               exchange_overlap(build_jsa(cfg.pm_wg2, cfg.pump, half, o.exec), o.exec));

    res.checks.push_back(ref_row("jsa.pulsed.exchange_overlap", exchange));
    res.checks.push_back(model_row("jsa.pulsed.convergence_delta",
                                   "exchange-overlap shift when the grid resolution is halved",
                                   std::abs(exchange - exchange_half), 0.0, 1e-3));
    res.checks.push_back(
        ref_row("jsa.pulsed.filtered_exchange_overlap", 0.5 * (g1.filtered_exchange + g2.filtered_exchange)));
    res.checks.push_back(model_row("jsa.pulsed.principal_axis_deg",
                                   "mean principal-axis angle of the two joint spectra",
                                   0.5 * (g1.principal_deg + g2.principal_deg), -39.25, 5.75));
    res.checks.push_back(report_row("jsa.pulsed.heralding_transmission",
                                    "mean filter transmission", 0.5 * (g1.transmission + g2.transmission)));
    res.checks.push_back(
        report_row("jsa.pulsed.schmidt_wg1", "guide-1 Schmidt number (coarse grid)", g1.schmidt_coarse));
    res.checks.push_back(
        report_row("jsa.pulsed.schmidt_wg2", "guide-2 Schmidt number (coarse grid)", g2.schmidt_coarse));

    write_guide_artifacts(sink, "wg1", g1);
    write_guide_artifacts(sink, "wg2", g2);
}

void run_jsa_cw(const SourceConfig& base, const RunOptions& o, ScenarioResult& res,
                const Sink& sink) {
    const SourceConfig cfg = to_regime(base, PumpConfig::Regime::Cw);
    const GridSpec grid = analysis_grid(cfg);
    const GuideSpectral g1 = analyze_guide(cfg.pm_wg1, cfg, grid, o.exec);
    const GuideSpectral g2 = analyze_guide(cfg.pm_wg2, cfg, grid, o.exec);

    res.checks.push_back(ref_row("jsa.cw.exchange_overlap", 0.5 * (g1.exchange + g2.exchange)));
    res.checks.push_back(model_row("jsa.cw.principal_axis_deg",
                                   "mean principal-axis angle of the cw joint spectra",
                                   0.5 * (g1.principal_deg + g2.principal_deg), -45.0, 0.5));
    res.checks.push_back(report_row("jsa.cw.filtered_exchange_overlap",
                                    "cw exchange overlap behind the filters",
                                    0.5 * (g1.filtered_exchange + g2.filtered_exchange)));
    res.checks.push_back(
        report_row("jsa.cw.schmidt_wg1", "guide-1 Schmidt number (coarse grid)", g1.schmidt_coarse));
    res.checks.push_back(
        report_row("jsa.cw.schmidt_wg2", "guide-2 Schmidt number (coarse grid)", g2.schmidt_coarse));

    write_guide_artifacts(sink, "wg1", g1);
    write_guide_artifacts(sink, "wg2", g2);
}

struct Reconstruction {
    std::vector<MeasurementRecord> records;
    LinearInversion linear;
    TomographyResult mle;
    ErrorBars bars;
    double f_linear, f_mle, ll_linear;
};

Reconstruction reconstruct(const PredictedState& ps, const SourceConfig& cfg, const RunOptions& o) {
    const std::uint64_t seed = o.seed.value_or(cfg.detection.seed);
    const double mean_total = o.mean_total.value_or(cfg.detection.mean_total);
    const double bg = cfg.detection.background_rate;

    std::vector<MeasurementRecord> records =
        simulate_counts(ps.rho, tomography_settings_16(), mean_total, seed, bg,
                        cfg.detection.integration_seconds);
    LinearInversion linear = tomography_linear(records, bg);
    TomographyResult mle = tomography_mle(records, linear.rho, 1e-10, 4000, bg);
    const Vec4c target = bell_state(ps.target);
    const double f_linear = fidelity(linear.rho, target);
    const double f_mle = fidelity(mle.rho, target);
    const double ll_linear = log_likelihood(linear.rho, records, bg);
    const ErrorBars bars = error_bars(records, Estimator::Linear, cfg.detection.n_bootstrap,
                                      derive_seed(seed, 0x626f6f74), target, default_chsh_angles, bg);
    return Reconstruction{std::move(records), std::move(linear), std::move(mle),
                          bars,               f_linear,          f_mle,
                          ll_linear};
}

void write_reconstruction_artifacts(const Sink& sink, const PredictedState& ps,
                                    const Reconstruction& r) {
    if (!sink.on()) return;
    csv::write_records(sink.path("records.csv"), r.records);
    csv::write_density_matrix(sink.path("rho_predicted.csv"), ps.rho);
    csv::write_density_matrix(sink.path("rho_linear.csv"), r.linear.rho);
    csv::write_density_matrix(sink.path("rho_mle.csv"), r.mle.rho);
}

void run_tomography(const SourceConfig& base, const RunOptions& o, ScenarioResult& res,
                    const Sink& sink, PumpConfig::Regime regime) {
    const bool pulsed = regime == PumpConfig::Regime::Pulsed;
    const std::string p = pulsed ? "tomo.pulsed." : "tomo.cw.";
    const SourceConfig cfg = to_regime(base, regime);
    const PredictedState ps = predict_state(cfg, o.exec);
    const Reconstruction r = reconstruct(ps, cfg, o);

    if (pulsed) {
        res.checks.push_back(ref_row("tomo.pulsed.fidelity_predicted", ps.metrics.fidelity));
    } else {
        res.checks.push_back(ref_row("tomo.cw.fidelity_published", ps.metrics.fidelity));
        res.checks.push_back(report_row(
            "tomo.cw.fidelity_gap", "predicted minus published fidelity (unmodeled cw noise)",
            ps.metrics.fidelity - reference_values().at("tomo.cw.fidelity_published").value));
    }
    res.checks.push_back(model_row(p + "fidelity_reconstructed",
                                   "maximum-likelihood fidelity vs the prediction", r.f_mle,
                                   ps.metrics.fidelity, 0.02));
    res.checks.push_back(model_row(p + "mle_likelihood_gain",
                                   "log-likelihood improvement of MLE over linear inversion",
                                   r.mle.log_likelihood - r.ll_linear, 0.0, 1e-9,
                                   CheckKind::AtLeast));
    res.checks.push_back(exact_row(p + "mle_converged", "MLE ascent reported convergence",
                                   r.mle.converged ? 1.0 : 0.0, 1.0));
    res.checks.push_back(report_row(p + "fidelity_linear", "linear-inversion fidelity", r.f_linear));
    res.checks.push_back(report_row(p + "coherence_factor", "combined coherence factor",
                                    ps.coherence_factor));
    res.checks.push_back(report_row(p + "clipped_weight",
                                    "negative eigenvalue mass removed by the PSD repair",
                                    r.linear.clipped_weight));
    res.checks.push_back(report_row(p + "total_flux", "estimated flux", r.linear.total_flux));
    res.checks.push_back(report_row(p + "fidelity_bootstrap_std",
                                    "bootstrap standard error of the fidelity", r.bars.fidelity_std));

    write_reconstruction_artifacts(sink, ps, r);
}

void run_chsh(const SourceConfig& base, const RunOptions& o, ScenarioResult& res, const Sink& sink,
              PumpConfig::Regime regime) {
    const bool pulsed = regime == PumpConfig::Regime::Pulsed;
    const std::string p = pulsed ? "chsh.pulsed." : "chsh.cw.";
    const SourceConfig cfg = to_regime(base, regime);
    const PredictedState ps = predict_state(cfg, o.exec);
    const Reconstruction r = reconstruct(ps, cfg, o);

    // regime-matched Werner anchors: the published fidelity mapped through the
    // Werner line must land on the published S and dominate the measured S
    if (pulsed) {
        res.checks.push_back(ref_row("chsh.werner_s_at_f0973", werner_s_from_fidelity(0.973)));
        res.checks.push_back(ref_row("chsh.pulsed.s_published_bound", werner_s_from_fidelity(0.973)));
    } else {
        res.checks.push_back(ref_row("chsh.werner_s_at_f0941", werner_s_from_fidelity(0.941)));
        res.checks.push_back(ref_row("chsh.cw.s_published_bound", werner_s_from_fidelity(0.941)));
    }

    res.checks.push_back(model_row(
        p + "s_optimal_vs_werner",
        "Horodecki optimum vs the Werner-line value at the model fidelity", ps.metrics.s_optimal,
        ps.metrics.werner_s, 0.1));
    res.checks.push_back(model_row(
        p + "s_opt_reconstructed_vs_werner",
        "reconstructed Horodecki optimum vs the Werner line at the reconstructed fidelity",
        chsh_optimal(r.mle.rho), werner_s_from_fidelity(r.f_mle), 0.1));
    res.checks.push_back(model_row(p + "tsirelson", "Horodecki optimum respects the quantum bound",
                                   ps.metrics.s_optimal, 2.0 * std::sqrt(2.0), 1e-9,
                                   CheckKind::AtMost));
    res.checks.push_back(report_row(p + "s_fixed_model", "CHSH at the canonical angles, model state",
                                    ps.metrics.s_fixed));
    res.checks.push_back(report_row(p + "s_fixed_reconstructed",
                                    "CHSH at the canonical angles, reconstructed state",
                                    chsh_fixed(r.mle.rho)));
    res.checks.push_back(report_row(p + "s_optimal_bootstrap_std",
                                    "bootstrap standard error of the Horodecki optimum",
                                    r.bars.s_optimal_std));

    write_reconstruction_artifacts(sink, ps, r);
}

void run_full_paper_table(const SourceConfig& cfg, const RunOptions& o, ScenarioResult& res,
                          const Sink&) {
    for (const std::string& name : scenario_names()) {
        if (name == "full_paper_table") continue;
        ScenarioResult sub = run_scenario(name, cfg, o);
        for (CheckRow& row : sub.checks) res.checks.push_back(std::move(row));
    }
}

std::vector<std::vector<std::string>> check_table(const std::vector<CheckRow>& checks) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(checks.size());
    for (const CheckRow& c : checks)
        rows.push_back({c.id, c.description, c.source, csv::format_double(c.computed),
                        csv::format_double(c.expected), csv::format_double(c.tolerance),
                        check_kind_name(c.kind), c.pass ? "pass" : "FAIL"});
    return rows;
}

} // namespace

// ------------------------------------------------------------- predict_state

GridSpec analysis_grid(const SourceConfig& config) {
    GridSpec g;
    g.center = 0.5 * (config.pm_wg1.center_wavelength + config.pm_wg2.center_wavelength);
    if (config.pump.regime == PumpConfig::Regime::Cw) {
        g.half_span = 0.35; // nm: the cw ridge is a hair's width, resolve it densely
        g.points = 2048;
    } else {
        g.half_span = 2.0; // nm: wide enough for the pump-bandwidth-fed lobe
        g.points = 1024;
    }
    return g;
}

PredictedState predict_state(const SourceConfig& config, kernels::Exec exec) {
    config.validate();
    const GridSpec grid = analysis_grid(config);

    double exchange[2], transmission[2];
    const PhaseMatchingSpec* pms[2] = {&config.pm_wg1, &config.pm_wg2};
    for (int k = 0; k < 2; ++k) {
        const JsaGrid jsa = build_jsa(*pms[k], config.pump, grid, exec);
        if (config.filters) {
            const FilteredJsa f = apply_filter(jsa, config.filters->first, config.filters->second);
            exchange[k] = exchange_overlap(f.jsa, exec);
            transmission[k] = f.heralding_transmission;
        } else {
            exchange[k] = exchange_overlap(jsa, exec);
            transmission[k] = 1.0;
        }
    }

    PredictedState ps{DensityMatrix2Q::maximally_mixed(),
                      Bell::PsiMinus,
                      0.0,
                      0.0,
                      0.0,
                      0.0,
                      0.0,
                      {},
                      {},
                      {},
                      walkoff_budget(config.walkoff, config.fiber_length_override)};
    ps.spectral_exchange_overlap = 0.5 * (exchange[0] + exchange[1]);
    ps.heralding_transmission = 0.5 * (transmission[0] + transmission[1]);

    const auto axis = shared_curve_axis(config.pm_wg1, config.pm_wg2);
    ps.interguide_overlap = curve_overlap(shg_curve(config.pm_wg1, axis),
                                          shg_curve(config.pm_wg2, axis), OverlapMetric::Amplitude);
    ps.residual_factor = ps.budget.residual_factor;
    ps.coherence_factor = std::clamp(
        ps.spectral_exchange_overlap * ps.interguide_overlap * ps.residual_factor, 0.0, 1.0);

    ps.amplitudes = output_state(config.pump, config.splitter);
    ps.coincidence = postselect_coincidence(ps.amplitudes);
    const std::complex<double> c1 = ps.coincidence.qubit_state[0];
    const std::complex<double> c2 = ps.coincidence.qubit_state[1];

    // dephased coincidence-basis state: populations survive, the cross
    // coherence carries the spectral/temporal distinguishability penalty
    Mat4c m = Mat4c::Zero();
    m(1, 1) = std::norm(c1);
    m(2, 2) = std::norm(c2);
    m(1, 2) = ps.coherence_factor * c1 * std::conj(c2);
    m(2, 1) = std::conj(m(1, 2));
    ps.rho = DensityMatrix2Q(m);

    const double f_minus = fidelity(ps.rho, bell_state(Bell::PsiMinus));
    const double f_plus = fidelity(ps.rho, bell_state(Bell::PsiPlus));
    ps.target = f_minus >= f_plus ? Bell::PsiMinus : Bell::PsiPlus;

    ps.metrics.fidelity = std::max(f_minus, f_plus);
    ps.metrics.visibility = 2.0 * std::abs(m(1, 2));
    ps.metrics.s_fixed = chsh_fixed(ps.rho);
    ps.metrics.s_optimal = chsh_optimal(ps.rho);
    ps.metrics.werner_s = werner_s_from_fidelity(ps.metrics.fidelity);
    return ps;
}

// ------------------------------------------------------------------ scenario

bool ScenarioResult::passed() const {
    for (const CheckRow& c : checks)
        if (!c.pass) return false;
    return true;
}

const char* check_kind_name(CheckKind kind) {
    switch (kind) {
        case CheckKind::Within: return "within";
        case CheckKind::AtLeast: return "at_least";
        case CheckKind::AtMost: return "at_most";
        case CheckKind::Report: return "report";
    }
    return "?";
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "shg_overlap",     "splitter_sweep", "walkoff_budget", "jsa_pulsed",
        "jsa_cw",          "tomography_pulsed", "tomography_cw", "chsh_pulsed",
        "chsh_cw",         "full_paper_table",
    };
    return names;
}

nlohmann::json scenario_to_json(const ScenarioResult& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckRow& c : r.checks)
        checks.push_back({{"id", c.id},
                          {"description", c.description},
                          {"source", c.source},
                          {"computed", c.computed},
                          {"expected", c.expected},
                          {"tolerance", c.tolerance},
                          {"kind", check_kind_name(c.kind)},
                          {"pass", c.pass}});
    return {{"scenario", r.name},
            {"elapsed_seconds", r.elapsed_seconds},
            {"passed", r.passed()},
            {"checks", checks}};
}

nlohmann::json reference_manifest() {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [id, rv] : reference_values())
        rows.push_back({{"id", id},
                        {"description", rv.description},
                        {"value", rv.value},
                        {"tolerance", rv.tolerance},
                        {"kind", check_kind_name(rv.kind)}});
    return {{"reference_values", rows}};
}

ScenarioResult run_scenario(const std::string& name, const SourceConfig& config,
                            const RunOptions& options) {
    config.validate();
    ScenarioResult res;
    res.name = name;

    Sink sink;
    if (!options.out_dir.empty()) {
        const std::filesystem::path dir = std::filesystem::path(options.out_dir) / name;
        std::filesystem::create_directories(dir);
        sink.dir = dir.string();
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (name == "shg_overlap") run_shg_overlap(config, options, res, sink);
    else if (name == "splitter_sweep") run_splitter_sweep(config, options, res, sink);
    else if (name == "walkoff_budget") run_walkoff_budget(config, options, res, sink);
    else if (name == "jsa_pulsed") run_jsa_pulsed(config, options, res, sink);
    else if (name == "jsa_cw") run_jsa_cw(config, options, res, sink);
    else if (name == "tomography_pulsed")
        run_tomography(config, options, res, sink, PumpConfig::Regime::Pulsed);
    else if (name == "tomography_cw")
        run_tomography(config, options, res, sink, PumpConfig::Regime::Cw);
    else if (name == "chsh_pulsed") run_chsh(config, options, res, sink, PumpConfig::Regime::Pulsed);
    else if (name == "chsh_cw") run_chsh(config, options, res, sink, PumpConfig::Regime::Cw);
    else if (name == "full_paper_table") run_full_paper_table(config, options, res, sink);
    else throw std::invalid_argument("unknown scenario '" + name + "'");
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (sink.on()) {
        csv::write_table(sink.path("summary.csv"),
                         {"id", "description", "source", "computed", "expected", "tolerance",
                          "kind", "status"},
                         check_table(res.checks));
        csv::write_text_file(sink.path("summary.json"), scenario_to_json(res).dump(2) + "\n");
        if (name == "full_paper_table") {
            csv::write_table(sink.path("paper_table.csv"),
                             {"id", "description", "source", "computed", "expected", "tolerance",
                              "kind", "status"},
                             check_table(res.checks));
            // comparison manifest: every row and the reference targets it was
            // held against, in one machine-readable document
            nlohmann::json doc = scenario_to_json(res);
            doc["reference"] = reference_manifest();
            csv::write_text_file(sink.path("paper_table.json"), doc.dump(2) + "\n");
        }
    }
    return res;
}

} // namespace entsim
