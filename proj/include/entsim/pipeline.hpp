#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "entsim/config.hpp"
#include "entsim/kernels.hpp"
#include "entsim/state_analysis.hpp"
#include "entsim/temporal.hpp"

namespace entsim {

struct StateMetrics {
    double fidelity;   // to the closer Bell state
    double visibility; // 2 |rho_{HV,VH}|
    double s_fixed;    // CHSH at the canonical angles
    double s_optimal;  // Horodecki optimum
    double werner_s;   // Werner-line S at the same fidelity
};

// End-to-end prediction for one configuration: interferometric amplitudes,
// spectral and temporal distinguishability folded into a single coherence
// factor, and the resulting coincidence-basis density matrix.
struct PredictedState {
    DensityMatrix2Q rho;
    Bell target;
    double coherence_factor;          // spectral x inter-guide x temporal
    double spectral_exchange_overlap; // mean per-guide exchange overlap (filtered if filtering)
    double interguide_overlap;        // amplitude overlap of the two tuning curves
    double residual_factor;           // temporal indistinguishability after compensation
    double heralding_transmission;    // mean filter transmission, 1 without filters
    PairAmplitudes amplitudes;
    CoincidenceState coincidence;
    StateMetrics metrics;
    WalkoffBudget budget;
};

// Evaluation window predict_state uses: a wide coarse grid resolves a pulsed
// pump, a narrow dense one the cw ridge.
GridSpec analysis_grid(const SourceConfig& config);

PredictedState predict_state(const SourceConfig& config,
                             kernels::Exec exec = kernels::Exec::Parallel);

enum class CheckKind { Within, AtLeast, AtMost, Report };

struct CheckRow {
    std::string id;
    std::string description;
    std::string source; // "reference" (published), "model" (self-consistency), "exact"
    double computed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    CheckKind kind = CheckKind::Report;
    bool pass = true; // Report rows always pass
};

struct ScenarioResult {
    std::string name;
    std::vector<CheckRow> checks;
    double elapsed_seconds = 0.0;
    bool passed() const;
};

struct RunOptions {
    std::string out_dir; // empty: compute only, write no files
    std::optional<std::uint64_t> seed;
    std::optional<double> mean_total;
    kernels::Exec exec = kernels::Exec::Parallel;
};

const std::vector<std::string>& scenario_names();

// Runs one named scenario; throws std::invalid_argument for unknown names.
// Writes artifacts plus summary.csv / summary.json under out_dir/<name>/.
ScenarioResult run_scenario(const std::string& name, const SourceConfig& config,
                            const RunOptions& options);

// The published targets scenario rows are checked against, keyed by row id.
nlohmann::json reference_manifest();

nlohmann::json scenario_to_json(const ScenarioResult& result);

const char* check_kind_name(CheckKind kind);

} // namespace entsim
