#pragma once

#include <complex>
#include <vector>

#include "entsim/kernels.hpp"
#include "entsim/polarization.hpp"

namespace entsim {

enum class PmProfile { SincSquaredAmplitude, Gaussian };
enum class OverlapMetric { Amplitude, Intensity };
enum class FilterShape { Rectangular, Gaussian };

// Phase-matching ridge of one poled waveguide, parameterized by what is
// actually measured: the SHG tuning curve's center and intensity FWHM at the
// fundamental, plus the ridge orientation in the (lambda_s, lambda_i) plane.
struct PhaseMatchingSpec {
    double center_wavelength = 1554.44;                   // nm
    double fwhm = 0.3325;                                 // nm
    double orientation_deg = -33.5;                       // in (-90, 0)
    PmProfile profile = PmProfile::SincSquaredAmplitude;

    void validate() const;
};

struct FilterSpec {
    double center_wavelength;                             // nm
    double bandwidth_fwhm;                                // nm
    FilterShape shape = FilterShape::Rectangular;

    void validate() const;
    double amplitude(double wavelength) const;            // sqrt of intensity transmission
};

// Square evaluation window: both axes are center +- half_span with `points`
// samples each.
struct GridSpec {
    double center = 1554.44;  // nm
    double half_span = 2.0;   // nm
    int points = 1024;

    void validate() const;
    double step() const { return 2.0 * half_span / (points - 1); }
    std::vector<double> axis() const;
};

struct JsaGrid {
    std::vector<double> signal_axis, idler_axis;     // nm, strictly increasing
    std::vector<std::complex<double>> amplitude;     // row-major, signal index = row

    int n() const { return int(signal_axis.size()); }
    std::complex<double> at(int i_signal, int i_idler) const {
        return amplitude[std::size_t(i_signal) * signal_axis.size() + std::size_t(i_idler)];
    }
    double step_signal() const;
    double step_idler() const;
    double norm() const;            // integral of |f|^2 over the grid
    void renormalize();             // scale to unit L2 norm
    void validate() const;
};

struct ShgCurve {
    std::vector<double> wavelength_axis; // nm
    std::vector<double> intensity;       // peak-normalized
    double fitted_center;                // nm, from the sampled curve
    double fitted_fwhm;                  // nm, half-max crossings, linear interp
};

ShgCurve shg_curve(const PhaseMatchingSpec& pm, const std::vector<double>& wavelength_axis);

// Normalized overlap of two tuning curves sharing one axis. Amplitude metric:
// integral sqrt(Ia*Ib) / sqrt(integral Ia * integral Ib); the intensity metric
// replaces sqrt(Ia*Ib) by Ia*Ib (and the norms accordingly).
double curve_overlap(const ShgCurve& a, const ShgCurve& b,
                     OverlapMetric metric = OverlapMetric::Amplitude);

// PM amplitude at one (signal, idler) point.
double pm_amplitude(const PhaseMatchingSpec& pm, double signal_nm, double idler_nm);

// Pump wavelength implied by energy conservation, computed exactly in
// frequency: 1/lp = 1/ls + 1/li.
double derived_pump_wavelength(double signal_nm, double idler_nm);

// Real Gaussian pump amplitude on the (signal, idler) grid; row-major like
// JsaGrid::amplitude. Depends on (ls, li) only through the derived pump
// wavelength.
std::vector<double> pump_envelope(const PumpConfig& pump,
                                  const std::vector<double>& signal_axis,
                                  const std::vector<double>& idler_axis,
                                  kernels::Exec exec = kernels::Exec::Parallel);

// f = PM amplitude x pump envelope, renormalized to unit L2 norm.
JsaGrid build_jsa(const PhaseMatchingSpec& pm, const PumpConfig& pump, const GridSpec& grid,
                  kernels::Exec exec = kernels::Exec::Parallel);

// O = |integral f(ls,li) conj(f(li,ls))| for unit-normalized f.
double exchange_overlap(const JsaGrid& jsa, kernels::Exec exec = kernels::Exec::Parallel);

struct FilteredJsa {
    JsaGrid jsa;                   // renormalized
    double heralding_transmission; // norm ratio before renormalization
};

FilteredJsa apply_filter(const JsaGrid& jsa, const FilterSpec& filter_s,
                         const FilterSpec& filter_i);

// Orientation of the dominant |f|^2 principal axis, degrees in (-90, 90].
double principal_axis_angle_deg(const JsaGrid& jsa);

// K = 1 / sum(sv^4) for singular values normalized to sum(sv^2) = 1.
double schmidt_number(const JsaGrid& jsa);

} // namespace entsim
