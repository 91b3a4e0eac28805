#include "entsim/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entsim {

namespace {

// argument where sinc(z)^2 = 1/2; pins the profile's intensity FWHM
constexpr double k_sinc_half = 1.3915573782515103;
const double k_ln2 = std::log(2.0);

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void check_uniform_axis(const std::vector<double>& axis, const char* what) {
    if (axis.size() < 2) throw std::invalid_argument(std::string(what) + ": axis too short");
    const double step = (axis.back() - axis.front()) / double(axis.size() - 1);
    if (!(step > 0.0)) throw std::invalid_argument(std::string(what) + ": axis must be increasing");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1]))
            throw std::invalid_argument(std::string(what) + ": axis must be strictly increasing");
        if (std::abs(axis[i] - axis[i - 1] - step) > 1e-9 * step)
            throw std::invalid_argument(std::string(what) + ": axis must be uniformly spaced");
    }
}

} // namespace

void PhaseMatchingSpec::validate() const {
    if (!(center_wavelength > 0.0))
        throw std::invalid_argument("pm.center_wavelength must be positive");
    if (!(fwhm > 0.0)) throw std::invalid_argument("pm.fwhm must be positive");
    if (!(orientation_deg > -90.0 && orientation_deg < 0.0))
        throw std::invalid_argument("pm.orientation_deg must lie in (-90, 0)");
}

void FilterSpec::validate() const {
    if (!(center_wavelength > 0.0))
        throw std::invalid_argument("filter.center_wavelength must be positive");
    if (!(bandwidth_fwhm > 0.0)) throw std::invalid_argument("filter.bandwidth_fwhm must be positive");
}

double FilterSpec::amplitude(double wavelength) const {
    const double d = wavelength - center_wavelength;
    if (shape == FilterShape::Rectangular) return std::abs(d) <= 0.5 * bandwidth_fwhm ? 1.0 : 0.0;
    // sqrt of a Gaussian intensity transmission with the given FWHM
    return std::exp(-2.0 * k_ln2 * d * d / (bandwidth_fwhm * bandwidth_fwhm));
}

void GridSpec::validate() const {
    if (!(center > 0.0)) throw std::invalid_argument("grid.center must be positive");
    if (!(half_span > 0.0)) throw std::invalid_argument("grid.half_span must be positive");
    if (points < 64) throw std::invalid_argument("grid.points must be >= 64");
}

std::vector<double> GridSpec::axis() const {
    validate();
    std::vector<double> ax(static_cast<std::size_t>(points));
    const double lo = center - half_span;
    const double st = step();
    for (int i = 0; i < points; ++i) ax[std::size_t(i)] = lo + st * i;
    return ax;
}

double JsaGrid::step_signal() const {
    return (signal_axis.back() - signal_axis.front()) / double(signal_axis.size() - 1);
}

double JsaGrid::step_idler() const {
    return (idler_axis.back() - idler_axis.front()) / double(idler_axis.size() - 1);
}

double JsaGrid::norm() const {
    return kernels::sum_abs2(amplitude.data(), n()) * step_signal() * step_idler();
}

void JsaGrid::renormalize() {
    const double nrm = norm();
    if (nrm <= 1e-300) throw std::domain_error("jsa: amplitude has zero norm on this grid");
    const double scale = 1.0 / std::sqrt(nrm);
    for (auto& a : amplitude) a *= scale;
}

void JsaGrid::validate() const {
    if (signal_axis.size() != idler_axis.size())
        throw std::invalid_argument("jsa: axes must have equal length");
    if (signal_axis.size() < 64) throw std::invalid_argument("jsa: axes must have >= 64 points");
    check_uniform_axis(signal_axis, "jsa.signal_axis");
    check_uniform_axis(idler_axis, "jsa.idler_axis");
    if (amplitude.size() != signal_axis.size() * idler_axis.size())
        throw std::invalid_argument("jsa: amplitude size does not match axes");
    if (std::abs(norm() - 1.0) > 1e-9)
        throw std::invalid_argument("jsa: amplitude must be L2-normalized");
}

ShgCurve shg_curve(const PhaseMatchingSpec& pm, const std::vector<double>& wavelength_axis) {
    pm.validate();
    check_uniform_axis(wavelength_axis, "shg_curve");
    if (wavelength_axis.front() > pm.center_wavelength - 3.0 * pm.fwhm ||
        wavelength_axis.back() < pm.center_wavelength + 3.0 * pm.fwhm)
        throw std::invalid_argument("shg_curve: axis must cover center +- 3 fwhm");

    ShgCurve curve;
    curve.wavelength_axis = wavelength_axis;
    curve.intensity.resize(wavelength_axis.size());
    for (std::size_t i = 0; i < wavelength_axis.size(); ++i) {
        const double a = pm_amplitude(pm, wavelength_axis[i], wavelength_axis[i]);
        curve.intensity[i] = a * a;
    }
    const double peak = *std::max_element(curve.intensity.begin(), curve.intensity.end());
    for (auto& v : curve.intensity) v /= peak;

    // intensity FWHM from the innermost half-max crossings around the peak,
    // linearly interpolated; center = midpoint of the crossings
    const std::size_t ipk =
        std::size_t(std::max_element(curve.intensity.begin(), curve.intensity.end()) -
                    curve.intensity.begin());
    auto cross = [&](std::size_t lo, std::size_t hi) {
        const double x0 = wavelength_axis[lo], x1 = wavelength_axis[hi];
        const double y0 = curve.intensity[lo], y1 = curve.intensity[hi];
        return x0 + (0.5 - y0) * (x1 - x0) / (y1 - y0);
    };
    std::size_t l = ipk;
    while (l > 0 && curve.intensity[l] >= 0.5) --l;
    std::size_t r = ipk;
    while (r + 1 < curve.intensity.size() && curve.intensity[r] >= 0.5) ++r;
    if (curve.intensity[l] >= 0.5 || curve.intensity[r] >= 0.5)
        throw std::invalid_argument("shg_curve: axis does not cover the half-max points");
    const double left = cross(l, l + 1);
    const double right = cross(r, r - 1);
    curve.fitted_fwhm = right - left;
    curve.fitted_center = 0.5 * (right + left);
    return curve;
}

double curve_overlap(const ShgCurve& a, const ShgCurve& b, OverlapMetric metric) {
    if (a.wavelength_axis.size() != b.wavelength_axis.size())
        throw std::invalid_argument("curve_overlap: curves must share an axis");
    for (std::size_t i = 0; i < a.wavelength_axis.size(); ++i)
        if (std::abs(a.wavelength_axis[i] - b.wavelength_axis[i]) > 1e-12)
            throw std::invalid_argument("curve_overlap: curves must share an axis");

    double cross = 0.0, na = 0.0, nb = 0.0;
    if (metric == OverlapMetric::Amplitude) {
        for (std::size_t i = 0; i < a.intensity.size(); ++i) {
            cross += std::sqrt(a.intensity[i] * b.intensity[i]);
            na += a.intensity[i];
            nb += b.intensity[i];
        }
    } else {
        for (std::size_t i = 0; i < a.intensity.size(); ++i) {
            cross += a.intensity[i] * b.intensity[i];
            na += a.intensity[i] * a.intensity[i];
            nb += b.intensity[i] * b.intensity[i];
        }
    }
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("curve_overlap: empty curve");
    const double o = cross / std::sqrt(na * nb);
    return std::clamp(o, 0.0, 1.0);
}

double pm_amplitude(const PhaseMatchingSpec& pm, double signal_nm, double idler_nm) {
    const double th = pm.orientation_deg * M_PI / 180.0;
    const double s = std::sin(th), c = std::cos(th);
    // coordinate perpendicular to the ridge; width chosen so that sampling
    // along the degenerate diagonal reproduces an SHG intensity FWHM = pm.fwhm
    const double p = -s * (signal_nm - pm.center_wavelength) + c * (idler_nm - pm.center_wavelength);
    const double fwhm_p = pm.fwhm * (c - s);
    if (pm.profile == PmProfile::SincSquaredAmplitude)
        return sinc(2.0 * k_sinc_half * p / fwhm_p);
    return std::exp(-2.0 * k_ln2 * p * p / (fwhm_p * fwhm_p));
}

double derived_pump_wavelength(double signal_nm, double idler_nm) {
    return 1.0 / (1.0 / signal_nm + 1.0 / idler_nm);
}

std::vector<double> pump_envelope(const PumpConfig& pump, const std::vector<double>& signal_axis,
                                  const std::vector<double>& idler_axis, kernels::Exec exec) {
    pump.validate();
    check_uniform_axis(signal_axis, "pump_envelope.signal_axis");
    check_uniform_axis(idler_axis, "pump_envelope.idler_axis");
    if (signal_axis.size() != idler_axis.size())
        throw std::invalid_argument("pump_envelope: axes must have equal length");

    const double bw = pump.effective_bandwidth();
    const double lp0 = pump.center_wavelength;
    const int n = int(signal_axis.size());
    std::vector<double> env(std::size_t(n) * n);
    kernels::fill_grid(
        env.data(), signal_axis.data(), idler_axis.data(), n,
        [bw, lp0](double ls, double li) {
            const double d = derived_pump_wavelength(ls, li) - lp0;
            return std::exp(-2.0 * k_ln2 * d * d / (bw * bw));
        },
        exec);
    return env;
}

JsaGrid build_jsa(const PhaseMatchingSpec& pm, const PumpConfig& pump, const GridSpec& grid,
                  kernels::Exec exec) {
    pm.validate();
    pump.validate();
    grid.validate();

    const double th = pm.orientation_deg * M_PI / 180.0;
    const double s = std::sin(th), c = std::cos(th);
    const double fwhm_p = pm.fwhm * (c - s);
    // narrowest feature width measured along a grid axis: the PM ridge cut at
    // fixed signal (or idler), and the pump ridge cut the same way (the pump
    // wavelength moves ~1/4 as fast as either axis at degeneracy)
    const double pm_axis_fwhm = fwhm_p / std::max(std::abs(c), std::abs(s));
    const double pump_axis_fwhm = 4.0 * pump.effective_bandwidth();
    const double narrowest = std::min(pm_axis_fwhm, pump_axis_fwhm);
    if (grid.step() > narrowest / 8.0)
        throw std::invalid_argument("build_jsa: grid too coarse, need >= 8 samples per narrowest FWHM");
    if (std::abs(grid.center - pm.center_wavelength) > grid.half_span)
        throw std::invalid_argument("build_jsa: grid does not contain the degeneracy point");
    if (grid.half_span < 1.5 * narrowest)
        throw std::invalid_argument("build_jsa: grid narrower than the narrowest spectral feature");

    JsaGrid jsa;
    jsa.signal_axis = grid.axis();
    jsa.idler_axis = jsa.signal_axis;
    jsa.amplitude.resize(std::size_t(grid.points) * grid.points);

    const double bw = pump.effective_bandwidth();
    const double lp0 = pump.center_wavelength;
    kernels::fill_grid(
        jsa.amplitude.data(), jsa.signal_axis.data(), jsa.idler_axis.data(), grid.points,
        [&pm, bw, lp0](double ls, double li) {
            const double d = derived_pump_wavelength(ls, li) - lp0;
            const double env = std::exp(-2.0 * k_ln2 * d * d / (bw * bw));
            return std::complex<double>(pm_amplitude(pm, ls, li) * env, 0.0);
        },
        exec);
    jsa.renormalize();
    return jsa;
}

double exchange_overlap(const JsaGrid& jsa, kernels::Exec exec) {
    if (jsa.signal_axis.size() != jsa.idler_axis.size())
        throw std::invalid_argument("exchange_overlap: grid must be square");
    for (std::size_t i = 0; i < jsa.signal_axis.size(); ++i)
        if (std::abs(jsa.signal_axis[i] - jsa.idler_axis[i]) > 1e-12)
            throw std::invalid_argument("exchange_overlap: signal and idler axes must coincide");
    const int n = jsa.n();
    const double dot = std::abs(kernels::exchange_dot(jsa.amplitude.data(), n, exec));
    const double nrm = kernels::sum_abs2(jsa.amplitude.data(), n, exec);
    if (nrm <= 0.0) throw std::domain_error("exchange_overlap: zero-norm amplitude");
    return std::clamp(dot / nrm, 0.0, 1.0);
}

FilteredJsa apply_filter(const JsaGrid& jsa, const FilterSpec& filter_s, const FilterSpec& filter_i) {
    filter_s.validate();
    filter_i.validate();
    if (filter_s.center_wavelength < jsa.signal_axis.front() ||
        filter_s.center_wavelength > jsa.signal_axis.back() ||
        filter_i.center_wavelength < jsa.idler_axis.front() ||
        filter_i.center_wavelength > jsa.idler_axis.back())
        throw std::invalid_argument("apply_filter: filter center outside the grid");

    FilteredJsa out{jsa, 0.0};
    const int n = jsa.n();
    const double before = kernels::sum_abs2(jsa.amplitude.data(), n);
    for (int i = 0; i < n; ++i) {
        const double as = filter_s.amplitude(jsa.signal_axis[std::size_t(i)]);
        std::complex<double>* row = out.jsa.amplitude.data() + std::size_t(i) * n;
        for (int j = 0; j < n; ++j) row[j] *= as * filter_i.amplitude(jsa.idler_axis[std::size_t(j)]);
    }
    const double after = kernels::sum_abs2(out.jsa.amplitude.data(), n);
    if (after <= 1e-300) throw std::invalid_argument("apply_filter: filters pass no amplitude on this grid");
    out.heralding_transmission = after / before;
    out.jsa.renormalize();
    return out;
}

double principal_axis_angle_deg(const JsaGrid& jsa) {
    const int n = jsa.n();
    double total = 0.0, ms = 0.0, mi = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = std::norm(jsa.at(i, j));
            total += w;
            ms += w * jsa.signal_axis[std::size_t(i)];
            mi += w * jsa.idler_axis[std::size_t(j)];
        }
    if (total <= 0.0) throw std::domain_error("principal_axis_angle_deg: zero-norm amplitude");
    ms /= total;
    mi /= total;
    double cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = std::norm(jsa.at(i, j));
            const double xs = jsa.signal_axis[std::size_t(i)] - ms;
            const double yi = jsa.idler_axis[std::size_t(j)] - mi;
            cxx += w * xs * xs;
            cyy += w * yi * yi;
            cxy += w * xs * yi;
        }
    return 0.5 * std::atan2(2.0 * cxy, cxx - cyy) * 180.0 / M_PI;
}

double schmidt_number(const JsaGrid& jsa) {
    const int n = jsa.n();
    Eigen::MatrixXcd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = jsa.at(i, j);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(f);
    const auto& sv = svd.singularValues();
    double s2 = 0.0, s4 = 0.0;
    for (int k = 0; k < sv.size(); ++k) {
        const double v2 = sv[k] * sv[k];
        s2 += v2;
        s4 += v2 * v2;
    }
    if (s4 <= 0.0) throw std::domain_error("schmidt_number: zero-norm amplitude");
    return s2 * s2 / s4;
}

} // namespace entsim
