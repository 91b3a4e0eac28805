#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "entsim/spectral.hpp"

using namespace entsim;
using cd = std::complex<double>;

namespace {

PhaseMatchingSpec pm_spec(double fwhm, PmProfile profile = PmProfile::SincSquaredAmplitude) {
    PhaseMatchingSpec pm;
    pm.center_wavelength = 1554.44;
    pm.fwhm = fwhm;
    pm.orientation_deg = -33.5;
    pm.profile = profile;
    return pm;
}

PumpConfig pulsed_pump() { return PumpConfig{}; }

PumpConfig cw_pump() {
    PumpConfig p;
    p.bandwidth_fwhm = 0.0;
    p.regime = PumpConfig::Regime::Cw;
    return p;
}

const GridSpec k_grid{1554.44, 2.0, 1024};

std::vector<double> dense_axis(double lo, double hi, int n) {
    std::vector<double> ax(static_cast<std::size_t>(n));
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) ax[std::size_t(i)] = lo + step * i;
    return ax;
}

// handmade square grid over coinciding axes; amplitude from index coordinates
JsaGrid manual_grid(int n, const std::function<cd(double, double)>& f) {
    JsaGrid g;
    g.signal_axis = dense_axis(1554.0 - 0.005 * (n - 1), 1554.0 + 0.005 * (n - 1), n);
    g.idler_axis = g.signal_axis;
    g.amplitude.resize(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        const double u = (i - 0.5 * (n - 1)) * 0.01;
        for (int j = 0; j < n; ++j) {
            const double v = (j - 0.5 * (n - 1)) * 0.01;
            g.amplitude[std::size_t(i) * n + j] = f(u, v);
        }
    }
    return g;
}

} // namespace

TEST_CASE("grid axis hits both endpoints uniformly") {
    const GridSpec g{1554.44, 2.0, 513};
    const auto ax = g.axis();
    REQUIRE(ax.size() == 513);
    CHECK(ax.front() == doctest::Approx(1552.44).epsilon(1e-12));
    CHECK(std::abs(ax.back() - 1556.44) < 1e-9);
    for (std::size_t i = 1; i < ax.size(); ++i)
        CHECK(ax[i] - ax[i - 1] == doctest::Approx(g.step()).epsilon(1e-9));
    CHECK_THROWS_AS(GridSpec({1554.44, 2.0, 63}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec({1554.44, -1.0, 256}).validate(), std::invalid_argument);
}

TEST_CASE("filter amplitude matches its intensity FWHM") {
    const FilterSpec rect{1554.44, 0.25, FilterShape::Rectangular};
    CHECK(rect.amplitude(1554.44) == 1.0);
    CHECK(rect.amplitude(1554.44 + 0.124) == 1.0);
    CHECK(rect.amplitude(1554.44 - 0.126) == 0.0);

    const FilterSpec gauss{1554.44, 0.25, FilterShape::Gaussian};
    CHECK(gauss.amplitude(1554.44) == 1.0);
    // intensity = amplitude^2 must be 1/2 at half the bandwidth off center
    const double a = gauss.amplitude(1554.44 + 0.125);
    CHECK(a * a == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(FilterSpec({1554.44, 0.0, FilterShape::Rectangular}).validate(),
                    std::invalid_argument);
}

TEST_CASE("phase matching spec rejects out-of-range orientations") {
    CHECK_NOTHROW(pm_spec(0.306).validate());
    PhaseMatchingSpec bad = pm_spec(0.306);
    bad.orientation_deg = 10.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.orientation_deg = -90.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = pm_spec(-0.1);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("derived pump wavelength conserves energy exactly in frequency") {
    for (const auto& [s, i] : {std::pair{1554.44, 1554.44}, {1550.1, 1559.9}, {1530.0, 1580.0}}) {
        const double lp = derived_pump_wavelength(s, i);
        const double lhs = 1.0 / lp;
        const double rhs = 1.0 / s + 1.0 / i;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("pump envelope peaks at the degeneracy point") {
    const auto ax = dense_axis(1554.44 - 0.32, 1554.44 + 0.32, 65); // axis[32] == 1554.44
    const auto env = pump_envelope(pulsed_pump(), ax, ax);
    REQUIRE(env.size() == 65u * 65u);
    const double peak = env[32 * 65 + 32];
    CHECK(peak >= 1.0 - 1e-12);
    for (const double v : env) {
        CHECK(v > 0.0);
        CHECK(v <= peak + 1e-15);
    }
}

TEST_CASE("tuning curve fits reproduce the configured center and width") {
    const auto ax = dense_axis(1554.44 - 1.2565, 1554.44 + 1.2565, 2001);
    for (const double fwhm : {0.306, 0.359}) {
        for (const auto profile : {PmProfile::SincSquaredAmplitude, PmProfile::Gaussian}) {
            const auto curve = shg_curve(pm_spec(fwhm, profile), ax);
            CHECK(curve.fitted_center == doctest::Approx(1554.44).epsilon(1e-9));
            CHECK(std::abs(curve.fitted_fwhm - fwhm) < 5e-5);
        }
    }
    // axis must reach +-3 fwhm around the center
    const auto tight = dense_axis(1554.44 - 0.7, 1554.44 + 0.7, 501);
    CHECK_THROWS_AS(shg_curve(pm_spec(0.306), tight), std::invalid_argument);
}

TEST_CASE("curve overlap is a normalized symmetric similarity") {
    const auto ax = dense_axis(1554.44 - 1.2565, 1554.44 + 1.2565, 2001);
    const auto c1 = shg_curve(pm_spec(0.306), ax);
    const auto c2 = shg_curve(pm_spec(0.359), ax);

    CHECK(curve_overlap(c1, c1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curve_overlap(c2, c2, OverlapMetric::Intensity) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curve_overlap(c1, c2) == curve_overlap(c2, c1));

    const double o_amp = curve_overlap(c1, c2);
    const double o_int = curve_overlap(c1, c2, OverlapMetric::Intensity);
    CHECK(o_amp == doctest::Approx(0.9756979032).epsilon(1e-6));
    // distinct curves: both cosines strictly inside (0, 1), and the two
    // metrics genuinely measure different things
    CHECK(o_int > 0.0);
    CHECK(o_int < 1.0);
    CHECK(o_amp < 1.0);
    CHECK(o_int != o_amp);

    const auto other = shg_curve(pm_spec(0.359), dense_axis(1553.0, 1556.0, 2001));
    CHECK_THROWS_AS(curve_overlap(c1, other), std::invalid_argument);
}

TEST_CASE("jsa construction rejects unusable grids") {
    CHECK_THROWS_WITH_AS(build_jsa(pm_spec(0.306), pulsed_pump(), GridSpec{1554.44, 3.0, 64}),
                         "build_jsa: grid too coarse, need >= 8 samples per narrowest FWHM",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(build_jsa(pm_spec(0.306), pulsed_pump(), GridSpec{1550.0, 2.0, 1024}),
                         "build_jsa: grid does not contain the degeneracy point",
                         std::invalid_argument);
    CHECK_THROWS_AS(build_jsa(pm_spec(0.306), pulsed_pump(), GridSpec{1554.44, 0.6, 1024}),
                    std::invalid_argument); // narrower than the PM feature itself
}

TEST_CASE("pulsed exchange overlaps match the frozen per-guide values") {
    const auto pump = pulsed_pump();
    const auto j1 = build_jsa(pm_spec(0.306), pump, k_grid);
    const auto j2 = build_jsa(pm_spec(0.359), pump, k_grid);
    j1.validate(); // build output is normalized and well-formed
    CHECK(exchange_overlap(j1) == doctest::Approx(0.3522001).epsilon(3e-4));
    CHECK(exchange_overlap(j2) == doctest::Approx(0.4652853).epsilon(3e-4));

    // default-width guide, plus convergence under resolution doubling
    const auto jd = build_jsa(pm_spec(0.3325), pump, k_grid);
    const auto jd_half = build_jsa(pm_spec(0.3325), pump, GridSpec{1554.44, 2.0, 512});
    const double e_full = exchange_overlap(jd);
    const double e_half = exchange_overlap(jd_half);
    CHECK(e_full == doctest::Approx(0.4061156).epsilon(3e-4));
    CHECK(e_half == doctest::Approx(0.4056554).epsilon(3e-4));
    CHECK(std::abs(e_full - e_half) < 1e-3);

    CHECK(principal_axis_angle_deg(jd) == doctest::Approx(-36.6166).epsilon(2e-3));
}

TEST_CASE("identical narrowband filters symmetrize the pulsed jsa") {
    const auto pump = pulsed_pump();
    const FilterSpec rect{1554.44, 0.25, FilterShape::Rectangular};

    const auto j1 = build_jsa(pm_spec(0.306), pump, k_grid);
    const auto f1 = apply_filter(j1, rect, rect);
    CHECK(exchange_overlap(f1.jsa) == doctest::Approx(0.9998274).epsilon(3e-4));
    CHECK(f1.heralding_transmission == doctest::Approx(0.03638).epsilon(6e-3));
    CHECK(exchange_overlap(f1.jsa) >= exchange_overlap(j1) - 1e-9);

    const auto j2 = build_jsa(pm_spec(0.359), pump, k_grid);
    const auto f2 = apply_filter(j2, rect, rect);
    CHECK(exchange_overlap(f2.jsa) == doctest::Approx(0.9999092).epsilon(3e-4));
    CHECK(f2.heralding_transmission == doctest::Approx(0.03231).epsilon(6e-3));

    const FilterSpec gauss{1554.44, 0.25, FilterShape::Gaussian};
    const auto jd = build_jsa(pm_spec(0.3325), pump, k_grid);
    const auto fg = apply_filter(jd, gauss, gauss);
    CHECK(exchange_overlap(fg.jsa) == doctest::Approx(0.9988080).epsilon(1e-3));
    CHECK(fg.heralding_transmission == doctest::Approx(0.03580).epsilon(6e-3));

    FilterSpec outside = rect;
    outside.center_wavelength = 1600.0;
    CHECK_THROWS_AS(apply_filter(j1, outside, rect), std::invalid_argument);
}

TEST_CASE("cw pumping forces an exchange-symmetric anti-diagonal ridge") {
    const auto jsa = build_jsa(pm_spec(0.306), cw_pump(), GridSpec{1554.44, 0.35, 2048});
    CHECK(exchange_overlap(jsa) >= 0.99999);
    CHECK(std::abs(principal_axis_angle_deg(jsa) + 45.0) < 0.01);

    // the cw ridge needs a much finer grid than the pulsed one
    CHECK_THROWS_AS(build_jsa(pm_spec(0.306), cw_pump(), GridSpec{1554.44, 0.35, 1024}),
                    std::invalid_argument);

    // both filters parked off the energy-conservation ridge pass nothing
    const FilterSpec off{1554.7, 0.05, FilterShape::Rectangular};
    CHECK_THROWS_AS(apply_filter(jsa, off, off), std::invalid_argument);
}

TEST_CASE("a 45-degree ridge is exactly exchange symmetric") {
    const auto jsa = build_jsa(pm_spec(0.3325, PmProfile::Gaussian), pulsed_pump(),
                               GridSpec{1554.44, 2.0, 512});
    CHECK(exchange_overlap(jsa) < 0.9); // tilted ridge stays visibly asymmetric
    PhaseMatchingSpec sym = pm_spec(0.3325, PmProfile::Gaussian);
    sym.orientation_deg = -45.0;
    const auto jsym = build_jsa(sym, pulsed_pump(), GridSpec{1554.44, 2.0, 512});
    CHECK(exchange_overlap(jsym) >= 1.0 - 1e-9);
}

TEST_CASE("separable orthogonal factors give zero exchange overlap") {
    const auto g = manual_grid(128, [](double u, double v) {
        return cd(std::exp(-u * u) * (v * std::exp(-v * v)), 0.0);
    });
    CHECK(exchange_overlap(g) < 1e-9);
}

TEST_CASE("schmidt number counts the effective mode pairs") {
    const auto rank1 = manual_grid(128, [](double u, double v) {
        return cd(std::exp(-u * u) * std::exp(-2.0 * v * v), 0.0);
    });
    CHECK(schmidt_number(rank1) == doctest::Approx(1.0).epsilon(1e-6));

    // g(u)h(v) + h(u)g(v) with orthogonal g, h splits into two equal modes
    const auto rank2 = manual_grid(128, [](double u, double v) {
        const double gu = std::exp(-u * u), gv = std::exp(-v * v);
        return cd(gu * (v * gv) + (u * gu) * gv, 0.0);
    });
    CHECK(schmidt_number(rank2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("jsa validation catches malformed grids") {
    auto g = manual_grid(64, [](double u, double v) {
        return cd(std::exp(-u * u - v * v), 0.0);
    });
    g.renormalize();
    CHECK_NOTHROW(g.validate());

    auto scaled = g;
    for (auto& a : scaled.amplitude) a *= 2.0;
    CHECK_THROWS_WITH_AS(scaled.validate(), "jsa: amplitude must be L2-normalized",
                         std::invalid_argument);

    auto lop = g;
    lop.idler_axis.pop_back();
    CHECK_THROWS_AS(lop.validate(), std::invalid_argument);

    auto bent = g;
    bent.signal_axis[10] += 1e-3;
    CHECK_THROWS_AS(bent.validate(), std::invalid_argument);

    const auto tiny = manual_grid(32, [](double, double) { return cd(1.0, 0.0); });
    CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}
