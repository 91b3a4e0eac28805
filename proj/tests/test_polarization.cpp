#include <doctest.h>

#include <cmath>
#include <complex>

#include "entsim/polarization.hpp"
#include "entsim/random.hpp"

using namespace entsim;
using cd = std::complex<double>;

namespace {

constexpr double k_pi = 3.14159265358979323846;

// Independent expansion of the two-guide source through the splitter, written
// as the tensor product of two single-photon passes. The H and V photons of
// guide 1 see (sqrt(t), sqrt(r)) on (A, B); guide 2 sees (sqrt(r), -sqrt(t)).
PairAmplitudes brute_force_state(const PumpConfig& pump, const SplitterParams& sp) {
    const double wn = std::hypot(pump.weight_1, pump.weight_2);
    const double w1 = pump.weight_1 / wn;
    const cd w2 = (pump.weight_2 / wn) * std::exp(cd(0.0, pump.phase));

    const double th = sp.t_h, rh = sp.r_h(), tv = sp.t_v, rv = sp.r_v();

    // guide 1 term: (sqrt(th) A_H + sqrt(rh) B_H) (sqrt(tv) A_V + sqrt(rv) B_V)
    // guide 2 term: (sqrt(rh) A_H - sqrt(th) B_H) (sqrt(rv) A_V - sqrt(tv) B_V)
    PairAmplitudes s;
    s.c_aa = w1 * std::sqrt(th) * std::sqrt(tv) + w2 * std::sqrt(rh) * std::sqrt(rv);
    s.c_ahbv = w1 * std::sqrt(th) * std::sqrt(rv) + w2 * std::sqrt(rh) * (-std::sqrt(tv));
    s.c_avbh = w1 * std::sqrt(rh) * std::sqrt(tv) + w2 * (-std::sqrt(th)) * std::sqrt(rv);
    s.c_bb = w1 * std::sqrt(rh) * std::sqrt(rv) + w2 * (-std::sqrt(th)) * (-std::sqrt(tv));
    return s;
}

PumpConfig pump_with(double phase, double w1 = 1.0, double w2 = 1.0) {
    PumpConfig p;
    p.phase = phase;
    p.weight_1 = w1;
    p.weight_2 = w2;
    return p;
}

} // namespace

TEST_CASE("apply_splitter ports are unitary per polarization") {
    Rng rng(21);
    for (int k = 0; k < 50; ++k) {
        const SplitterParams sp{rng.uniform(), rng.uniform()};
        for (const Pol pol : {Pol::H, Pol::V}) {
            const auto [a1, b1] = apply_splitter(1, pol, sp);
            const auto [a2, b2] = apply_splitter(2, pol, sp);
            CHECK(std::norm(a1) + std::norm(b1) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::norm(a2) + std::norm(b2) == doctest::Approx(1.0).epsilon(1e-12));
            // orthogonal columns
            const cd dot = a1 * std::conj(a2) + b1 * std::conj(b2);
            CHECK(std::abs(dot) < 1e-12);
        }
    }
    CHECK_THROWS_AS(apply_splitter(3, Pol::H, SplitterParams{0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(apply_splitter(1, Pol::H, SplitterParams{1.5, 0.5}), std::invalid_argument);
}

TEST_CASE("output_state matches the brute-force tensor expansion") {
    Rng rng(77);
    for (int k = 0; k < 200; ++k) {
        const SplitterParams sp{rng.uniform(), rng.uniform()};
        const PumpConfig pump =
            pump_with(2.0 * k_pi * rng.uniform(), 0.25 + rng.uniform(), 0.25 + rng.uniform());
        const PairAmplitudes got = output_state(pump, sp);
        const PairAmplitudes want = brute_force_state(pump, sp);
        CHECK(std::abs(got.c_aa - want.c_aa) < 1e-12);
        CHECK(std::abs(got.c_ahbv - want.c_ahbv) < 1e-12);
        CHECK(std::abs(got.c_avbh - want.c_avbh) < 1e-12);
        CHECK(std::abs(got.c_bb - want.c_bb) < 1e-12);
        CHECK(got.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("singlet projection is symmetric under swapping the two ratios") {
    Rng rng(31);
    for (int k = 0; k < 100; ++k) {
        const double th = rng.uniform(), tv = rng.uniform();
        const PumpConfig pump = pump_with(2.0 * k_pi * rng.uniform());
        const double a =
            bell_projection_probability(output_state(pump, SplitterParams{th, tv}), Bell::PsiMinus);
        const double b =
            bell_projection_probability(output_state(pump, SplitterParams{tv, th}), Bell::PsiMinus);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("triplet at phase pi dominates singlet at phase 0") {
    Rng rng(55);
    for (int k = 0; k < 200; ++k) {
        const double th = 0.02 + 0.96 * rng.uniform();
        const double tv = 0.02 + 0.96 * rng.uniform();
        const SplitterParams sp{th, tv};
        const double p0 = bell_projection_probability(output_state(pump_with(0.0), sp), Bell::PsiMinus);
        const double ppi =
            bell_projection_probability(output_state(pump_with(k_pi), sp), Bell::PsiPlus);
        CHECK(p0 < ppi);
    }
}

TEST_CASE("published splitting ratios give the published projections") {
    const SplitterParams sp{0.996, 0.032};
    const double p0 = bell_projection_probability(output_state(pump_with(0.0), sp), Bell::PsiMinus);
    const double ppi = bell_projection_probability(output_state(pump_with(k_pi), sp), Bell::PsiPlus);
    CHECK(std::abs(p0 - 0.942) <= 0.001);
    CHECK(std::abs(ppi - 0.987) <= 0.001);
}

TEST_CASE("ideal asymmetric splitter produces the exact singlet") {
    const PairAmplitudes s = output_state(pump_with(0.0), SplitterParams{1.0, 0.0});
    CHECK(bell_projection_probability(s, Bell::PsiMinus) == 1.0);
    CHECK(bell_projection_probability(s, Bell::PsiPlus) == 0.0);
    const CoincidenceState c = postselect_coincidence(s);
    CHECK(c.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(c.qubit_state[0] + c.qubit_state[1]) < 1e-12); // amplitudes opposite
}

TEST_CASE("postselection rejects states without coincidence weight") {
    // fully transmissive for both polarizations: both photons exit in one arm
    const PairAmplitudes s = output_state(pump_with(0.0), SplitterParams{1.0, 1.0});
    CHECK_THROWS_AS(postselect_coincidence(s), std::domain_error);
}

TEST_CASE("bell projection validates normalization") {
    PairAmplitudes bogus{cd(1.0), cd(1.0), cd(0.0), cd(0.0)};
    CHECK_THROWS_AS(bell_projection_probability(bogus, Bell::PsiMinus), std::invalid_argument);
}

TEST_CASE("pump validation rejects inconsistent regimes") {
    PumpConfig p = pump_with(0.0);
    p.regime = PumpConfig::Regime::Cw; // bandwidth still 0.3
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.bandwidth_fwhm = 0.0;
    CHECK_NOTHROW(p.validate());
    CHECK(p.effective_bandwidth() == p.cw_linewidth_floor);
    p.weight_1 = p.weight_2 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
