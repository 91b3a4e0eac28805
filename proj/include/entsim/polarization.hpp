#pragma once

#include <complex>
#include <utility>

namespace entsim {

enum class Pol { H, V };
enum class Bell { PsiPlus, PsiMinus };

// Polarization-dependent power transmissivities of the on-chip splitter.
// Reflectivities are derived, never stored: t + r = 1 holds exactly.
struct SplitterParams {
    double t_h = 1.0;
    double t_v = 0.0;

    double r_h() const { return 1.0 - t_h; }
    double r_v() const { return 1.0 - t_v; }
    void validate() const;
};

// Pump settings shared by the interferometric model (phase, per-guide weights)
// and the spectral model (center wavelength, bandwidth, regime).
struct PumpConfig {
    enum class Regime { Cw, Pulsed };

    double phase = 0.0;                  // rad, relative phase between the two guides
    double weight_1 = 1.0;               // nonnegative source weights, normalized internally
    double weight_2 = 1.0;
    double center_wavelength = 777.22;   // nm
    double bandwidth_fwhm = 0.3;         // nm intensity FWHM; 0 denotes cw
    Regime regime = Regime::Pulsed;
    double cw_linewidth_floor = 1e-3;    // nm, makes the cw ridge representable on a grid

    void validate() const;
    double effective_bandwidth() const;  // bandwidth_fwhm, or the linewidth floor for cw
};

// Two-photon amplitudes over the ordered basis {A_H A_V, A_H B_V, A_V B_H, B_H B_V}.
struct PairAmplitudes {
    std::complex<double> c_aa, c_ahbv, c_avbh, c_bb;
    double norm_squared() const;
};

// Result of post-selecting one photon in each output.
struct CoincidenceState {
    std::complex<double> qubit_state[2]; // over {H_A V_B, V_A H_B}
    double success_probability;          // |c_ahbv|^2 + |c_avbh|^2 of the parent state
};

// Amplitudes on the output modes (A, B) for a single photon entering
// waveguide input_mode (1 or 2) with the given polarization. The reflected
// port of input 1 carries the minus sign; each per-polarization 2x2 is unitary.
std::pair<std::complex<double>, std::complex<double>>
apply_splitter(int input_mode, Pol polarization, const SplitterParams& params);

// Four-term output state of the superposed two-guide source.
PairAmplitudes output_state(const PumpConfig& pump, const SplitterParams& params);

// |<psi+-|state>|^2 evaluated directly as |c_ahbv -+ c_avbh|^2 / 2.
double bell_projection_probability(const PairAmplitudes& state, Bell which);

CoincidenceState postselect_coincidence(const PairAmplitudes& state);

} // namespace entsim
