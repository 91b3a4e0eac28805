#include "entsim/polarization.hpp"

#include <cmath>
#include <stdexcept>

namespace entsim {

void SplitterParams::validate() const {
    if (!(t_h >= 0.0 && t_h <= 1.0)) throw std::invalid_argument("splitter.t_h must lie in [0,1]");
    if (!(t_v >= 0.0 && t_v <= 1.0)) throw std::invalid_argument("splitter.t_v must lie in [0,1]");
}

void PumpConfig::validate() const {
    if (!std::isfinite(phase)) throw std::invalid_argument("pump.phase must be finite");
    if (!(weight_1 >= 0.0) || !(weight_2 >= 0.0))
        throw std::invalid_argument("pump weights must be nonnegative");
    if (weight_1 * weight_1 + weight_2 * weight_2 <= 0.0)
        throw std::invalid_argument("pump weights must not both vanish");
    if (!(center_wavelength > 0.0))
        throw std::invalid_argument("pump.center_wavelength must be positive");
    if (!(bandwidth_fwhm >= 0.0))
        throw std::invalid_argument("pump.bandwidth_fwhm must be nonnegative");
    if ((bandwidth_fwhm == 0.0) != (regime == Regime::Cw))
        throw std::invalid_argument("pump.bandwidth_fwhm = 0 exactly when pump.regime is cw");
    if (!(cw_linewidth_floor > 0.0))
        throw std::invalid_argument("pump.cw_linewidth_floor must be positive");
}

double PumpConfig::effective_bandwidth() const {
    return regime == Regime::Cw ? cw_linewidth_floor : bandwidth_fwhm;
}

double PairAmplitudes::norm_squared() const {
    return std::norm(c_aa) + std::norm(c_ahbv) + std::norm(c_avbh) + std::norm(c_bb);
}

std::pair<std::complex<double>, std::complex<double>>
apply_splitter(int input_mode, Pol polarization, const SplitterParams& params) {
    params.validate();
    if (input_mode != 1 && input_mode != 2)
        throw std::invalid_argument("apply_splitter: input_mode must be 1 or 2");
    const double t = polarization == Pol::H ? params.t_h : params.t_v;
    const double r = 1.0 - t;
    if (input_mode == 1) return {std::sqrt(t), -std::sqrt(r)};
    return {std::sqrt(r), std::sqrt(t)};
}

PairAmplitudes output_state(const PumpConfig& pump, const SplitterParams& params) {
    pump.validate();
    params.validate();

    const double wn = std::sqrt(pump.weight_1 * pump.weight_1 + pump.weight_2 * pump.weight_2);
    const double w1 = pump.weight_1 / wn;
    const std::complex<double> w2 =
        (pump.weight_2 / wn) * std::exp(std::complex<double>(0.0, pump.phase));

    const double th = params.t_h, tv = params.t_v;
    const double rh = params.r_h(), rv = params.r_v();

    PairAmplitudes out;
    out.c_aa = w1 * std::sqrt(tv * th) + w2 * std::sqrt(rv * rh);
    out.c_ahbv = w1 * std::sqrt(rv * th) - w2 * std::sqrt(tv * rh);
    out.c_avbh = w1 * std::sqrt(tv * rh) - w2 * std::sqrt(rv * th);
    out.c_bb = w1 * std::sqrt(rv * rh) + w2 * std::sqrt(tv * th);

    // already unit norm by unitarity; the division pins the invariant under FP
    const double nrm = std::sqrt(out.norm_squared());
    out.c_aa /= nrm;
    out.c_ahbv /= nrm;
    out.c_avbh /= nrm;
    out.c_bb /= nrm;
    return out;
}

double bell_projection_probability(const PairAmplitudes& state, Bell which) {
    const double n2 = state.norm_squared();
    if (std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("bell_projection_probability: state must be normalized");
    const std::complex<double> amp =
        which == Bell::PsiMinus ? state.c_ahbv - state.c_avbh : state.c_ahbv + state.c_avbh;
    // dividing by the (unit) norm instead of trusting it keeps the ideal-device
    // case pinned at exactly 1.0 under floating point
    return std::min(0.5 * std::norm(amp) / n2, 1.0);
}

CoincidenceState postselect_coincidence(const PairAmplitudes& state) {
    if (std::abs(state.norm_squared() - 1.0) > 1e-9)
        throw std::invalid_argument("postselect_coincidence: state must be normalized");
    const double success = std::norm(state.c_ahbv) + std::norm(state.c_avbh);
    if (success <= 1e-300)
        throw std::domain_error("postselect_coincidence: zero coincidence weight");
    const double scale = 1.0 / std::sqrt(success);
    CoincidenceState out;
    out.qubit_state[0] = state.c_ahbv * scale;
    out.qubit_state[1] = state.c_avbh * scale;
    out.success_probability = success;
    return out;
}

} // namespace entsim
