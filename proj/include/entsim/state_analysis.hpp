#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "entsim/polarization.hpp"

namespace entsim {

using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec2c = Eigen::Vector2cd;
using Vec4c = Eigen::Vector4cd;

// 4x4 polarization density matrix over the basis {HH, HV, VH, VV}
// (first slot = output A, second = output B). Hermitian, unit trace, PSD.
class DensityMatrix2Q {
public:
    explicit DensityMatrix2Q(const Mat4c& elements);

    static DensityMatrix2Q from_pure(const Vec4c& state);
    static DensityMatrix2Q werner(double p);
    static DensityMatrix2Q maximally_mixed();

    const Mat4c& elements() const { return m_; }
    void validate() const; // hermitian 1e-10, trace 1e-10, eigenvalues >= -1e-9

private:
    Mat4c m_;
};

Vec4c bell_state(Bell which);

// |m> = HWP(hwp) * QWP(qwp)^dagger |H>: the photon traverses a half-waveplate
// at hwp, a quarter-waveplate at qwp, then an H-transmitting splitter.
// HWP(t) = [[cos2t, sin2t], [sin2t, -cos2t]],
// QWP(q) = R(q) diag(1, i) R(-q).
// Canonical settings: H(0,0) V(45,0) D(22.5,0) A(67.5,0) R(0,45) L(0,-45),
// with R = (|H> - i|V>)/sqrt(2).
Vec2c waveplate_state(double hwp_deg, double qwp_deg);

struct MeasurementSetting {
    double hwp_a_deg, qwp_a_deg;
    double hwp_b_deg, qwp_b_deg;
    std::string label_a, label_b;

    Vec2c state_a() const { return waveplate_state(hwp_a_deg, qwp_a_deg); }
    Vec2c state_b() const { return waveplate_state(hwp_b_deg, qwp_b_deg); }
    Mat2c projector_a() const;
    Mat2c projector_b() const;
};

// {H,V,D,R} x {H,V,D,R}: the informationally complete 16-setting default.
std::vector<MeasurementSetting> tomography_settings_16();
// {H,V,D,A,R,L} x {H,V,D,A,R,L}: overcomplete 36-setting option.
std::vector<MeasurementSetting> tomography_settings_36();

struct MeasurementRecord {
    MeasurementSetting setting;
    std::uint64_t counts;
    double integration_seconds;
};

double fidelity(const DensityMatrix2Q& rho, const Vec4c& target);

struct ChshAngles {
    double a_deg, a_prime_deg, b_deg, b_prime_deg;
};
inline constexpr ChshAngles default_chsh_angles{0.0, 45.0, 22.5, 67.5};

// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| with linear analyzers.
double chsh_fixed(const DensityMatrix2Q& rho, const ChshAngles& angles = default_chsh_angles);

// Horodecki optimum 2*sqrt(m1 + m2), the two largest eigenvalues of T^T T.
double chsh_optimal(const DensityMatrix2Q& rho);

// Werner-line identities: F = (1+3p)/4 and S_opt = 2 sqrt(2) p.
double werner_fidelity_from_p(double p);
double werner_s_from_fidelity(double fidelity);

// counts ~ Poisson(mean_total * tr(rho Pa x Pb) + background_rate * integration)
std::vector<MeasurementRecord> simulate_counts(const DensityMatrix2Q& rho,
                                               const std::vector<MeasurementSetting>& settings,
                                               double mean_total, std::uint64_t seed,
                                               double background_rate = 0.0,
                                               double integration_seconds = 1.0);

struct LinearInversion {
    DensityMatrix2Q rho;   // PSD-repaired (eigenvalue clipping + trace renorm)
    Mat4c raw;             // direct inversion, possibly non-PSD
    double total_flux;     // estimated mean_total
    double clipped_weight; // negative eigenvalue mass removed by the repair
};

LinearInversion tomography_linear(const std::vector<MeasurementRecord>& records,
                                  double background_rate = 0.0);

struct TomographyResult {
    DensityMatrix2Q rho;
    double log_likelihood;
    int iterations;
    bool converged;
};

// Poisson maximum likelihood over rho = G G^dagger / tr(G G^dagger) with the
// total flux profiled out analytically; gradient ascent with backtracking.
// The result never scores below `init` in log_likelihood.
TomographyResult tomography_mle(const std::vector<MeasurementRecord>& records,
                                const DensityMatrix2Q& init, double tolerance = 1e-10,
                                int max_iterations = 4000, double background_rate = 0.0);

// Profiled Poisson log-likelihood of rho for the records (N hat = Ntot / sum p).
double log_likelihood(const DensityMatrix2Q& rho, const std::vector<MeasurementRecord>& records,
                      double background_rate = 0.0);

enum class Estimator { Linear, Mle };

struct ErrorBars {
    double fidelity_mean, fidelity_std;
    double s_fixed_mean, s_fixed_std;
    double s_optimal_mean, s_optimal_std;
};

// Parametric bootstrap: resample counts ~ Poisson(observed), re-estimate,
// return sample means/stds of fidelity-to-target and both CHSH statistics.
ErrorBars error_bars(const std::vector<MeasurementRecord>& records, Estimator estimator,
                     int n_bootstrap, std::uint64_t seed, const Vec4c& target,
                     const ChshAngles& angles = default_chsh_angles,
                     double background_rate = 0.0);

} // namespace entsim
