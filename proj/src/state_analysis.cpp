#include "entsim/state_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "entsim/random.hpp"

namespace entsim {

namespace {

constexpr std::complex<double> k_i{0.0, 1.0};

double deg2rad(double d) { return d * M_PI / 180.0; }

std::array<Mat2c, 4> pauli_basis() {
    Mat2c id = Mat2c::Identity();
    Mat2c sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, -k_i, k_i, 0;
    sz << 1, 0, 0, -1;
    return {id, sx, sy, sz};
}

Mat4c kron2(const Mat2c& a, const Mat2c& b) {
    Mat4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

// linear analyzer at angle t (degrees): |t><t| - |t+90><t+90|
Mat2c analyzer(double t_deg) {
    const double t = 2.0 * deg2rad(t_deg);
    Mat2c a;
    a << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    return a;
}

double probability(const Mat4c& rho, const MeasurementSetting& s) {
    const Mat4c proj = kron2(s.projector_a(), s.projector_b());
    const double p = (rho * proj).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

} // namespace

DensityMatrix2Q::DensityMatrix2Q(const Mat4c& elements) : m_(elements) { validate(); }

void DensityMatrix2Q::validate() const {
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("density matrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
        throw std::invalid_argument("density matrix: trace must be 1");
    Eigen::SelfAdjointEigenSolver<Mat4c> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("density matrix: negative eigenvalue");
}

DensityMatrix2Q DensityMatrix2Q::from_pure(const Vec4c& state) {
    const double nrm = state.norm();
    if (nrm <= 0.0) throw std::invalid_argument("from_pure: zero state");
    Vec4c v = state / nrm;
    return DensityMatrix2Q(v * v.adjoint());
}

DensityMatrix2Q DensityMatrix2Q::werner(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("werner: p must lie in [0,1]");
    const Vec4c psi = bell_state(Bell::PsiMinus);
    Mat4c m = p * (psi * psi.adjoint()) + (1.0 - p) * 0.25 * Mat4c::Identity();
    return DensityMatrix2Q(m);
}

DensityMatrix2Q DensityMatrix2Q::maximally_mixed() {
    return DensityMatrix2Q(0.25 * Mat4c::Identity());
}

Vec4c bell_state(Bell which) {
    Vec4c v = Vec4c::Zero();
    const double s = 1.0 / std::sqrt(2.0);
    v(1) = s;                                      // |HV>
    v(2) = which == Bell::PsiPlus ? s : -s;        // |VH>
    return v;
}

Vec2c waveplate_state(double hwp_deg, double qwp_deg) {
    const double t = 2.0 * deg2rad(hwp_deg);
    Mat2c hwp;
    hwp << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    const double q = deg2rad(qwp_deg);
    Mat2c rot;
    rot << std::cos(q), -std::sin(q), std::sin(q), std::cos(q);
    Mat2c ret = Mat2c::Zero();
    ret(0, 0) = 1.0;
    ret(1, 1) = k_i;
    const Mat2c qwp = rot * ret * rot.transpose();
    Vec2c h;
    h << 1.0, 0.0;
    return hwp * qwp.adjoint() * h;
}

Mat2c MeasurementSetting::projector_a() const {
    const Vec2c v = state_a();
    return v * v.adjoint();
}

Mat2c MeasurementSetting::projector_b() const {
    const Vec2c v = state_b();
    return v * v.adjoint();
}

namespace {

struct LabeledAngles {
    const char* label;
    double hwp, qwp;
};

// canonical analyzer settings under the waveplate convention above
constexpr LabeledAngles k_six[] = {
    {"H", 0.0, 0.0},  {"V", 45.0, 0.0}, {"D", 22.5, 0.0},
    {"A", 67.5, 0.0}, {"R", 0.0, 45.0}, {"L", 0.0, -45.0},
};

std::vector<MeasurementSetting> product_settings(const std::vector<int>& idx) {
    std::vector<MeasurementSetting> out;
    out.reserve(idx.size() * idx.size());
    for (int a : idx)
        for (int b : idx)
            out.push_back({k_six[a].hwp, k_six[a].qwp, k_six[b].hwp, k_six[b].qwp,
                           k_six[a].label, k_six[b].label});
    return out;
}

} // namespace

std::vector<MeasurementSetting> tomography_settings_16() {
    return product_settings({0, 1, 2, 4}); // H, V, D, R
}

std::vector<MeasurementSetting> tomography_settings_36() {
    return product_settings({0, 1, 2, 3, 4, 5});
}

double fidelity(const DensityMatrix2Q& rho, const Vec4c& target) {
    const double nrm = target.norm();
    if (nrm <= 0.0) throw std::invalid_argument("fidelity: zero target state");
    const Vec4c t = target / nrm;
    const double f = (t.adjoint() * rho.elements() * t)(0).real();
    return std::clamp(f, 0.0, 1.0);
}

double chsh_fixed(const DensityMatrix2Q& rho, const ChshAngles& angles) {
    auto corr = [&rho](double a_deg, double b_deg) {
        const Mat4c op = kron2(analyzer(a_deg), analyzer(b_deg));
        return (rho.elements() * op).trace().real();
    };
    const double s = corr(angles.a_deg, angles.b_deg) - corr(angles.a_deg, angles.b_prime_deg) +
                     corr(angles.a_prime_deg, angles.b_deg) +
                     corr(angles.a_prime_deg, angles.b_prime_deg);
    return std::abs(s);
}

double chsh_optimal(const DensityMatrix2Q& rho) {
    const auto sigma = pauli_basis();
    Eigen::Matrix3d t;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            t(i - 1, j - 1) = (rho.elements() * kron2(sigma[std::size_t(i)], sigma[std::size_t(j)]))
                                  .trace()
                                  .real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues(); // ascending
    return 2.0 * std::sqrt(ev(2) + ev(1));
}

double werner_fidelity_from_p(double p) { return (1.0 + 3.0 * p) / 4.0; }

double werner_s_from_fidelity(double fidelity) {
    return 2.0 * std::sqrt(2.0) * (4.0 * fidelity - 1.0) / 3.0;
}

std::vector<MeasurementRecord> simulate_counts(const DensityMatrix2Q& rho,
                                               const std::vector<MeasurementSetting>& settings,
                                               double mean_total, std::uint64_t seed,
                                               double background_rate, double integration_seconds) {
    if (!(mean_total > 0.0)) throw std::invalid_argument("simulate_counts: mean_total must be positive");
    if (!(background_rate >= 0.0))
        throw std::invalid_argument("simulate_counts: background_rate must be nonnegative");
    if (!(integration_seconds > 0.0))
        throw std::invalid_argument("simulate_counts: integration_seconds must be positive");

    std::vector<MeasurementRecord> records;
    records.reserve(settings.size());
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const double mean =
            mean_total * probability(rho.elements(), settings[k]) + background_rate * integration_seconds;
        Rng rng(derive_seed(seed, k));
        records.push_back({settings[k], rng.poisson(mean), integration_seconds});
    }
    return records;
}

namespace {

// Pauli expansion vector of a projector: s_k = tr(P sigma_k), real for Hermitian P
Eigen::Vector4d stokes_vector(const Mat2c& p) {
    const auto sigma = pauli_basis();
    Eigen::Vector4d s;
    for (int k = 0; k < 4; ++k) s(k) = (p * sigma[std::size_t(k)]).trace().real();
    return s;
}

Mat4c psd_clip(const Mat4c& herm, double* clipped_weight) {
    Eigen::SelfAdjointEigenSolver<Mat4c> es(herm);
    Eigen::Vector4d ev = es.eigenvalues();
    double clipped = 0.0;
    for (int k = 0; k < 4; ++k)
        if (ev(k) < 0.0) {
            clipped -= ev(k);
            ev(k) = 0.0;
        }
    const double tr = ev.sum();
    if (tr <= 0.0) throw std::runtime_error("psd repair: all eigenvalue mass clipped");
    ev /= tr;
    if (clipped_weight) *clipped_weight = clipped;
    return es.eigenvectors() * ev.cast<std::complex<double>>().asDiagonal() *
           es.eigenvectors().adjoint();
}

std::vector<double> setting_probabilities(const Mat4c& rho,
                                          const std::vector<MeasurementRecord>& records) {
    std::vector<double> p(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const Mat4c proj = kron2(records[k].setting.projector_a(), records[k].setting.projector_b());
        p[k] = std::max((rho * proj).trace().real(), 1e-15);
    }
    return p;
}

std::vector<double> effective_counts(const std::vector<MeasurementRecord>& records,
                                     double background_rate) {
    std::vector<double> n(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double raw = double(records[k].counts) - background_rate * records[k].integration_seconds;
        n[k] = std::max(raw, 0.0);
    }
    return n;
}

} // namespace

LinearInversion tomography_linear(const std::vector<MeasurementRecord>& records,
                                  double background_rate) {
    if (records.size() < 16)
        throw std::invalid_argument("tomography_linear: need at least 16 records");
    const auto n_eff = effective_counts(records, background_rate);

    Eigen::MatrixXd design(records.size(), 16);
    Eigen::VectorXd y(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const Eigen::Vector4d sa = stokes_vector(records[k].setting.projector_a());
        const Eigen::Vector4d sb = stokes_vector(records[k].setting.projector_b());
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) design(Eigen::Index(k), 4 * i + j) = 0.25 * sa(i) * sb(j);
        y(Eigen::Index(k)) = n_eff[k];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 16)
        throw std::invalid_argument("tomography_linear: settings are not informationally complete");
    const Eigen::VectorXd w = qr.solve(y); // w = flux * r

    const double flux = w(0); // r_00 = tr(rho) = 1
    if (!(flux > 0.0)) throw std::runtime_error("tomography_linear: nonpositive estimated flux");

    const auto sigma = pauli_basis();
    Mat4c raw = Mat4c::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            raw += (0.25 * w(4 * i + j) / flux) * kron2(sigma[std::size_t(i)], sigma[std::size_t(j)]);

    double clipped = 0.0;
    Mat4c repaired = psd_clip((raw + raw.adjoint()) / 2.0, &clipped);
    return {DensityMatrix2Q(repaired), raw, flux, clipped};
}

namespace {

// rho = G G^dagger / tr(G G^dagger) with G lower-triangular: 4 real diagonal
// params then interleaved (re, im) for the 6 sub-diagonal entries.
Mat4c g_from_params(const Eigen::Matrix<double, 16, 1>& x) {
    Mat4c g = Mat4c::Zero();
    g(0, 0) = x(0);
    g(1, 1) = x(1);
    g(2, 2) = x(2);
    g(3, 3) = x(3);
    int k = 4;
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < r; ++c) {
            g(r, c) = std::complex<double>(x(k), x(k + 1));
            k += 2;
        }
    return g;
}

Eigen::Matrix<double, 16, 1> params_from_g(const Mat4c& g) {
    Eigen::Matrix<double, 16, 1> x;
    x(0) = g(0, 0).real();
    x(1) = g(1, 1).real();
    x(2) = g(2, 2).real();
    x(3) = g(3, 3).real();
    int k = 4;
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < r; ++c) {
            x(k) = g(r, c).real();
            x(k + 1) = g(r, c).imag();
            k += 2;
        }
    return x;
}

struct MleObjective {
    const std::vector<MeasurementRecord>& records;
    const std::vector<double>& n_eff;
    std::vector<Mat4c> projectors;
    double n_tot;

    MleObjective(const std::vector<MeasurementRecord>& recs, const std::vector<double>& n)
        : records(recs), n_eff(n) {
        projectors.reserve(recs.size());
        for (const auto& r : recs)
            projectors.push_back(kron2(r.setting.projector_a(), r.setting.projector_b()));
        n_tot = 0.0;
        for (double v : n) n_tot += v;
    }

    Mat4c rho_of(const Mat4c& g) const {
        Mat4c gg = g * g.adjoint();
        const double tr = gg.trace().real();
        if (!(tr > 0.0)) throw std::runtime_error("mle: zero-trace parameterization");
        return gg / tr;
    }

    double value(const Mat4c& g) const {
        const Mat4c rho = rho_of(g);
        double sum_p = 0.0, h = 0.0;
        for (std::size_t k = 0; k < projectors.size(); ++k) {
            const double p = std::max((rho * projectors[k]).trace().real(), 1e-15);
            h += n_eff[k] * std::log(p);
            sum_p += p;
        }
        return h - n_tot * std::log(sum_p);
    }

    // gradient wrt the 16 real params at G; dh = 2 Re tr(M dG^dagger),
    // M = (W G - tr(W rho) G) / tr(G G^dagger),
    // W = sum (n_k / p_k) P_k - (Ntot / sum p) sum P_k
    Eigen::Matrix<double, 16, 1> gradient(const Mat4c& g) const {
        const Mat4c gg = g * g.adjoint();
        const double tr = gg.trace().real();
        const Mat4c rho = gg / tr;
        Mat4c w = Mat4c::Zero();
        double sum_p = 0.0;
        std::vector<double> p(projectors.size());
        for (std::size_t k = 0; k < projectors.size(); ++k) {
            p[k] = std::max((rho * projectors[k]).trace().real(), 1e-15);
            sum_p += p[k];
        }
        for (std::size_t k = 0; k < projectors.size(); ++k)
            w += (n_eff[k] / p[k] - n_tot / sum_p) * projectors[k];
        const double c = (w * rho).trace().real();
        const Mat4c m = (w * g - c * g) / tr;

        Eigen::Matrix<double, 16, 1> grad;
        grad(0) = 2.0 * m(0, 0).real();
        grad(1) = 2.0 * m(1, 1).real();
        grad(2) = 2.0 * m(2, 2).real();
        grad(3) = 2.0 * m(3, 3).real();
        int k = 4;
        for (int r = 1; r < 4; ++r)
            for (int cc = 0; cc < r; ++cc) {
                grad(k) = 2.0 * m(r, cc).real();
                grad(k + 1) = 2.0 * m(r, cc).imag();
                k += 2;
            }
        return grad;
    }
};

} // namespace

TomographyResult tomography_mle(const std::vector<MeasurementRecord>& records,
                                const DensityMatrix2Q& init, double tolerance, int max_iterations,
                                double background_rate) {
    if (records.size() < 16) throw std::invalid_argument("tomography_mle: need at least 16 records");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tomography_mle: tolerance must be positive");
    const auto n_eff = effective_counts(records, background_rate);
    MleObjective obj(records, n_eff);

    // PSD-by-construction start: Cholesky of a slightly mixed init
    const Mat4c mixed = 0.999999 * init.elements() + 1e-6 * 0.25 * Mat4c::Identity();
    Eigen::LLT<Mat4c> llt(mixed);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("tomography_mle: init factorization failed");
    Eigen::Matrix<double, 16, 1> x = params_from_g(Mat4c(llt.matrixL()));

    double h = obj.value(g_from_params(x));
    double step = 1.0 / std::max(obj.n_tot, 1.0);
    int iter = 0;
    bool converged = false;
    for (; iter < max_iterations; ++iter) {
        const Eigen::Matrix<double, 16, 1> grad = obj.gradient(g_from_params(x));
        const double gnorm2 = grad.squaredNorm();
        if (gnorm2 == 0.0) {
            converged = true;
            break;
        }
        double h_new = -1e300;
        Eigen::Matrix<double, 16, 1> x_new;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            x_new = x + step * grad;
            h_new = obj.value(g_from_params(x_new));
            if (h_new > h + 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = true; // line search exhausted: numerically at the optimum
            break;
        }
        const double dh = h_new - h;
        x = x_new;
        h = h_new;
        step *= 1.5;
        if (std::abs(dh) < tolerance * (1.0 + std::abs(h))) {
            converged = true;
            ++iter;
            break;
        }
    }

    const Mat4c g = g_from_params(x);
    Mat4c rho = obj.rho_of(g);
    rho = (rho + rho.adjoint()) / 2.0;
    DensityMatrix2Q out(rho);
    const double ll = log_likelihood(out, records, background_rate);
    // The ascent starts from the slightly mixed factorization above, so on
    // flat likelihoods it can land a hair below the caller's init; never
    // return anything worse than what we were given.
    const double ll_init = log_likelihood(init, records, background_rate);
    if (ll < ll_init) return {init, ll_init, iter, converged};
    return {out, ll, iter, converged};
}

double log_likelihood(const DensityMatrix2Q& rho, const std::vector<MeasurementRecord>& records,
                      double background_rate) {
    const auto n_eff = effective_counts(records, background_rate);
    const auto p = setting_probabilities(rho.elements(), records);
    double n_tot = 0.0;
    for (double v : n_eff) n_tot += v;
    double sum_p = 0.0;
    for (double v : p) sum_p += v;
    const double flux = n_tot > 0.0 ? n_tot / sum_p : 0.0;
    // full Poisson log-likelihood at the profiled flux
    double ll = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double mu = std::max(flux * p[k], 1e-300);
        ll += n_eff[k] * std::log(mu) - mu - std::lgamma(n_eff[k] + 1.0);
    }
    return ll;
}

ErrorBars error_bars(const std::vector<MeasurementRecord>& records, Estimator estimator,
                     int n_bootstrap, std::uint64_t seed, const Vec4c& target,
                     const ChshAngles& angles, double background_rate) {
    if (n_bootstrap < 100) throw std::invalid_argument("error_bars: n_bootstrap must be >= 100");

    std::vector<double> f(static_cast<std::size_t>(n_bootstrap)),
        sf(static_cast<std::size_t>(n_bootstrap)), so(static_cast<std::size_t>(n_bootstrap));

#pragma omp parallel for schedule(static)
    for (int b = 0; b < n_bootstrap; ++b) {
        Rng rng(derive_seed(seed, std::uint64_t(b)));
        std::vector<MeasurementRecord> resampled = records;
        for (auto& r : resampled) r.counts = rng.poisson(double(r.counts));
        DensityMatrix2Q rho = [&] {
            if (estimator == Estimator::Linear)
                return tomography_linear(resampled, background_rate).rho;
            const auto lin = tomography_linear(resampled, background_rate);
            return tomography_mle(resampled, lin.rho, 1e-10, 4000, background_rate).rho;
        }();
        f[std::size_t(b)] = fidelity(rho, target);
        sf[std::size_t(b)] = chsh_fixed(rho, angles);
        so[std::size_t(b)] = chsh_optimal(rho);
    }

    auto mean_std = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        s2 /= double(v.size() - 1);
        return std::pair<double, double>(m, std::sqrt(s2));
    };
    const auto [fm, fs] = mean_std(f);
    const auto [sfm, sfs] = mean_std(sf);
    const auto [som, sos] = mean_std(so);
    return {fm, fs, sfm, sfs, som, sos};
}

} // namespace entsim
