// Timings for the grid kernels: deterministic parallel vs serial vs the naive
// reference accumulator, plus one end-to-end spectral build. Also asserts the
// parallel results are bit-identical to the serial ones, which is the whole
// point of the fixed reduction order.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "entsim/config.hpp"
#include "entsim/kernels.hpp"
#include "entsim/pipeline.hpp"
#include "entsim/spectral.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

} // namespace

int main() {
    using namespace entsim;
    const int n = 1024;

    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = ys[i] = 1553.0 + 3.0 * i / (n - 1);

    auto f = [](double x, double y) {
        const double u = x - 1554.44, v = y - 1554.44;
        return std::complex<double>(std::exp(-u * u - v * v) * std::cos(3.0 * u * v),
                                    std::exp(-0.5 * (u * u + v * v)) * std::sin(u - v));
    };

    std::vector<std::complex<double>> grid_serial(std::size_t(n) * n), grid_parallel(grid_serial);

    const double t_fill_s = time_best_of(3, [&] {
        kernels::fill_grid(grid_serial.data(), xs.data(), ys.data(), n, f, kernels::Exec::Serial);
    });
    const double t_fill_p = time_best_of(3, [&] {
        kernels::fill_grid(grid_parallel.data(), xs.data(), ys.data(), n, f, kernels::Exec::Parallel);
    });
    for (std::size_t k = 0; k < grid_serial.size(); ++k) {
        if (grid_serial[k] != grid_parallel[k]) {
            std::fprintf(stderr, "fill_grid: serial/parallel mismatch at %zu\n", k);
            return 1;
        }
    }

    const double t_sum_ref = time_best_of(5, [&] {
        volatile double sink = kernels::reference::sum_abs2(grid_serial.data(), n);
        (void)sink;
    });
    double sum_s = 0, sum_p = 0;
    const double t_sum_s = time_best_of(5, [&] {
        sum_s = kernels::sum_abs2(grid_serial.data(), n, kernels::Exec::Serial);
    });
    const double t_sum_p = time_best_of(5, [&] {
        sum_p = kernels::sum_abs2(grid_serial.data(), n, kernels::Exec::Parallel);
    });
    if (sum_s != sum_p) {
        std::fprintf(stderr, "sum_abs2: serial/parallel mismatch\n");
        return 1;
    }

    std::complex<double> dot_s, dot_p;
    const double t_dot_ref = time_best_of(5, [&] {
        volatile double sink = std::abs(kernels::reference::exchange_dot(grid_serial.data(), n));
        (void)sink;
    });
    const double t_dot_s = time_best_of(5, [&] {
        dot_s = kernels::exchange_dot(grid_serial.data(), n, kernels::Exec::Serial);
    });
    const double t_dot_p = time_best_of(5, [&] {
        dot_p = kernels::exchange_dot(grid_serial.data(), n, kernels::Exec::Parallel);
    });
    if (dot_s != dot_p) {
        std::fprintf(stderr, "exchange_dot: serial/parallel mismatch\n");
        return 1;
    }

    const SourceConfig cfg = default_config();
    const GridSpec gspec = analysis_grid(cfg);
    JsaGrid jsa_s, jsa_p;
    const double t_jsa_s = time_best_of(2, [&] {
        jsa_s = build_jsa(cfg.pm_wg1, cfg.pump, gspec, kernels::Exec::Serial);
    });
    const double t_jsa_p = time_best_of(2, [&] {
        jsa_p = build_jsa(cfg.pm_wg1, cfg.pump, gspec, kernels::Exec::Parallel);
    });
    for (std::size_t k = 0; k < jsa_s.amplitude.size(); ++k) {
        if (jsa_s.amplitude[k] != jsa_p.amplitude[k]) {
            std::fprintf(stderr, "build_jsa: serial/parallel mismatch at %zu\n", k);
            return 1;
        }
    }

    std::printf("kernel timings, %d x %d grid (best of a few reps)\n", n, n);
    std::printf("  %-14s %10s %10s %10s %9s\n", "kernel", "reference", "serial", "parallel", "speedup");
    std::printf("  %-14s %10s %10.4f %10.4f %8.2fx\n", "fill_grid", "-", t_fill_s, t_fill_p,
                t_fill_s / t_fill_p);
    std::printf("  %-14s %10.4f %10.4f %10.4f %8.2fx\n", "sum_abs2", t_sum_ref, t_sum_s, t_sum_p,
                t_sum_s / t_sum_p);
    std::printf("  %-14s %10.4f %10.4f %10.4f %8.2fx\n", "exchange_dot", t_dot_ref, t_dot_s, t_dot_p,
                t_dot_s / t_dot_p);
    std::printf("  %-14s %10s %10.4f %10.4f %8.2fx\n", "build_jsa", "-", t_jsa_s, t_jsa_p,
                t_jsa_s / t_jsa_p);
    std::printf("serial and parallel paths agree bitwise on every kernel\n");
    return 0;
}
