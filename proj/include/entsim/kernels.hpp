#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace entsim::kernels {

enum class Exec { Serial, Parallel };

// Deterministic pairwise reduction over a fixed-order buffer. The result
// depends only on the buffer contents, never on thread count or scheduling.
double pairwise_sum(std::vector<double> v);
std::complex<double> pairwise_sum(std::vector<std::complex<double>> v);

// out[i*n + j] = f(xs[i], ys[j]); rows are independent, so the parallel and
// serial paths produce bit-identical grids.
template <class T, class F>
void fill_grid(T* out, const double* xs, const double* ys, int n, F&& f,
               Exec exec = Exec::Parallel) {
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i) {
            T* row = out + std::size_t(i) * n;
            for (int j = 0; j < n; ++j) row[j] = f(xs[i], ys[j]);
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        T* row = out + std::size_t(i) * n;
        for (int j = 0; j < n; ++j) row[j] = f(xs[i], ys[j]);
    }
}

// sum over the n x n grid of |a[i,j]|^2; fixed per-row order + pairwise
// reduction across rows, so Serial and Parallel agree bitwise.
double sum_abs2(const std::complex<double>* a, int n, Exec exec = Exec::Parallel);

// sum over the grid of a[i,j] * conj(a[j,i]) (exchange-mirror inner product)
std::complex<double> exchange_dot(const std::complex<double>* a, int n,
                                  Exec exec = Exec::Parallel);

// Naive left-to-right accumulation. Kept as the oracle the deterministic
// kernels are tested and benchmarked against.
namespace reference {
double sum_abs2(const std::complex<double>* a, int n);
std::complex<double> exchange_dot(const std::complex<double>* a, int n);
} // namespace reference

} // namespace entsim::kernels
