#include "entsim/kernels.hpp"

namespace entsim::kernels {

namespace {

template <class T>
T pairwise_impl(std::vector<T>& v) {
    if (v.empty()) return T{};
    std::size_t m = v.size();
    while (m > 1) {
        std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (m % 2) {
            v[half] = v[m - 1];
            ++half;
        }
        m = half;
    }
    return v[0];
}

template <class T, class RowOp>
T reduce_rows(int n, RowOp&& row_op, Exec exec) {
    std::vector<T> rows(static_cast<std::size_t>(n));
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i) rows[std::size_t(i)] = row_op(i);
    } else {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) rows[std::size_t(i)] = row_op(i);
    }
    return pairwise_impl(rows);
}

} // namespace

double pairwise_sum(std::vector<double> v) { return pairwise_impl(v); }
std::complex<double> pairwise_sum(std::vector<std::complex<double>> v) { return pairwise_impl(v); }

double sum_abs2(const std::complex<double>* a, int n, Exec exec) {
    return reduce_rows<double>(
        n,
        [a, n](int i) {
            const std::complex<double>* row = a + std::size_t(i) * n;
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += std::norm(row[j]);
            return s;
        },
        exec);
}

std::complex<double> exchange_dot(const std::complex<double>* a, int n, Exec exec) {
    return reduce_rows<std::complex<double>>(
        n,
        [a, n](int i) {
            const std::complex<double>* row = a + std::size_t(i) * n;
            std::complex<double> s{0.0, 0.0};
            for (int j = 0; j < n; ++j) s += row[j] * std::conj(a[std::size_t(j) * n + i]);
            return s;
        },
        exec);
}

namespace reference {

double sum_abs2(const std::complex<double>* a, int n) {
    double s = 0.0;
    const std::size_t m = std::size_t(n) * n;
    for (std::size_t k = 0; k < m; ++k) s += std::norm(a[k]);
    return s;
}

std::complex<double> exchange_dot(const std::complex<double>* a, int n) {
    std::complex<double> s{0.0, 0.0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s += a[std::size_t(i) * n + j] * std::conj(a[std::size_t(j) * n + i]);
    return s;
}

} // namespace reference

} // namespace entsim::kernels
