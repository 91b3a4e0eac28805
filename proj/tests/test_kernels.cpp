#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "entsim/kernels.hpp"

using namespace entsim::kernels;
using cd = std::complex<double>;

namespace {

std::vector<double> symmetric_axis(int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[std::size_t(i)] = -1.5 + 3.0 * i / (n - 1);
    return xs;
}

std::vector<cd> test_grid(int n) {
    const auto xs = symmetric_axis(n);
    std::vector<cd> a(std::size_t(n) * n);
    fill_grid(
        a.data(), xs.data(), xs.data(), n,
        [](double x, double y) {
            return cd(std::exp(-x * x - y * y) * std::cos(4.0 * x * y), std::sin(x - 2.0 * y));
        },
        Exec::Serial);
    return a;
}

} // namespace

TEST_CASE("pairwise_sum equals the exact sum on integers") {
    for (const int n : {0, 1, 2, 3, 7, 64, 1000}) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[std::size_t(i)] = i + 1;
        CHECK(pairwise_sum(v) == double(n) * (n + 1) / 2);
    }
    std::vector<cd> c{{1, 2}, {3, -4}, {-2, 1}};
    CHECK(pairwise_sum(c) == cd(2, -1));
}

TEST_CASE("parallel grid fill is bit-identical to serial") {
    const int n = 257; // odd size shakes out edge chunking
    const auto xs = symmetric_axis(n);
    auto f = [](double x, double y) { return cd(std::cos(x * y), std::sin(x + y)); };
    std::vector<cd> s(std::size_t(n) * n), p(std::size_t(n) * n);
    fill_grid(s.data(), xs.data(), xs.data(), n, f, Exec::Serial);
    fill_grid(p.data(), xs.data(), xs.data(), n, f, Exec::Parallel);
    for (std::size_t k = 0; k < s.size(); ++k) REQUIRE(s[k] == p[k]);
}

TEST_CASE("reductions are bit-identical across exec modes and match the reference") {
    for (const int n : {64, 255, 512}) {
        const auto a = test_grid(n);

        const double ss = sum_abs2(a.data(), n, Exec::Serial);
        const double sp = sum_abs2(a.data(), n, Exec::Parallel);
        CHECK(ss == sp);
        CHECK(ss == doctest::Approx(reference::sum_abs2(a.data(), n)).epsilon(1e-13));

        const cd ds = exchange_dot(a.data(), n, Exec::Serial);
        const cd dp = exchange_dot(a.data(), n, Exec::Parallel);
        CHECK(ds == dp);
        const cd dr = reference::exchange_dot(a.data(), n);
        CHECK(std::abs(ds - dr) <= 1e-13 * std::abs(dr) + 1e-13);
    }
}

TEST_CASE("exchange_dot of a transpose-symmetric grid equals sum_abs2") {
    // f[j][i] == f[i][j] makes every exchange term f[i][j] * conj(f[j][i]) = |f[i][j]|^2.
    const int n = 128;
    auto a = test_grid(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const cd v = 0.5 * (a[std::size_t(i) * n + j] + a[std::size_t(j) * n + i]);
            a[std::size_t(i) * n + j] = v;
            a[std::size_t(j) * n + i] = v;
        }
    const cd d = exchange_dot(a.data(), n);
    const double s = sum_abs2(a.data(), n);
    CHECK(std::abs(d.imag()) < 1e-12 * s);
    CHECK(d.real() == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("exchange_dot vanishes for separable grids with orthogonal factors") {
    // f(x, y) = g(x) h(y) gives exchange_dot = <g,h><h,g>; even g and odd h on a
    // symmetric axis are orthogonal, so the exchange inner product collapses to ~0.
    const int n = 200;
    const auto xs = symmetric_axis(n);
    std::vector<cd> a(std::size_t(n) * n);
    fill_grid(
        a.data(), xs.data(), xs.data(), n,
        [](double x, double y) { return cd(std::exp(-x * x) * (y * std::exp(-y * y)), 0.0); },
        Exec::Serial);
    const cd d = exchange_dot(a.data(), n);
    CHECK(std::abs(d) < 1e-12 * sum_abs2(a.data(), n));
}
