#pragma once

// Reference computations written from the definitions, sharing no code with
// the library beyond the coefficient accessor.

#include "kdvbench/fourier_field.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using kdvbench::Complex;
using kdvbench::FourierField;

inline FourierField random_field(int cutoff, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<Complex> a(static_cast<std::size_t>(cutoff));
    for (auto& c : a) c = {scale * z(rng), scale * z(rng)};
    return FourierField(std::move(a));
}

/// u(x_j) and u_x(x_j) on x_j = 2 pi j / M by direct summation over -N..N.
inline void grid_values(const FourierField& f, int M, std::vector<double>& u, std::vector<double>& ux)
{
    u.assign(static_cast<std::size_t>(M), 0.0);
    ux.assign(static_cast<std::size_t>(M), 0.0);
    for (int j = 0; j < M; ++j) {
        const double x = 2.0 * std::numbers::pi * j / M;
        Complex v{}, d{};
        for (int n = -f.cutoff(); n <= f.cutoff(); ++n) {
            const Complex e = std::polar(1.0, n * x);
            v += f[n] * e;
            d += Complex(0.0, n) * f[n] * e;
        }
        u[static_cast<std::size_t>(j)] = v.real();
        ux[static_cast<std::size_t>(j)] = d.real();
    }
}

/// (1/M) sum_j g(x_j) exp(-i n x_j).
inline Complex grid_coefficient(const std::vector<double>& g, int n)
{
    const int M = static_cast<int>(g.size());
    Complex acc{};
    for (int j = 0; j < M; ++j) acc += g[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * n * j / M);
    return acc / static_cast<double>(M);
}

/// (fg)^(n) = sum_{n1} f(n1) g(n - n1) over all |n1|, |n - n1| <= N.
inline Complex convolution(const FourierField& f, const FourierField& g, int n)
{
    Complex acc{};
    for (int m = -f.cutoff(); m <= f.cutoff(); ++m) acc += f[m] * g[n - m];
    return acc;
}

/// Dyadic block index j with 2^j <= |n| < 2^{j+1}.
inline int block_of(int n)
{
    int j = 0;
    int a = n < 0 ? -n : n;
    while (a >= 2) {
        a /= 2;
        ++j;
    }
    return j;
}

inline double besov(const FourierField& f, double s, double p, double q)
{
    std::vector<double> blocks;
    for (int n = -f.cutoff(); n <= f.cutoff(); ++n) {
        if (n == 0) continue;
        const auto j = static_cast<std::size_t>(block_of(n));
        if (blocks.size() <= j) blocks.resize(j + 1, 0.0);
        const double v = std::pow(1.0 + std::abs(n), s) * std::abs(f[n]);
        blocks[j] = std::isinf(p) ? std::max(blocks[j], v) : blocks[j] + std::pow(v, p);
    }
    double acc = 0.0;
    for (double b : blocks) {
        const double bj = std::isinf(p) ? b : std::pow(b, 1.0 / p);
        acc = std::isinf(q) ? std::max(acc, bj) : acc + std::pow(bj, q);
    }
    return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

inline double max_abs_diff(const FourierField& a, const FourierField& b)
{
    double m = 0.0;
    for (int n = 1; n <= a.cutoff(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

inline double max_abs(const FourierField& a)
{
    double m = 0.0;
    for (int n = 1; n <= a.cutoff(); ++n) m = std::max(m, std::abs(a[n]));
    return m;
}

}  // namespace oracle
