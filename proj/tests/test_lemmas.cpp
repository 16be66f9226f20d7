#include "kdvbench/error.hpp"
#include "kdvbench/estimates.hpp"
#include "kdvbench/lemmas.hpp"
#include "kdvbench/white_noise.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

using namespace kdvbench;

namespace {

// int (1 + |t|)^{-1} (1 + |t - a|)^{-1} dt by partial fractions, a > 0.
double gtv_half_half(double a)
{
    return 2.0 * std::log1p(a) * (1.0 / a + 1.0 / (2.0 + a));
}

// Composite Simpson on [-1, 1].
double eta_hat_simpson(double xi)
{
    constexpr int n = 20000;
    const double h = 2.0 / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = -1.0 + k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * cutoff_eta(t) * std::cos(xi * t);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("integral lemma closed forms")
{
    CHECK(gtv_integral(0.5, 0.5, 0.0).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gtv_integral(1.0, 1.0, 0.0).value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    for (double a : {0.5, 3.0, 10.0, 1e3, 1e6}) {
        CHECK(gtv_integral(0.5, 0.5, a).value == doctest::Approx(gtv_half_half(a)).epsilon(1e-8));
        CHECK(gtv_integral(0.5, 0.5, -a).value == doctest::Approx(gtv_integral(0.5, 0.5, a).value).epsilon(1e-12));
    }
    // alpha = 0: int <t - a>^{-2 beta} is a-independent, 2 / (2 beta - 1).
    CHECK(gtv_integral(0.0, 0.75, 37.0).value == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("integral lemma exponent and preconditions")
{
    CHECK(gtv_integral(0.3, 0.4, 5.0).gamma == doctest::Approx(0.6 - 0.2));
    CHECK(gtv_integral(0.5, 0.5, 5.0).gamma == doctest::Approx(0.99));
    CHECK(gtv_integral(0.5, 0.5, 5.0, 0.05).gamma == doctest::Approx(0.95));
    CHECK(gtv_integral(0.3, 0.6, 5.0).gamma == doctest::Approx(0.6));
    const auto r = gtv_integral(0.26, 0.26, 100.0);
    CHECK(r.ratio == doctest::Approx(r.value * std::pow(101.0, r.gamma)));
    CHECK_THROWS_AS(gtv_integral(0.1, 0.2, 1.0), PreconditionError);
    CHECK_THROWS_AS(gtv_integral(0.5, 0.4, 1.0), PreconditionError);
    CHECK_THROWS_AS(gtv_integral(-0.1, 0.8, 1.0), PreconditionError);
}

TEST_CASE("integral lemma ratio stays bounded over the a-sweep")
{
    for (auto [alpha, beta] : {std::pair{0.5, 0.5}, std::pair{0.26, 0.26}, std::pair{0.1, 0.45}}) {
        double lo = INFINITY, hi = 0.0;
        for (double a = 10.0; a <= 1e6; a *= 10.0) {
            const double r = gtv_integral(alpha, beta, a).ratio;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CHECK(hi / lo < 10.0);
    }
}

TEST_CASE("lattice sum against direct summation")
{
    for (auto [n, lambda] : {std::pair{1L, 0.0}, std::pair{3L, 5.5}, std::pair{-7L, -40.0}, std::pair{10L, 1e4}}) {
        long double direct = 0.0L;
        for (long m = -2000; m <= 2000; ++m) {
            if (m == 0 || m == n) continue;
            direct += 1.0L / ((1.0L + std::abs(m)) * (1.0L + std::fabs(lambda + static_cast<long double>(m) * (n - m))));
        }
        const auto r = psum(n, lambda, 1.0, 1.0, 2000);
        CHECK(r.value == doctest::Approx(static_cast<double>(direct)).epsilon(1e-13));
        CHECK(r.tail_bound > 0.0);
    }
    // Non-integer exponents go through pow.
    long double direct = 0.0L;
    for (long m = -500; m <= 500; ++m) {
        if (m == 0 || m == 2) continue;
        direct += std::pow(1.0L + std::abs(m), -0.7L) * std::pow(1.0L + std::fabs(3.0L + m * (2 - m)), -0.4L);
    }
    CHECK(psum(2, 3.0, 0.7, 0.4, 500).value == doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
}

TEST_CASE("lattice sum converges in the cutoff")
{
    const auto r = psum(1, 0.0, 1.0, 1.0, 1000000);
    CHECK(std::abs(r.value - r.half_cutoff_value) / r.value < 1e-6);
    // The tail bound covers the omitted part.
    const auto small = psum(1, 0.0, 1.0, 1.0, 1000);
    CHECK(r.value - small.value <= small.tail_bound);
    CHECK_THROWS_AS(psum(1, 0.0, 0.5, 0.25, 10), PreconditionError);
    CHECK_THROWS_AS(psum(0, 0.0, 1.0, 1.0, 10), PreconditionError);

    const std::vector<std::int64_t> ns{1, 5, -20};
    const std::vector<double> lambdas{0.0, -30.0, 1e4};
    const auto grid = psum_grid(ns, lambdas, 1.0, 1.0, 20000, 3);
    double sup = 0.0;
    for (auto n : ns) {
        for (double l : lambdas) sup = std::max(sup, psum(n, l, 1.0, 1.0, 20000).value);
    }
    CHECK(grid.sup == sup);
    CHECK(grid.relative_change < 1e-6);
}

TEST_CASE("near-curve set integral")
{
    CHECK(omega_integral(5, 0.75, 0.0).value == 0.0);
    CHECK_THROWS_AS(omega_integral(5, 0.5), PreconditionError);
    CHECK_THROWS_AS(omega_integral(0, 0.75), PreconditionError);
    // Pointwise domination by the smaller exponent.
    for (long n : {1L, 7L, 300L}) CHECK(omega_integral(n, 2.0).value <= omega_integral(n, 0.75).value);

    // Against midpoint quadrature of the indicator of the union, n1_limit = 20.
    const long n = 2;
    std::vector<std::pair<double, double>> iv;
    for (long n1 = -20; n1 <= 20; ++n1) {
        const long n2 = n - n1;
        if (n1 == 0 || n2 == 0) continue;
        const double m = static_cast<double>(n * n1 * n2);
        const double h = std::pow(1.0 + std::abs(m), 0.01);
        iv.emplace_back(-3 * m - h, -3 * m + h);
    }
    const double step = 1e-4;
    double acc = 0.0;
    for (long k = 0; k < 30000000; ++k) {
        const double mid = -300.0 + (k + 0.5) * step;
        const bool inside = std::any_of(iv.begin(), iv.end(), [&](const auto& p) { return p.first <= mid && mid <= p.second; });
        if (inside) acc += step * std::pow(1.0 + std::abs(mid), -0.75);
    }
    const auto r = omega_integral(n, 0.75, 1.0, 20);
    // Each of the ~80 interval edges costs the midpoint rule up to one step.
    CHECK(r.value - r.tail_estimate == doctest::Approx(acc).epsilon(5e-4));
}

TEST_CASE("near-curve set integral is uniform in n")
{
    double hi = 0.0;
    for (long n = 1; n <= 1000; n += 37) hi = std::max(hi, omega_integral(n, 0.75).value);
    CHECK(hi < 10.0);
    CHECK(omega_integral(1000, 0.75).value < omega_integral(1, 0.75).value);
}

TEST_CASE("time cutoff and its transform")
{
    CHECK(cutoff_eta(0.0) == 1.0);
    CHECK(cutoff_eta(0.5) == 1.0);
    CHECK(cutoff_eta(-1.0) == 0.0);
    CHECK(cutoff_eta(0.75) == doctest::Approx(0.5));
    for (double t = 0.5; t < 1.0; t += 0.01) CHECK(cutoff_eta(t) >= cutoff_eta(t + 0.01));
    CHECK(cutoff_eta_hat(0.0) == doctest::Approx(1.5).epsilon(1e-14));
    for (double xi : {0.3, 1.0, 7.5, 40.0, 150.0}) {
        CHECK(cutoff_eta_hat(xi) == doctest::Approx(eta_hat_simpson(xi)).epsilon(1e-9));
        CHECK(cutoff_eta_hat(-xi) == cutoff_eta_hat(xi));
    }
}

TEST_CASE("time localization of a free solution")
{
    const FourierField phi = sample({4, 9, 0});
    const TauGrid grid{1024, 0.5};
    const auto f = localized_free_solution(phi, grid);
    // f(n, tau) = phi(n) hat(eta)(tau - n^3).
    CHECK(std::abs(f.at(3, 54) - phi[3] * cutoff_eta_hat(0.0)) < 1e-14);
    CHECK(std::abs(f.at(-2, -10) - phi[-2] * cutoff_eta_hat(3.0)) < 1e-14);

    // eta_{2T} eta = eta for T >= 1, and eta_{2T} eta S(t) phi = eta_{2T} S(t) phi for T <= 1/4.
    auto max_error = [&](const SpaceTimeCoeffs& got, auto&& expect) {
        double err = 0.0;
        got.for_each([&](int n, std::int64_t i, Complex v) { err = std::max(err, std::abs(v - expect(n, grid.tau(i)))); });
        return err;
    };
    for (double T : {1.0, 2.0}) {
        CHECK(max_error(time_localize(f, T), [&](int n, double tau) {
                  return phi[n] * cutoff_eta_hat(tau - n * n * n);
              }) < 1e-8);
    }
    for (double T : {0.25, 0.125, 1.0 / 32}) {
        CHECK(max_error(time_localize(f, T), [&](int n, double tau) {
                  return phi[n] * (2 * T * cutoff_eta_hat(2 * T * (tau - n * n * n)));
              }) < 1e-8);
    }
    CHECK_THROWS_AS(time_localize(f, 0.0), PreconditionError);
}

TEST_CASE("time localization ratio stays bounded as T shrinks")
{
    const FourierField phi = sample({4, 2, 0});
    const auto f = localized_free_solution(phi, TauGrid{16384, 0.5});
    double lo = INFINITY, hi = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const auto r = time_localization_check(f, std::ldexp(1.0, -k), -0.49, 2.1);
        CHECK(r.reference_norm == doctest::Approx(xsb_norm(f, -0.49, 0.5, 2.1)));
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    CHECK(hi / lo < 4.0);
    CHECK(time_localization_check(SpaceTimeCoeffs(4, TauGrid{64, 0.5}), 0.5, 0.0, 2.0).ratio == 0.0);
}
