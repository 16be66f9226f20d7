#include "kdvbench/lemmas.hpp"

#include "kdvbench/error.hpp"
#include "kdvbench/estimates.hpp"
#include "kdvbench/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kdvbench {

namespace {

// Far-tail integrands are integrated in u = log(1 + x) up to this value;
// beyond it the remainder is added in closed form.
constexpr double kLogTailEnd = 650.0;

template <class F>
double adaptive(F&& f, double a, double b)
{
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 18, 1e-10, &error);
}

// int_0^X h(x) dx with x = e^u - 1 (X may be infinite).
template <class LogH>
double integrate_log_substituted(LogH&& log_h, double upper)
{
    const double u_end = std::isinf(upper) ? kLogTailEnd : std::log1p(upper);
    return adaptive([&](double u) { return std::exp(u + log_h(std::expm1(u))); }, 0.0, u_end);
}

}  // namespace

GtvResult gtv_integral(double alpha, double beta, double a, double epsilon)
{
    if (!(alpha >= 0.0 && alpha <= beta && alpha + beta > 0.5)) {
        throw PreconditionError("gtv_integral: need 0 <= alpha <= beta and alpha + beta > 1/2");
    }
    const double shift = std::abs(a);
    auto log_g = [&](double tau) {
        return -2.0 * alpha * std::log1p(std::abs(tau)) - 2.0 * beta * std::log1p(std::abs(tau - shift));
    };
    const double decay = 2.0 * alpha + 2.0 * beta;
    const double far = std::exp(kLogTailEnd * (1.0 - decay)) / (decay - 1.0);
    const double inf = std::numeric_limits<double>::infinity();

    double value = 0.0;
    value += integrate_log_substituted([&](double x) { return log_g(-x); }, inf) + far;
    value += integrate_log_substituted([&](double x) { return log_g(shift + x); }, inf) + far;
    if (shift > 0.0) {
        value += integrate_log_substituted([&](double x) { return log_g(x); }, shift / 2.0);
        value += integrate_log_substituted([&](double x) { return log_g(shift - x); }, shift / 2.0);
    }

    const double bracket_term = 1.0 - 2.0 * beta;
    const double positive_part = bracket_term > 0.0 ? bracket_term : (bracket_term == 0.0 ? epsilon : 0.0);
    GtvResult r;
    r.value = value;
    r.gamma = 2.0 * alpha - positive_part;
    r.ratio = value * std::pow(bracket(shift), r.gamma);
    return r;
}

namespace {

inline double inverse_power(double base, double exponent)
{
    if (exponent == 1.0) return 1.0 / base;
    if (exponent == 2.0) return 1.0 / (base * base);
    return std::pow(base, -exponent);
}

void check_psum_exponents(double l1, double l2)
{
    if (!(l1 > 0.0 && l2 > 0.0 && l1 + 2.0 * l2 > 1.0)) {
        throw PreconditionError("psum: need l1, l2 > 0 and l1 + 2 l2 > 1");
    }
}

}  // namespace

PsumResult psum(std::int64_t n, double lambda, double l1, double l2, std::int64_t cutoff)
{
    check_psum_exponents(l1, l2);
    if (n == 0) throw PreconditionError("psum: n must be nonzero");
    if (cutoff < 1) throw PreconditionError("psum: cutoff must be >= 1");
    const double nd = static_cast<double>(n);
    auto term = [&](std::int64_t n1) {
        const double m = static_cast<double>(n1);
        return inverse_power(bracket(m), l1) * inverse_power(bracket(lambda + m * (nd - m)), l2);
    };
    PsumResult r;
    const std::int64_t half = cutoff / 2;
    for (std::int64_t k = 1; k <= cutoff; ++k) {
        double pair = 0.0;
        if (k != n) pair += term(k);
        if (-k != n) pair += term(-k);
        r.value += pair;
        if (k == half) r.half_cutoff_value = r.value;
    }
    if (half == 0) r.half_cutoff_value = 0.0;

    // For |n1| >= 2|n| and n1^2 >= 4|lambda| the second factor is >= n1^2 / 4.
    const double k0 = std::max(2.0 * std::abs(nd), 2.0 * std::sqrt(std::abs(lambda)));
    const double e = l1 + 2.0 * l2;
    const double k = static_cast<double>(cutoff);
    r.tail_bound = k >= k0 ? 2.0 * std::pow(4.0, l2) * std::pow(k, 1.0 - e) / (e - 1.0)
                           : std::numeric_limits<double>::infinity();
    return r;
}

PsumGridResult psum_grid(const std::vector<std::int64_t>& ns, const std::vector<double>& lambdas, double l1, double l2,
                         std::int64_t cutoff, int workers)
{
    check_psum_exponents(l1, l2);
    std::vector<PsumResult> cells(ns.size() * lambdas.size());
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        cells[i] = psum(ns[i / lambdas.size()], lambdas[i % lambdas.size()], l1, l2, cutoff);
    });
    PsumGridResult out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].value > out.sup) {
            out.sup = cells[i].value;
            out.argmax_n = ns[i / lambdas.size()];
            out.argmax_lambda = lambdas[i % lambdas.size()];
        }
        out.sup_half_cutoff = std::max(out.sup_half_cutoff, cells[i].half_cutoff_value);
    }
    out.relative_change = out.sup > 0 ? std::abs(out.sup - out.sup_half_cutoff) / out.sup : 0.0;
    return out;
}

namespace {

// Antiderivative of (1 + |x|)^{-e}.
double bracket_power_primitive(double x, double e)
{
    const double ax = std::abs(x);
    const double v = e == 1.0 ? std::log1p(ax) : (std::pow(1.0 + ax, 1.0 - e) - 1.0) / (1.0 - e);
    return x < 0 ? -v : v;
}

}  // namespace

OmegaResult omega_integral(std::int64_t n, double exponent, double c0, std::int64_t n1_limit)
{
    if (n == 0) throw PreconditionError("omega_integral: n must be nonzero");
    if (!(exponent > 0.51)) throw PreconditionError("omega_integral: exponent must exceed 0.51");
    if (!(c0 >= 0.0)) throw PreconditionError("omega_integral: c0 must be >= 0");
    if (n1_limit < 1) throw PreconditionError("omega_integral: n1_limit must be >= 1");
    OmegaResult r;
    if (c0 == 0.0) return r;

    std::vector<std::pair<double, double>> intervals;
    intervals.reserve(static_cast<std::size_t>(2 * n1_limit));
    for (std::int64_t n1 = -n1_limit; n1 <= n1_limit; ++n1) {
        const std::int64_t n2 = n - n1;
        if (n1 == 0 || n2 == 0) continue;
        const double m = static_cast<double>(n) * static_cast<double>(n1) * static_cast<double>(n2);
        const double half_width = c0 * std::pow(bracket(m), 0.01);
        intervals.emplace_back(-3.0 * m - half_width, -3.0 * m + half_width);
    }
    std::sort(intervals.begin(), intervals.end());
    double lo = intervals.front().first, hi = intervals.front().second;
    auto flush = [&] {
        r.value += bracket_power_primitive(hi, exponent) - bracket_power_primitive(lo, exponent);
        ++r.intervals;
    };
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        if (intervals[i].first <= hi) {
            hi = std::max(hi, intervals[i].second);
        } else {
            flush();
            lo = intervals[i].first;
            hi = intervals[i].second;
        }
    }
    flush();

    // Intervals with n1 < -n1_limit (paired with n - n1 > n1_limit + n) are
    // disjoint and of length ~ 2 c0 (|n| x^2)^{1/100} at distance ~ 3 |n| x^2.
    const double an = std::abs(static_cast<double>(n));
    const double start = static_cast<double>(n1_limit) + 0.5;
    const double power = 1.02 - 2.0 * exponent;
    r.tail_estimate = 2.0 * c0 * std::pow(an, 0.01) * std::pow(3.0 * an, -exponent) * std::pow(start, power) / -power;
    r.value += r.tail_estimate;
    return r;
}

double cutoff_eta(double t)
{
    const double a = std::abs(t);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    const double left = std::exp(-1.0 / (1.0 - a));
    const double right = std::exp(-1.0 / (a - 0.5));
    return left / (left + right);
}

double cutoff_eta_hat(double xi)
{
    // 2 int_0^{1/2} cos(xi t) dt plus the transition layer by composite Gauss-Legendre.
    const double plateau = xi == 0.0 ? 1.0 : 2.0 * std::sin(0.5 * xi) / xi;
    const int pieces = std::max(8, static_cast<int>(std::abs(xi) / 2.0) + 1);
    const double width = 0.5 / pieces;
    double layer = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double a = 0.5 + k * width;
        layer += boost::math::quadrature::gauss<double, 20>::integrate(
            [xi](double t) { return cutoff_eta(t) * std::cos(xi * t); }, a, a + width);
    }
    return plateau + 2.0 * layer;
}

namespace {

// Smallest xi beyond which |hat(eta)| stays below tol * hat(eta)(0), scanning
// the envelope over one oscillation window at geometrically spaced points.
double eta_hat_support(double tol)
{
    const double peak = cutoff_eta_hat(0.0);
    for (double xi = 4.0; xi < 1e5; xi *= 1.1) {
        double envelope = 0.0;
        for (int k = 0; k < 16; ++k) envelope = std::max(envelope, std::abs(cutoff_eta_hat(xi + 0.8 * k)));
        if (envelope < tol * peak) return xi;
    }
    return 1e5;
}

}  // namespace

SpaceTimeCoeffs localized_free_solution(const FourierField& phi, const TauGrid& grid, double kernel_tol)
{
    grid.validate();
    const double support = eta_hat_support(kernel_tol);
    const auto width = static_cast<std::int64_t>(std::ceil(support / grid.dtau));
    SpaceTimeCoeffs out(phi.cutoff(), grid);
    std::vector<Complex> values(static_cast<std::size_t>(2 * width + 1));
    for (int n = -phi.cutoff(); n <= phi.cutoff(); ++n) {
        if (n == 0 || phi[n] == Complex{}) continue;
        const double curve = static_cast<double>(n) * n * n;
        const std::int64_t centre = std::llround(curve / grid.dtau);
        for (std::int64_t k = -width; k <= width; ++k) {
            values[static_cast<std::size_t>(k + width)] = phi[n] * cutoff_eta_hat(grid.tau(centre + k) - curve);
        }
        out.add(n, centre - width, values);
    }
    return out;
}

SpaceTimeCoeffs time_localize(const SpaceTimeCoeffs& f, double T, double kernel_tol)
{
    if (!(T > 0.0)) throw PreconditionError("time_localize: T must be positive");
    const TauGrid& grid = f.grid();
    // hat(eta_{2T})(tau) = 2T hat(eta)(2T tau).
    const double support = eta_hat_support(kernel_tol) / (2.0 * T);
    const auto width = static_cast<std::int64_t>(std::ceil(support / grid.dtau));
    std::vector<double> kernel(static_cast<std::size_t>(2 * width + 1));
    for (std::int64_t k = -width; k <= width; ++k) {
        kernel[static_cast<std::size_t>(k + width)] =
            grid.dtau / (2.0 * std::numbers::pi) * 2.0 * T * cutoff_eta_hat(2.0 * T * grid.tau(k));
    }
    SpaceTimeCoeffs out(f.cutoff(), grid);
    std::vector<Complex> conv;
    for (int n = -f.cutoff(); n <= f.cutoff(); ++n) {
        if (n == 0) continue;
        for (const Segment& seg : f.segments(n)) {
            conv.assign(seg.values.size() + kernel.size() - 1, Complex{});
            for (std::size_t i = 0; i < seg.values.size(); ++i) {
                const Complex v = seg.values[i];
                if (v == Complex{}) continue;
                for (std::size_t j = 0; j < kernel.size(); ++j) conv[i + j] += v * kernel[j];
            }
            out.add(n, seg.first - width, conv);
        }
    }
    return out;
}

TimeLocalization time_localization_check(const SpaceTimeCoeffs& f, double T, double s, double p, double kernel_tol)
{
    TimeLocalization r;
    r.T = T;
    r.reference_norm = xsb_norm(f, s, 0.5, p);
    if (r.reference_norm == 0.0) return r;
    r.localized_norm = xsb_norm(time_localize(f, T, kernel_tol), s, 0.0, p);
    r.ratio = r.localized_norm / (std::pow(T, 1.0 / p) * r.reference_norm);
    return r;
}

}  // namespace kdvbench
