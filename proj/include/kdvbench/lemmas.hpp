#pragma once

#include "kdvbench/fourier_field.hpp"
#include "kdvbench/space_time.hpp"

#include <cstdint>
#include <vector>

namespace kdvbench {

struct GtvResult {
    double value = 0.0;
    double gamma = 0.0;
    /// value * <a>^gamma.
    double ratio = 0.0;
};

/// int <tau>^{-2 alpha} <tau - a>^{-2 beta} d tau by adaptive Gauss-Kronrod
/// quadrature (log-substituted pieces plus an analytic far tail), and its ratio
/// to <a>^{-gamma}, gamma = 2 alpha - [1 - 2 beta]_+ where [0]_+ = epsilon.
/// Requires 0 <= alpha <= beta and alpha + beta > 1/2.
GtvResult gtv_integral(double alpha, double beta, double a, double epsilon = 0.01);

struct PsumResult {
    double value = 0.0;
    /// Partial sum over |n1| <= cutoff / 2, for cutoff-stability checks.
    double half_cutoff_value = 0.0;
    /// Upper bound for the omitted terms |n1| > cutoff (infinity if the
    /// cutoff is too small for the bound to apply).
    double tail_bound = 0.0;
};

/// sum over 0 < |n1| <= cutoff, n1 != n of <n1>^{-l1} <lambda + n1 (n - n1)>^{-l2}.
/// Requires n != 0, l1, l2 > 0 and l1 + 2 l2 > 1.
PsumResult psum(std::int64_t n, double lambda, double l1, double l2, std::int64_t cutoff);

struct PsumGridResult {
    double sup = 0.0;
    double sup_half_cutoff = 0.0;
    std::int64_t argmax_n = 0;
    double argmax_lambda = 0.0;
    /// |sup - sup_half_cutoff| / sup.
    double relative_change = 0.0;
};

PsumGridResult psum_grid(const std::vector<std::int64_t>& ns, const std::vector<double>& lambdas, double l1, double l2,
                         std::int64_t cutoff, int workers = 1);

struct OmegaResult {
    double value = 0.0;
    /// Estimated contribution of the intervals with |n1| beyond the enumeration limit.
    double tail_estimate = 0.0;
    std::size_t intervals = 0;
};

/// int <eta>^{-exponent} chi_Omega(eta) d eta with Omega(n) the union over
/// n1 != 0, n (n2 = n - n1) of [-3 n n1 n2 -+ c0 <n n1 n2>^{1/100}]. The
/// intervals with |n1| <= n1_limit are merged and integrated exactly; the rest
/// is estimated by an integral. Requires n != 0, exponent > 0.51.
OmegaResult omega_integral(std::int64_t n, double exponent, double c0 = 1.0, std::int64_t n1_limit = 2000);

/// Smooth cutoff: 1 on [-1/2, 1/2], 0 outside (-1, 1).
double cutoff_eta(double t);

/// hat(eta)(xi) = int eta(t) exp(-i t xi) dt (real, even).
double cutoff_eta_hat(double xi);

/// Time-localized test input f(n, tau) = phi(n) hat(eta)(tau - n^3), the
/// space-time transform of eta(t) S(t) phi. Values below kernel_tol * max are dropped.
SpaceTimeCoeffs localized_free_solution(const FourierField& phi, const TauGrid& grid,
                                        double kernel_tol = 1e-9);

struct TimeLocalization {
    double T = 0.0;
    double localized_norm = 0.0;
    double reference_norm = 0.0;
    /// localized_norm / (T^{1/p} reference_norm); 0 when u = 0.
    double ratio = 0.0;
};

/// Transform of eta_{2T} u: (1 / 2 pi) hat(eta_{2T}) *_tau f, kernel truncated at kernel_tol.
SpaceTimeCoeffs time_localize(const SpaceTimeCoeffs& f, double T, double kernel_tol = 1e-9);

/// ||eta_{2T} u||_{X^{s,0}_p} / (T^{1/p} ||u||_{X^{s,1/2}_p}).
TimeLocalization time_localization_check(const SpaceTimeCoeffs& f, double T, double s, double p,
                                         double kernel_tol = 1e-9);

}  // namespace kdvbench
