#pragma once

#include "kdvbench/space_time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kdvbench {

/// (n1 + n2)^3 - n1^3 - n2^3 - 3 (n1 + n2) n1 n2 in exact integer arithmetic.
/// Requires |n1|, |n2| <= 2^20.
std::int64_t resonance_residual(std::int64_t n1, std::int64_t n2);

struct ResonanceScan {
    std::int64_t bound = 0;
    std::uint64_t pairs = 0;
    std::uint64_t nonzero = 0;
};

/// resonance_residual over all |n1|, |n2| <= bound.
ResonanceScan resonance_exhaustive(std::int64_t bound);

/// max(<tau - n^3>, <tau1 - n1^3>, <tau2 - n2^3>) >= <3 n n1 n2> / 3 with
/// n = n1 + n2, tau = tau1 + tau2. Requires n, n1, n2 != 0.
bool max_lower_bound_check(std::int64_t n1, std::int64_t n2, double tau1, double tau2);

/// Concrete constants of the weight: A_k = {|n| >= C, |tau - n^3 + 3n(n-k)k| <= c0 <n>^{1/100}}.
struct WeightParams {
    double C = 10.0;
    double c0 = 1.0;
    double delta = 0.01;

    void validate() const;
};

/// The k != 0 with (n, tau) in A_k, increasing. Found from the quadratic in k.
std::vector<std::int64_t> weight_indices(std::int64_t n, double tau, const WeightParams& params);

/// w(n, tau) = 1 + sum_{k != 0} min(<k>, <n - k>)^delta chi_{A_k}(n, tau).
double weight(std::int64_t n, double tau, const WeightParams& params);

/// sup_j || <n>^s <tau - n^3>^b f ||_{L^p_{|n|~2^j} L^p_tau}; tau integrals are Riemann sums.
double xsb_norm(const SpaceTimeCoeffs& f, double s, double b, double p);

/// Same with the inner norm L^1_tau.
double ysb_norm(const SpaceTimeCoeffs& f, double s, double b, double p);

/// || w f ||_{X^{s,b}_p} + || f ||_{Y^{s,b-1/2}_p}.
double wsb_norm(const SpaceTimeCoeffs& f, double s, double b, double p, const WeightParams& params);

/// B_s(f, g)(n, tau) = <tau - n^3>^{-1/2} sum_{n1 + n2 = n, n1 != 0, n}
///     |n| <n>^s / (<n1>^s <n2>^s) int f(n1, t1) g(n2, tau - t1) / (D(n1, t1) D(n2, tau - t1)) dt1
/// with D(m, t) = <t - m^3>^{1/2}, times w(m, t) when `weighted`. The tau
/// integral is a Riemann sum; contributions leaving the grid are dropped.
/// The 1/(2 pi) prefactor is omitted. Throws CutoffMismatch on lattice mismatch.
SpaceTimeCoeffs bilinear_Bs(const SpaceTimeCoeffs& f, const SpaceTimeCoeffs& g, double s, const WeightParams& params,
                            bool weighted);

/// || B ||_{W^{0,-1/2}_p} where B_s = <tau - n^3>^{-1/2} B, i.e.
/// || w B_s ||_{X^{0,0}_p} + || B_s ||_{Y^{0,-1/2}_p}; w = 1 when not weighted.
double bilinear_output_norm(const SpaceTimeCoeffs& bs, double p, const WeightParams& params, bool weighted);

/// ResonantMultiscale repeats the ResonantCoherent pairing across every dyadic
/// block, each block scaled to unit l^p mass. The input norms take a sup over
/// blocks while the output adds the blocks coherently at (1, 1).
enum class TrialKind { NearCurve, ResonantCoherent, OnCurvePair, ResonantMultiscale };

inline constexpr int kTrialKinds = 4;

std::string to_string(TrialKind kind);

/// Seeded input pair for one sweep trial on the lattice for cutoff N.
struct TrialInputs {
    TrialKind kind;
    SpaceTimeCoeffs f;
    SpaceTimeCoeffs g;
};

TrialInputs make_trial_inputs(int cutoff, const TauGrid& grid, TrialKind kind, std::uint64_t seed,
                              std::uint64_t trial, double p = 2.0);

/// Default lattice for cutoff N: tau_max = 4 N^3, dtau = 1/2.
TauGrid default_tau_grid(int cutoff);

struct SweepTrial {
    int cutoff = 0;
    std::uint64_t trial = 0;
    TrialKind kind = TrialKind::NearCurve;
    double weighted_ratio = 0.0;
    double unweighted_ratio = 0.0;
};

struct SweepSummary {
    int cutoff = 0;
    std::size_t trials = 0;
    double max_weighted = 0.0;
    double max_unweighted = 0.0;
};

struct SweepResult {
    std::vector<SweepTrial> trials;
    std::vector<SweepSummary> summary;
};

/// ||B(f, g)||_{W^{0,-1/2}_p} / (||f|| ||g||), norms in b^0_{p,inf} L^p_tau, for
/// the weighted form (params) and the unweighted control (w = 1). Trial kinds
/// cycle through TrialKind in declaration order.
SweepResult bilinear_ratio_sweep(double s, double p, const WeightParams& params, const std::vector<int>& cutoffs,
                                 std::size_t trials, std::uint64_t seed, int workers = 1);

/// The single-trial ratio used by the sweep.
double bilinear_ratio(const SpaceTimeCoeffs& f, const SpaceTimeCoeffs& g, double s, double p,
                      const WeightParams& params, bool weighted);

}  // namespace kdvbench
