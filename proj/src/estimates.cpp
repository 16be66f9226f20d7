#include "kdvbench/estimates.hpp"

#include "kdvbench/error.hpp"
#include "kdvbench/parallel.hpp"
#include "kdvbench/white_noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

namespace kdvbench {

namespace {

double cube(std::int64_t n) { return static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n); }

double abs_d(std::int64_t n) { return static_cast<double>(n < 0 ? -n : n); }

int dyadic_block(int n)
{
    return std::bit_width(static_cast<unsigned>(n < 0 ? -n : n)) - 1;
}

// |tau - n^3 + 3 n (n - k) k| <= c0 <n>^{1/100}, evaluated in long double.
bool in_resonant_set(std::int64_t n, std::int64_t k, double tau, const WeightParams& params)
{
    const long double nn = static_cast<long double>(n);
    const long double kk = static_cast<long double>(k);
    const long double lhs = static_cast<long double>(tau) - nn * nn * nn + 3.0L * nn * (nn - kk) * kk;
    return std::fabs(lhs) <= static_cast<long double>(params.c0 * std::pow(bracket(abs_d(n)), 0.01));
}

}  // namespace

std::int64_t resonance_residual(std::int64_t n1, std::int64_t n2)
{
    constexpr std::int64_t limit = std::int64_t{1} << 20;
    if (std::abs(n1) > limit || std::abs(n2) > limit) throw PreconditionError("resonance_residual: |n_i| > 2^20");
    const __int128 a = n1, b = n2, n = a + b;
    const __int128 r = n * n * n - a * a * a - b * b * b - 3 * n * a * b;
    return static_cast<std::int64_t>(r);
}

ResonanceScan resonance_exhaustive(std::int64_t bound)
{
    ResonanceScan scan;
    scan.bound = bound;
    for (std::int64_t n1 = -bound; n1 <= bound; ++n1) {
        for (std::int64_t n2 = -bound; n2 <= bound; ++n2) {
            ++scan.pairs;
            if (resonance_residual(n1, n2) != 0) ++scan.nonzero;
        }
    }
    return scan;
}

bool max_lower_bound_check(std::int64_t n1, std::int64_t n2, double tau1, double tau2)
{
    const std::int64_t n = n1 + n2;
    if (n == 0 || n1 == 0 || n2 == 0) throw PreconditionError("max_lower_bound_check: n, n1, n2 must be nonzero");
    const double tau = tau1 + tau2;
    const double largest =
        std::max({bracket(tau - cube(n)), bracket(tau1 - cube(n1)), bracket(tau2 - cube(n2))});
    const double product = 3.0 * static_cast<double>(n) * static_cast<double>(n1) * static_cast<double>(n2);
    return largest >= bracket(product) / 3.0;
}

void WeightParams::validate() const
{
    if (!(C >= 1.0)) throw PreconditionError("weight: C must be >= 1");
    if (!(c0 >= 0.0)) throw PreconditionError("weight: c0 must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("weight: delta must lie in (0, 1)");
}

std::vector<std::int64_t> weight_indices(std::int64_t n, double tau, const WeightParams& params)
{
    std::vector<std::int64_t> ks;
    if (abs_d(n) < params.C) return ks;
    // With q(k) = (n - k) k = n^2/4 - (k - n/2)^2 the condition reads
    // |q(k) - c| <= t, c = (n^3 - tau) / (3n), t = c0 <n>^{1/100} / (3|n|).
    const double nd = static_cast<double>(n);
    const double t = params.c0 * std::pow(bracket(nd), 0.01) / (3.0 * abs_d(n));
    const double c = (cube(n) - tau) / (3.0 * nd);
    const double hi = nd * nd / 4.0 - c + t;
    if (hi < 0.0) return ks;
    const double lo = nd * nd / 4.0 - c - t;
    const double d_hi = std::sqrt(hi);
    const double d_lo = std::sqrt(std::max(lo, 0.0));
    auto scan = [&](double from, double to) {
        for (auto k = static_cast<std::int64_t>(std::floor(from)) - 1; k <= static_cast<std::int64_t>(std::ceil(to)) + 1;
             ++k) {
            if (k != 0 && in_resonant_set(n, k, tau, params)) ks.push_back(k);
        }
    };
    scan(nd / 2.0 - d_hi, nd / 2.0 - d_lo);
    scan(nd / 2.0 + d_lo, nd / 2.0 + d_hi);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

double weight(std::int64_t n, double tau, const WeightParams& params)
{
    double w = 1.0;
    for (std::int64_t k : weight_indices(n, tau, params)) {
        w += std::pow(std::min(bracket(abs_d(k)), bracket(abs_d(n - k))), params.delta);
    }
    return w;
}

namespace {

enum class Inner { Lp, L1 };

double bourgain_norm(const SpaceTimeCoeffs& f, double s, double b, double p, Inner inner)
{
    if (!(p >= 1.0)) throw PreconditionError("space-time norm: p must be >= 1");
    const bool p_inf = std::isinf(p);
    const TauGrid& grid = f.grid();
    std::map<int, double> blocks;
    for (int n = -f.cutoff(); n <= f.cutoff(); ++n) {
        if (n == 0) continue;
        const double spatial = std::pow(bracket(n), s);
        const double curve = cube(n);
        double mode = 0.0;
        for (const Segment& seg : f.segments(n)) {
            for (std::size_t k = 0; k < seg.values.size(); ++k) {
                const double tau = grid.tau(seg.first + static_cast<std::int64_t>(k));
                const double v = spatial * std::pow(bracket(tau - curve), b) * std::abs(seg.values[k]);
                if (inner == Inner::L1) {
                    mode += grid.dtau * v;
                } else if (p_inf) {
                    mode = std::max(mode, v);
                } else {
                    mode += grid.dtau * std::pow(v, p);
                }
            }
        }
        double& block = blocks[dyadic_block(n)];
        if (inner == Inner::L1) {
            block = p_inf ? std::max(block, mode) : block + std::pow(mode, p);
        } else {
            block = p_inf ? std::max(block, mode) : block + mode;
        }
    }
    double out = 0.0;
    for (const auto& [j, acc] : blocks) out = std::max(out, p_inf ? acc : std::pow(acc, 1.0 / p));
    return out;
}

}  // namespace

double xsb_norm(const SpaceTimeCoeffs& f, double s, double b, double p)
{
    return bourgain_norm(f, s, b, p, Inner::Lp);
}

double ysb_norm(const SpaceTimeCoeffs& f, double s, double b, double p)
{
    return bourgain_norm(f, s, b, p, Inner::L1);
}

double wsb_norm(const SpaceTimeCoeffs& f, double s, double b, double p, const WeightParams& params)
{
    params.validate();
    const SpaceTimeCoeffs wf = f.multiplied([&](int n, double tau) { return weight(n, tau, params); });
    return xsb_norm(wf, s, b, p) + ysb_norm(f, s, b - 0.5, p);
}

SpaceTimeCoeffs bilinear_Bs(const SpaceTimeCoeffs& f, const SpaceTimeCoeffs& g, double s, const WeightParams& params,
                            bool weighted)
{
    if (!f.same_lattice(g)) throw CutoffMismatch("bilinear_Bs: lattices differ");
    if (weighted) params.validate();
    const int cutoff = f.cutoff();
    const TauGrid& grid = f.grid();

    auto denominator = [&](int m, double tau) {
        const double d = std::sqrt(bracket(tau - cube(m)));
        return 1.0 / (weighted ? weight(m, tau, params) * d : d);
    };
    const SpaceTimeCoeffs fd = f.multiplied(denominator);
    const SpaceTimeCoeffs gd = g.multiplied(denominator);

    SpaceTimeCoeffs out(cutoff, grid);
    std::vector<Complex> conv;
    for (int n = -cutoff; n <= cutoff; ++n) {
        if (n == 0) continue;
        const double outer = std::abs(n) * std::pow(bracket(n), s);
        for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
            const int n2 = n - n1;
            if (n1 == 0 || n2 == 0 || std::abs(n2) > cutoff) continue;
            const auto& a = fd.segments(n1);
            const auto& b = gd.segments(n2);
            if (a.empty() || b.empty()) continue;
            const double multiplier = grid.dtau * outer / (std::pow(bracket(n1), s) * std::pow(bracket(n2), s));
            for (const Segment& sa : a) {
                for (const Segment& sb : b) {
                    conv.assign(sa.values.size() + sb.values.size() - 1, Complex{});
                    for (std::size_t i = 0; i < sa.values.size(); ++i) {
                        const Complex x = multiplier * sa.values[i];
                        for (std::size_t j = 0; j < sb.values.size(); ++j) conv[i + j] += x * sb.values[j];
                    }
                    out.add(n, sa.first + sb.first, conv);
                }
            }
        }
    }
    return out.multiplied([](int n, double tau) { return 1.0 / std::sqrt(bracket(tau - cube(n))); });
}

double bilinear_output_norm(const SpaceTimeCoeffs& bs, double p, const WeightParams& params, bool weighted)
{
    if (weighted) return wsb_norm(bs, 0.0, 0.0, p, params);
    return xsb_norm(bs, 0.0, 0.0, p) + ysb_norm(bs, 0.0, -0.5, p);
}

double bilinear_ratio(const SpaceTimeCoeffs& f, const SpaceTimeCoeffs& g, double s, double p,
                      const WeightParams& params, bool weighted)
{
    const double denom = xsb_norm(f, 0.0, 0.0, p) * xsb_norm(g, 0.0, 0.0, p);
    if (denom == 0.0) return 0.0;
    return bilinear_output_norm(bilinear_Bs(f, g, s, params, weighted), p, params, weighted) / denom;
}

std::string to_string(TrialKind kind)
{
    switch (kind) {
    case TrialKind::NearCurve: return "near_curve";
    case TrialKind::ResonantCoherent: return "resonant_coherent";
    case TrialKind::OnCurvePair: return "on_curve_pair";
    case TrialKind::ResonantMultiscale: return "resonant_multiscale";
    }
    return "unknown";
}

TauGrid default_tau_grid(int cutoff)
{
    return {4.0 * cube(cutoff), 0.5};
}

TrialInputs make_trial_inputs(int cutoff, const TauGrid& grid, TrialKind kind, std::uint64_t seed,
                              std::uint64_t trial, double p)
{
    auto engine = make_engine(seed, (static_cast<std::uint64_t>(cutoff) << 32) ^ trial);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    TrialInputs in{kind, SpaceTimeCoeffs(cutoff, grid), SpaceTimeCoeffs(cutoff, grid)};

    // Inputs live on the top full dyadic block [P/2, P) below the cutoff.
    const int top = static_cast<int>(std::bit_floor(static_cast<unsigned>(cutoff)));
    const int lo = std::max(1, top / 2);
    const int hi = std::max(1, top - 1);
    auto index_of = [&](double tau) { return std::llround(tau / grid.dtau); };

    switch (kind) {
    case TrialKind::NearCurve: {
        const double spread = 4.0 * cutoff;
        for (auto* target : {&in.f, &in.g}) {
            for (int m = lo; m <= hi; ++m) {
                for (int n : {m, -m}) {
                    const double centre = cube(n) + spread * (2.0 * uniform(engine) - 1.0);
                    std::vector<Complex> values(5);
                    for (auto& v : values) v = Complex(normal(engine), normal(engine));
                    target->add(n, index_of(centre) - 2, values);
                }
            }
        }
        break;
    }
    case TrialKind::ResonantCoherent: {
        // g sits on the curve at n2 = n0 - n1, f on the resonance surface
        // tau1 - n1^3 = 3 n0 n1 n2, so every pair lands on (n0, n0^3).
        const int n0 = 1;
        for (int n1 = lo; n1 <= hi; ++n1) {
            const int n2 = n0 - n1;
            if (n2 == 0 || std::abs(n2) > cutoff) continue;
            const double a = 0.5 + 0.5 * uniform(engine);
            const double b = 0.5 + 0.5 * uniform(engine);
            in.g.add(n2, index_of(cube(n2)), Complex(a, 0.0));
            in.f.add(n1, index_of(cube(n0) - cube(n2)), Complex(b, 0.0));
        }
        break;
    }
    case TrialKind::OnCurvePair: {
        for (int m = lo; m <= hi; ++m) {
            in.f.add(m, index_of(cube(m)), Complex(normal(engine), normal(engine)));
            in.g.add(-m, index_of(cube(-m)), Complex(normal(engine), normal(engine)));
        }
        break;
    }
    case TrialKind::ResonantMultiscale: {
        const int n0 = 1;
        for (int n1 = 2; n1 < cutoff; ++n1) {
            const int n2 = n0 - n1;
            const double block = std::pow(2.0, -std::floor(std::log2(n1)) / p);
            const double a = 0.5 + 0.5 * uniform(engine);
            const double b = 0.5 + 0.5 * uniform(engine);
            in.g.add(n2, index_of(cube(n2)), Complex(a * block, 0.0));
            in.f.add(n1, index_of(cube(n0) - cube(n2)), Complex(b * block, 0.0));
        }
        break;
    }
    }
    return in;
}

SweepResult bilinear_ratio_sweep(double s, double p, const WeightParams& params, const std::vector<int>& cutoffs,
                                 std::size_t trials, std::uint64_t seed, int workers)
{
    params.validate();
    SweepResult result;
    result.trials.resize(cutoffs.size() * trials);
    parallel_for(result.trials.size(), workers, [&](std::size_t i) {
        const int cutoff = cutoffs[i / trials];
        const std::uint64_t trial = i % trials;
        const auto kind = static_cast<TrialKind>(trial % kTrialKinds);
        const TrialInputs in = make_trial_inputs(cutoff, default_tau_grid(cutoff), kind, seed, trial, p);
        result.trials[i] = {cutoff, trial, kind, bilinear_ratio(in.f, in.g, s, p, params, true),
                            bilinear_ratio(in.f, in.g, s, p, params, false)};
    });
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        SweepSummary row{cutoffs[c], trials, 0.0, 0.0};
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& tr = result.trials[c * trials + t];
            row.max_weighted = std::max(row.max_weighted, tr.weighted_ratio);
            row.max_unweighted = std::max(row.max_unweighted, tr.unweighted_ratio);
        }
        if (trials > 0) result.summary.push_back(row);
    }
    return result;
}

}  // namespace kdvbench
