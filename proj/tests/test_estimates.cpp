#include "kdvbench/error.hpp"
#include "kdvbench/estimates.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace kdvbench;

namespace {

double jb(double x) { return 1.0 + std::abs(x); }

double cube(int n) { return static_cast<double>(n) * n * n; }

// Weight from its definition, scanning every k in a generous window.
double weight_brute(int n, double tau, const WeightParams& w)
{
    if (std::abs(n) < w.C) return 1.0;
    const long window = 4 * (std::abs(n) + static_cast<long>(std::sqrt(std::abs(tau)))) + 10;
    double total = 1.0;
    for (long k = -window; k <= window; ++k) {
        if (k == 0) continue;
        const long double lhs = tau - static_cast<long double>(n) * n * n + 3.0L * n * (n - k) * k;
        if (std::fabs(lhs) <= w.c0 * std::pow(jb(n), 0.01)) total += std::pow(std::min(jb(k), jb(n - k)), w.delta);
    }
    return total;
}

// sup over dyadic blocks of the X (inner L^p) or Y (inner L^1) norm, p finite.
double norm_oracle(const SpaceTimeCoeffs& f, double s, double b, double p, bool y)
{
    std::map<int, std::map<int, double>> per_mode;
    f.for_each([&](int n, std::int64_t i, Complex v) {
        const double tau = f.grid().tau(i);
        const double x = std::pow(jb(n), s) * std::pow(jb(tau - cube(n)), b) * std::abs(v);
        per_mode[oracle::block_of(n)][n] += f.grid().dtau * (y ? x : std::pow(x, p));
    });
    double out = 0.0;
    for (const auto& [j, modes] : per_mode) {
        double acc = 0.0;
        for (const auto& [n, m] : modes) acc += y ? std::pow(m, p) : m;
        out = std::max(out, std::pow(acc, 1.0 / p));
    }
    return out;
}

SpaceTimeCoeffs random_coeffs(int cutoff, TauGrid grid, std::uint64_t seed, int points)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> mode(1, cutoff);
    std::uniform_int_distribution<std::int64_t> idx(-grid.half_count(), grid.half_count());
    SpaceTimeCoeffs f(cutoff, grid);
    for (int k = 0; k < points; ++k) {
        const int n = (k % 2 ? -1 : 1) * mode(rng);
        const Complex v(z(rng), z(rng));
        f.add(n, idx(rng), v);
    }
    return f;
}

}  // namespace

TEST_CASE("resonance identity")
{
    const auto scan = resonance_exhaustive(20);
    CHECK(scan.pairs == 41 * 41);
    CHECK(scan.nonzero == 0);
    CHECK(resonance_residual(1 << 20, -(1 << 19)) == 0);
    CHECK_THROWS_AS(resonance_residual((1 << 20) + 1, 1), PreconditionError);

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> m(-500, 500);
    std::uniform_real_distribution<double> t(-1e8, 1e8);
    for (int k = 0; k < 2000; ++k) {
        const int n1 = m(rng), n2 = m(rng);
        if (n1 == 0 || n2 == 0 || n1 + n2 == 0) continue;
        CHECK(max_lower_bound_check(n1, n2, t(rng), t(rng)));
    }
    CHECK_THROWS_AS(max_lower_bound_check(3, -3, 0, 0), PreconditionError);
}

TEST_CASE("space-time lattice storage")
{
    const TauGrid grid{10, 0.5};
    SpaceTimeCoeffs f(3, grid);
    f.add(2, 0, Complex(1, 0));
    f.add(2, 2, Complex(2, 0));
    CHECK(f.segments(2).size() == 2);
    f.add(2, 1, Complex(3, 0));
    REQUIRE(f.segments(2).size() == 1);
    CHECK(f.at(2, 1) == Complex(3, 0));
    f.add(2, 1, Complex(1, 1));
    CHECK(f.at(2, 1) == Complex(4, 1));
    // Clipped at the grid edge (half_count = 20).
    const std::vector<Complex> run(5, Complex(1, 0));
    f.add(-1, 18, run);
    CHECK(f.segments(-1).front().last() == 20);
    CHECK(f.at(-3, 0) == Complex{});
    CHECK_THROWS_AS(f.add(4, 0, Complex(1, 0)), PreconditionError);
    CHECK_THROWS_AS((TauGrid{1.0, 0.3}.validate()), PreconditionError);
}

TEST_CASE("weight matches a brute-force scan of the resonant sets")
{
    const WeightParams w;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> kd(-80, 80);
    const double halfwidth_fudge[] = {0.0, 0.3, -0.7, 0.999, -0.999, 1.001, 2.5};
    for (int n : {-40, -17, -10, -9, 3, 10, 11, 25, 64}) {
        for (int rep = 0; rep < 20; ++rep) {
            const int k = kd(rng);
            const double on_curve = cube(n) - 3.0 * n * (n - k) * k;
            for (double f : halfwidth_fudge) {
                const double tau = on_curve + f * w.c0 * std::pow(jb(n), 0.01);
                CHECK(weight(n, tau, w) == doctest::Approx(weight_brute(n, tau, w)).epsilon(1e-14));
            }
        }
    }
    // Away from every curve the weight is 1; below C it is 1 everywhere.
    CHECK(weight(9, cube(9), w) == 1.0);
    CHECK(weight(20, cube(20), w) > 1.0);
    CHECK(weight(20, 1e9, w) == 1.0);
}

TEST_CASE("X and Y norms of a single grid value")
{
    const TauGrid grid{100, 0.25};
    SpaceTimeCoeffs f(8, grid);
    f.add(5, 300, Complex(3, 4));  // tau = 75
    const double tau = 75.0, lift = std::pow(6.0, -0.49) * std::pow(jb(tau - 125.0), 0.5) * 5.0;
    CHECK(xsb_norm(f, -0.49, 0.5, 2.1) == doctest::Approx(lift * std::pow(0.25, 1 / 2.1)));
    CHECK(ysb_norm(f, -0.49, 0.5, 2.1) == doctest::Approx(lift * 0.25));
    CHECK(xsb_norm(f, -0.49, 0.5, INFINITY) == doctest::Approx(lift));
}

TEST_CASE("norms agree with the block oracle on random data")
{
    const TauGrid grid{300, 0.5};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto f = random_coeffs(20, grid, seed, 200);
        for (double p : {1.0, 2.0, 2.1}) {
            CHECK(xsb_norm(f, -0.49, 0.5, p) == doctest::Approx(norm_oracle(f, -0.49, 0.5, p, false)).epsilon(1e-12));
            CHECK(ysb_norm(f, 0.3, -0.5, p) == doctest::Approx(norm_oracle(f, 0.3, -0.5, p, true)).epsilon(1e-12));
        }
        const WeightParams w;
        const auto wf = f.multiplied([&](int n, double tau) { return weight_brute(n, tau, w); });
        CHECK(wsb_norm(f, 0.0, 0.5, 2.1, w) ==
              doctest::Approx(norm_oracle(wf, 0.0, 0.5, 2.1, false) + norm_oracle(f, 0.0, 0.0, 2.1, true)).epsilon(1e-12));
    }
}

TEST_CASE("Riemann sums converge under grid refinement for smooth profiles")
{
    auto profile = [](int n, double tau) { return Complex(std::exp(-std::pow(tau - cube(n), 2) / 50.0) / n, 0.0); };
    const auto coarse = SpaceTimeCoeffs::dense(4, {128, 0.5}, profile);
    const auto fine = SpaceTimeCoeffs::dense(4, {128, 0.125}, profile);
    CHECK(xsb_norm(coarse, -0.49, 0.0, 2.1) == doctest::Approx(xsb_norm(fine, -0.49, 0.0, 2.1)).epsilon(1e-10));
    CHECK(ysb_norm(coarse, 0.0, 0.0, 2.1) == doctest::Approx(ysb_norm(fine, 0.0, 0.0, 2.1)).epsilon(1e-10));
    // <tau - n^3>^b has a kink on the curve, so b != 0 converges only algebraically.
    CHECK(xsb_norm(coarse, -0.49, 0.5, 2.1) == doctest::Approx(xsb_norm(fine, -0.49, 0.5, 2.1)).epsilon(1e-2));
}

TEST_CASE("bilinear form on single grid values")
{
    const TauGrid grid{2000, 0.5};
    const WeightParams w;
    for (bool weighted : {false, true}) {
        for (auto [n1, i1, n2, i2] : {std::tuple{12, 2016, -3, -54}, std::tuple{-11, -2600, 14, 3400},
                                      std::tuple{5, 250, 6, 400}}) {
            // (12, tau = 1008) lies on the k = 2 resonant curve, so the weight is active there.
            SpaceTimeCoeffs f(16, grid), g(16, grid);
            const Complex a(1.5, -0.5), b(0.25, 2.0);
            f.add(n1, i1, a);
            g.add(n2, i2, b);
            const auto B = bilinear_Bs(f, g, -0.49, w, weighted);
            const int n = n1 + n2;
            const double t1 = grid.tau(i1), t2 = grid.tau(i2), tau = t1 + t2;
            auto D = [&](int m, double t) {
                return std::sqrt(jb(t - cube(m))) * (weighted ? weight_brute(m, t, w) : 1.0);
            };
            const Complex expect = std::pow(jb(tau - cube(n)), -0.5) * std::abs(n) * std::pow(jb(n), -0.49) /
                                   (std::pow(jb(n1), -0.49) * std::pow(jb(n2), -0.49)) * 0.5 * a * b /
                                   (D(n1, t1) * D(n2, t2));
            CHECK(std::abs(B.at(n, i1 + i2) - expect) < 1e-14 * std::abs(expect));
            CHECK(B.stored() == 1);
        }
    }
}

TEST_CASE("bilinear form symmetry, scaling and output norm")
{
    const int N = 16;
    const TauGrid grid = default_tau_grid(N);
    const WeightParams w;
    const auto in = make_trial_inputs(N, grid, TrialKind::NearCurve, 3, 0);
    for (bool weighted : {false, true}) {
        const auto fg = bilinear_Bs(in.f, in.g, -0.49, w, weighted);
        const auto gf = bilinear_Bs(in.g, in.f, -0.49, w, weighted);
        double diff = 0.0, size = 0.0;
        fg.for_each([&](int n, std::int64_t i, Complex v) {
            diff = std::max(diff, std::abs(v - gf.at(n, i)));
            size = std::max(size, std::abs(v));
        });
        CHECK(diff <= 1e-13 * size);

        const double r = bilinear_ratio(in.f, in.g, -0.49, 2.1, w, weighted);
        CHECK(bilinear_ratio(in.f.scaled(3.0), in.g.scaled(0.1), -0.49, 2.1, w, weighted) ==
              doctest::Approx(r).epsilon(1e-12));

        const auto wfg = fg.multiplied([&](int n, double tau) { return weighted ? weight_brute(n, tau, w) : 1.0; });
        const double out = norm_oracle(wfg, 0.0, 0.0, 2.1, false) + norm_oracle(fg, 0.0, -0.5, 2.1, true);
        CHECK(bilinear_output_norm(fg, 2.1, w, weighted) == doctest::Approx(out).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bilinear_Bs(in.f, SpaceTimeCoeffs(8, grid), 0.0, w, false), CutoffMismatch);
}

TEST_CASE("resonant inputs concentrate on the output curve")
{
    const int N = 16;
    const auto in = make_trial_inputs(N, default_tau_grid(N), TrialKind::ResonantCoherent, 1, 1);
    const auto B = bilinear_Bs(in.f, in.g, -0.49, WeightParams{}, false);
    // Every f-g pair with n1 + n2 = 1 lands on (n, tau) = (1, 1), index 2.
    const double peak = std::abs(B.at(1, 2));
    double others = 0.0;
    B.for_each([&](int n, std::int64_t i, Complex v) {
        if (n != 1 || i != 2) others = std::max(others, std::abs(v));
    });
    CHECK(peak > 2.0 * others);
}

TEST_CASE("multiscale resonant inputs have block-bounded norm and coherent output")
{
    const double p = 2.1;
    double previous = 0.0;
    for (int N : {8, 64}) {
        const auto grid = default_tau_grid(N);
        const auto in = make_trial_inputs(N, grid, TrialKind::ResonantMultiscale, 0, 3, p);
        // A block [2^j, 2^{j+1}) holds at most 2^j points of size <= 2^{-j/p}.
        CHECK(xsb_norm(in.f, 0.0, 0.0, p) <= std::pow(grid.dtau, 1.0 / p) * (1.0 + 1e-12));
        CHECK(xsb_norm(in.g, 0.0, 0.0, p) <= std::pow(grid.dtau, 1.0 / p) * (1.0 + 1e-12));
        const auto B = bilinear_Bs(in.f, in.g, -0.49, WeightParams{}, false);
        double others = 0.0;
        B.for_each([&](int n, std::int64_t i, Complex v) {
            if (n != 1 || i != 2) others = std::max(others, std::abs(v));
        });
        CHECK(std::abs(B.at(1, 2)) > 2.0 * others);
        const double u = bilinear_ratio(in.f, in.g, -0.49, p, WeightParams{}, false);
        CHECK(u > previous);
        previous = 1.5 * u;
    }
}

TEST_CASE("sweep is reproducible and independent of the worker count")
{
    const WeightParams w;
    const auto a = bilinear_ratio_sweep(-0.49, 2.1, w, {8, 16}, 6, 2, 1);
    const auto b = bilinear_ratio_sweep(-0.49, 2.1, w, {8, 16}, 6, 2, 3);
    REQUIRE(a.trials.size() == 12);
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].weighted_ratio == b.trials[i].weighted_ratio);
        CHECK(a.trials[i].unweighted_ratio == b.trials[i].unweighted_ratio);
        CHECK(a.trials[i].weighted_ratio > 0.0);
        CHECK(a.trials[i].kind == static_cast<TrialKind>(a.trials[i].trial % kTrialKinds));
    }
    REQUIRE(a.summary.size() == 2);
    CHECK(a.summary[0].cutoff == 8);
    CHECK(bilinear_ratio_sweep(-0.49, 2.1, w, {8}, 0, 2).trials.empty());
    CHECK_THROWS_AS(bilinear_ratio_sweep(-0.49, 2.1, WeightParams{10, 1, 0}, {8}, 1, 0), PreconditionError);
}
