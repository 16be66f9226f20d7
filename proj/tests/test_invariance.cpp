#include "kdvbench/error.hpp"
#include "kdvbench/invariance.hpp"
#include "kdvbench/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace kdvbench;

namespace {

// sup_x |F_a(x) - F_b(x)| evaluated at every sample point.
double ks_brute(const std::vector<double>& a, const std::vector<double>& b)
{
    auto cdf = [](const std::vector<double>& v, double x) {
        double c = 0;
        for (double y : v) c += y <= x;
        return c / static_cast<double>(v.size());
    };
    double d = 0.0;
    for (const auto* v : {&a, &b}) {
        for (double x : *v) d = std::max(d, std::abs(cdf(a, x) - cdf(b, x)));
    }
    return d;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed, double shift = 0.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng) + shift;
    return v;
}

}  // namespace

TEST_CASE("KS statistic matches the brute-force supremum")
{
    CHECK(ks_two_sample({1, 2, 3}, {4, 5, 6}).statistic == 1.0);
    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}).statistic == 0.0);
    CHECK(ks_two_sample({1, 1, 2}, {1, 2, 2}).statistic == doctest::Approx(1.0 / 3.0));
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto a = normals(37 + s, s), b = normals(50, 100 + s, 0.3);
        // Ties across samples.
        a.push_back(b[0]);
        CHECK(ks_two_sample(a, b).statistic == doctest::Approx(ks_brute(a, b)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(ks_two_sample({}, {1.0}), PreconditionError);
}

TEST_CASE("KS threshold uses the asymptotic critical value")
{
    KsResult r{0.1, 100, 100};
    CHECK(r.threshold(0.05) == doctest::Approx(1.3580986 * std::sqrt(2.0 / 100)).epsilon(1e-6));
    CHECK(r.threshold(0.01) == doctest::Approx(1.6276236 * std::sqrt(2.0 / 100)).epsilon(1e-6));
}

TEST_CASE("KS test is calibrated under the null and powerful against shifts")
{
    int false_rejections = 0, detections = 0;
    constexpr int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const auto a = normals(300, 2 * r), b = normals(300, 2 * r + 1);
        false_rejections += ks_two_sample(a, b).statistic > KsResult{0, 300, 300}.threshold(0.05);
        const auto c = normals(300, 5000 + r, 0.4);
        detections += ks_two_sample(a, c).statistic > KsResult{0, 300, 300}.threshold(0.05);
    }
    // The asymptotic test is slightly conservative; 0.05 +- 3.5 binomial sd.
    CHECK(false_rejections <= 0.05 * reps + 3.5 * std::sqrt(0.05 * 0.95 * reps));
    CHECK(detections > 0.95 * reps);
}

TEST_CASE("permutation p-values")
{
    const auto a = normals(60, 1), b = normals(60, 2), c = normals(60, 3, 1.5);
    CHECK(ks_permutation_pvalue(a, a, 200, 0) == 1.0);
    CHECK(ks_permutation_pvalue(a, b, 200, 0) > 0.01);
    CHECK(ks_permutation_pvalue(a, c, 200, 0) < 0.01);
    CHECK(ks_permutation_pvalue(a, c, 200, 7) == ks_permutation_pvalue(a, c, 200, 7));
}

TEST_CASE("moment summary")
{
    const auto m = summarize({4, 1, 3, 2});
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.mean_stderr == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("observables")
{
    const FourierField f(std::vector<Complex>{{1, 2}, {3, -4}, {0.5, 0}});
    CHECK(Observable::mode_re(2).evaluate(f) == 3.0);
    CHECK(Observable::mode_im(2).evaluate(f) == -4.0);
    CHECK(Observable::mode_abs2(1).evaluate(f) == 5.0);
    CHECK(Observable::pair_corr(1, 2).evaluate(f) == doctest::Approx((Complex(1, 2) * Complex(3, 4)).real()));
    CHECK(Observable::l2().evaluate(f) == doctest::Approx(l2_mass(f)));
    const NormSpec spec{-0.49, 2.1, std::numeric_limits<double>::infinity()};
    CHECK(Observable::besov(spec).evaluate(f) == besov_norm(f, spec));
    CHECK_THROWS_AS(Observable::mode_re(4).validate(3), PreconditionError);
    CHECK_THROWS_AS(Observable::pair_corr(1, 0).validate(3), PreconditionError);
}

TEST_CASE("ensembles and push-forward")
{
    const auto e = generate(6, 10, 3, {}, 5);
    CHECK(e.size() == 10);
    CHECK(e.members[2] == sample({6, 3, 7}));
    CHECK(e.provenance.first_stream == 5);
    CHECK(e.provenance.stream_count == 10);
    CHECK(generate(6, 0, 3).size() == 0);

    FlowConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 0.02;
    const auto one = push_forward(e, cfg, 1);
    const auto three = push_forward(e, cfg, 3);
    CHECK(one.time == doctest::Approx(0.02));
    CHECK(one.provenance.flows.size() == 1);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(one.members[i] == flow_map(e.members[i], cfg));
        CHECK(one.members[i] == three.members[i]);
    }

    cfg.dt = 0.01;
    cfg.horizon = 1.0;
    auto loud = e;
    loud.members[4] = loud.members[4].scaled(1e3);
    try {
        push_forward(loud, cfg, 2);
        FAIL("expected blowup");
    } catch (const Error& err) {
        CHECK(err.code() == "integrator_blowup");
        CHECK(std::string(err.what()).find("member 4") != std::string::npos);
    }
}

TEST_CASE("invariance report")
{
    const NormSpec spec{-0.49, 2.1, std::numeric_limits<double>::infinity()};
    const std::vector<Observable> obs{Observable::mode_re(1), Observable::mode_im(2), Observable::mode_abs2(3),
                                      Observable::l2(), Observable::besov(spec)};
    const auto e0 = generate(4, 2000, 11);

    FlowConfig still;
    still.horizon = 0.0;
    const auto same = invariance_report(e0, push_forward(e0, still), obs, 0.01);
    CHECK(same.pass);
    CHECK(same.per_test_alpha == doctest::Approx(0.002));
    for (const auto& o : same.observables) CHECK(o.statistic == 0.0);

    FlowConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 0.2;
    CHECK(invariance_report(e0, push_forward(e0, cfg, 4), obs, 0.01).pass);

    // Negative control: a wider Gaussian is not mu_N.
    const auto wide = generate(4, 2000, 12, Perturbation::variance(1.5));
    const auto bad = invariance_report(e0, wide, obs, 0.01);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.observables[3].pass);

    InvarianceOptions perm;
    perm.permutation = true;
    perm.permutations = 200;
    const auto pr = invariance_report(e0, wide, {Observable::l2()}, 0.01, perm);
    REQUIRE(pr.observables[0].p_value.has_value());
    CHECK(*pr.observables[0].p_value < 0.01);

    CHECK_THROWS_AS(invariance_report(e0, generate(5, 2000, 1), obs, 0.01), PreconditionError);
    CHECK_THROWS_AS(invariance_report(e0, generate(4, 10, 1), obs, 0.01), PreconditionError);
}
