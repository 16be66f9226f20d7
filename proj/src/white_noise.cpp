#include "kdvbench/white_noise.hpp"

#include "kdvbench/error.hpp"
#include "kdvbench/parallel.hpp"
#include "kdvbench/spectral.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kdvbench {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

FourierField sample(const GaussianSampleSpec& spec, const Perturbation& perturbation)
{
    if (spec.cutoff < 1) throw PreconditionError("sample: cutoff must be >= 1");
    auto engine = make_engine(spec.seed, spec.stream);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto draw = [&]() -> double {
        const double z = normal(engine);
        switch (perturbation.kind) {
        case Perturbation::Kind::Variance:
            return std::sqrt(perturbation.amount) * z;
        case Perturbation::Kind::Skew: {
            const double g = perturbation.amount;
            return (z + g * (z * z - 1.0)) / std::sqrt(1.0 + 2.0 * g * g);
        }
        case Perturbation::Kind::None:
            break;
        }
        return z;
    };

    std::vector<Complex> modes(static_cast<std::size_t>(spec.cutoff));
    for (auto& a : modes) {
        const double re = draw();
        const double im = draw();
        a = Complex(re, im);
    }
    return FourierField(std::move(modes));
}

double log_density_unnormalized(const FourierField& f)
{
    double acc = 0.0;
    for (const Complex& a : f.positive()) acc += std::norm(a);
    return -0.5 * acc;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z)
{
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (phat + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<TailEstimate> tail_sweep(const NormSpec& spec, int cutoff, const std::vector<double>& thresholds,
                                     std::size_t samples, std::uint64_t seed, int workers)
{
    if (samples < 1) throw PreconditionError("tail_probability: samples must be >= 1");
    spec.validate();
    std::vector<double> norms(samples);
    parallel_for(samples, workers, [&](std::size_t i) {
        norms[i] = besov_norm(sample({cutoff, seed, static_cast<std::uint64_t>(i)}), spec);
    });
    std::sort(norms.begin(), norms.end());

    std::vector<TailEstimate> out;
    out.reserve(thresholds.size());
    for (double k : thresholds) {
        TailEstimate t;
        t.threshold = k;
        t.samples = samples;
        t.exceed = static_cast<std::size_t>(norms.end() - std::upper_bound(norms.begin(), norms.end(), k));
        t.estimate = static_cast<double>(t.exceed) / static_cast<double>(samples);
        t.std_error = std::sqrt(t.estimate * (1.0 - t.estimate) / static_cast<double>(samples));
        std::tie(t.wilson_low, t.wilson_high) = wilson_interval(t.exceed, samples, 1.959963984540054);
        t.censored = t.exceed == 0;
        out.push_back(t);
    }
    return out;
}

TailEstimate tail_probability(const NormSpec& spec, int cutoff, double threshold, std::size_t samples,
                              std::uint64_t seed, int workers)
{
    return tail_sweep(spec, cutoff, {threshold}, samples, seed, workers).front();
}

LogTailFit fit_log_tail(const std::vector<TailEstimate>& points, double confidence)
{
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.censored || p.estimate <= 0.0) continue;
        xs.push_back(p.threshold * p.threshold);
        ys.push_back(std::log(p.estimate));
    }
    LogTailFit fit;
    fit.points = xs.size();
    fit.confidence = confidence;
    const double inf = std::numeric_limits<double>::infinity();
    if (xs.size() < 2) {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.ci_low = -inf;
        fit.ci_high = inf;
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (xs.size() < 3) {
        fit.slope_stderr = inf;
        fit.ci_low = -inf;
        fit.ci_high = inf;
        return fit;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
    fit.ci_low = fit.slope - t * fit.slope_stderr;
    fit.ci_high = fit.slope + t * fit.slope_stderr;
    return fit;
}

double decay_ratio(std::uint64_t block, double delta, std::uint64_t seed)
{
    if (block == 0 || (block & (block - 1)) != 0) throw PreconditionError("decay_ratio: block must be a power of two");
    if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("decay_ratio: delta must lie in (0, 1]");
    auto engine = make_engine(seed, block);
    std::normal_distribution<double> normal(0.0, 1.0);
    double largest = 0.0;
    double total = 0.0;
    for (std::uint64_t n = block; n < 2 * block; ++n) {
        const double re = normal(engine);
        const double im = normal(engine);
        const double m = re * re + im * im;
        largest = std::max(largest, m);
        total += m;
    }
    return std::pow(static_cast<double>(block), 1.0 - delta) * largest / total;
}

double decay_ratio_median(std::uint64_t block, double delta, std::uint64_t first_seed, int seeds)
{
    if (seeds < 1) throw PreconditionError("decay_ratio_median: need at least one seed");
    std::vector<double> r(static_cast<std::size_t>(seeds));
    for (int i = 0; i < seeds; ++i) r[static_cast<std::size_t>(i)] = decay_ratio(block, delta, first_seed + i);
    std::sort(r.begin(), r.end());
    const std::size_t mid = r.size() / 2;
    return r.size() % 2 ? r[mid] : 0.5 * (r[mid - 1] + r[mid]);
}

}  // namespace kdvbench
