#pragma once

#include "kdvbench/fourier_field.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace kdvbench {

/// Identifies one draw from the truncated white noise mu_N.
struct GaussianSampleSpec {
    int cutoff = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Deliberate departures from mu_N used as negative controls.
struct Perturbation {
    enum class Kind { None, Variance, Skew };
    Kind kind = Kind::None;
    /// Variance: multiplies the variance of Re and Im parts.
    /// Skew: gamma in (z + gamma (z^2 - 1)) / sqrt(1 + 2 gamma^2).
    double amount = 0.0;

    static Perturbation none() { return {}; }
    static Perturbation variance(double factor) { return {Kind::Variance, factor}; }
    static Perturbation skew(double gamma) { return {Kind::Skew, gamma}; }
};

/// Generator for one (seed, stream) pair. The engine is mt19937_64 seeded
/// through seed_seq from the four 32-bit halves of seed and stream, so each
/// stream is an independent reproducible substream.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

/// a_n for n = 1..N with Re a_n, Im a_n i.i.d. N(0, 1); E|a_n|^2 = 2.
FourierField sample(const GaussianSampleSpec& spec, const Perturbation& perturbation = {});

/// -1/2 sum_{n=1}^N |a_n|^2 (log of the mu_N density up to log Z_N).
double log_density_unnormalized(const FourierField& f);

struct TailEstimate {
    double threshold = 0.0;
    std::size_t exceed = 0;
    std::size_t samples = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    /// Zero exceedances: the log-tail is not defined at this point.
    bool censored = false;
};

/// Monte Carlo estimate of mu_N(||phi||_spec > K) with binomial standard error.
TailEstimate tail_probability(const NormSpec& spec, int cutoff, double threshold, std::size_t samples,
                              std::uint64_t seed, int workers = 1);

/// Same estimate for several thresholds sharing one set of draws.
std::vector<TailEstimate> tail_sweep(const NormSpec& spec, int cutoff, const std::vector<double>& thresholds,
                                     std::size_t samples, std::uint64_t seed, int workers = 1);

/// Least-squares fit of log(estimate) against K^2 over uncensored points.
struct LogTailFit {
    std::size_t points = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// Two-sided confidence interval for the slope (Student t).
    double ci_low = 0.0;
    double ci_high = 0.0;
    double confidence = 0.99;
};

LogTailFit fit_log_tail(const std::vector<TailEstimate>& points, double confidence = 0.99);

/// Wilson score interval for k successes out of n at the given z.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z);

/// M^{1-delta} max_{M<=n<2M} |g_n|^2 / sum_{M<=n<2M} |g_n|^2 for fresh standard
/// complex Gaussians g_n (same convention as sample()). M must be a power of two.
double decay_ratio(std::uint64_t block, double delta, std::uint64_t seed);

/// Median of decay_ratio over seeds first_seed .. first_seed + seeds - 1.
double decay_ratio_median(std::uint64_t block, double delta, std::uint64_t first_seed, int seeds);

}  // namespace kdvbench
