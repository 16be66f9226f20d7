#pragma once

#include "kdvbench/fourier_field.hpp"
#include "kdvbench/kdv_flow.hpp"
#include "kdvbench/white_noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kdvbench {

/// How an ensemble was produced; enough to regenerate it bit-identically.
struct Provenance {
    std::uint64_t seed = 0;
    std::uint64_t first_stream = 0;
    std::size_t stream_count = 0;
    Perturbation perturbation;
    /// Flows applied after sampling, in order. Empty means "initial".
    std::vector<FlowConfig> flows;
};

struct Ensemble {
    int cutoff = 1;
    double time = 0.0;
    std::vector<FourierField> members;
    Provenance provenance;

    std::size_t size() const noexcept { return members.size(); }
};

/// `count` i.i.d. draws of mu_N at time 0; member i uses stream first_stream + i.
Ensemble generate(int cutoff, std::size_t count, std::uint64_t seed, const Perturbation& perturbation = {},
                  std::uint64_t first_stream = 0);

/// Each member evolved by cfg. Failures are rethrown with the member index.
Ensemble push_forward(const Ensemble& e, const FlowConfig& cfg, int workers = 1);

struct Observable {
    enum class Kind { ModeRe, ModeIm, ModeAbs2, Norm, L2Mass, PairCorr };
    Kind kind = Kind::L2Mass;
    int n = 1;
    int m = 1;
    NormSpec norm;

    static Observable mode_re(int n) { return {Kind::ModeRe, n, n, {}}; }
    static Observable mode_im(int n) { return {Kind::ModeIm, n, n, {}}; }
    static Observable mode_abs2(int n) { return {Kind::ModeAbs2, n, n, {}}; }
    static Observable besov(const NormSpec& spec) { return {Kind::Norm, 1, 1, spec}; }
    static Observable l2() { return {Kind::L2Mass, 1, 1, {}}; }
    /// Re(u(n) conj(u(m))).
    static Observable pair_corr(int n, int m) { return {Kind::PairCorr, n, m, {}}; }

    std::string label() const;
    /// Throws PreconditionError when a referenced mode is outside 1..cutoff.
    void validate(int cutoff) const;
    double evaluate(const FourierField& f) const;
};

std::vector<double> evaluate(const Observable& obs, const Ensemble& e);

struct KsResult {
    double statistic = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;

    /// Asymptotic critical value c(alpha) sqrt((m + n) / (m n)),
    /// c(alpha) = sqrt(-ln(alpha / 2) / 2).
    double threshold(double alpha) const;
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Both samples nonempty.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Permutation p-value of the KS statistic (for small ensembles).
double ks_permutation_pvalue(const std::vector<double>& a, const std::vector<double>& b, int permutations,
                             std::uint64_t seed);

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    /// Monte Carlo standard error of the mean.
    double mean_stderr = 0.0;
};

MomentSummary summarize(const std::vector<double>& values);

struct ObservableReport {
    std::string label;
    double statistic = 0.0;
    double threshold = 0.0;
    /// Set in permutation mode.
    std::optional<double> p_value;
    bool pass = true;
    MomentSummary initial;
    MomentSummary evolved;
};

struct InvarianceReport {
    double alpha = 0.01;
    /// alpha divided by the number of observables.
    double per_test_alpha = 0.01;
    std::size_t members = 0;
    double initial_time = 0.0;
    double final_time = 0.0;
    std::vector<ObservableReport> observables;
    bool pass = true;
};

struct InvarianceOptions {
    bool permutation = false;
    int permutations = 1000;
    std::uint64_t permutation_seed = 0;
};

/// KS comparison of each observable between e0 and eT at Bonferroni level
/// alpha / k. Throws PreconditionError on cutoff or size mismatch.
InvarianceReport invariance_report(const Ensemble& e0, const Ensemble& eT, const std::vector<Observable>& observables,
                                   double alpha, const InvarianceOptions& options = {});

}  // namespace kdvbench
