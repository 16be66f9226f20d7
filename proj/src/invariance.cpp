#include "kdvbench/invariance.hpp"

#include "kdvbench/error.hpp"
#include "kdvbench/parallel.hpp"
#include "kdvbench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kdvbench {

Ensemble generate(int cutoff, std::size_t count, std::uint64_t seed, const Perturbation& perturbation,
                  std::uint64_t first_stream)
{
    if (cutoff < 1) throw PreconditionError("generate: cutoff must be >= 1");
    Ensemble e;
    e.cutoff = cutoff;
    e.provenance = {seed, first_stream, count, perturbation, {}};
    e.members.reserve(count);
    for (std::size_t i = 0; i < count; ++i) e.members.push_back(sample({cutoff, seed, first_stream + i}, perturbation));
    return e;
}

Ensemble push_forward(const Ensemble& e, const FlowConfig& cfg, int workers)
{
    cfg.validate();
    Ensemble out;
    out.cutoff = e.cutoff;
    out.time = e.time + (cfg.horizon < 0 ? -1.0 : 1.0) * static_cast<double>(cfg.step_count()) * cfg.dt;
    out.provenance = e.provenance;
    out.provenance.flows.push_back(cfg);
    std::vector<std::optional<FourierField>> evolved(e.size());
    parallel_for(e.size(), workers, [&](std::size_t i) {
        try {
            evolved[i] = flow_map(e.members[i], cfg);
        } catch (const Error& err) {
            throw Error(err.code(), "member " + std::to_string(i) + ": " + err.what());
        }
    });
    out.members.reserve(e.size());
    for (auto& f : evolved) out.members.push_back(std::move(*f));
    return out;
}

std::string Observable::label() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::ModeRe: os << "re_u(" << n << ")"; break;
    case Kind::ModeIm: os << "im_u(" << n << ")"; break;
    case Kind::ModeAbs2: os << "abs2_u(" << n << ")"; break;
    case Kind::Norm: os << "besov(s=" << norm.s << ",p=" << norm.p << ",q=" << norm.q << ")"; break;
    case Kind::L2Mass: os << "l2_mass"; break;
    case Kind::PairCorr: os << "pair_corr(" << n << "," << m << ")"; break;
    }
    return os.str();
}

void Observable::validate(int cutoff) const
{
    auto check = [cutoff](int k) {
        if (k < 1 || k > cutoff) {
            throw PreconditionError("observable mode " + std::to_string(k) + " outside 1.." + std::to_string(cutoff));
        }
    };
    switch (kind) {
    case Kind::ModeRe:
    case Kind::ModeIm:
    case Kind::ModeAbs2: check(n); break;
    case Kind::PairCorr:
        check(n);
        check(m);
        break;
    case Kind::Norm: norm.validate(); break;
    case Kind::L2Mass: break;
    }
}

double Observable::evaluate(const FourierField& f) const
{
    switch (kind) {
    case Kind::ModeRe: return f[n].real();
    case Kind::ModeIm: return f[n].imag();
    case Kind::ModeAbs2: return std::norm(f[n]);
    case Kind::Norm: return besov_norm(f, norm);
    case Kind::L2Mass: return l2_mass(f);
    case Kind::PairCorr: return (f[n] * std::conj(f[m])).real();
    }
    return 0.0;
}

std::vector<double> evaluate(const Observable& obs, const Ensemble& e)
{
    obs.validate(e.cutoff);
    std::vector<double> out;
    out.reserve(e.size());
    for (const auto& f : e.members) out.push_back(obs.evaluate(f));
    return out;
}

double KsResult::threshold(double alpha) const
{
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    const double mm = static_cast<double>(m), nn = static_cast<double>(n);
    return c * std::sqrt((mm + nn) / (mm * nn));
}

namespace {

double ks_sorted(const std::vector<double>& a, const std::vector<double>& b)
{
    const double ma = static_cast<double>(a.size()), mb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / ma - static_cast<double>(j) / mb));
    }
    return d;
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw PreconditionError("ks_two_sample: both samples must be nonempty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {ks_sorted(a, b), a.size(), b.size()};
}

double ks_permutation_pvalue(const std::vector<double>& a, const std::vector<double>& b, int permutations,
                             std::uint64_t seed)
{
    if (permutations < 1) throw PreconditionError("ks_permutation_pvalue: permutations must be >= 1");
    const double observed = ks_two_sample(a, b).statistic;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto engine = make_engine(seed, 0x6b73);
    int at_least = 0;
    for (int r = 0; r < permutations; ++r) {
        std::shuffle(pooled.begin(), pooled.end(), engine);
        std::vector<double> x(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(a.size()));
        std::vector<double> y(pooled.begin() + static_cast<std::ptrdiff_t>(a.size()), pooled.end());
        if (ks_two_sample(std::move(x), std::move(y)).statistic >= observed - 1e-15) ++at_least;
    }
    return (at_least + 1.0) / (permutations + 1.0);
}

MomentSummary summarize(const std::vector<double>& values)
{
    MomentSummary s;
    if (values.empty()) return s;
    // Sorted accumulation makes the result independent of member order.
    std::vector<double> v(values);
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= n;
    for (double x : v) s.variance += (x - s.mean) * (x - s.mean);
    s.variance = v.size() > 1 ? s.variance / (n - 1.0) : 0.0;
    s.mean_stderr = std::sqrt(s.variance / n);
    return s;
}

InvarianceReport invariance_report(const Ensemble& e0, const Ensemble& eT, const std::vector<Observable>& observables,
                                   double alpha, const InvarianceOptions& options)
{
    if (e0.cutoff != eT.cutoff) throw PreconditionError("invariance_report: cutoff mismatch");
    if (e0.size() != eT.size()) throw PreconditionError("invariance_report: ensemble size mismatch");
    if (e0.size() == 0) throw PreconditionError("invariance_report: empty ensembles");
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("invariance_report: alpha must lie in (0, 1)");

    InvarianceReport report;
    report.alpha = alpha;
    report.per_test_alpha = observables.empty() ? alpha : alpha / static_cast<double>(observables.size());
    report.members = e0.size();
    report.initial_time = e0.time;
    report.final_time = eT.time;
    for (std::size_t k = 0; k < observables.size(); ++k) {
        const Observable& obs = observables[k];
        const auto a = evaluate(obs, e0);
        const auto b = evaluate(obs, eT);
        ObservableReport r;
        r.label = obs.label();
        const KsResult ks = ks_two_sample(a, b);
        r.statistic = ks.statistic;
        r.threshold = ks.threshold(report.per_test_alpha);
        if (options.permutation) {
            r.p_value = ks_permutation_pvalue(a, b, options.permutations, options.permutation_seed + k);
            r.pass = *r.p_value > report.per_test_alpha;
        } else {
            r.pass = r.statistic <= r.threshold;
        }
        r.initial = summarize(a);
        r.evolved = summarize(b);
        report.pass = report.pass && r.pass;
        report.observables.push_back(std::move(r));
    }
    return report;
}

}  // namespace kdvbench
