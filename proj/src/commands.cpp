#include "kdvbench/commands.hpp"

#include "kdvbench/error.hpp"
#include "kdvbench/estimates.hpp"
#include "kdvbench/lemmas.hpp"
#include "kdvbench/parallel.hpp"
#include "kdvbench/snapshot.hpp"
#include "kdvbench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kdvbench {

using nlohmann::json;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    const RunOptions& opt;
    std::string hash;
    json outputs = json::array();

    SnapshotMeta meta() const { return {hash, std::string(kToolVersion)}; }

    std::filesystem::path path(const std::string& name) const { return opt.out_dir / name; }

    void log(const std::string& msg) const
    {
        if (opt.verbose) std::cerr << "[kdvbench] " << msg << "\n";
    }

    void write_text(const std::string& name, const std::string& text)
    {
        const auto target = path(name);
        auto tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + tmp.string());
            out << text;
            if (!out) throw IoError("write failed for " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, target, ec);
        if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
        outputs.push_back(target.string());
        log("wrote " + target.string());
    }

    void write_snapshot(const std::string& name, const Ensemble& e)
    {
        save_snapshot(path(name), e, meta());
        outputs.push_back(path(name).string());
        log("wrote " + path(name).string());
    }

    std::string csv_preamble(const std::string& schema) const
    {
        return "# kdvbench " + std::string(kToolVersion) + " config_hash=" + hash + " schema=" + schema + "\n";
    }

    json stamp(json body) const
    {
        body["tool_version"] = std::string(kToolVersion);
        body["config_hash"] = hash;
        return body;
    }

    json finish(json summary) const
    {
        summary["outputs"] = outputs;
        return stamp(std::move(summary));
    }
};

void prepare(ExperimentConfig& cfg, const std::string& subcommand, const RunOptions& opt)
{
    if (opt.seed) {
        for (const auto& spec : schema(subcommand)) {
            if (spec.key == "seed") cfg.set(spec.section, spec.key, std::to_string(*opt.seed));
        }
    }
    cfg.validate(subcommand);
    if (opt.workers < 1) throw ConfigError("--workers must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec || !std::filesystem::is_directory(opt.out_dir)) {
        throw IoError("output directory " + opt.out_dir.string() + " is not usable");
    }
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

int checked_cutoff(long long n, const char* where)
{
    if (n < 1 || n > (1 << 20)) throw ConfigError(std::string(where) + ": N must be in [1, 2^20]");
    return static_cast<int>(n);
}

Perturbation read_perturbation(const ExperimentConfig& cfg)
{
    const std::string kind = cfg.get_text("sample", "perturbation");
    const double amount = cfg.get_real("sample", "perturbation_amount");
    if (kind == "none") return Perturbation::none();
    if (kind == "variance") {
        if (!(amount > 0.0)) throw ConfigError("[sample] perturbation_amount must be > 0 for variance");
        return Perturbation::variance(amount);
    }
    if (kind == "skew") return Perturbation::skew(amount);
    throw ConfigError("[sample] perturbation must be none, variance or skew");
}

Ensemble sample_from(const ExperimentConfig& cfg)
{
    return generate(checked_cutoff(cfg.get_int("sample", "N"), "[sample]"), cfg.get_uint("sample", "count"),
                    cfg.get_uint("sample", "seed"), read_perturbation(cfg), cfg.get_uint("sample", "first_stream"));
}

FlowConfig flow_from(const ExperimentConfig& cfg)
{
    FlowConfig f;
    f.dt = cfg.get_real("flow", "dt");
    f.horizon = cfg.get_real("flow", "T");
    f.checkpoint_every = cfg.get_int("flow", "checkpoint_every");
    f.nonlinear = cfg.get_bool("flow", "nonlinear");
    f.validate();
    return f;
}

NormSpec norm_from(const ExperimentConfig& cfg, const std::string& section)
{
    NormSpec spec{cfg.get_real(section, "norm_s"), cfg.get_real(section, "norm_p"), cfg.get_real(section, "norm_q")};
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError("[" + section + "] " + e.what());
    }
    return spec;
}

json moments_json(const MomentSummary& m)
{
    return {{"mean", m.mean}, {"variance", m.variance}, {"mean_stderr", m.mean_stderr}};
}

}  // namespace

json error_object(const std::string& code, const std::string& message)
{
    return {{"error", {{"code", code}, {"message", message}}}};
}

std::vector<Observable> parse_observables(const std::string& text, const NormSpec& norm)
{
    std::vector<Observable> out;
    std::stringstream ss(text);
    std::string item;
    auto mode = [](const std::string& s, const std::string& token) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return n;
        } catch (const std::exception&) {
            throw ConfigError("observable '" + token + "': bad mode index");
        }
    };
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string part;
        while (std::getline(is, part, ':')) parts.push_back(part);
        const std::string& head = parts[0];
        if (head == "l2" && parts.size() == 1) {
            out.push_back(Observable::l2());
        } else if (head == "norm" && parts.size() == 1) {
            out.push_back(Observable::besov(norm));
        } else if (head == "re" && parts.size() == 2) {
            out.push_back(Observable::mode_re(mode(parts[1], item)));
        } else if (head == "im" && parts.size() == 2) {
            out.push_back(Observable::mode_im(mode(parts[1], item)));
        } else if (head == "abs2" && parts.size() == 2) {
            out.push_back(Observable::mode_abs2(mode(parts[1], item)));
        } else if (head == "pair" && parts.size() == 3) {
            out.push_back(Observable::pair_corr(mode(parts[1], item), mode(parts[2], item)));
        } else {
            throw ConfigError("unknown observable '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("[invariance] observables is empty");
    return out;
}

json cmd_sample(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "sample", opt);
    Context ctx{cfg, opt, cfg.hash()};
    const Ensemble e = sample_from(cfg);
    ctx.write_snapshot("ensemble.snap", e);
    return ctx.finish({{"command", "sample"}, {"N", e.cutoff}, {"count", e.size()}});
}

json cmd_evolve(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "evolve", opt);
    Context ctx{cfg, opt, cfg.hash()};
    const FlowConfig flow = flow_from(cfg);
    const std::string input = cfg.get_text("evolve", "input");
    const Ensemble start = input.empty() ? sample_from(cfg) : load_snapshot(input).ensemble;
    ctx.log("evolving " + std::to_string(start.size()) + " members, " + std::to_string(flow.step_count()) + " steps");

    std::vector<Trajectory> paths(start.size());
    parallel_for(start.size(), opt.workers, [&](std::size_t i) {
        try {
            paths[i] = evolve(start.members[i], flow, start.time);
        } catch (const Error& err) {
            throw Error(err.code(), "member " + std::to_string(i) + ": " + err.what());
        }
    });

    // All members share the step schedule, so checkpoint k has the same time everywhere.
    const std::size_t points = paths.empty() ? 0 : paths.front().size();
    std::string csv = ctx.csv_preamble("trajectory.v1") + "member,time,l2_mass,hamiltonian\n";
    ConservationReport worst;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (const auto& p : paths[i]) {
            csv += std::to_string(i) + "," + fmt(p.time) + "," + fmt(l2_mass(p.field)) + "," +
                   fmt(hamiltonian(p.field)) + "\n";
        }
        const auto r = conservation_report(paths[i]);
        worst.mean_drift = std::max(worst.mean_drift, r.mean_drift);
        worst.l2_abs_drift = std::max(worst.l2_abs_drift, r.l2_abs_drift);
        worst.l2_rel_drift = std::max(worst.l2_rel_drift, r.l2_rel_drift);
        worst.hamiltonian_abs_drift = std::max(worst.hamiltonian_abs_drift, r.hamiltonian_abs_drift);
        worst.hamiltonian_rel_drift = std::max(worst.hamiltonian_rel_drift, r.hamiltonian_rel_drift);
    }

    auto snapshot_at = [&](std::size_t k) {
        Ensemble e;
        e.cutoff = start.cutoff;
        e.provenance = start.provenance;
        e.time = paths.empty() ? start.time + flow.horizon : paths.front()[k].time;
        FlowConfig applied = flow;
        applied.horizon = e.time - start.time;
        e.provenance.flows.push_back(applied);
        e.members.reserve(paths.size());
        for (const auto& p : paths) e.members.push_back(p[k].field);
        return e;
    };
    json checkpoints = json::array();
    for (std::size_t k = 1; k + 1 < points; ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "checkpoint_%04zu.snap", k);
        ctx.write_snapshot(name, snapshot_at(k));
        checkpoints.push_back(name);
    }
    ctx.write_snapshot("final.snap", points == 0 ? snapshot_at(0) : snapshot_at(points - 1));
    ctx.write_text("trajectory.csv", csv);

    const json report = ctx.stamp({{"members", start.size()},
                                   {"start_time", start.time},
                                   {"steps", flow.step_count()},
                                   {"dt", flow.dt},
                                   {"mean_drift", worst.mean_drift},
                                   {"l2_abs_drift", worst.l2_abs_drift},
                                   {"l2_rel_drift", worst.l2_rel_drift},
                                   {"hamiltonian_abs_drift", worst.hamiltonian_abs_drift},
                                   {"hamiltonian_rel_drift", worst.hamiltonian_rel_drift}});
    ctx.write_text("conservation.json", report.dump(2) + "\n");
    return ctx.finish({{"command", "evolve"}, {"checkpoints", checkpoints}, {"conservation", report}});
}

json cmd_invariance(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "invariance", opt);
    Context ctx{cfg, opt, cfg.hash()};
    const FlowConfig flow = flow_from(cfg);
    const auto observables = parse_observables(cfg.get_text("invariance", "observables"), norm_from(cfg, "invariance"));
    InvarianceOptions options;
    options.permutation = cfg.get_bool("invariance", "permutation");
    options.permutations = static_cast<int>(cfg.get_int("invariance", "permutations"));
    options.permutation_seed = cfg.get_uint("invariance", "permutation_seed");
    const double alpha = cfg.get_real("invariance", "alpha");

    const Ensemble e0 = sample_from(cfg);
    for (const auto& o : observables) o.validate(e0.cutoff);
    ctx.log("pushing forward " + std::to_string(e0.size()) + " members");
    const Ensemble eT = push_forward(e0, flow, opt.workers);
    const InvarianceReport report = invariance_report(e0, eT, observables, alpha, options);

    json obs = json::array();
    for (const auto& o : report.observables) {
        json item = {{"label", o.label},
                     {"statistic", o.statistic},
                     {"threshold", o.threshold},
                     {"pass", o.pass},
                     {"initial", moments_json(o.initial)},
                     {"evolved", moments_json(o.evolved)}};
        item["p_value"] = o.p_value ? json(*o.p_value) : json(nullptr);
        obs.push_back(item);
    }
    const json body = ctx.stamp({{"alpha", report.alpha},
                                 {"per_test_alpha", report.per_test_alpha},
                                 {"members", report.members},
                                 {"initial_time", report.initial_time},
                                 {"final_time", report.final_time},
                                 {"pass", report.pass},
                                 {"observables", obs}});

    std::string csv = ctx.csv_preamble("invariance_series.v1") + "member,time";
    for (const auto& o : observables) csv += "," + quoted(o.label());
    csv += "\n";
    for (const Ensemble* e : {&e0, &eT}) {
        for (std::size_t i = 0; i < e->size(); ++i) {
            csv += std::to_string(i) + "," + fmt(e->time);
            for (const auto& o : observables) csv += "," + fmt(o.evaluate(e->members[i]));
            csv += "\n";
        }
    }
    ctx.write_text("invariance.json", body.dump(2) + "\n");
    ctx.write_text("invariance_series.csv", csv);
    return ctx.finish({{"command", "invariance"}, {"pass", report.pass}, {"report", body}});
}

json cmd_tails(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "tails", opt);
    Context ctx{cfg, opt, cfg.hash()};
    const NormSpec spec = norm_from(cfg, "tails");
    const int cutoff = checked_cutoff(cfg.get_int("tails", "N"), "[tails]");
    const auto thresholds = cfg.get_reals("tails", "thresholds");
    const auto samples = cfg.get_uint("tails", "samples");
    ctx.log("drawing " + std::to_string(samples) + " samples at N = " + std::to_string(cutoff));
    const auto points = tail_sweep(spec, cutoff, thresholds, samples, cfg.get_uint("tails", "seed"), opt.workers);
    const LogTailFit fit = fit_log_tail(points, cfg.get_real("tails", "confidence"));

    std::string csv = ctx.csv_preamble("tails.v1") + "K,exceed,samples,estimate,stderr,wilson_low,wilson_high,censored\n";
    for (const auto& p : points) {
        csv += fmt(p.threshold) + "," + std::to_string(p.exceed) + "," + std::to_string(p.samples) + "," +
               fmt(p.estimate) + "," + fmt(p.std_error) + "," + fmt(p.wilson_low) + "," + fmt(p.wilson_high) + "," +
               (p.censored ? "1" : "0") + "\n";
    }
    const json fit_json = ctx.stamp({{"points", fit.points},
                                     {"slope", fit.slope},
                                     {"intercept", fit.intercept},
                                     {"slope_stderr", fit.slope_stderr},
                                     {"ci_low", fit.ci_low},
                                     {"ci_high", fit.ci_high},
                                     {"confidence", fit.confidence}});
    ctx.write_text("tails.csv", csv);
    ctx.write_text("tails_fit.json", fit_json.dump(2) + "\n");
    return ctx.finish({{"command", "tails"}, {"fit", fit_json}});
}

json cmd_lemmas(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "lemmas", opt);
    Context ctx{cfg, opt, cfg.hash()};
    json summary = {{"command", "lemmas"}};

    // Integral lemma: ratio against <a>^{-gamma} over the a-sweep.
    const auto alphas = cfg.get_reals("lemmas", "gtv_alpha");
    const auto betas = cfg.get_reals("lemmas", "gtv_beta");
    const auto as = cfg.get_reals("lemmas", "gtv_a");
    const double eps = cfg.get_real("lemmas", "gtv_epsilon");
    if (alphas.size() != betas.size()) throw ConfigError("[lemmas] gtv_alpha and gtv_beta differ in length");
    std::vector<GtvResult> gtv(alphas.size() * as.size());
    parallel_for(gtv.size(), opt.workers, [&](std::size_t i) {
        gtv[i] = gtv_integral(alphas[i / as.size()], betas[i / as.size()], as[i % as.size()], eps);
    });
    std::string csv = ctx.csv_preamble("lemma_gtv.v1") + "alpha,beta,a,value,gamma,ratio\n";
    json spread = json::array();
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        double lo = INFINITY, hi = 0.0;
        for (std::size_t j = 0; j < as.size(); ++j) {
            const auto& r = gtv[k * as.size() + j];
            csv += fmt(alphas[k]) + "," + fmt(betas[k]) + "," + fmt(as[j]) + "," + fmt(r.value) + "," + fmt(r.gamma) +
                   "," + fmt(r.ratio) + "\n";
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
        spread.push_back({{"alpha", alphas[k]}, {"beta", betas[k]}, {"max_over_min", as.empty() ? 0.0 : hi / lo}});
    }
    ctx.write_text("lemma_gtv.csv", csv);
    summary["gtv"] = spread;

    // Lattice sum over the (n, lambda) grid.
    std::vector<std::int64_t> ns;
    for (long long n : cfg.get_ints("lemmas", "psum_n")) ns.push_back(n);
    const auto lambdas = cfg.get_reals("lemmas", "psum_lambda");
    const double l1 = cfg.get_real("lemmas", "psum_l1"), l2 = cfg.get_real("lemmas", "psum_l2");
    const std::int64_t cutoff = cfg.get_int("lemmas", "psum_cutoff");
    std::vector<PsumResult> cells(ns.size() * lambdas.size());
    parallel_for(cells.size(), opt.workers, [&](std::size_t i) {
        cells[i] = psum(ns[i / lambdas.size()], lambdas[i % lambdas.size()], l1, l2, cutoff);
    });
    csv = ctx.csv_preamble("lemma_psum.v1") + "n,lambda,value,half_cutoff_value,tail_bound\n";
    double sup = 0.0, sup_half = 0.0, worst_change = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        csv += std::to_string(ns[i / lambdas.size()]) + "," + fmt(lambdas[i % lambdas.size()]) + "," + fmt(c.value) +
               "," + fmt(c.half_cutoff_value) + "," + fmt(c.tail_bound) + "\n";
        sup = std::max(sup, c.value);
        sup_half = std::max(sup_half, c.half_cutoff_value);
        worst_change = std::max(worst_change, std::abs(c.value - c.half_cutoff_value) / c.value);
    }
    ctx.write_text("lemma_psum.csv", csv);
    summary["psum"] = {{"sup", sup}, {"sup_half_cutoff", sup_half}, {"max_relative_change", worst_change}};

    // Near-curve set integral, n = 1 .. n_max.
    const auto n_max = cfg.get_int("lemmas", "omega_n_max");
    const double exponent = cfg.get_real("lemmas", "omega_exponent");
    const double c0 = cfg.get_real("lemmas", "omega_c0");
    const auto n1_limit = cfg.get_int("lemmas", "omega_n1_limit");
    if (n_max < 1) throw ConfigError("[lemmas] omega_n_max must be >= 1");
    std::vector<OmegaResult> omega(static_cast<std::size_t>(n_max));
    parallel_for(omega.size(), opt.workers, [&](std::size_t i) {
        omega[i] = omega_integral(static_cast<std::int64_t>(i) + 1, exponent, c0, n1_limit);
    });
    csv = ctx.csv_preamble("lemma_omega.v1") + "n,value,tail_estimate,intervals\n";
    double omega_max = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        csv += std::to_string(i + 1) + "," + fmt(omega[i].value) + "," + fmt(omega[i].tail_estimate) + "," +
               std::to_string(omega[i].intervals) + "\n";
        omega_max = std::max(omega_max, omega[i].value);
    }
    ctx.write_text("lemma_omega.csv", csv);
    summary["omega"] = {{"max", omega_max}, {"exponent", exponent}};

    // Gaussian max/sum statistic per dyadic level.
    const double delta = cfg.get_real("lemmas", "decay_delta");
    const auto lmin = cfg.get_int("lemmas", "decay_min_level");
    const auto lmax = cfg.get_int("lemmas", "decay_max_level");
    const int seeds = static_cast<int>(cfg.get_int("lemmas", "decay_seeds"));
    const auto first_seed = cfg.get_uint("lemmas", "decay_seed");
    if (lmin < 0 || lmax > 40 || lmin > lmax) throw ConfigError("[lemmas] need 0 <= decay_min_level <= decay_max_level <= 40");
    std::vector<double> medians(static_cast<std::size_t>(lmax - lmin + 1));
    parallel_for(medians.size(), opt.workers, [&](std::size_t i) {
        medians[i] = decay_ratio_median(std::uint64_t{1} << (lmin + static_cast<long long>(i)), delta, first_seed, seeds);
    });
    csv = ctx.csv_preamble("lemma_decay.v1") + "level,M,median_ratio\n";
    for (std::size_t i = 0; i < medians.size(); ++i) {
        const long long level = lmin + static_cast<long long>(i);
        csv += std::to_string(level) + "," + std::to_string(1ULL << level) + "," + fmt(medians[i]) + "\n";
    }
    ctx.write_text("lemma_decay.csv", csv);
    summary["decay_medians"] = medians;

    const auto scan = resonance_exhaustive(cfg.get_int("lemmas", "resonance_bound"));
    csv = ctx.csv_preamble("lemma_resonance.v1") + "bound,pairs,nonzero\n" + std::to_string(scan.bound) + "," +
          std::to_string(scan.pairs) + "," + std::to_string(scan.nonzero) + "\n";
    ctx.write_text("lemma_resonance.csv", csv);
    summary["resonance"] = {{"pairs", scan.pairs}, {"nonzero", scan.nonzero}};

    return ctx.finish(summary);
}

json cmd_estimates(ExperimentConfig cfg, const RunOptions& opt)
{
    prepare(cfg, "estimates", opt);
    Context ctx{cfg, opt, cfg.hash()};
    WeightParams params{cfg.get_real("estimates", "C"), cfg.get_real("estimates", "c0"),
                        cfg.get_real("estimates", "delta")};
    params.validate();
    const double s = cfg.get_real("estimates", "s");
    const double p = cfg.get_real("estimates", "p");
    std::vector<int> cutoffs;
    for (long long n : cfg.get_ints("estimates", "cutoffs")) cutoffs.push_back(checked_cutoff(n, "[estimates]"));
    ctx.log("bilinear sweep over " + std::to_string(cutoffs.size()) + " cutoffs");
    const SweepResult sweep = bilinear_ratio_sweep(s, p, params, cutoffs, cfg.get_uint("estimates", "trials"),
                                                   cfg.get_uint("estimates", "seed"), opt.workers);

    std::string csv = ctx.csv_preamble("bilinear_sweep.v1") + "N,trial,kind,weighted_ratio,unweighted_ratio\n";
    for (const auto& t : sweep.trials) {
        csv += std::to_string(t.cutoff) + "," + std::to_string(t.trial) + "," + to_string(t.kind) + "," +
               fmt(t.weighted_ratio) + "," + fmt(t.unweighted_ratio) + "\n";
    }
    ctx.write_text("bilinear_sweep.csv", csv);
    csv = ctx.csv_preamble("bilinear_summary.v1") + "N,trials,max_weighted,max_unweighted\n";
    json summary_rows = json::array();
    for (const auto& r : sweep.summary) {
        csv += std::to_string(r.cutoff) + "," + std::to_string(r.trials) + "," + fmt(r.max_weighted) + "," +
               fmt(r.max_unweighted) + "\n";
        summary_rows.push_back({{"N", r.cutoff}, {"max_weighted", r.max_weighted}, {"max_unweighted", r.max_unweighted}});
    }
    ctx.write_text("bilinear_summary.csv", csv);

    // Time localization of eta(t) S(t) phi for a sampled phi.
    const int loc_n = checked_cutoff(cfg.get_int("estimates", "localization_N"), "[estimates] localization");
    const auto levels = cfg.get_int("estimates", "localization_levels");
    const double tol = cfg.get_real("estimates", "kernel_tol");
    if (levels < 0 || levels > 12) throw ConfigError("[estimates] localization_levels must be in [0, 12]");
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("[estimates] kernel_tol must be in (0, 1)");
    const FourierField phi = sample({loc_n, cfg.get_uint("estimates", "localization_seed"), 0});
    const double cube = static_cast<double>(loc_n) * loc_n * loc_n;
    const TauGrid grid{std::ceil(cube + 256.0 * (std::ldexp(1.0, static_cast<int>(levels)) + 2.0)), 0.5};
    const SpaceTimeCoeffs f = localized_free_solution(phi, grid, tol);
    std::vector<TimeLocalization> loc(static_cast<std::size_t>(levels + 1));
    parallel_for(loc.size(), opt.workers, [&](std::size_t k) {
        loc[k] = time_localization_check(f, std::ldexp(1.0, -static_cast<int>(k)), s, p, tol);
    });
    csv = ctx.csv_preamble("time_localization.v1") + "T,localized_norm,reference_norm,ratio\n";
    double rmin = INFINITY, rmax = 0.0;
    for (const auto& r : loc) {
        csv += fmt(r.T) + "," + fmt(r.localized_norm) + "," + fmt(r.reference_norm) + "," + fmt(r.ratio) + "\n";
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    ctx.write_text("time_localization.csv", csv);

    return ctx.finish({{"command", "estimates"},
                       {"bilinear", summary_rows},
                       {"time_localization", {{"min_ratio", rmin}, {"max_ratio", rmax}}}});
}

json run_command(const std::string& subcommand, ExperimentConfig cfg, const RunOptions& opt)
{
    if (subcommand == "sample") return cmd_sample(std::move(cfg), opt);
    if (subcommand == "evolve") return cmd_evolve(std::move(cfg), opt);
    if (subcommand == "invariance") return cmd_invariance(std::move(cfg), opt);
    if (subcommand == "tails") return cmd_tails(std::move(cfg), opt);
    if (subcommand == "lemmas") return cmd_lemmas(std::move(cfg), opt);
    if (subcommand == "estimates") return cmd_estimates(std::move(cfg), opt);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace kdvbench
