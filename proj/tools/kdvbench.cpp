// kdvbench command-line entry point.
//
//   kdvbench <sample|evolve|invariance|tails|lemmas|estimates> [--config PATH]
//            [--out DIR] [--seed U64] [--workers INT] [--verbose]
//
// Prints one JSON object on stdout: the command summary, or {"error": ...}.
// Exit codes: 0 success, 2 usage or configuration error, 1 any other failure.

#include "kdvbench/commands.hpp"
#include "kdvbench/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>
#include <utility>

int main(int argc, char** argv)
{
    using namespace kdvbench;

    CLI::App app{"Truncated KdV white-noise invariance benchmark"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    RunOptions opt;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "replaces every seed key of the subcommand");
    app.add_option("--workers", opt.workers, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", opt.verbose, "progress on stderr");

    const std::pair<const char*, const char*> commands[] = {
        {"sample", "draw a white-noise ensemble into ensemble.snap"},
        {"evolve", "run the truncated flow, write checkpoints and conservation drift"},
        {"invariance", "KS comparison of an ensemble before and after the flow"},
        {"tails", "Monte Carlo norm tails and a log-tail vs K^2 fit"},
        {"lemmas", "numerical checks of the integral, lattice-sum and decay lemmas"},
        {"estimates", "bilinear ratio sweep and time-localization ratios"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cout << error_object("usage", e.what()).dump() << std::endl;
        return 2;
    }
    if (*seed_opt) opt.seed = seed;
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
        cfg.apply_environment(sub);
        const auto summary = run_command(sub, std::move(cfg), opt);
        std::cout << summary.dump(2) << std::endl;
        return 0;
    } catch (const Error& e) {
        std::cout << error_object(e.code(), e.what()).dump() << std::endl;
        std::cerr << "kdvbench " << sub << ": " << e.what() << "\n";
        return e.code() == "config" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cout << error_object("internal", e.what()).dump() << std::endl;
        std::cerr << "kdvbench " << sub << ": " << e.what() << "\n";
        return 1;
    }
}
