#pragma once

#include "kdvbench/config.hpp"
#include "kdvbench/invariance.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kdvbench {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int workers = 1;
    bool verbose = false;
    /// Replaces every "seed" key of the subcommand.
    std::optional<std::uint64_t> seed;
};

/// Every command validates `cfg` against its schema first, writes its files
/// under out_dir and returns a JSON summary listing them. Each output carries
/// the config hash and tool version; the worker count does not change any
/// payload.
nlohmann::json cmd_sample(ExperimentConfig cfg, const RunOptions& opt);
nlohmann::json cmd_evolve(ExperimentConfig cfg, const RunOptions& opt);
nlohmann::json cmd_invariance(ExperimentConfig cfg, const RunOptions& opt);
nlohmann::json cmd_tails(ExperimentConfig cfg, const RunOptions& opt);
nlohmann::json cmd_lemmas(ExperimentConfig cfg, const RunOptions& opt);
nlohmann::json cmd_estimates(ExperimentConfig cfg, const RunOptions& opt);

/// Dispatches on the subcommand name; throws ConfigError for unknown names.
nlohmann::json run_command(const std::string& subcommand, ExperimentConfig cfg, const RunOptions& opt);

/// {"error": {"code": ..., "message": ...}}
nlohmann::json error_object(const std::string& code, const std::string& message);

/// Parses "re:1,im:2,abs2:3,pair:1:2,l2,norm"; "norm" uses `norm`.
std::vector<Observable> parse_observables(const std::string& text, const NormSpec& norm);

}  // namespace kdvbench
