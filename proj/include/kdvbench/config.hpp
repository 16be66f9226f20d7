#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kdvbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

enum class ValueType { Int, UInt, Real, Text, Bool, RealList, IntList };

struct KeySpec {
    std::string section;
    std::string key;
    ValueType type;
    std::string fallback;
    std::string help;
};

/// Keys accepted by a subcommand (sample, evolve, invariance, tails, lemmas,
/// estimates). Throws ConfigError for an unknown subcommand.
const std::vector<KeySpec>& schema(const std::string& subcommand);

/// Sectioned key-value configuration ("[section]" headers, "key = value").
/// Values stay textual until read through a typed getter.
class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& path);

    void set(const std::string& section, const std::string& key, const std::string& value);
    std::optional<std::string> raw(const std::string& section, const std::string& key) const;

    /// Replaces keys from KDVBENCH_<SECTION>_<KEY> variables (upper case) for
    /// every key of the subcommand's schema. `lookup` defaults to getenv.
    void apply_environment(const std::string& subcommand,
                           const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

    /// Rejects unknown sections or keys and unparsable values, then fills
    /// defaults. Sections belonging only to other subcommands are dropped.
    void validate(const std::string& subcommand);

    long long get_int(const std::string& section, const std::string& key) const;
    std::uint64_t get_uint(const std::string& section, const std::string& key) const;
    double get_real(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::string get_text(const std::string& section, const std::string& key) const;
    std::vector<double> get_reals(const std::string& section, const std::string& key) const;
    std::vector<long long> get_ints(const std::string& section, const std::string& key) const;

    /// Sorted "[section]\nkey=value\n" rendering of every stored value.
    std::string canonical() const;
    /// hex64(fnv1a64(canonical())).
    std::string hash() const;

private:
    const std::string& value(const std::string& section, const std::string& key) const;

    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace kdvbench
