#include "kdvbench/config.hpp"

#include "kdvbench/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace kdvbench {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis)
{
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

using VT = ValueType;

std::vector<KeySpec> sample_keys()
{
    return {
        {"sample", "N", VT::Int, "16", "Fourier cutoff"},
        {"sample", "count", VT::UInt, "1000", "ensemble size"},
        {"sample", "seed", VT::UInt, "0", "base seed"},
        {"sample", "first_stream", VT::UInt, "0", "stream of member 0"},
        {"sample", "perturbation", VT::Text, "none", "none | variance | skew"},
        {"sample", "perturbation_amount", VT::Real, "0", "variance factor or skew gamma"},
    };
}

std::vector<KeySpec> flow_keys()
{
    return {
        {"flow", "dt", VT::Real, "2.5e-4", "time step"},
        {"flow", "T", VT::Real, "1", "horizon"},
        {"flow", "checkpoint_every", VT::Int, "0", "steps between checkpoints"},
        {"flow", "nonlinear", VT::Bool, "true", "false runs the Airy flow only"},
    };
}

std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts)
{
    std::vector<KeySpec> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

const std::map<std::string, std::vector<KeySpec>>& schemas()
{
    static const std::map<std::string, std::vector<KeySpec>> all = {
        {"sample", sample_keys()},
        {"evolve", concat({sample_keys(), flow_keys(),
                           {{"evolve", "input", VT::Text, "", "snapshot to continue from (empty: sample)"}}})},
        {"invariance",
         concat({sample_keys(), flow_keys(),
                 {
                     {"invariance", "alpha", VT::Real, "0.01", "family-wise level"},
                     {"invariance", "observables", VT::Text, "re:1,im:2,abs2:3,l2,norm", "observable list"},
                     {"invariance", "norm_s", VT::Real, "-0.49", ""},
                     {"invariance", "norm_p", VT::Real, "2.1", ""},
                     {"invariance", "norm_q", VT::Real, "inf", ""},
                     {"invariance", "permutation", VT::Bool, "false", "permutation p-values"},
                     {"invariance", "permutations", VT::Int, "1000", ""},
                     {"invariance", "permutation_seed", VT::UInt, "0", ""},
                 }})},
        {"tails",
         {
             {"tails", "N", VT::Int, "256", "Fourier cutoff"},
             {"tails", "samples", VT::UInt, "100000", ""},
             {"tails", "seed", VT::UInt, "0", ""},
             {"tails", "thresholds", VT::RealList, "2.0,2.25,2.5,2.75,3.0,3.25,3.5,3.75,4.0", "K values"},
             {"tails", "norm_s", VT::Real, "-0.49", ""},
             {"tails", "norm_p", VT::Real, "2.1", ""},
             {"tails", "norm_q", VT::Real, "inf", ""},
             {"tails", "confidence", VT::Real, "0.99", "slope interval level"},
         }},
        {"lemmas",
         {
             {"lemmas", "gtv_alpha", VT::RealList, "0.5,0.26,0.1", ""},
             {"lemmas", "gtv_beta", VT::RealList, "0.5,0.26,0.45", "paired with gtv_alpha"},
             {"lemmas", "gtv_a", VT::RealList, "10,100,1000,10000,100000,1000000", ""},
             {"lemmas", "gtv_epsilon", VT::Real, "0.01", "value of [0]_+"},
             {"lemmas", "psum_n", VT::IntList, "1,2,5,10,100,1000,-1,-10,-1000", ""},
             {"lemmas", "psum_lambda", VT::RealList, "0,1,-1,100,-100,10000,-10000,1000000,-1000000", ""},
             {"lemmas", "psum_l1", VT::Real, "1", ""},
             {"lemmas", "psum_l2", VT::Real, "1", ""},
             {"lemmas", "psum_cutoff", VT::Int, "100000", ""},
             {"lemmas", "omega_exponent", VT::Real, "0.75", ""},
             {"lemmas", "omega_n_max", VT::Int, "1000", ""},
             {"lemmas", "omega_c0", VT::Real, "1", ""},
             {"lemmas", "omega_n1_limit", VT::Int, "2000", ""},
             {"lemmas", "decay_delta", VT::Real, "0.1", ""},
             {"lemmas", "decay_min_level", VT::Int, "1", "smallest log2 M"},
             {"lemmas", "decay_max_level", VT::Int, "16", "largest log2 M"},
             {"lemmas", "decay_seeds", VT::Int, "200", ""},
             {"lemmas", "decay_seed", VT::UInt, "0", "first seed"},
             {"lemmas", "resonance_bound", VT::Int, "200", ""},
         }},
        {"estimates",
         {
             {"estimates", "s", VT::Real, "-0.49", ""},
             {"estimates", "p", VT::Real, "2.1", ""},
             {"estimates", "cutoffs", VT::IntList, "8,16,32,64", ""},
             {"estimates", "trials", VT::UInt, "200", "trials per cutoff"},
             {"estimates", "seed", VT::UInt, "0", ""},
             {"estimates", "C", VT::Real, "10", "weight: minimal |n|"},
             {"estimates", "c0", VT::Real, "1", "weight: curve half-width"},
             {"estimates", "delta", VT::Real, "0.01", "weight exponent"},
             {"estimates", "localization_N", VT::Int, "4", "cutoff of the localization input"},
             {"estimates", "localization_levels", VT::Int, "6", "T = 2^0 .. 2^-levels"},
             {"estimates", "localization_seed", VT::UInt, "0", ""},
             {"estimates", "kernel_tol", VT::Real, "1e-9", ""},
         }},
    };
    return all;
}

std::string trim(std::string s)
{
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& text,
                            const char* expected)
{
    throw ConfigError("[" + section + "] " + key + " = '" + text + "': expected " + expected);
}

double parse_real(const std::string& section, const std::string& key, const std::string& text)
{
    // strtod accepts "inf"; from_chars would need the exact lower-case spelling.
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || std::isnan(v)) bad_value(section, key, text, "a real number");
    return v;
}

long long parse_int(const std::string& section, const std::string& key, const std::string& text)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(section, key, text, "an integer");
    return v;
}

std::uint64_t parse_uint(const std::string& section, const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(section, key, text, "an unsigned integer");
    return v;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& text)
{
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    bad_value(section, key, text, "a boolean");
}

void check_type(const KeySpec& spec, const std::string& text)
{
    switch (spec.type) {
    case VT::Int: parse_int(spec.section, spec.key, text); break;
    case VT::UInt: parse_uint(spec.section, spec.key, text); break;
    case VT::Real: parse_real(spec.section, spec.key, text); break;
    case VT::Bool: parse_bool(spec.section, spec.key, text); break;
    case VT::Text: break;
    case VT::RealList:
        for (const auto& item : split_list(text)) parse_real(spec.section, spec.key, item);
        break;
    case VT::IntList:
        for (const auto& item : split_list(text)) parse_int(spec.section, spec.key, item);
        break;
    }
}

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

const std::vector<KeySpec>& schema(const std::string& subcommand)
{
    auto it = schemas().find(subcommand);
    if (it == schemas().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    return it->second;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' outside any [section]");
        for (const auto& [key, leaf] : body) cfg.set(section, key, trim(leaf.data()));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value)
{
    values_[section][key] = value;
}

std::optional<std::string> ExperimentConfig::raw(const std::string& section, const std::string& key) const
{
    auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

void ExperimentConfig::apply_environment(const std::string& subcommand,
                                         const std::function<std::optional<std::string>(const std::string&)>& lookup)
{
    for (const auto& spec : schema(subcommand)) {
        const std::string name = "KDVBENCH_" + upper(spec.section) + "_" + upper(spec.key);
        std::optional<std::string> v;
        if (lookup) {
            v = lookup(name);
        } else if (const char* env = std::getenv(name.c_str())) {
            v = env;
        }
        if (v) set(spec.section, spec.key, trim(*v));
    }
}

void ExperimentConfig::validate(const std::string& subcommand)
{
    const auto& keys = schema(subcommand);
    std::set<std::string> used_sections, known_sections;
    for (const auto& spec : keys) used_sections.insert(spec.section);
    for (const auto& [name, list] : schemas()) {
        for (const auto& spec : list) known_sections.insert(spec.section);
    }

    std::map<std::string, std::map<std::string, std::string>> kept;
    for (const auto& [section, body] : values_) {
        if (!known_sections.contains(section)) throw ConfigError("config: unknown section [" + section + "]");
        if (!used_sections.contains(section)) continue;
        for (const auto& [key, text] : body) {
            auto spec = std::find_if(keys.begin(), keys.end(),
                                     [&](const KeySpec& k) { return k.section == section && k.key == key; });
            if (spec == keys.end()) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
            check_type(*spec, text);
            kept[section][key] = text;
        }
    }
    for (const auto& spec : keys) kept[spec.section].try_emplace(spec.key, spec.fallback);
    values_ = std::move(kept);
}

const std::string& ExperimentConfig::value(const std::string& section, const std::string& key) const
{
    auto s = values_.find(section);
    if (s != values_.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) return k->second;
    }
    throw ConfigError("config: missing [" + section + "] " + key);
}

long long ExperimentConfig::get_int(const std::string& section, const std::string& key) const
{
    return parse_int(section, key, value(section, key));
}

std::uint64_t ExperimentConfig::get_uint(const std::string& section, const std::string& key) const
{
    return parse_uint(section, key, value(section, key));
}

double ExperimentConfig::get_real(const std::string& section, const std::string& key) const
{
    return parse_real(section, key, value(section, key));
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key) const
{
    return parse_bool(section, key, value(section, key));
}

std::string ExperimentConfig::get_text(const std::string& section, const std::string& key) const
{
    return value(section, key);
}

std::vector<double> ExperimentConfig::get_reals(const std::string& section, const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(value(section, key))) out.push_back(parse_real(section, key, item));
    return out;
}

std::vector<long long> ExperimentConfig::get_ints(const std::string& section, const std::string& key) const
{
    std::vector<long long> out;
    for (const auto& item : split_list(value(section, key))) out.push_back(parse_int(section, key, item));
    return out;
}

std::string ExperimentConfig::canonical() const
{
    std::string out;
    for (const auto& [section, body] : values_) {
        out += "[" + section + "]\n";
        for (const auto& [key, text] : body) out += key + "=" + text + "\n";
    }
    return out;
}

std::string ExperimentConfig::hash() const
{
    return hex64(fnv1a64(canonical()));
}

}  // namespace kdvbench
