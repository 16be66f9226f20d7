#include "kdvbench/snapshot.hpp"

#include "kdvbench/config.hpp"
#include "kdvbench/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kdvbench {

namespace {

constexpr std::string_view kMagic = "KDVWSNAP";

using nlohmann::json;

void put_u64_le(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::string perturbation_name(Perturbation::Kind k)
{
    switch (k) {
    case Perturbation::Kind::None: return "none";
    case Perturbation::Kind::Variance: return "variance";
    case Perturbation::Kind::Skew: return "skew";
    }
    return "none";
}

Perturbation::Kind perturbation_kind(const std::string& name)
{
    if (name == "none") return Perturbation::Kind::None;
    if (name == "variance") return Perturbation::Kind::Variance;
    if (name == "skew") return Perturbation::Kind::Skew;
    throw FormatError("snapshot: unknown perturbation '" + name + "'");
}

json provenance_json(const Provenance& p)
{
    json flows = json::array();
    for (const auto& f : p.flows) {
        flows.push_back({{"dt", f.dt},
                         {"horizon", f.horizon},
                         {"integrator", "if-rk4"},
                         {"fd_eps", f.fd_eps},
                         {"checkpoint_every", f.checkpoint_every},
                         {"nonlinear", f.nonlinear}});
    }
    return {{"seed", p.seed},
            {"first_stream", p.first_stream},
            {"stream_count", p.stream_count},
            {"perturbation", {{"kind", perturbation_name(p.perturbation.kind)}, {"amount", p.perturbation.amount}}},
            {"flows", flows}};
}

Provenance provenance_from(const json& j)
{
    Provenance p;
    p.seed = j.at("seed").get<std::uint64_t>();
    p.first_stream = j.at("first_stream").get<std::uint64_t>();
    p.stream_count = j.at("stream_count").get<std::size_t>();
    p.perturbation.kind = perturbation_kind(j.at("perturbation").at("kind").get<std::string>());
    p.perturbation.amount = j.at("perturbation").at("amount").get<double>();
    for (const auto& f : j.at("flows")) {
        FlowConfig c;
        c.dt = f.at("dt").get<double>();
        c.horizon = f.at("horizon").get<double>();
        c.fd_eps = f.at("fd_eps").get<double>();
        c.checkpoint_every = f.at("checkpoint_every").get<long>();
        c.nonlinear = f.at("nonlinear").get<bool>();
        if (f.at("integrator").get<std::string>() != "if-rk4") throw FormatError("snapshot: unknown integrator");
        p.flows.push_back(c);
    }
    return p;
}

}  // namespace

std::string encode_snapshot(const Ensemble& e, const SnapshotMeta& meta)
{
    std::string payload;
    payload.reserve(e.members.size() * static_cast<std::size_t>(e.cutoff) * 16);
    for (const auto& m : e.members) {
        if (m.cutoff() != e.cutoff) throw CutoffMismatch("snapshot: member cutoff differs from ensemble cutoff");
        for (const Complex& a : m.positive()) {
            put_u64_le(payload, std::bit_cast<std::uint64_t>(a.real()));
            put_u64_le(payload, std::bit_cast<std::uint64_t>(a.imag()));
        }
    }
    // Time is stored as raw bits as well so the round trip never depends on
    // decimal formatting.
    const json header = {{"format", "kdvbench-ensemble"},
                         {"version", kSnapshotVersion},
                         {"N", e.cutoff},
                         {"time", e.time},
                         {"time_bits", hex64(std::bit_cast<std::uint64_t>(e.time))},
                         {"count", e.members.size()},
                         {"provenance", provenance_json(e.provenance)},
                         {"config_hash", meta.config_hash},
                         {"tool_version", meta.tool_version},
                         {"payload_bytes", payload.size()},
                         {"checksum", hex64(fnv1a64(payload))}};
    const std::string text = header.dump();
    std::string out(kMagic);
    const auto len = static_cast<std::uint32_t>(text.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
    out += text;
    out += payload;
    return out;
}

Snapshot decode_snapshot(std::string_view bytes)
{
    if (bytes.size() < kMagic.size() + 4 || bytes.substr(0, kMagic.size()) != kMagic) {
        throw FormatError("snapshot: missing KDVWSNAP magic");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + kMagic.size();
    const std::uint32_t len = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    const std::size_t header_at = kMagic.size() + 4;
    if (bytes.size() - header_at < len) throw FormatError("snapshot: truncated header");

    json header;
    try {
        header = json::parse(bytes.substr(header_at, len));
    } catch (const json::exception& e) {
        throw FormatError(std::string("snapshot: bad header: ") + e.what());
    }

    Snapshot s;
    try {
        const int version = header.at("version").get<int>();
        if (version != kSnapshotVersion) {
            throw FormatError("snapshot: version " + std::to_string(version) + " (expected " +
                              std::to_string(kSnapshotVersion) + ")");
        }
        const int cutoff = header.at("N").get<int>();
        const auto count = header.at("count").get<std::size_t>();
        const auto payload_bytes = header.at("payload_bytes").get<std::size_t>();
        if (cutoff < 1) throw FormatError("snapshot: N must be >= 1");
        if (payload_bytes != count * static_cast<std::size_t>(cutoff) * 16) {
            throw FormatError("snapshot: payload size inconsistent with N and count");
        }
        const std::string_view payload = bytes.substr(header_at + len);
        if (payload.size() != payload_bytes) {
            throw FormatError("snapshot: payload has " + std::to_string(payload.size()) + " bytes, header says " +
                              std::to_string(payload_bytes));
        }
        if (hex64(fnv1a64(payload)) != header.at("checksum").get<std::string>()) {
            throw FormatError("snapshot: checksum mismatch");
        }
        std::uint64_t time_bits = 0;
        const std::string tb = header.at("time_bits").get<std::string>();
        if (std::sscanf(tb.c_str(), "%16llx", reinterpret_cast<unsigned long long*>(&time_bits)) != 1) {
            throw FormatError("snapshot: bad time_bits");
        }

        s.ensemble.cutoff = cutoff;
        s.ensemble.time = std::bit_cast<double>(time_bits);
        s.ensemble.provenance = provenance_from(header.at("provenance"));
        s.meta.config_hash = header.at("config_hash").get<std::string>();
        s.meta.tool_version = header.at("tool_version").get<std::string>();
        const auto* q = reinterpret_cast<const unsigned char*>(payload.data());
        s.ensemble.members.reserve(count);
        for (std::size_t m = 0; m < count; ++m) {
            std::vector<Complex> modes(static_cast<std::size_t>(cutoff));
            for (auto& a : modes) {
                const double re = std::bit_cast<double>(get_u64_le(q));
                const double im = std::bit_cast<double>(get_u64_le(q + 8));
                a = {re, im};
                q += 16;
            }
            s.ensemble.members.emplace_back(std::move(modes));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("snapshot: bad header field: ") + e.what());
    } catch (const PreconditionError& e) {
        throw FormatError(std::string("snapshot: bad payload: ") + e.what());
    }
    return s;
}

void save_snapshot(const std::filesystem::path& path, const Ensemble& e, const SnapshotMeta& meta)
{
    const std::string bytes = encode_snapshot(e, meta);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Snapshot load_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read snapshot " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_snapshot(ss.str());
}

}  // namespace kdvbench
