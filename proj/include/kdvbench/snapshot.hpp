#pragma once

#include "kdvbench/invariance.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace kdvbench {

// Layout: "KDVWSNAP", uint32 LE header length, JSON header, then for each
// member the little-endian doubles Re a_1, Im a_1, ..., Re a_N, Im a_N.
// The header records the payload size and its FNV-1a checksum.

inline constexpr int kSnapshotVersion = 1;

struct SnapshotMeta {
    std::string config_hash;
    std::string tool_version;
};

struct Snapshot {
    Ensemble ensemble;
    SnapshotMeta meta;
};

std::string encode_snapshot(const Ensemble& e, const SnapshotMeta& meta);

/// Throws FormatError on bad magic, version, sizes or checksum.
Snapshot decode_snapshot(std::string_view bytes);

/// Writes through a temporary file and renames, so readers never see a partial file.
void save_snapshot(const std::filesystem::path& path, const Ensemble& e, const SnapshotMeta& meta);

Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace kdvbench
