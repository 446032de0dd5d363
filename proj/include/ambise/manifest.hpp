// manifest.hpp -- dataset manifest: one entry per scene, schema-validated.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ambise/scene.hpp"

namespace ambise {

/// One dataset sample: a 4-channel B-format recording (optionally a second
/// one from a spaced array), the clean mono target and, when known, the
/// source direction.
struct ManifestEntry {
    std::string id;
    std::string mic_a;                 // 4-channel WAV
    std::optional<std::string> mic_b;  // 4-channel WAV
    std::string target;                // mono WAV
    std::optional<Direction> doa_truth;
};

/// Parses a JSON array of entries (fields: id, mic_a, mic_b, target,
/// doa_xyz or doa_sph; unknown keys ignored). Relative paths resolve
/// against the manifest's directory. Every referenced file is probed:
/// mics must have 4 channels, targets 1, and rates must agree within an
/// entry. All offending entries are reported in one error.
std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace ambise
