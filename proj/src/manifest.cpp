#include "ambise/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ambise/wav.hpp"

namespace ambise {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open manifest");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": malformed JSON: " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error(path + ": manifest must be a JSON array");

    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path candidate(p);
        return candidate.is_absolute() ? candidate.string() : (base / candidate).string();
    };

    std::vector<ManifestEntry> entries;
    std::vector<std::string> problems;
    std::size_t index = 0;
    for (const auto& item : doc) {
        ++index;
        std::string label = "entry #" + std::to_string(index);
        try {
            if (!item.is_object()) throw std::runtime_error("not a JSON object");
            ManifestEntry entry;
            entry.id = item.at("id").get<std::string>();
            label = "entry '" + entry.id + "'";
            entry.mic_a = resolve(item.at("mic_a").get<std::string>());
            entry.target = resolve(item.at("target").get<std::string>());
            if (item.contains("mic_b") && !item["mic_b"].is_null())
                entry.mic_b = resolve(item["mic_b"].get<std::string>());

            if (item.contains("doa_xyz") && !item["doa_xyz"].is_null()) {
                const auto& v = item["doa_xyz"];
                if (!v.is_array() || v.size() != 3)
                    throw std::runtime_error("doa_xyz must be [x, y, z]");
                entry.doa_truth = cartesian_to_spherical(
                    {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
            } else if (item.contains("doa_sph") && !item["doa_sph"].is_null()) {
                const auto& v = item["doa_sph"];
                if (!v.is_array() || v.size() != 2)
                    throw std::runtime_error("doa_sph must be [azimuth_deg, elevation_deg]");
                entry.doa_truth = normalized({v[0].get<double>(), v[1].get<double>()});
            }

            const WavInfo a = probe_wav(entry.mic_a);
            if (a.channels != 4)
                throw std::runtime_error("mic_a has " + std::to_string(a.channels) +
                                         " channels, expected 4");
            const WavInfo t = probe_wav(entry.target);
            if (t.channels != 1)
                throw std::runtime_error("target has " + std::to_string(t.channels) +
                                         " channels, expected 1");
            if (t.sample_rate_hz != a.sample_rate_hz)
                throw std::runtime_error("target rate differs from mic_a");
            if (entry.mic_b) {
                const WavInfo b = probe_wav(*entry.mic_b);
                if (b.channels != 4)
                    throw std::runtime_error("mic_b has " + std::to_string(b.channels) +
                                             " channels, expected 4");
                if (b.sample_rate_hz != a.sample_rate_hz)
                    throw std::runtime_error("mic_b rate differs from mic_a");
            }
            entries.push_back(std::move(entry));
        } catch (const std::exception& e) {
            problems.push_back(label + ": " + e.what());
        }
    }

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << path << ": " << problems.size() << " invalid manifest entr"
            << (problems.size() == 1 ? "y" : "ies");
        for (const auto& p : problems) msg << "\n  " << p;
        throw std::runtime_error(msg.str());
    }
    return entries;
}

}  // namespace ambise
