// eval.hpp -- batch experiment driver: run configured pipelines over a
// manifest, score everything, aggregate.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambise/doa.hpp"
#include "ambise/enhance.hpp"
#include "ambise/manifest.hpp"
#include "ambise/metrics.hpp"
#include "ambise/stft.hpp"

namespace ambise {

inline constexpr const char* kPipelineNoisy = "noisy-baseline";
inline constexpr const char* kPipelineSisoPerChannel = "siso-per-channel";
inline constexpr const char* kPipelineSisoSharedMask = "siso-shared-mask";
inline constexpr const char* kPipelineMisoDelaySum = "miso-delay-sum";

struct RunConfig {
    std::size_t fft_size = 512;
    std::size_t hop_size = 256;
    Window window = Window::sqrt_hann;
    MaskParams mask;
    BeamformerParams beamformer;
    std::vector<std::string> pipelines = {kPipelineNoisy, kPipelineSisoPerChannel,
                                          kPipelineSisoSharedMask, kPipelineMisoDelaySum};
    double pattern_p = 0.5;
    double w_gain = kDefaultWGain;
    double floor_dbfs = -80.0;
    FrequencyBand doa_band;
    double tdoa_max_s = 0.002;   // search range for the mic A/B cross-check
    bool normalize_miso = false;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;

    StftConfig stft_config() const { return {fft_size, hop_size, window}; }
};

/// Parses the JSON config document; every field optional, unknown keys
/// rejected.
RunConfig load_run_config(const std::string& path);

/// Scores for one (entry, pipeline) cell. Metrics that the pipeline cannot
/// produce stay disengaged: the mono beamformer has no channels, no scene
/// and no direction of arrival.
struct PipelineRecord {
    std::string id;
    std::string pipeline;
    bool ok = true;
    std::string error;
    std::optional<std::array<double, 4>> stoi_channels;  // W, X, Y, Z
    std::optional<double> stoi_mono;
    std::optional<DoaEstimate> doa;
    std::optional<AngularError> angular;
    std::optional<SpatialDeviation> spatial;
    std::optional<double> tdoa_ab_s;
};

struct EntryFailure {
    std::string id;
    std::string error;
};

struct MetricSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

/// pipeline -> metric name -> summary.
using Aggregates = std::map<std::string, std::map<std::string, MetricSummary>>;

struct EvalReport {
    std::vector<PipelineRecord> records;  // sorted by (id, pipeline)
    std::vector<EntryFailure> failures;   // sorted by id
    std::size_t entries_processed = 0;
    std::size_t entries_failed = 0;
    std::uint64_t seed = 0;
    Aggregates aggregates;
};

/// Recomputes the aggregate block from per-record values (mean / median /
/// quartiles of stoi_mono, stoi_w, err_great_circle_deg, icld_rms_db,
/// icpd_rms_rad per pipeline).
Aggregates compute_aggregates(const std::vector<PipelineRecord>& records);

/// Runs every configured pipeline over every entry with a bounded worker
/// pool. Entry-level failures are recorded, never fatal; the report content
/// is independent of the parallelism degree.
EvalReport run_eval(const std::vector<ManifestEntry>& entries, const RunConfig& config);

/// 0 when everything scored, 2 when any entry or record failed.
int report_exit_code(const EvalReport& report);

}  // namespace ambise
