#include "ambise/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ambise/wav.hpp"

namespace ambise {

using nlohmann::json;

namespace {

Window window_from_string(const std::string& name) {
    if (name == "rectangular") return Window::rectangular;
    if (name == "hann") return Window::hann;
    if (name == "sqrt_hann") return Window::sqrt_hann;
    throw std::runtime_error("config: unknown window '" + name + "'");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error(path + ": config must be a JSON object");

    RunConfig cfg;
    static const std::vector<std::string> known = {
        "stft",   "mask",        "beamformer",  "pipelines", "pattern_p",      "w_gain",
        "floor_dbfs", "doa_band_hz", "tdoa_max_s", "normalize_miso", "jobs", "seed"};
    for (const auto& [key, _] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::runtime_error(path + ": unknown config key '" + key + "'");

    try {
        if (doc.contains("stft")) {
            const auto& s = doc["stft"];
            cfg.fft_size = s.value("fft_size", cfg.fft_size);
            cfg.hop_size = s.value("hop_size", cfg.hop_size);
            if (s.contains("window")) cfg.window = window_from_string(s["window"]);
        }
        if (doc.contains("mask")) {
            const auto& m = doc["mask"];
            cfg.mask.noise_percentile = m.value("noise_percentile", cfg.mask.noise_percentile);
            cfg.mask.floor_gain = m.value("floor_gain", cfg.mask.floor_gain);
            cfg.mask.oversubtraction = m.value("oversubtraction", cfg.mask.oversubtraction);
            cfg.mask.smoothing_frames = m.value("smoothing_frames", cfg.mask.smoothing_frames);
        }
        if (doc.contains("beamformer")) {
            const auto& b = doc["beamformer"];
            cfg.beamformer.window_ms = b.value("window_ms", cfg.beamformer.window_ms);
            cfg.beamformer.max_lag_samples =
                b.value("max_lag_samples", cfg.beamformer.max_lag_samples);
            cfg.beamformer.ref_channel = b.value("ref_channel", cfg.beamformer.ref_channel);
        }
        if (doc.contains("pipelines"))
            cfg.pipelines = doc["pipelines"].get<std::vector<std::string>>();
        cfg.pattern_p = doc.value("pattern_p", cfg.pattern_p);
        cfg.w_gain = doc.value("w_gain", cfg.w_gain);
        cfg.floor_dbfs = doc.value("floor_dbfs", cfg.floor_dbfs);
        if (doc.contains("doa_band_hz")) {
            const auto& b = doc["doa_band_hz"];
            if (!b.is_array() || b.size() != 2)
                throw std::runtime_error("doa_band_hz must be [lo, hi]");
            cfg.doa_band = {b[0].get<double>(), b[1].get<double>()};
        }
        cfg.tdoa_max_s = doc.value("tdoa_max_s", cfg.tdoa_max_s);
        cfg.normalize_miso = doc.value("normalize_miso", cfg.normalize_miso);
        cfg.jobs = doc.value("jobs", cfg.jobs);
        cfg.seed = doc.value("seed", cfg.seed);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": bad config value: " + e.what());
    }

    static const std::vector<std::string> known_pipelines = {
        kPipelineNoisy, kPipelineSisoPerChannel, kPipelineSisoSharedMask, kPipelineMisoDelaySum};
    for (const auto& p : cfg.pipelines)
        if (std::find(known_pipelines.begin(), known_pipelines.end(), p) == known_pipelines.end())
            throw std::runtime_error(path + ": unknown pipeline '" + p + "'");
    if (cfg.jobs == 0) throw std::runtime_error(path + ": jobs must be >= 1");
    return cfg;
}

namespace {

struct EntryOutcome {
    std::vector<PipelineRecord> records;
    std::optional<EntryFailure> failure;
};

BFormatScene load_scene(const std::string& path) {
    auto channels = read_wav(path);
    if (channels.size() != 4)
        throw std::runtime_error(path + ": expected 4 channels, found " +
                                 std::to_string(channels.size()));
    BFormatScene scene;
    scene.w = std::move(channels[0]);
    scene.x = std::move(channels[1]);
    scene.y = std::move(channels[2]);
    scene.z = std::move(channels[3]);
    validate(scene, path);
    return scene;
}

EntryOutcome process_entry(const ManifestEntry& entry, const RunConfig& cfg,
                           const StftConfig& stft_cfg) {
    EntryOutcome outcome;
    BFormatScene scene;
    AudioBuffer target;
    std::optional<double> tdoa_ab;
    try {
        scene = load_scene(entry.mic_a);
        auto target_channels = read_wav(entry.target);
        if (target_channels.size() != 1)
            throw std::runtime_error(entry.target + ": expected mono target");
        target = std::move(target_channels[0]);
        validate(target, entry.target);
        if (target.sample_rate_hz != scene.sample_rate_hz())
            throw std::runtime_error(entry.id + ": target and mic_a rates differ");
        if (entry.mic_b) {
            const BFormatScene mic_b = load_scene(*entry.mic_b);
            tdoa_ab = gcc_phat(scene.w, mic_b.w, cfg.tdoa_max_s).first;
        }
    } catch (const std::exception& e) {
        outcome.failure = EntryFailure{entry.id, e.what()};
        return outcome;
    }

    for (const std::string& pipeline : cfg.pipelines) {
        PipelineRecord rec;
        rec.id = entry.id;
        rec.pipeline = pipeline;
        rec.tdoa_ab_s = tdoa_ab;
        try {
            if (pipeline == kPipelineMisoDelaySum) {
                const std::vector<AudioBuffer> channels = {scene.w, scene.x, scene.y, scene.z};
                const AlignResult align = ncc_align(channels, cfg.beamformer);
                AudioBuffer mono = delay_sum_beamform(channels, align.delays);
                if (cfg.normalize_miso) {
                    const double out_rms = rms(mono.samples);
                    const double in_rms = rms(scene.w.samples);
                    if (out_rms > 0.0)
                        for (double& v : mono.samples) v *= in_rms / out_rms;
                }
                rec.stoi_mono = stoi(target, mono).value;
                // Mono output: no channels, no scene, no DOA to report.
            } else {
                BFormatScene out;
                if (pipeline == kPipelineNoisy)
                    out = scene;
                else if (pipeline == kPipelineSisoPerChannel)
                    out = enhance_multichannel(scene, MultiMode::per_channel, cfg.mask, stft_cfg);
                else if (pipeline == kPipelineSisoSharedMask)
                    out = enhance_multichannel(scene, MultiMode::shared_mask, cfg.mask, stft_cfg);
                else
                    throw std::runtime_error("unknown pipeline '" + pipeline + "'");

                rec.stoi_channels = {stoi(target, out.w).value, stoi(target, out.x).value,
                                     stoi(target, out.y).value, stoi(target, out.z).value};
                rec.spatial = icld_icpd_deviation(scene, out, stft_cfg, cfg.floor_dbfs);
                const DoaEstimate est = pseudo_intensity_doa(out, stft_cfg, cfg.doa_band);
                rec.doa = est;
                if (entry.doa_truth) rec.angular = angular_error(est.direction, *entry.doa_truth);
                const AudioBuffer steered =
                    steer_to_mono(out, est.direction, cfg.pattern_p, cfg.w_gain);
                rec.stoi_mono = stoi(target, steered).value;
            }
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        outcome.records.push_back(std::move(rec));
    }
    return outcome;
}

std::vector<double> metric_values(const std::vector<PipelineRecord>& records,
                                  const std::string& pipeline, const std::string& metric) {
    std::vector<double> values;
    for (const auto& r : records) {
        if (!r.ok || r.pipeline != pipeline) continue;
        std::optional<double> v;
        if (metric == "stoi_mono")
            v = r.stoi_mono;
        else if (metric == "stoi_w" && r.stoi_channels)
            v = (*r.stoi_channels)[0];
        else if (metric == "err_great_circle_deg" && r.angular)
            v = r.angular->great_circle_deg;
        else if (metric == "icld_rms_db" && r.spatial)
            v = r.spatial->icld_rms_db;
        else if (metric == "icpd_rms_rad" && r.spatial)
            v = r.spatial->icpd_rms_rad;
        if (v) values.push_back(*v);
    }
    return values;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Aggregates compute_aggregates(const std::vector<PipelineRecord>& records) {
    static const std::vector<std::string> metrics = {"stoi_mono", "stoi_w", "err_great_circle_deg",
                                                     "icld_rms_db", "icpd_rms_rad"};
    Aggregates agg;
    std::vector<std::string> pipelines;
    for (const auto& r : records)
        if (std::find(pipelines.begin(), pipelines.end(), r.pipeline) == pipelines.end())
            pipelines.push_back(r.pipeline);

    for (const auto& p : pipelines) {
        for (const auto& m : metrics) {
            auto values = metric_values(records, p, m);
            if (values.empty()) continue;
            std::sort(values.begin(), values.end());
            MetricSummary s;
            s.count = values.size();
            double total = 0.0;
            for (double v : values) total += v;
            s.mean = total / static_cast<double>(values.size());
            s.median = quantile_sorted(values, 0.5);
            s.q25 = quantile_sorted(values, 0.25);
            s.q75 = quantile_sorted(values, 0.75);
            agg[p][m] = s;
        }
    }
    return agg;
}

EvalReport run_eval(const std::vector<ManifestEntry>& entries, const RunConfig& config) {
    const StftConfig stft_cfg = config.stft_config();
    std::vector<EntryOutcome> outcomes(entries.size());

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, entries.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i)
            outcomes[i] = process_entry(entries[i], config, stft_cfg);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= entries.size()) break;
                outcomes[i] = process_entry(entries[i], config, stft_cfg);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvalReport report;
    report.seed = config.seed;
    for (auto& outcome : outcomes) {
        if (outcome.failure) {
            report.failures.push_back(std::move(*outcome.failure));
            ++report.entries_failed;
        } else {
            for (auto& rec : outcome.records) report.records.push_back(std::move(rec));
            ++report.entries_processed;
        }
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const PipelineRecord& a, const PipelineRecord& b) {
                  return a.id != b.id ? a.id < b.id : a.pipeline < b.pipeline;
              });
    std::sort(report.failures.begin(), report.failures.end(),
              [](const EntryFailure& a, const EntryFailure& b) { return a.id < b.id; });
    report.aggregates = compute_aggregates(report.records);
    return report;
}

int report_exit_code(const EvalReport& report) {
    if (report.entries_failed > 0) return 2;
    for (const auto& r : report.records)
        if (!r.ok) return 2;
    return 0;
}

}  // namespace ambise
