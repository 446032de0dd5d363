// ambise command-line frontend: fixture synthesis, enhancement, DOA,
// scoring, batch evaluation and report conversion.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ambise/doa.hpp"
#include "ambise/enhance.hpp"
#include "ambise/eval.hpp"
#include "ambise/fixtures.hpp"
#include "ambise/manifest.hpp"
#include "ambise/metrics.hpp"
#include "ambise/report.hpp"
#include "ambise/scene.hpp"
#include "ambise/wav.hpp"

namespace {

using namespace ambise;

BFormatScene read_scene(const std::string& path) {
    auto channels = read_wav(path);
    if (channels.size() != 4)
        throw std::runtime_error(path + ": expected a 4-channel B-format WAV");
    BFormatScene scene;
    scene.w = std::move(channels[0]);
    scene.x = std::move(channels[1]);
    scene.y = std::move(channels[2]);
    scene.z = std::move(channels[3]);
    return scene;
}

AudioBuffer read_mono(const std::string& path) {
    auto channels = read_wav(path);
    if (channels.size() != 1) throw std::runtime_error(path + ": expected a mono WAV");
    return std::move(channels[0]);
}

SynthConfig::Kind synth_kind_from_string(const std::string& name) {
    if (name == "foa-anechoic") return SynthConfig::Kind::foa_anechoic;
    if (name == "foa-reverb") return SynthConfig::Kind::foa_reverb;
    if (name == "array-surrogate") return SynthConfig::Kind::array_surrogate;
    throw std::runtime_error("unknown fixture kind '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SISO/MISO speech enhancement workbench for B-format scenes"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::size_t> jobs_flag;
    std::string format_name = "json";
    app.add_option("--config", config_path, "JSON run configuration")->envname("AMBISE_CONFIG");
    app.add_option("--seed", seed_flag, "Seed for fixture synthesis");
    app.add_option("--jobs", jobs_flag, "Worker threads for batch evaluation");
    app.add_option("--format", format_name, "Report format: csv or json");

    auto load_config = [&]() {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        if (jobs_flag) cfg.jobs = *jobs_flag;
        return cfg;
    };

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic fixtures and a manifest");
    std::string synth_out = "fixtures";
    std::string synth_kind = "foa-anechoic";
    std::size_t synth_dirs = 8;
    std::vector<double> synth_snrs = {0.0, 10.0};
    std::vector<std::string> synth_noise = {"white"};
    double synth_duration = 2.0;
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--kind", synth_kind, "foa-anechoic | foa-reverb | array-surrogate");
    synth->add_option("--directions", synth_dirs, "Number of source directions");
    synth->add_option("--snr", synth_snrs, "SNR grid in dB");
    synth->add_option("--noise", synth_noise, "Noise kinds: white, babble, tonal");
    synth->add_option("--duration", synth_duration, "Utterance length in seconds");

    // enhance
    auto* enhance = app.add_subcommand("enhance", "Run one pipeline over a 4-channel WAV");
    std::string enh_in, enh_out, enh_pipeline = kPipelineSisoPerChannel;
    enhance->add_option("--in", enh_in, "Input 4-channel WAV")->required();
    enhance->add_option("--out", enh_out, "Output WAV")->required();
    enhance->add_option("--pipeline", enh_pipeline,
                        "siso-per-channel | siso-shared-mask | miso-delay-sum");

    // doa
    auto* doa_cmd = app.add_subcommand("doa", "Estimate direction of arrival of a scene");
    std::string doa_in;
    doa_cmd->add_option("--in", doa_in, "Input 4-channel WAV")->required();

    // score
    auto* score = app.add_subcommand("score", "Score signals (intelligibility / spatial)");
    std::string score_clean, score_degraded, score_before, score_after;
    score->add_option("--clean", score_clean, "Clean mono reference WAV");
    score->add_option("--degraded", score_degraded, "Degraded mono WAV");
    score->add_option("--spatial-before", score_before, "Scene before processing (4-channel)");
    score->add_option("--spatial-after", score_after, "Scene after processing (4-channel)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run all configured pipelines over a manifest");
    std::string eval_manifest, eval_out = "report.json";
    eval_cmd->add_option("--manifest", eval_manifest, "Manifest JSON")->required();
    eval_cmd->add_option("--out", eval_out, "Report output path");

    // report
    auto* report_cmd = app.add_subcommand("report", "Re-emit a JSON report (e.g. as CSV)");
    std::string report_in, report_out;
    report_cmd->add_option("--in", report_in, "Existing JSON report")->required();
    report_cmd->add_option("--out", report_out, "Output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_config();

        if (synth->parsed()) {
            SynthConfig sc;
            sc.kind = synth_kind_from_string(synth_kind);
            sc.num_directions = synth_dirs;
            sc.snr_grid_db = synth_snrs;
            sc.noise_kinds = synth_noise;
            sc.duration_s = synth_duration;
            sc.w_gain = cfg.w_gain;
            const std::string manifest = synth_fixtures(sc, cfg.seed, synth_out);
            std::cout << manifest << "\n";
            return 0;
        }

        if (enhance->parsed()) {
            const BFormatScene scene = read_scene(enh_in);
            const StftConfig stft_cfg = cfg.stft_config();
            if (enh_pipeline == kPipelineMisoDelaySum) {
                const std::vector<AudioBuffer> channels = {scene.w, scene.x, scene.y, scene.z};
                const AlignResult align = ncc_align(channels, cfg.beamformer);
                const AudioBuffer mono = delay_sum_beamform(channels, align.delays);
                write_wav(enh_out, {mono}, WavFormat::pcm16);
            } else if (enh_pipeline == kPipelineSisoPerChannel ||
                       enh_pipeline == kPipelineSisoSharedMask) {
                const MultiMode mode = enh_pipeline == kPipelineSisoPerChannel
                                           ? MultiMode::per_channel
                                           : MultiMode::shared_mask;
                const BFormatScene out = enhance_multichannel(scene, mode, cfg.mask, stft_cfg);
                write_wav(enh_out, {out.w, out.x, out.y, out.z}, WavFormat::pcm16);
            } else {
                throw std::runtime_error("unknown pipeline '" + enh_pipeline + "'");
            }
            return 0;
        }

        if (doa_cmd->parsed()) {
            const BFormatScene scene = read_scene(doa_in);
            const DoaEstimate est =
                pseudo_intensity_doa(scene, cfg.stft_config(), cfg.doa_band);
            nlohmann::ordered_json j;
            j["azimuth_deg"] = est.direction.azimuth_deg;
            j["elevation_deg"] = est.direction.elevation_deg;
            j["confidence"] = est.confidence;
            std::cout << j.dump() << "\n";
            return 0;
        }

        if (score->parsed()) {
            nlohmann::ordered_json j;
            if (!score_clean.empty() || !score_degraded.empty()) {
                if (score_clean.empty() || score_degraded.empty())
                    throw std::runtime_error("score: --clean and --degraded go together");
                j["stoi"] = stoi(read_mono(score_clean), read_mono(score_degraded)).value;
            }
            if (!score_before.empty() || !score_after.empty()) {
                if (score_before.empty() || score_after.empty())
                    throw std::runtime_error(
                        "score: --spatial-before and --spatial-after go together");
                const SpatialDeviation dev =
                    icld_icpd_deviation(read_scene(score_before), read_scene(score_after),
                                        cfg.stft_config(), cfg.floor_dbfs);
                j["icld_rms_db"] = dev.icld_rms_db;
                j["icpd_rms_rad"] = dev.icpd_rms_rad;
                j["active_bins"] = dev.active_bin_count;
            }
            if (j.empty()) throw std::runtime_error("score: nothing to score (see --help)");
            std::cout << j.dump() << "\n";
            return 0;
        }

        if (eval_cmd->parsed()) {
            const auto entries = load_manifest(eval_manifest);
            const EvalReport result = run_eval(entries, cfg);
            emit_report(result, report_format_from_string(format_name), eval_out);
            std::cerr << "entries processed: " << result.entries_processed
                      << ", failed: " << result.entries_failed << "\n";
            for (const auto& f : result.failures)
                std::cerr << "  failed " << f.id << ": " << f.error << "\n";
            return report_exit_code(result);
        }

        if (report_cmd->parsed()) {
            const EvalReport loaded = load_report(report_in);
            emit_report(loaded, report_format_from_string(format_name), report_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
