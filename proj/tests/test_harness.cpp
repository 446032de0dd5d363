// Harness tests: manifest validation, deterministic fixture synthesis,
// batch evaluation with fail-soft accounting, report serialization.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ambise/eval.hpp"
#include "ambise/fixtures.hpp"
#include "ambise/manifest.hpp"
#include "ambise/report.hpp"
#include "ambise/scene.hpp"
#include "ambise/wav.hpp"

using namespace ambise;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ambise_harness" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
}

SynthConfig small_synth() {
    SynthConfig cfg;
    cfg.kind = SynthConfig::Kind::foa_anechoic;
    cfg.num_directions = 2;
    cfg.snr_grid_db = {5.0, 15.0};
    cfg.noise_kinds = {"white", "tonal"};
    cfg.duration_s = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("load_manifest") {
    const fs::path dir = fresh_dir("manifest");
    FixtureRng rng(3000);
    const AudioBuffer mono = synthetic_speech(rng, 0.3, 16000);
    const BFormatScene scene = encode_plane_wave(mono, {10.0, 0.0});
    write_wav((dir / "scene.wav").string(), {scene.w, scene.x, scene.y, scene.z});
    write_wav((dir / "target.wav").string(), {mono});
    write_wav((dir / "stereo.wav").string(), {mono, mono});

    SUBCASE("valid entries populate") {
        spit(dir / "ok.json", R"([
            {"id": "a", "mic_a": "scene.wav", "target": "target.wav",
             "doa_sph": [10.0, 0.0]},
            {"id": "b", "mic_a": "scene.wav", "mic_b": "scene.wav",
             "target": "target.wav", "doa_xyz": [-0.891, 0.441, 0.220],
             "snr_db": 5.0}
        ])");
        const auto entries = load_manifest((dir / "ok.json").string());
        REQUIRE(entries.size() == 2);
        CHECK(entries[0].id == "a");
        CHECK_FALSE(entries[0].mic_b.has_value());
        REQUIRE(entries[0].doa_truth.has_value());
        CHECK(entries[0].doa_truth->azimuth_deg == doctest::Approx(10.0));
        REQUIRE(entries[1].mic_b.has_value());
        // Geometry check of the Cartesian form: atan2(0.441, -0.891) and
        // asin(0.220 / |v|).
        REQUIRE(entries[1].doa_truth.has_value());
        CHECK(entries[1].doa_truth->azimuth_deg == doctest::Approx(153.665).epsilon(0.001));
        CHECK(entries[1].doa_truth->elevation_deg == doctest::Approx(12.478).epsilon(0.001));
    }

    SUBCASE("wrong channel count names the entry and the expectation") {
        spit(dir / "badch.json", R"([
            {"id": "two-channel", "mic_a": "stereo.wav", "target": "target.wav"}
        ])");
        CHECK_THROWS_WITH_AS(load_manifest((dir / "badch.json").string()),
                             doctest::Contains("two-channel"), std::runtime_error);
        try {
            load_manifest((dir / "badch.json").string());
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("expected 4") != std::string::npos);
        }
    }

    SUBCASE("all offending entries are enumerated") {
        spit(dir / "multi.json", R"([
            {"id": "ok", "mic_a": "scene.wav", "target": "target.wav"},
            {"id": "gone", "mic_a": "missing.wav", "target": "target.wav"},
            {"id": "alsobad", "mic_a": "stereo.wav", "target": "target.wav"}
        ])");
        try {
            load_manifest((dir / "multi.json").string());
            FAIL("expected a manifest error");
        } catch (const std::exception& e) {
            const std::string msg = e.what();
            CHECK(msg.find("gone") != std::string::npos);
            CHECK(msg.find("alsobad") != std::string::npos);
            CHECK(msg.find("2 invalid") != std::string::npos);
        }
    }

    SUBCASE("malformed JSON is fatal") {
        spit(dir / "broken.json", "{not json");
        CHECK_THROWS(load_manifest((dir / "broken.json").string()));
    }
}

TEST_CASE("synth_fixtures") {
    SUBCASE("same seed reproduces identical bytes") {
        const fs::path d1 = fresh_dir("synth1");
        const fs::path d2 = fresh_dir("synth2");
        const SynthConfig cfg = small_synth();
        synth_fixtures(cfg, 42, d1.string());
        synth_fixtures(cfg, 42, d2.string());
        std::size_t compared = 0;
        for (const auto& entry : fs::directory_iterator(d1)) {
            const fs::path twin = d2 / entry.path().filename();
            REQUIRE(fs::exists(twin));
            CHECK(slurp(entry.path()) == slurp(twin));
            ++compared;
        }
        CHECK(compared >= 9);  // 4 scenes + 4 mic_b + 4 targets + manifest
    }

    SUBCASE("entry count is the direction x SNR grid") {
        const fs::path dir = fresh_dir("synth3");
        const std::string manifest = synth_fixtures(small_synth(), 7, dir.string());
        const auto entries = load_manifest(manifest);
        CHECK(entries.size() == 4);
    }

    SUBCASE("written scene hits the declared W-channel SNR within 0.01 dB") {
        const fs::path dir = fresh_dir("synth4");
        const std::string manifest_path = synth_fixtures(small_synth(), 11, dir.string());

        std::ifstream in(manifest_path);
        nlohmann::json doc;
        in >> doc;
        for (const auto& item : doc) {
            const auto scene = read_wav((dir / item["mic_a"].get<std::string>()).string());
            const auto target = read_wav((dir / item["target"].get<std::string>()).string());
            const double declared = item["snr_db"].get<double>();
            // The clean W channel is w_gain * target by construction.
            double e_speech = 0.0, e_noise = 0.0;
            for (std::size_t i = 0; i < target[0].samples.size(); ++i) {
                const double w_clean = kDefaultWGain * target[0].samples[i];
                const double diff = scene[0].samples[i] - w_clean;
                e_speech += w_clean * w_clean;
                e_noise += diff * diff;
            }
            const double measured = 10.0 * std::log10(e_speech / e_noise);
            CHECK(std::abs(measured - declared) < 0.01);
        }
    }
}

TEST_CASE("run config") {
    const fs::path dir = fresh_dir("config");

    SUBCASE("defaults survive an empty document") {
        spit(dir / "empty.json", "{}");
        const RunConfig cfg = load_run_config((dir / "empty.json").string());
        CHECK(cfg.fft_size == 512);
        CHECK(cfg.hop_size == 256);
        CHECK(cfg.mask.noise_percentile == 0.2);
        CHECK(cfg.pipelines.size() == 4);
        CHECK(cfg.jobs == 1);
    }

    SUBCASE("fields override") {
        spit(dir / "custom.json", R"({
            "stft": {"fft_size": 1024, "hop_size": 512, "window": "hann"},
            "mask": {"floor_gain": 0.1},
            "pipelines": ["noisy-baseline", "miso-delay-sum"],
            "jobs": 3, "seed": 99, "normalize_miso": true
        })");
        const RunConfig cfg = load_run_config((dir / "custom.json").string());
        CHECK(cfg.fft_size == 1024);
        CHECK(cfg.window == Window::hann);
        CHECK(cfg.mask.floor_gain == 0.1);
        CHECK(cfg.mask.oversubtraction == 1.5);  // untouched default
        CHECK(cfg.pipelines.size() == 2);
        CHECK(cfg.jobs == 3);
        CHECK(cfg.seed == 99);
        CHECK(cfg.normalize_miso);
    }

    SUBCASE("unknown keys and pipelines are rejected") {
        spit(dir / "typo.json", R"({"sfft": {}})");
        CHECK_THROWS(load_run_config((dir / "typo.json").string()));
        spit(dir / "badpipe.json", R"({"pipelines": ["siso-per-channel", "quantum"]})");
        CHECK_THROWS(load_run_config((dir / "badpipe.json").string()));
    }
}

TEST_CASE("run_eval") {
    const fs::path dir = fresh_dir("eval");
    FixtureRng rng(3100);

    SUBCASE("identity entry scores 1.0 on the noisy baseline") {
        const AudioBuffer mono = synthetic_speech(rng, 1.0, 16000);
        const BFormatScene scene = encode_plane_wave(mono, {0.0, 0.0});
        write_wav((dir / "id_scene.wav").string(), {scene.w, scene.x, scene.y, scene.z});
        write_wav((dir / "id_target.wav").string(), {mono});
        spit(dir / "identity.json",
             R"([{"id": "identity", "mic_a": "id_scene.wav", "target": "id_target.wav",
                  "doa_sph": [0.0, 0.0]}])");
        RunConfig cfg;
        cfg.pipelines = {kPipelineNoisy};
        const EvalReport report =
            run_eval(load_manifest((dir / "identity.json").string()), cfg);
        REQUIRE(report.records.size() == 1);
        const PipelineRecord& rec = report.records[0];
        REQUIRE(rec.ok);
        REQUIRE(rec.stoi_mono.has_value());
        CHECK(std::abs(*rec.stoi_mono - 1.0) < 1e-6);
        REQUIRE(rec.stoi_channels.has_value());
        CHECK(std::abs((*rec.stoi_channels)[0] - 1.0) < 1e-6);
        REQUIRE(rec.angular.has_value());
        CHECK(rec.angular->great_circle_deg < 0.5);
        REQUIRE(rec.spatial.has_value());
        CHECK(rec.spatial->icld_rms_db == 0.0);
    }

    SUBCASE("full pipeline set: shapes, absences, fail-soft, parallel equivalence") {
        SynthConfig synth = small_synth();
        const std::string manifest_path = synth_fixtures(synth, 5, dir.string());
        auto entries = load_manifest(manifest_path);
        REQUIRE(entries.size() == 4);

        // Corrupt one scene by truncating its data chunk.
        std::string bytes = slurp(dir / "fx0002_mic_a.wav");
        bytes.resize(bytes.size() - 64);
        spit(dir / "fx0002_mic_a.wav", bytes);

        RunConfig cfg;
        cfg.jobs = 1;
        const EvalReport serial = run_eval(entries, cfg);
        CHECK(serial.entries_processed == 3);
        CHECK(serial.entries_failed == 1);
        CHECK(serial.failures.size() == 1);
        CHECK(serial.failures[0].id == "fx0002");
        CHECK(serial.records.size() == 3 * 4);
        CHECK(report_exit_code(serial) == 2);

        for (const auto& rec : serial.records) {
            REQUIRE(rec.ok);
            if (rec.pipeline == kPipelineMisoDelaySum) {
                CHECK_FALSE(rec.doa.has_value());
                CHECK_FALSE(rec.stoi_channels.has_value());
                CHECK_FALSE(rec.spatial.has_value());
                CHECK(rec.stoi_mono.has_value());
            } else {
                CHECK(rec.doa.has_value());
                CHECK(rec.stoi_channels.has_value());
                CHECK(rec.spatial.has_value());
                CHECK(rec.angular.has_value());
            }
            CHECK(rec.tdoa_ab_s.has_value());  // mic B present in these fixtures
        }

        // Enhancement does not degrade intelligibility on these fixtures.
        for (const auto& rec : serial.records) {
            if (rec.pipeline != kPipelineSisoPerChannel) continue;
            for (const auto& noisy : serial.records) {
                if (noisy.id != rec.id || noisy.pipeline != kPipelineNoisy) continue;
                CHECK((*rec.stoi_channels)[0] >= (*noisy.stoi_channels)[0] - 0.01);
            }
        }

        RunConfig parallel_cfg = cfg;
        parallel_cfg.jobs = 4;
        const EvalReport parallel = run_eval(entries, parallel_cfg);
        CHECK(report_to_json(serial, "T") == report_to_json(parallel, "T"));
        CHECK(report_to_csv(serial) == report_to_csv(parallel));

        // Aggregates are recomputable from the records.
        const Aggregates redo = compute_aggregates(serial.records);
        REQUIRE(redo.size() == serial.aggregates.size());
        for (const auto& [pipeline, metrics] : serial.aggregates) {
            for (const auto& [metric, summary] : metrics) {
                const MetricSummary& again = redo.at(pipeline).at(metric);
                CHECK(again.count == summary.count);
                CHECK(again.mean == doctest::Approx(summary.mean).epsilon(1e-12));
                CHECK(again.median == doctest::Approx(summary.median).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("report serialization") {
    const fs::path dir = fresh_dir("report");
    FixtureRng rng(3200);
    const std::string manifest_path = synth_fixtures(small_synth(), 13, dir.string());
    RunConfig cfg;
    const EvalReport report = run_eval(load_manifest(manifest_path), cfg);
    REQUIRE(report.entries_processed == 4);

    SUBCASE("JSON round trips structurally") {
        const fs::path path = dir / "report.json";
        emit_report(report, ReportFormat::json, path.string());
        const EvalReport loaded = load_report(path.string());
        CHECK(loaded.entries_processed == report.entries_processed);
        CHECK(loaded.entries_failed == report.entries_failed);
        REQUIRE(loaded.records.size() == report.records.size());
        for (std::size_t i = 0; i < loaded.records.size(); ++i) {
            CHECK(loaded.records[i].id == report.records[i].id);
            CHECK(loaded.records[i].pipeline == report.records[i].pipeline);
            CHECK(loaded.records[i].stoi_mono.has_value() ==
                  report.records[i].stoi_mono.has_value());
            if (loaded.records[i].stoi_mono)
                CHECK(*loaded.records[i].stoi_mono == *report.records[i].stoi_mono);
        }
        // Identical modulo the timestamp key.
        CHECK(report_to_json(loaded, "T") == report_to_json(report, "T"));
    }

    SUBCASE("CSV has header plus one row per record") {
        const std::string csv = report_to_csv(report);
        std::istringstream lines(csv);
        std::string line;
        std::size_t rows = 0;
        std::getline(lines, line);
        CHECK(line == csv_header());
        while (std::getline(lines, line))
            if (!line.empty()) ++rows;
        CHECK(rows == report.records.size());

        const std::string header = csv_header();
        const std::size_t columns = std::count(header.begin(), header.end(), ',') + 1;
        CHECK(columns == 19);
    }
}
