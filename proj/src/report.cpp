#include "ambise/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ambise {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

ordered_json record_to_json(const PipelineRecord& r) {
    ordered_json j;
    j["id"] = r.id;
    j["pipeline"] = r.pipeline;
    j["ok"] = r.ok;
    j["error"] = r.error;
    auto set_opt = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    if (r.stoi_channels) {
        j["stoi_w"] = (*r.stoi_channels)[0];
        j["stoi_x"] = (*r.stoi_channels)[1];
        j["stoi_y"] = (*r.stoi_channels)[2];
        j["stoi_z"] = (*r.stoi_channels)[3];
    } else {
        j["stoi_w"] = nullptr;
        j["stoi_x"] = nullptr;
        j["stoi_y"] = nullptr;
        j["stoi_z"] = nullptr;
    }
    set_opt("stoi_mono", r.stoi_mono);
    if (r.doa) {
        j["doa_az_deg"] = r.doa->direction.azimuth_deg;
        j["doa_el_deg"] = r.doa->direction.elevation_deg;
        j["doa_confidence"] = r.doa->confidence;
    } else {
        j["doa_az_deg"] = nullptr;
        j["doa_el_deg"] = nullptr;
        j["doa_confidence"] = nullptr;
    }
    if (r.angular) {
        j["err_az_deg"] = r.angular->d_azimuth_deg;
        j["err_el_deg"] = r.angular->d_elevation_deg;
        j["err_great_circle_deg"] = r.angular->great_circle_deg;
    } else {
        j["err_az_deg"] = nullptr;
        j["err_el_deg"] = nullptr;
        j["err_great_circle_deg"] = nullptr;
    }
    if (r.spatial) {
        j["icld_rms_db"] = r.spatial->icld_rms_db;
        j["icpd_rms_rad"] = r.spatial->icpd_rms_rad;
        j["active_bins"] = r.spatial->active_bin_count;
    } else {
        j["icld_rms_db"] = nullptr;
        j["icpd_rms_rad"] = nullptr;
        j["active_bins"] = nullptr;
    }
    set_opt("tdoa_ab_s", r.tdoa_ab_s);
    return j;
}

PipelineRecord record_from_json(const ordered_json& j) {
    PipelineRecord r;
    r.id = j.at("id").get<std::string>();
    r.pipeline = j.at("pipeline").get<std::string>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    auto opt = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
    };
    if (!j.at("stoi_w").is_null())
        r.stoi_channels = {{j.at("stoi_w").get<double>(), j.at("stoi_x").get<double>(),
                            j.at("stoi_y").get<double>(), j.at("stoi_z").get<double>()}};
    r.stoi_mono = opt("stoi_mono");
    if (!j.at("doa_az_deg").is_null()) {
        DoaEstimate est;
        est.direction = {j.at("doa_az_deg").get<double>(), j.at("doa_el_deg").get<double>()};
        est.confidence = j.at("doa_confidence").get<double>();
        r.doa = est;
    }
    if (!j.at("err_az_deg").is_null()) {
        AngularError err;
        err.d_azimuth_deg = j.at("err_az_deg").get<double>();
        err.d_elevation_deg = j.at("err_el_deg").get<double>();
        err.great_circle_deg = j.at("err_great_circle_deg").get<double>();
        r.angular = err;
    }
    if (!j.at("icld_rms_db").is_null()) {
        SpatialDeviation dev;
        dev.icld_rms_db = j.at("icld_rms_db").get<double>();
        dev.icpd_rms_rad = j.at("icpd_rms_rad").get<double>();
        dev.active_bin_count = j.at("active_bins").get<std::size_t>();
        r.spatial = dev;
    }
    r.tdoa_ab_s = opt("tdoa_ab_s");
    return r;
}

}  // namespace

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw std::runtime_error("unknown report format '" + name + "' (expected csv or json)");
}

std::string report_to_json(const EvalReport& report, const std::string& generated_at) {
    ordered_json j;
    j["generated_at"] = generated_at;
    j["seed"] = report.seed;
    j["entries_processed"] = report.entries_processed;
    j["entries_failed"] = report.entries_failed;
    j["records"] = ordered_json::array();
    for (const auto& r : report.records) j["records"].push_back(record_to_json(r));
    j["failures"] = ordered_json::array();
    for (const auto& f : report.failures)
        j["failures"].push_back(ordered_json{{"id", f.id}, {"error", f.error}});
    ordered_json agg = ordered_json::object();
    for (const auto& [pipeline, metrics] : report.aggregates) {
        ordered_json pj = ordered_json::object();
        for (const auto& [metric, s] : metrics) {
            pj[metric] = ordered_json{{"count", s.count},
                                      {"mean", s.mean},
                                      {"median", s.median},
                                      {"q25", s.q25},
                                      {"q75", s.q75}};
        }
        agg[pipeline] = pj;
    }
    j["aggregates"] = agg;
    return j.dump(2) + "\n";
}

const char* csv_header() {
    return "id,pipeline,ok,error,stoi_w,stoi_x,stoi_y,stoi_z,stoi_mono,doa_az_deg,doa_el_deg,"
           "doa_confidence,err_az_deg,err_el_deg,err_great_circle_deg,icld_rms_db,icpd_rms_rad,"
           "active_bins,tdoa_ab_s";
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << csv_header() << "\n";
    auto cell = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& r : report.records) {
        out << csv_quote(r.id) << ',' << r.pipeline << ',' << (r.ok ? "true" : "false") << ','
            << csv_quote(r.error) << ',';
        if (r.stoi_channels)
            out << fmt((*r.stoi_channels)[0]) << ',' << fmt((*r.stoi_channels)[1]) << ','
                << fmt((*r.stoi_channels)[2]) << ',' << fmt((*r.stoi_channels)[3]);
        else
            out << ",,,";
        out << ',' << cell(r.stoi_mono) << ',';
        if (r.doa)
            out << fmt(r.doa->direction.azimuth_deg) << ',' << fmt(r.doa->direction.elevation_deg)
                << ',' << fmt(r.doa->confidence);
        else
            out << ",,";
        out << ',';
        if (r.angular)
            out << fmt(r.angular->d_azimuth_deg) << ',' << fmt(r.angular->d_elevation_deg) << ','
                << fmt(r.angular->great_circle_deg);
        else
            out << ",,";
        out << ',';
        if (r.spatial)
            out << fmt(r.spatial->icld_rms_db) << ',' << fmt(r.spatial->icpd_rms_rad) << ','
                << r.spatial->active_bin_count;
        else
            out << ",,";
        out << ',' << cell(r.tdoa_ab_s) << "\n";
    }
    for (const auto& f : report.failures) {
        out << csv_quote(f.id) << ",,false," << csv_quote(f.error) << ",,,,,,,,,,,,,,,\n";
    }
    return out.str();
}

void emit_report(const EvalReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open report for writing");
    const std::string body = format == ReportFormat::json
                                 ? report_to_json(report, utc_now())
                                 : report_to_csv(report);
    out << body;
    if (!out) throw std::runtime_error(path + ": report write failed");
}

EvalReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open report");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": malformed report JSON: " + e.what());
    }
    EvalReport report;
    report.seed = j.value("seed", 0ull);
    report.entries_processed = j.at("entries_processed").get<std::size_t>();
    report.entries_failed = j.at("entries_failed").get<std::size_t>();
    for (const auto& rj : j.at("records")) report.records.push_back(record_from_json(rj));
    for (const auto& fj : j.at("failures"))
        report.failures.push_back({fj.at("id").get<std::string>(),
                                   fj.at("error").get<std::string>()});
    for (const auto& [pipeline, metrics] : j.at("aggregates").items()) {
        for (const auto& [metric, sj] : metrics.items()) {
            MetricSummary s;
            s.count = sj.at("count").get<std::size_t>();
            s.mean = sj.at("mean").get<double>();
            s.median = sj.at("median").get<double>();
            s.q25 = sj.at("q25").get<double>();
            s.q75 = sj.at("q75").get<double>();
            report.aggregates[pipeline][metric] = s;
        }
    }
    return report;
}

}  // namespace ambise
