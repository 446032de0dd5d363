// report.hpp -- EvalReport serialization: JSON (nested) and CSV (flat).
#pragma once

#include <string>

#include "ambise/eval.hpp"

namespace ambise {

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& name);

/// Serializes without touching the filesystem. The JSON form carries one
/// volatile key, generated_at; pass a fixed value to pin the bytes.
std::string report_to_json(const EvalReport& report, const std::string& generated_at);
std::string report_to_csv(const EvalReport& report);

/// Writes a report file. JSON gets a fresh UTC timestamp in generated_at;
/// CSV has no volatile fields.
void emit_report(const EvalReport& report, ReportFormat format, const std::string& path);

/// Parses a JSON report back (inverse of report_to_json).
EvalReport load_report(const std::string& path);

/// Documented CSV column order, also used as the header row.
const char* csv_header();

}  // namespace ambise
