#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "commands.hpp"

namespace radaccum::cli {

using Json = nlohmann::json;

/// Manifest location: `<dir>/manifest.json` for directory outputs,
/// `<file>.manifest.json` next to file outputs.
fs::path manifest_for_directory(const fs::path& dir);
fs::path manifest_for_file(const fs::path& file);

/// Serializes {command, version, config} with stable key order.
void write_manifest(const fs::path& path, const std::string& command, const Json& config);

Json to_json(const SimulateOptions& o);
Json to_json(const EstimateOptions& o);
Json to_json(const AccumulateOptions& o);
Json to_json(const EvaluateOptions& o);
Json to_json(const ReportOptions& o);
Json to_json(const SegmentOptions& o);

SimulateOptions simulate_from_json(const Json& j);
EstimateOptions estimate_from_json(const Json& j);
AccumulateOptions accumulate_from_json(const Json& j);
EvaluateOptions evaluate_from_json(const Json& j);
ReportOptions report_from_json(const Json& j);
SegmentOptions segment_from_json(const Json& j);

std::string_view to_string(DynamicCorrection d);
DynamicCorrection parse_dynamic(std::string_view name);
std::string_view to_string(DopplerMotionModel m);
DopplerMotionModel parse_doppler_model(std::string_view name);

}  // namespace radaccum::cli
