#include "manifest.hpp"

#include "radaccum/error.hpp"
#include "radaccum/io.hpp"

#ifndef RADACCUM_VERSION
#define RADACCUM_VERSION "unknown"
#endif

namespace radaccum::cli {

namespace {

std::string path_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

Json gicp_json(const GicpConfig& c) {
  return {{"neighbors_for_covariance", c.neighbors_for_covariance},
          {"covariance_regularization", c.covariance_regularization},
          {"max_correspondence_distance", c.max_correspondence_distance},
          {"max_iterations", c.max_iterations},
          {"translation_tolerance", c.translation_tolerance},
          {"rotation_tolerance", c.rotation_tolerance},
          {"voxel_downsample_size", c.voxel_downsample_size}};
}

GicpConfig gicp_from(const Json& j) {
  GicpConfig c;
  c.neighbors_for_covariance = j.at("neighbors_for_covariance").get<int>();
  c.covariance_regularization = j.at("covariance_regularization").get<double>();
  c.max_correspondence_distance = j.at("max_correspondence_distance").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.translation_tolerance = j.at("translation_tolerance").get<double>();
  c.rotation_tolerance = j.at("rotation_tolerance").get<double>();
  c.voxel_downsample_size = j.at("voxel_downsample_size").get<double>();
  return c;
}

Json estimation_json(const EstimationOptions& e) {
  return {{"method", std::string(to_string(e.method))},
          {"gicp_init", e.gicp_init == GicpInit::Identity ? "identity" : "previous"},
          {"lidar_gicp", gicp_json(e.lidar_gicp)},
          {"radar_gicp", gicp_json(e.radar_gicp)},
          {"doppler",
           {{"ransac_iterations", e.doppler.ransac_iterations},
            {"inlier_threshold", e.doppler.inlier_threshold},
            {"min_inliers", e.doppler.min_inliers},
            {"seed", e.doppler.seed},
            {"motion_model", std::string(to_string(e.doppler.motion_model))}}},
          {"smoothing_window", e.smoothing_window}};
}

EstimationOptions estimation_from(const Json& j) {
  EstimationOptions e;
  e.method = parse_estimator(j.at("method").get<std::string>());
  const std::string init = j.at("gicp_init").get<std::string>();
  if (init != "identity" && init != "previous") throw Error("unknown gicp_init '" + init + "'");
  e.gicp_init = init == "identity" ? GicpInit::Identity : GicpInit::Previous;
  e.lidar_gicp = gicp_from(j.at("lidar_gicp"));
  e.radar_gicp = gicp_from(j.at("radar_gicp"));
  const Json& d = j.at("doppler");
  e.doppler.ransac_iterations = d.at("ransac_iterations").get<int>();
  e.doppler.inlier_threshold = d.at("inlier_threshold").get<double>();
  e.doppler.min_inliers = d.at("min_inliers").get<int>();
  e.doppler.seed = d.at("seed").get<std::uint64_t>();
  e.doppler.motion_model = parse_doppler_model(d.at("motion_model").get<std::string>());
  e.smoothing_window = j.at("smoothing_window").get<std::size_t>();
  return e;
}

Json paths_json(const std::vector<fs::path>& paths) {
  Json a = Json::array();
  for (const fs::path& p : paths) a.push_back(path_string(p));
  return a;
}

std::vector<fs::path> paths_from(const Json& j) {
  std::vector<fs::path> out;
  for (const Json& p : j) out.emplace_back(p.get<std::string>());
  return out;
}

}  // namespace

std::string_view to_string(DynamicCorrection d) {
  switch (d) {
    case DynamicCorrection::None: return "none";
    case DynamicCorrection::GroundTruth: return "gt";
    case DynamicCorrection::RadialVelocity: return "vrr";
  }
  return "none";
}

DynamicCorrection parse_dynamic(std::string_view name) {
  if (name == "none") return DynamicCorrection::None;
  if (name == "gt") return DynamicCorrection::GroundTruth;
  if (name == "vrr") return DynamicCorrection::RadialVelocity;
  throw Error("unknown dynamic correction '" + std::string(name) + "'");
}

std::string_view to_string(DopplerMotionModel m) {
  return m == DopplerMotionModel::TranslationOnly ? "translation" : "ackermann";
}

DopplerMotionModel parse_doppler_model(std::string_view name) {
  if (name == "translation") return DopplerMotionModel::TranslationOnly;
  if (name == "ackermann") return DopplerMotionModel::AckermannSingleTrack;
  throw Error("unknown doppler model '" + std::string(name) + "'");
}

fs::path manifest_for_directory(const fs::path& dir) { return dir / "manifest.json"; }

fs::path manifest_for_file(const fs::path& file) {
  fs::path p = file;
  p += ".manifest.json";
  return p;
}

void write_manifest(const fs::path& path, const std::string& command, const Json& config) {
  const Json manifest = {{"command", command}, {"version", RADACCUM_VERSION}, {"config", config}};
  write_text_file(path, manifest.dump(2) + "\n");
}

Json to_json(const SimulateOptions& o) {
  return {{"scenario", Json::parse(synth::scenario_to_json(o.scenario))},
          {"seed", o.scenario.seed},
          {"out", path_string(o.out)}};
}

SimulateOptions simulate_from_json(const Json& j) {
  SimulateOptions o;
  o.scenario = synth::scenario_from_json(j.at("scenario").dump());
  o.scenario.seed = j.at("seed").get<std::uint64_t>();
  o.out = j.at("out").get<std::string>();
  return o;
}

Json to_json(const EstimateOptions& o) {
  Json j = {{"seq", path_string(o.seq)},
            {"out", path_string(o.out)},
            {"estimation", estimation_json(o.estimation)}};
  j["plot_data"] = o.plot_data ? Json(path_string(*o.plot_data)) : Json(nullptr);
  return j;
}

EstimateOptions estimate_from_json(const Json& j) {
  EstimateOptions o;
  o.seq = j.at("seq").get<std::string>();
  o.out = j.at("out").get<std::string>();
  o.estimation = estimation_from(j.at("estimation"));
  if (!j.at("plot_data").is_null()) o.plot_data = j.at("plot_data").get<std::string>();
  return o;
}

Json to_json(const AccumulateOptions& o) {
  Json j = {{"seq", path_string(o.seq)},
            {"out", path_string(o.out)},
            {"frames", o.frames},
            {"estimation", estimation_json(o.estimation)},
            {"dynamic", std::string(to_string(o.dynamic))},
            {"box_margin", o.box_margin},
            {"segmentation_threshold", o.segmentation_threshold}};
  j["estimates"] = o.estimates ? Json(path_string(*o.estimates)) : Json(nullptr);
  return j;
}

AccumulateOptions accumulate_from_json(const Json& j) {
  AccumulateOptions o;
  o.seq = j.at("seq").get<std::string>();
  o.out = j.at("out").get<std::string>();
  o.frames = j.at("frames").get<int>();
  o.estimation = estimation_from(j.at("estimation"));
  o.dynamic = parse_dynamic(j.at("dynamic").get<std::string>());
  o.box_margin = j.at("box_margin").get<double>();
  o.segmentation_threshold = j.at("segmentation_threshold").get<double>();
  if (!j.at("estimates").is_null()) o.estimates = j.at("estimates").get<std::string>();
  return o;
}

Json to_json(const EvaluateOptions& o) {
  return {{"seq", path_string(o.seq)},
          {"estimates", paths_json(o.estimates)},
          {"out", path_string(o.out)},
          {"gt", o.ground_truth},
          {"static_mask", o.static_mask},
          {"sensor", o.sensor == ScdSensor::Lidar ? "lidar" : "radar"}};
}

EvaluateOptions evaluate_from_json(const Json& j) {
  EvaluateOptions o;
  o.seq = j.at("seq").get<std::string>();
  o.estimates = paths_from(j.at("estimates"));
  o.out = j.at("out").get<std::string>();
  o.ground_truth = j.at("gt").get<bool>();
  o.static_mask = j.at("static_mask").get<bool>();
  const std::string sensor = j.at("sensor").get<std::string>();
  if (sensor != "lidar" && sensor != "radar") throw Error("unknown sensor '" + sensor + "'");
  o.sensor = sensor == "lidar" ? ScdSensor::Lidar : ScdSensor::Radar;
  return o;
}

Json to_json(const ReportOptions& o) {
  return {{"evaluations", paths_json(o.evaluations)}, {"out", path_string(o.out)}};
}

ReportOptions report_from_json(const Json& j) {
  ReportOptions o;
  o.evaluations = paths_from(j.at("evaluations"));
  o.out = j.at("out").get<std::string>();
  return o;
}

Json to_json(const SegmentOptions& o) {
  return {{"seq", path_string(o.seq)},
          {"estimation", estimation_json(o.estimation)},
          {"threshold", o.threshold}};
}

SegmentOptions segment_from_json(const Json& j) {
  SegmentOptions o;
  o.seq = j.at("seq").get<std::string>();
  o.estimation = estimation_from(j.at("estimation"));
  o.threshold = j.at("threshold").get<double>();
  return o;
}

}  // namespace radaccum::cli
