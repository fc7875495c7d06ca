#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "radaccum/estimation.hpp"
#include "radaccum/metrics.hpp"
#include "radaccum/synth.hpp"

namespace radaccum::cli {

namespace fs = std::filesystem;

/// Bad arguments detected after parsing (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateOptions {
  synth::ScenarioConfig scenario;
  fs::path out;
};

struct EstimateOptions {
  fs::path seq;
  fs::path out;
  std::optional<fs::path> plot_data;
  EstimationOptions estimation;
};

struct AccumulateOptions {
  fs::path seq;
  fs::path out;
  int frames = 5;
  EstimationOptions estimation;      // ego source when no estimates file is given
  std::optional<fs::path> estimates;
  DynamicCorrection dynamic = DynamicCorrection::None;
  double box_margin = kDefaultBoxMargin;
  double segmentation_threshold = kDefaultSegmentationThreshold;
};

struct EvaluateOptions {
  fs::path seq;
  std::vector<fs::path> estimates;
  fs::path out;
  bool ground_truth = false;
  bool static_mask = true;
  ScdSensor sensor = ScdSensor::Lidar;
};

struct ReportOptions {
  std::vector<fs::path> evaluations;
  fs::path out;
};

struct SegmentOptions {
  fs::path seq;
  EstimationOptions estimation;
  double threshold = kDefaultSegmentationThreshold;
};

// Each command writes its outputs plus a manifest and returns an exit code.
// Runtime failures are thrown as radaccum::Error.
int run_simulate(const SimulateOptions& opts, std::ostream& log);
int run_estimate(const EstimateOptions& opts, std::ostream& log);
int run_accumulate(const AccumulateOptions& opts, std::ostream& log);
int run_evaluate(const EvaluateOptions& opts, std::ostream& log);
int run_report(const ReportOptions& opts, std::ostream& log);
int run_segment(const SegmentOptions& opts, std::ostream& log);

/// Re-runs the command recorded in a manifest.
int run_replay(const fs::path& manifest, std::ostream& log);

}  // namespace radaccum::cli
