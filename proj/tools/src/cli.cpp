#include "cli.hpp"

#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "manifest.hpp"
#include "radaccum/error.hpp"
#include "radaccum/io.hpp"

namespace radaccum::cli {

namespace {

struct EstimationFlags {
  std::string method = "pose";
  std::string gicp_init = "identity";
  std::string doppler_model = "translation";
  std::uint64_t doppler_seed = 42;
  int ransac_iterations = 200;
  double inlier_threshold = 0.15;
  std::size_t window = 6;

  void add_to(CLI::App& app, const char* method_flag, bool required) {
    auto* opt = app.add_option(method_flag, method, "Ego-motion method")
                    ->check(CLI::IsMember(estimator_names()));
    if (required) opt->required();
    app.add_option("--gicp-init", gicp_init, "GICP initial guess")
        ->check(CLI::IsMember({"identity", "previous"}))
        ->capture_default_str();
    app.add_option("--doppler-model", doppler_model, "Doppler motion model")
        ->check(CLI::IsMember({"translation", "ackermann"}))
        ->capture_default_str();
    app.add_option("--doppler-seed", doppler_seed, "RANSAC seed")->capture_default_str();
    app.add_option("--ransac-iterations", ransac_iterations)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--inlier-threshold", inlier_threshold, "RANSAC inlier threshold (m/s)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--window", window, "Smoothing window for mgicp-lidar")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  EstimationOptions resolve() const {
    EstimationOptions e;
    e.method = parse_estimator(method);
    e.gicp_init = gicp_init == "previous" ? GicpInit::Previous : GicpInit::Identity;
    e.doppler.motion_model = parse_doppler_model(doppler_model);
    e.doppler.seed = doppler_seed;
    e.doppler.ransac_iterations = ransac_iterations;
    e.doppler.inlier_threshold = inlier_threshold;
    e.smoothing_window = window;
    return e;
  }
};

synth::ScenarioConfig resolve_scenario(const std::string& scenario) {
  for (const std::string& name : synth::builtin_scenario_names()) {
    if (name == scenario) return synth::builtin_scenario(name);
  }
  const fs::path file(scenario);
  if (!fs::is_regular_file(file)) {
    std::string names;
    for (const std::string& n : synth::builtin_scenario_names()) names += " " + n;
    throw UsageError("--scenario '" + scenario +
                     "' is neither a builtin scenario nor a JSON file (builtins:" + names + ")");
  }
  return synth::scenario_from_json(read_text_file(file));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radar point-cloud accumulation toolkit", "radaccum"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(RADACCUM_VERSION));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic sequence with ground truth");
  std::string scenario;
  fs::path sim_out;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--scenario", scenario, "Builtin scenario name or scenario JSON file")
      ->required();
  sim->add_option("--out", sim_out, "Output sequence directory")->required();
  sim->add_option("--seed", sim_seed, "Random seed (defaults to the scenario's seed)");

  // estimate-ego
  auto* est = app.add_subcommand("estimate-ego", "Estimate frame-to-frame ego motion");
  EstimateOptions est_opts;
  EstimationFlags est_flags;
  std::string est_plot;
  est->add_option("--seq", est_opts.seq, "Sequence directory")->required();
  est_flags.add_to(*est, "--method", true);
  est->add_option("--out", est_opts.out, "Output estimates CSV")->required();
  est->add_option("--plot-data", est_plot, "Per-frame translation series CSV");

  // accumulate
  auto* acc = app.add_subcommand("accumulate", "Accumulate radar frames over a horizon");
  AccumulateOptions acc_opts;
  EstimationFlags acc_flags;
  std::string acc_dynamic = "none";
  std::string acc_estimates;
  acc->add_option("--seq", acc_opts.seq, "Sequence directory")->required();
  acc->add_option("--frames", acc_opts.frames, "Accumulation horizon K")
      ->check(CLI::Range(1, 255))
      ->capture_default_str();
  acc_flags.add_to(*acc, "--ego", false);
  acc->add_option("--estimates", acc_estimates, "Use estimates from this CSV instead of --ego");
  acc->add_option("--dynamic", acc_dynamic, "Dynamic-object correction")
      ->check(CLI::IsMember({"none", "gt", "vrr"}))
      ->capture_default_str();
  acc->add_option("--box-margin", acc_opts.box_margin, "Label box margin (m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  acc->add_option("--threshold", acc_opts.segmentation_threshold,
                  "Segmentation threshold (m/s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  acc->add_option("--out", acc_opts.out, "Output directory")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score estimates by symmetric Chamfer distance");
  EvaluateOptions eval_opts;
  std::string eval_sensor = "lidar";
  bool eval_no_mask = false;
  eval->add_option("--seq", eval_opts.seq, "Sequence directory")->required();
  eval->add_option("--estimates", eval_opts.estimates, "Estimates CSV file(s)")
      ->required()
      ->expected(1, -1);
  eval->add_flag("--gt", eval_opts.ground_truth, "Add pose errors against gt/ego_motion.txt");
  eval->add_flag("--no-mask", eval_no_mask, "Keep points of moving labelled objects");
  eval->add_option("--sensor", eval_sensor, "Point cloud used for sCD")
      ->check(CLI::IsMember({"lidar", "radar"}))
      ->capture_default_str();
  eval->add_option("--out", eval_opts.out, "Output CSV")->required();

  // report
  auto* rep = app.add_subcommand("report", "Summarize evaluation CSVs, one row per method");
  ReportOptions rep_opts;
  rep->add_option("--evaluations", rep_opts.evaluations, "Evaluation CSV file(s)")
      ->required()
      ->expected(1, -1);
  rep->add_option("--out", rep_opts.out, "Output CSV")->required();

  // segment
  auto* seg = app.add_subcommand("segment", "Write static/dynamic radar masks (mask.bin)");
  SegmentOptions seg_opts;
  EstimationFlags seg_flags;
  seg->add_option("--seq", seg_opts.seq, "Sequence directory")->required();
  seg_flags.add_to(*seg, "--ego", false);
  seg->add_option("--threshold", seg_opts.threshold, "Segmentation threshold (m/s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // replay
  auto* rep_run = app.add_subcommand("replay", "Re-run a command from its manifest");
  fs::path manifest;
  rep_run->add_option("--manifest", manifest, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << RADACCUM_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      SimulateOptions opts{resolve_scenario(scenario), sim_out};
      if (sim_seed) opts.scenario.seed = *sim_seed;
      return run_simulate(opts, out);
    }
    if (est->parsed()) {
      est_opts.estimation = est_flags.resolve();
      if (!est_plot.empty()) est_opts.plot_data = est_plot;
      return run_estimate(est_opts, out);
    }
    if (acc->parsed()) {
      acc_opts.estimation = acc_flags.resolve();
      acc_opts.dynamic = parse_dynamic(acc_dynamic);
      if (!acc_estimates.empty()) acc_opts.estimates = acc_estimates;
      return run_accumulate(acc_opts, out);
    }
    if (eval->parsed()) {
      eval_opts.static_mask = !eval_no_mask;
      eval_opts.sensor = eval_sensor == "radar" ? ScdSensor::Radar : ScdSensor::Lidar;
      return run_evaluate(eval_opts, out);
    }
    if (rep->parsed()) return run_report(rep_opts, out);
    if (seg->parsed()) {
      seg_opts.estimation = seg_flags.resolve();
      return run_segment(seg_opts, out);
    }
    if (rep_run->parsed()) return run_replay(manifest, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace radaccum::cli
