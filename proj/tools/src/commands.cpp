#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"
#include "radaccum/error.hpp"
#include "radaccum/io.hpp"
#include "radaccum/parallel.hpp"

namespace radaccum::cli {

namespace {

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : ""; }

std::string pair_name(FrameId from, FrameId to) {
  return std::to_string(from) + "-" + std::to_string(to);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void ensure_parent(const fs::path& file) {
  const fs::path parent = fs::absolute(file).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<EgoMotionEstimate> estimates_from_file(const fs::path& file, EgoSource& source) {
  const std::vector<CsvEstimate> rows = estimates_from_csv(read_text_file(file));
  std::vector<EgoMotionEstimate> out;
  std::string method;
  for (const CsvEstimate& r : rows) {
    if (method.empty()) method = r.method;
    if (r.method != method) {
      throw Error(file.string() + ": holds estimates of several methods (" + method + ", " +
                  r.method + ")");
    }
    if (r.pair.ok()) out.push_back(r.pair.estimate);
  }
  if (out.empty()) throw Error(file.string() + ": no successful estimates");
  try {
    source = ego_source_for(parse_estimator(method));
  } catch (const Error&) {
    source = EgoSource::Pose;
  }
  if (source == EgoSource::None) source = EgoSource::Pose;  // identity estimates still form a chain
  return out;
}

}  // namespace

int run_simulate(const SimulateOptions& opts, std::ostream& log) {
  const auto [seq, truth] = synth::simulate(opts.scenario);
  write_sequence(seq, opts.out);
  write_manifest(manifest_for_directory(opts.out), "simulate", to_json(opts));
  log << "simulate: " << seq.frames.size() << " frames of '" << opts.scenario.name << "' -> "
      << opts.out.string() << "\n";
  return kExitOk;
}

int run_estimate(const EstimateOptions& opts, std::ostream& log) {
  const Sequence seq = load_sequence(opts.seq);
  const std::vector<PairEstimate> pairs = estimate_sequence(seq, opts.estimation);
  const std::string_view method = to_string(opts.estimation.method);

  ensure_parent(opts.out);
  write_text_file(opts.out, estimates_to_csv(pairs, method));

  if (opts.plot_data) {
    std::string plot = "frame_id,timestamp,dt,tx,ty,tz,speed_mps,yaw_deg,status\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const SequenceFrame& cur = seq.frames[i + 1];
      const double dt = cur.timestamp - seq.frames[i].timestamp;
      const RigidTransform& t = pairs[i].estimate.transform;
      const Vec3 tr = t.translation();
      plot += std::to_string(cur.id) + ',' + format_double(cur.timestamp) + ',' +
              format_double(dt);
      if (pairs[i].ok()) {
        plot += ',' + format_double(tr.x()) + ',' + format_double(tr.y()) + ',' +
                format_double(tr.z()) + ',' + format_double(tr.norm() / dt) + ',' +
                format_double(t.yaw() * 180.0 / std::numbers::pi) + ",ok\n";
      } else {
        std::string status = pairs[i].error;
        std::replace_if(status.begin(), status.end(), [](char c) { return c == ',' || c == '\n'; },
                        ';');
        plot += ",,,,,," + status + "\n";
      }
    }
    ensure_parent(*opts.plot_data);
    write_text_file(*opts.plot_data, plot);
  }
  write_manifest(manifest_for_file(opts.out), "estimate-ego", to_json(opts));

  std::size_t ok = 0;
  for (const PairEstimate& p : pairs) ok += p.ok() ? 1 : 0;
  log << "estimate-ego: " << method << " " << ok << "/" << pairs.size() << " pairs succeeded\n";
  for (const PairEstimate& p : pairs) {
    if (!p.ok()) {
      log << "  " << pair_name(p.estimate.from_frame, p.estimate.to_frame) << ": " << p.error
          << "\n";
    }
  }
  if (ok == 0) {
    log << "estimate-ego: no frame pair could be estimated\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_accumulate(const AccumulateOptions& opts, std::ostream& log) {
  const Sequence seq = load_sequence(opts.seq);

  AccumulationConfig cfg;
  cfg.horizon = opts.frames;
  cfg.dynamic_method = opts.dynamic;
  cfg.box_margin = opts.box_margin;
  cfg.segmentation_threshold = opts.segmentation_threshold;

  std::vector<EgoMotionEstimate> estimates;
  if (opts.estimates) {
    estimates = estimates_from_file(*opts.estimates, cfg.ego_method);
  } else {
    cfg.ego_method = ego_source_for(opts.estimation.method);
    if (cfg.ego_method != EgoSource::None) {
      estimates = successful_estimates(estimate_sequence(seq, opts.estimation));
    }
  }
  cfg.validate();

  const std::size_t first = static_cast<std::size_t>(opts.frames) - 1;
  const std::size_t count = seq.frames.size() > first ? seq.frames.size() - first : 0;
  if (count == 0) {
    throw Error("sequence has " + std::to_string(seq.frames.size()) +
                " frames, fewer than the horizon " + std::to_string(opts.frames));
  }

  std::vector<AccumulatedCloud> clouds(count);
  std::vector<std::string> errors(count);
  std::vector<double> lidar_distance(count, std::nan(""));
  const RigidTransform radar_to_lidar = seq.lidar_mounting().inverse() * seq.radar_mounting();
  parallel_for(count, [&](std::size_t i) {
    const std::size_t index = first + i;
    try {
      clouds[i] = accumulate(seq, index, cfg, estimates);
      const std::vector<LidarPoint>& lidar = seq.frames[index].lidar;
      if (!lidar.empty() && !clouds[i].points.empty()) {
        std::vector<Vec3> lidar_pts;
        for (const LidarPoint& p : lidar) lidar_pts.push_back(p.position);
        std::vector<Vec3> radar_pts;
        for (const Vec3& p : clouds[i].positions()) radar_pts.push_back(radar_to_lidar.apply(p));
        lidar_distance[i] = mean_nearest_distance(radar_pts, SpatialIndex(std::move(lidar_pts)));
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  fs::remove_all(opts.out / "frames");
  fs::create_directories(opts.out);
  std::string summary = "frame_id,horizon,points,radar_to_lidar_m\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const FrameId id = seq.frames[first + i].id;
    if (!errors[i].empty()) {
      ++failures;
      log << "accumulate: frame " << id << ": " << errors[i] << "\n";
      continue;
    }
    const fs::path dir = frame_directory(opts.out, id);
    fs::create_directories(dir);
    write_accumulated(clouds[i], dir);
    summary += std::to_string(id) + ',' + std::to_string(opts.frames) + ',' +
               std::to_string(clouds[i].points.size()) + ',' + cell(lidar_distance[i]) + '\n';
  }
  write_text_file(opts.out / "summary.csv", summary);
  write_manifest(manifest_for_directory(opts.out), "accumulate", to_json(opts));
  log << "accumulate: " << (count - failures) << "/" << count << " frames, horizon "
      << opts.frames << " -> " << opts.out.string() << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int run_evaluate(const EvaluateOptions& opts, std::ostream& log) {
  const Sequence seq = load_sequence(opts.seq);
  if (opts.ground_truth && !seq.ground_truth) {
    throw Error(opts.seq.string() + ": --gt requested but the sequence has no gt/ directory");
  }

  struct Row {
    std::string method;
    std::size_t index = 0;  // frame index of the `to` frame
    RigidTransform transform;
    FrameId from = 0;
    FrameId to = 0;
  };
  std::vector<Row> rows;
  std::vector<std::string> methods;
  std::map<std::string, std::size_t> failed_rows;
  for (const fs::path& file : opts.estimates) {
    for (const CsvEstimate& e : estimates_from_csv(read_text_file(file))) {
      if (std::find(methods.begin(), methods.end(), e.method) == methods.end()) {
        methods.push_back(e.method);
      }
      const FrameId from = e.pair.estimate.from_frame;
      const FrameId to = e.pair.estimate.to_frame;
      std::size_t index = 0;
      try {
        index = seq.index_of(to);
      } catch (const Error&) {
        throw Error(file.string() + ": pair " + pair_name(from, to) +
                    " refers to a frame missing from the sequence");
      }
      if (index == 0 || seq.frames[index - 1].id != from) {
        throw Error(file.string() + ": pair " + pair_name(from, to) +
                    " is not a consecutive pair of the sequence");
      }
      if (!e.pair.ok()) {
        ++failed_rows[e.method];
        continue;
      }
      rows.push_back({e.method, index, e.pair.estimate.transform, from, to});
    }
  }
  if (methods.empty()) throw Error("no estimates to evaluate");

  std::vector<std::vector<bool>> masks(seq.frames.size());
  if (opts.static_mask) {
    const RigidTransform mount =
        opts.sensor == ScdSensor::Lidar ? seq.lidar_mounting() : seq.radar_mounting();
    parallel_for(seq.frames.size(), [&](std::size_t i) {
      masks[i] = static_mask_from_labels(seq.frames[i], mount, opts.sensor);
    });
  }

  std::vector<double> scd(rows.size());
  std::vector<EgoMotionError> pose_error(rows.size(), {std::nan(""), std::nan("")});
  parallel_for(rows.size(), [&](std::size_t r) {
    const Row& row = rows[r];
    const std::vector<bool>* prev = opts.static_mask ? &masks[row.index - 1] : nullptr;
    const std::vector<bool>* cur = opts.static_mask ? &masks[row.index] : nullptr;
    scd[r] = scd_of_correction(seq, row.index, row.transform, prev, cur, opts.sensor);
    if (opts.ground_truth) {
      for (const GroundTruthEgoMotion& m : seq.ground_truth->ego_motion) {
        if (m.from == row.from && m.to == row.to) {
          pose_error[r] = ego_motion_error(row.transform, RigidTransform::FromMatrix(m.transform));
          break;
        }
      }
      if (!std::isfinite(pose_error[r].translation_error)) {
        throw Error("no ground truth for pair " + pair_name(row.from, row.to));
      }
    }
  });

  std::string out = "method,frame_pair,scd_m,trans_err_m,rot_err_deg\n";
  for (const std::string& method : methods) {
    double sum_scd = 0.0, sum_t = 0.0, sum_r = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].method != method) continue;
      out += method + ',' + pair_name(rows[r].from, rows[r].to) + ',' + cell(scd[r]) + ',' +
             cell(pose_error[r].translation_error) + ',' + cell(pose_error[r].rotation_error) +
             '\n';
      sum_scd += scd[r];
      sum_t += pose_error[r].translation_error;
      sum_r += pose_error[r].rotation_error;
      ++n;
    }
    const double inv = n > 0 ? 1.0 / static_cast<double>(n) : std::nan("");
    out += method + ",mean," + cell(sum_scd * inv) + ',' + cell(sum_t * inv) + ',' +
           cell(sum_r * inv) + '\n';
    log << "evaluate: " << method << " " << n << " pairs, mean sCD " << cell(sum_scd * inv);
    if (failed_rows.contains(method)) log << " (" << failed_rows[method] << " failed pairs skipped)";
    log << "\n";
  }
  ensure_parent(opts.out);
  write_text_file(opts.out, out);
  write_manifest(manifest_for_file(opts.out), "evaluate", to_json(opts));
  return kExitOk;
}

int run_report(const ReportOptions& opts, std::ostream& log) {
  struct Sums {
    std::size_t pairs = 0;
    double scd = 0.0, t = 0.0, r = 0.0;
    std::size_t pose_pairs = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Sums> sums;
  for (const fs::path& file : opts.evaluations) {
    const std::vector<std::string> lines = lines_of(read_text_file(file));
    if (lines.empty() || lines.front() != "method,frame_pair,scd_m,trans_err_m,rot_err_deg") {
      throw Error(file.string() + ": not an evaluation CSV");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::vector<std::string> f = split_csv(lines[i]);
      if (f.size() != 5) {
        throw Error(file.string() + " line " + std::to_string(i + 1) + ": expected 5 columns");
      }
      if (!sums.contains(f[0])) order.push_back(f[0]);
      Sums& s = sums[f[0]];
      if (f[1] == "mean") continue;
      s.pairs += 1;
      s.scd += parse_double(f[2]);
      if (!f[3].empty() && !f[4].empty()) {
        s.t += parse_double(f[3]);
        s.r += parse_double(f[4]);
        s.pose_pairs += 1;
      }
    }
  }
  std::string out = "method,pairs,scd_m,trans_err_m,rot_err_deg\n";
  for (const std::string& method : order) {
    const Sums& s = sums[method];
    const double n = static_cast<double>(s.pairs);
    const double np = static_cast<double>(s.pose_pairs);
    out += method + ',' + std::to_string(s.pairs) + ',' + (s.pairs ? format_double(s.scd / n) : "") +
           ',' + (s.pose_pairs ? format_double(s.t / np) : "") + ',' +
           (s.pose_pairs ? format_double(s.r / np) : "") + '\n';
  }
  ensure_parent(opts.out);
  write_text_file(opts.out, out);
  write_manifest(manifest_for_file(opts.out), "report", to_json(opts));
  log << "report: " << order.size() << " methods -> " << opts.out.string() << "\n";
  return kExitOk;
}

int run_segment(const SegmentOptions& opts, std::ostream& log) {
  if (!(opts.threshold > 0.0)) throw Error("segmentation threshold must be positive");
  const Sequence seq = load_sequence(opts.seq);
  const std::vector<EgoMotionEstimate> estimates =
      successful_estimates(estimate_sequence(seq, opts.estimation));
  const RigidTransform mount = seq.radar_mounting();

  std::vector<std::vector<std::uint8_t>> masks(seq.frames.size());
  std::vector<std::string> errors(seq.frames.size());
  parallel_for(seq.frames.size(), [&](std::size_t i) {
    try {
      const Vec3 v = sensor_velocity_at(seq, i, estimates, mount);
      masks[i] = to_mask(segment_static_dynamic(seq.frames[i].radar, v, opts.threshold));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::size_t failures = 0, dynamic = 0, total = 0;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const fs::path file = frame_directory(opts.seq, seq.frames[i].id) / "mask.bin";
    if (!errors[i].empty()) {
      ++failures;
      std::error_code ignored;
      fs::remove(file, ignored);
      log << "segment: frame " << seq.frames[i].id << ": " << errors[i] << "\n";
      continue;
    }
    write_mask_bin(file, masks[i]);
    for (std::uint8_t m : masks[i]) dynamic += m;
    total += masks[i].size();
  }
  write_manifest(opts.seq / "segment.manifest.json", "segment", to_json(opts));
  log << "segment: " << dynamic << "/" << total << " radar points dynamic\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int run_replay(const fs::path& manifest_path, std::ostream& log) {
  Json manifest;
  try {
    manifest = Json::parse(read_text_file(manifest_path));
  } catch (const Json::exception& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  }
  try {
    const std::string command = manifest.at("command").get<std::string>();
    const Json& config = manifest.at("config");
    if (command == "simulate") return run_simulate(simulate_from_json(config), log);
    if (command == "estimate-ego") return run_estimate(estimate_from_json(config), log);
    if (command == "accumulate") return run_accumulate(accumulate_from_json(config), log);
    if (command == "evaluate") return run_evaluate(evaluate_from_json(config), log);
    if (command == "report") return run_report(report_from_json(config), log);
    if (command == "segment") return run_segment(segment_from_json(config), log);
    throw Error(manifest_path.string() + ": unknown command '" + command + "'");
  } catch (const Json::exception& e) {
    throw Error(manifest_path.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace radaccum::cli
