#include "radaccum/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "radaccum/box.hpp"
#include "radaccum/error.hpp"

namespace radaccum::synth {

namespace {

using Json = nlohmann::json;

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

struct EgoState {
  RigidTransform pose;          // ego -> world
  Vec3 velocity = Vec3::Zero();  // world frame, ego origin
  Vec3 angular = Vec3::Zero();   // world frame
};

EgoState ego_state(const EgoTrajectory& trajectory, double t) {
  EgoState s;
  if (const auto* cv = std::get_if<ConstantVelocity>(&trajectory)) {
    s.pose = RigidTransform::Translation(cv->velocity * t);
    s.velocity = cv->velocity;
    return s;
  }
  const auto& turn = std::get<ConstantTurn>(trajectory);
  const double yaw = turn.yaw_rate * t;
  Vec3 position;
  if (std::abs(turn.yaw_rate) < 1e-12) {
    position = Vec3(turn.speed * t, 0.0, 0.0);
  } else {
    const double radius = turn.speed / turn.yaw_rate;
    position = Vec3(radius * std::sin(yaw), radius * (1.0 - std::cos(yaw)), 0.0);
  }
  s.pose = RigidTransform::FromYaw(yaw, position);
  s.velocity = turn.speed * Vec3(std::cos(yaw), std::sin(yaw), 0.0);
  s.angular = Vec3(0.0, 0.0, turn.yaw_rate);
  return s;
}

RigidTransform object_pose(const SimObject& obj, double t) {
  return RigidTransform::FromYaw(obj.yaw, obj.position + obj.velocity * t);
}

bool is_moving(const SimObject& obj) { return obj.velocity.squaredNorm() > 0.0; }

// Uniform sample on the five visible faces (all but the bottom) of a box
// centered at the origin, area weighted.
Vec3 sample_box_surface(const Vec3& dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double l = dims.x(), w = dims.y(), h = dims.z();
  const double areas[5] = {w * h, w * h, l * h, l * h, l * w};
  const double total = areas[0] + areas[1] + areas[2] + areas[3] + areas[4];
  double pick = unit(rng) * total;
  int face = 0;
  while (face < 4 && pick > areas[face]) pick -= areas[face++];
  const double a = unit(rng) - 0.5;
  const double b = unit(rng) - 0.5;
  switch (face) {
    case 0: return {0.5 * l, a * w, b * h};
    case 1: return {-0.5 * l, a * w, b * h};
    case 2: return {a * l, 0.5 * w, b * h};
    case 3: return {a * l, -0.5 * w, b * h};
    default: return {a * l, b * w, 0.5 * h};
  }
}

double box_surface_area(const Vec3& d) {
  return 2.0 * d.y() * d.z() + 2.0 * d.x() * d.z() + d.x() * d.y();
}

Vec3 sample_wall(const Wall& wall, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector2d p = wall.start + unit(rng) * (wall.end - wall.start);
  return {p.x(), p.y(), unit(rng) * wall.height};
}

Vec3 sample_pole(const Pole& pole, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return {pole.position.x() + pole.radius * std::cos(phi),
          pole.position.y() + pole.radius * std::sin(phi), unit(rng) * pole.height};
}

std::size_t count_for(double density, double area) {
  return static_cast<std::size_t>(std::llround(density * area));
}

struct Scatterer {
  Vec3 local = Vec3::Zero();  // world frame for static structure, object frame otherwise
  int object = -1;            // index into cfg.objects
  double rcs = 0.0;
};

// ---------------------------------------------------------------------------
// JSON helpers

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json vec2_json(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }

Vec3 vec_from(const Json& j, const char* key) {
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw Error(std::string(key) + " must be [x, y, z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Eigen::Vector2d vec2_from(const Json& j, const char* key) {
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw Error(std::string(key) + " must be [x, y]");
  return {a[0].get<double>(), a[1].get<double>()};
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Json transform_json(const RigidTransform& t) {
  const Quat& q = t.rotation();
  return {{"translation", vec_json(t.translation())},
          {"rotation_wxyz", Json::array({q.w(), q.x(), q.y(), q.z()})}};
}

RigidTransform transform_from(const Json& j) {
  Vec3 t = Vec3::Zero();
  if (j.contains("translation")) t = vec_from(j, "translation");
  Quat q = Quat::Identity();
  if (j.contains("rotation_wxyz")) {
    const Json& a = j.at("rotation_wxyz");
    if (!a.is_array() || a.size() != 4) throw Error("rotation_wxyz must have 4 entries");
    q = Quat(a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>());
    if (!(q.norm() > 0.0)) throw Error("rotation_wxyz must be non-zero");
  }
  return {q, t};
}

}  // namespace

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error("invalid scenario: " + what);
  };
  require(duration > 0.0, "duration must be positive");
  require(frame_rate > 0.0, "frame_rate must be positive");
  require(drop_every == 0 || drop_every >= 2, "drop_every must be 0 or at least 2");
  require(max_range > min_range && min_range >= 0.0, "range limits must satisfy 0 <= min < max");
  require(noise.position_sigma >= 0.0, "noise.position_sigma must be non-negative");
  require(noise.vrr_sigma >= 0.0, "noise.vrr_sigma must be non-negative");
  require(noise.dropout >= 0.0 && noise.dropout <= 1.0, "noise.dropout must be in [0, 1]");
  if (const auto* turn = std::get_if<ConstantTurn>(&ego)) {
    require(std::isfinite(turn->speed) && std::isfinite(turn->yaw_rate), "turn must be finite");
  } else {
    require(std::get<ConstantVelocity>(ego).velocity.allFinite(), "ego velocity must be finite");
  }
  for (const Wall& w : walls) {
    require(w.height > 0.0, "wall height must be positive");
    require((w.end - w.start).norm() > 0.0, "wall endpoints must differ");
    require(w.lidar_density > 0.0 && w.radar_density >= 0.0,
            "wall lidar density must be positive and radar density non-negative");
  }
  for (const Pole& p : poles) {
    require(p.height > 0.0 && p.radius > 0.0, "pole height and radius must be positive");
    require(p.lidar_density > 0.0 && p.radar_scatterers >= 0, "pole densities must be positive");
  }
  for (const GroundPatch& g : ground) {
    require((g.max.array() > g.min.array()).all(), "ground patch max must exceed min");
    require(g.lidar_density > 0.0, "ground density must be positive");
  }
  for (const SimObject& o : objects) {
    require((o.dimensions.array() > 0.0).all(), "object dimensions must be positive");
    require(o.scatter_points >= 0 && o.lidar_density >= 0.0, "object point counts must be non-negative");
    require(!o.class_name.empty() && o.class_name.find_first_of(" \t\r\n") == std::string::npos,
            "object class names must be non-empty without whitespace");
    require(!(o.is_static && is_moving(o)), "static-flagged objects cannot move");
  }
}

std::pair<Sequence, GroundTruth> simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 geometry_rng(cfg.seed);
  std::mt19937_64 noise_rng(cfg.seed ^ kNoiseStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Persistent radar scatterers.
  std::vector<Scatterer> scatterers;
  GroundTruth truth;
  for (const Wall& wall : cfg.walls) {
    const double area = (wall.end - wall.start).norm() * wall.height;
    for (std::size_t i = 0; i < count_for(wall.radar_density, area); ++i) {
      scatterers.push_back({sample_wall(wall, geometry_rng), -1, -5.0 + 15.0 * unit(geometry_rng)});
    }
  }
  for (const Pole& pole : cfg.poles) {
    for (int i = 0; i < pole.radar_scatterers; ++i) {
      scatterers.push_back({sample_pole(pole, geometry_rng), -1, 5.0 * unit(geometry_rng)});
    }
  }
  for (const Scatterer& s : scatterers) truth.static_scatterers.push_back(s.local);
  for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
    const SimObject& obj = cfg.objects[o];
    for (int i = 0; i < obj.scatter_points; ++i) {
      scatterers.push_back({sample_box_surface(obj.dimensions, geometry_rng), static_cast<int>(o),
                            10.0 * unit(geometry_rng)});
    }
  }

  Sequence seq;
  seq.radar_to_ego = cfg.radar_mounting.matrix();
  seq.lidar_to_ego = cfg.lidar_mounting.matrix();
  GroundTruthRecord record;

  const auto ticks = static_cast<long long>(std::floor(cfg.duration * cfg.frame_rate + 1e-9));
  FrameId next_id = 0;
  for (long long tick = 0; tick < ticks; ++tick) {
    if (cfg.drop_every > 0 && tick % cfg.drop_every == cfg.drop_every - 1) continue;
    const double t = static_cast<double>(tick) / cfg.frame_rate;
    const EgoState ego = ego_state(cfg.ego, t);
    const RigidTransform radar_pose = ego.pose * cfg.radar_mounting;
    const RigidTransform lidar_pose = ego.pose * cfg.lidar_mounting;
    const RigidTransform radar_inv = radar_pose.inverse();
    const RigidTransform lidar_inv = lidar_pose.inverse();
    const Vec3 sensor_velocity_world =
        ego.velocity + ego.angular.cross(ego.pose.rotate(cfg.radar_mounting.translation()));

    SequenceFrame frame;
    frame.id = next_id++;
    frame.timestamp = t;
    frame.ego_to_world = ego.pose.matrix();

    FrameTruth ft;
    ft.id = frame.id;
    ft.timestamp = t;
    ft.ego_pose = ego.pose;
    ft.sensor_velocity = radar_inv.rotate(sensor_velocity_world);

    std::vector<RigidTransform> poses;
    for (const SimObject& obj : cfg.objects) poses.push_back(object_pose(obj, t));

    // Radar
    for (std::size_t s = 0; s < scatterers.size(); ++s) {
      const Scatterer& sc = scatterers[s];
      const Vec3 world = sc.object < 0 ? sc.local : poses[sc.object].apply(sc.local);
      const Vec3 point_velocity = sc.object < 0 ? Vec3::Zero() : cfg.objects[sc.object].velocity;
      const Vec3 in_sensor = radar_inv.apply(world);
      const double range = in_sensor.norm();
      if (range < cfg.min_range || range > cfg.max_range) continue;
      // Draws happen for every in-range scatterer so dropout does not shift the stream.
      const bool dropped = unit(noise_rng) < cfg.noise.dropout;
      const Vec3 position_noise(normal(noise_rng), normal(noise_rng), normal(noise_rng));
      const double vrr_noise = normal(noise_rng);
      if (dropped) continue;

      const Vec3 u = in_sensor / range;
      const double vrr = u.dot(radar_inv.rotate(point_velocity - sensor_velocity_world));

      RadarPoint p;
      p.position = in_sensor + cfg.noise.position_sigma * position_noise;
      p.rcs = sc.rcs;
      p.v_rr = vrr + cfg.noise.vrr_sigma * vrr_noise;
      frame.radar.push_back(p);

      RadarPointTruth rt;
      rt.scatterer = static_cast<int>(s);
      rt.track_id = sc.object < 0 ? -1 : cfg.objects[sc.object].track_id;
      rt.dynamic = sc.object >= 0 && is_moving(cfg.objects[sc.object]);
      rt.true_position = in_sensor;
      rt.true_vrr = vrr;
      ft.radar.push_back(rt);
    }

    // Lidar: surfaces re-sampled every frame.
    auto emit_lidar = [&](const Vec3& world, bool dynamic) {
      const Vec3 in_sensor = lidar_inv.apply(world);
      const double range = in_sensor.norm();
      if (range < cfg.min_range || range > cfg.max_range) return;
      const bool dropped = unit(noise_rng) < cfg.noise.dropout;
      const Vec3 noise(normal(noise_rng), normal(noise_rng), normal(noise_rng));
      const double intensity = unit(noise_rng);
      if (dropped) return;
      frame.lidar.push_back({in_sensor + cfg.noise.position_sigma * noise, intensity});
      ft.lidar_dynamic.push_back(dynamic);
      ft.lidar_true_positions.push_back(in_sensor);
    };
    for (const Wall& wall : cfg.walls) {
      const double area = (wall.end - wall.start).norm() * wall.height;
      for (std::size_t i = 0; i < count_for(wall.lidar_density, area); ++i) {
        emit_lidar(sample_wall(wall, noise_rng), false);
      }
    }
    for (const Pole& pole : cfg.poles) {
      const double area = 2.0 * std::numbers::pi * pole.radius * pole.height;
      for (std::size_t i = 0; i < count_for(pole.lidar_density, area); ++i) {
        emit_lidar(sample_pole(pole, noise_rng), false);
      }
    }
    for (const GroundPatch& g : cfg.ground) {
      const Eigen::Vector2d extent = g.max - g.min;
      for (std::size_t i = 0; i < count_for(g.lidar_density, extent.x() * extent.y()); ++i) {
        const double x = g.min.x() + unit(noise_rng) * extent.x();
        const double y = g.min.y() + unit(noise_rng) * extent.y();
        emit_lidar(Vec3(x, y, 0.0), false);
      }
    }
    for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
      const SimObject& obj = cfg.objects[o];
      const auto n = count_for(obj.lidar_density, box_surface_area(obj.dimensions));
      for (std::size_t i = 0; i < n; ++i) {
        emit_lidar(poses[o].apply(sample_box_surface(obj.dimensions, noise_rng)), is_moving(obj));
      }
    }

    // Labels (ego frame) and object truth.
    const RigidTransform ego_inv = ego.pose.inverse();
    for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
      const SimObject& obj = cfg.objects[o];
      ft.objects.push_back({obj.track_id, poses[o], obj.velocity});
      record.objects.push_back({frame.id, obj.track_id, obj.velocity});
      TrackedBox world_box;
      world_box.track_id = obj.track_id;
      world_box.class_name = obj.class_name;
      world_box.center = poses[o].translation();
      world_box.dimensions = obj.dimensions;
      world_box.yaw = obj.yaw;
      world_box.frame_id = frame.id;
      world_box.is_static = obj.is_static;
      TrackedBox box = transform_box(ego_inv, world_box);
      if ((radar_inv.apply(world_box.center)).norm() > cfg.max_range) continue;
      frame.labels.push_back(box);
    }

    if (!truth.frames.empty()) {
      const FrameTruth& prev = truth.frames.back();
      EgoMotionEstimate gt;
      gt.from_frame = prev.id;
      gt.to_frame = frame.id;
      gt.transform = ego_inv * prev.ego_pose;
      gt.method = EgoMethod::GroundTruth;
      truth.ego_motion.push_back(gt);
      record.ego_motion.push_back({prev.id, frame.id, gt.transform.matrix()});
    }

    seq.frames.push_back(std::move(frame));
    truth.frames.push_back(std::move(ft));
  }

  seq.ground_truth = std::move(record);
  return {std::move(seq), std::move(truth)};
}

std::vector<EgoMotionEstimate> estimates_from_record(const GroundTruthRecord& record) {
  std::vector<EgoMotionEstimate> out;
  out.reserve(record.ego_motion.size());
  for (const GroundTruthEgoMotion& m : record.ego_motion) {
    EgoMotionEstimate e;
    e.from_frame = m.from;
    e.to_frame = m.to;
    e.transform = RigidTransform::FromMatrix(m.transform);
    e.method = EgoMethod::GroundTruth;
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

std::string scenario_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["duration"] = cfg.duration;
  j["frame_rate"] = cfg.frame_rate;
  j["drop_every"] = cfg.drop_every;
  if (const auto* cv = std::get_if<ConstantVelocity>(&cfg.ego)) {
    j["ego"] = {{"type", "constant_velocity"}, {"velocity", vec_json(cv->velocity)}};
  } else {
    const auto& turn = std::get<ConstantTurn>(cfg.ego);
    j["ego"] = {{"type", "constant_turn"}, {"speed", turn.speed}, {"yaw_rate", turn.yaw_rate}};
  }
  j["walls"] = Json::array();
  for (const Wall& w : cfg.walls) {
    j["walls"].push_back({{"start", vec2_json(w.start)}, {"end", vec2_json(w.end)},
                          {"height", w.height}, {"lidar_density", w.lidar_density},
                          {"radar_density", w.radar_density}});
  }
  j["poles"] = Json::array();
  for (const Pole& p : cfg.poles) {
    j["poles"].push_back({{"position", vec2_json(p.position)}, {"height", p.height},
                          {"radius", p.radius}, {"lidar_density", p.lidar_density},
                          {"radar_scatterers", p.radar_scatterers}});
  }
  j["ground"] = Json::array();
  for (const GroundPatch& g : cfg.ground) {
    j["ground"].push_back({{"min", vec2_json(g.min)}, {"max", vec2_json(g.max)},
                           {"lidar_density", g.lidar_density}});
  }
  j["objects"] = Json::array();
  for (const SimObject& o : cfg.objects) {
    j["objects"].push_back({{"track_id", o.track_id}, {"class", o.class_name},
                            {"dimensions", vec_json(o.dimensions)},
                            {"position", vec_json(o.position)}, {"yaw", o.yaw},
                            {"velocity", vec_json(o.velocity)},
                            {"scatter_points", o.scatter_points},
                            {"lidar_density", o.lidar_density}, {"is_static", o.is_static}});
  }
  j["noise"] = {{"position_sigma", cfg.noise.position_sigma},
                {"vrr_sigma", cfg.noise.vrr_sigma},
                {"dropout", cfg.noise.dropout}};
  j["max_range"] = cfg.max_range;
  j["min_range"] = cfg.min_range;
  j["seed"] = cfg.seed;
  j["radar_mounting"] = transform_json(cfg.radar_mounting);
  j["lidar_mounting"] = transform_json(cfg.lidar_mounting);
  return j.dump(2);
}

ScenarioConfig scenario_from_json(std::string_view json_text) {
  ScenarioConfig cfg;
  try {
    const Json j = Json::parse(json_text);
    read_opt(j, "name", cfg.name);
    read_opt(j, "duration", cfg.duration);
    read_opt(j, "frame_rate", cfg.frame_rate);
    read_opt(j, "drop_every", cfg.drop_every);
    if (j.contains("ego")) {
      const Json& e = j.at("ego");
      const std::string type = e.value("type", "constant_velocity");
      if (type == "constant_velocity") {
        ConstantVelocity cv;
        if (e.contains("velocity")) cv.velocity = vec_from(e, "velocity");
        cfg.ego = cv;
      } else if (type == "constant_turn") {
        ConstantTurn turn;
        read_opt(e, "speed", turn.speed);
        read_opt(e, "yaw_rate", turn.yaw_rate);
        cfg.ego = turn;
      } else {
        throw Error("unknown ego type '" + type + "'");
      }
    }
    for (const Json& w : j.value("walls", Json::array())) {
      Wall wall;
      wall.start = vec2_from(w, "start");
      wall.end = vec2_from(w, "end");
      read_opt(w, "height", wall.height);
      read_opt(w, "lidar_density", wall.lidar_density);
      read_opt(w, "radar_density", wall.radar_density);
      cfg.walls.push_back(wall);
    }
    for (const Json& p : j.value("poles", Json::array())) {
      Pole pole;
      pole.position = vec2_from(p, "position");
      read_opt(p, "height", pole.height);
      read_opt(p, "radius", pole.radius);
      read_opt(p, "lidar_density", pole.lidar_density);
      read_opt(p, "radar_scatterers", pole.radar_scatterers);
      cfg.poles.push_back(pole);
    }
    for (const Json& g : j.value("ground", Json::array())) {
      GroundPatch patch;
      patch.min = vec2_from(g, "min");
      patch.max = vec2_from(g, "max");
      read_opt(g, "lidar_density", patch.lidar_density);
      cfg.ground.push_back(patch);
    }
    for (const Json& o : j.value("objects", Json::array())) {
      SimObject obj;
      read_opt(o, "track_id", obj.track_id);
      read_opt(o, "class", obj.class_name);
      if (o.contains("dimensions")) obj.dimensions = vec_from(o, "dimensions");
      if (o.contains("position")) obj.position = vec_from(o, "position");
      read_opt(o, "yaw", obj.yaw);
      if (o.contains("velocity")) obj.velocity = vec_from(o, "velocity");
      read_opt(o, "scatter_points", obj.scatter_points);
      read_opt(o, "lidar_density", obj.lidar_density);
      read_opt(o, "is_static", obj.is_static);
      cfg.objects.push_back(obj);
    }
    if (j.contains("noise")) {
      const Json& n = j.at("noise");
      read_opt(n, "position_sigma", cfg.noise.position_sigma);
      read_opt(n, "vrr_sigma", cfg.noise.vrr_sigma);
      read_opt(n, "dropout", cfg.noise.dropout);
    }
    read_opt(j, "max_range", cfg.max_range);
    read_opt(j, "min_range", cfg.min_range);
    read_opt(j, "seed", cfg.seed);
    if (j.contains("radar_mounting")) cfg.radar_mounting = transform_from(j.at("radar_mounting"));
    if (j.contains("lidar_mounting")) cfg.lidar_mounting = transform_from(j.at("lidar_mounting"));
  } catch (const Json::exception& e) {
    throw Error(std::string("invalid scenario JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace radaccum::synth
