#include <cmath>
#include <numbers>

#include "radaccum/error.hpp"
#include "radaccum/synth.hpp"

namespace radaccum::synth {

namespace {

constexpr double kStreetSpeed = 15.0 / 3.6;

Wall wall(double x0, double y0, double x1, double y1) {
  Wall w;
  w.start = {x0, y0};
  w.end = {x1, y1};
  return w;
}

Pole pole(double x, double y) {
  Pole p;
  p.position = {x, y};
  return p;
}

GroundPatch ground(double x0, double y0, double x1, double y1) {
  GroundPatch g;
  g.min = {x0, y0};
  g.max = {x1, y1};
  return g;
}

SimObject object(int id, const char* cls, Vec3 dims, Vec3 pos, double yaw, Vec3 velocity) {
  SimObject o;
  o.track_id = id;
  o.class_name = cls;
  o.dimensions = dims;
  o.position = pos;
  o.yaw = yaw;
  o.velocity = velocity;
  return o;
}

SimObject rack(int id, double x, double y) {
  SimObject o = object(id, "BicycleRack", {2.0, 0.6, 1.0}, {x, y, 0.5}, 0.0, Vec3::Zero());
  o.is_static = true;
  o.scatter_points = 8;
  return o;
}

// Straight street with stepped facades: 6 m wall segments alternating
// between |y| = 8 and |y| = 9, joined by short perpendicular faces, plus poles
// every 10 m at y = +-6. Facades and poles skip the open interval
// (gap_from, gap_to) along x.
void add_street(ScenarioConfig& cfg, double gap_from = 0.0, double gap_to = 0.0) {
  const double x_min = -30.0, x_max = 108.0, segment = 6.0;
  const bool has_gap = gap_to > gap_from;
  auto in_gap = [&](double a, double b) { return has_gap && b > gap_from && a < gap_to; };
  for (double sign : {-1.0, 1.0}) {
    int step = 0;
    for (double x = x_min; x < x_max; x += segment, ++step) {
      const double y = sign * (step % 2 == 0 ? 8.0 : 9.0);
      const double next_y = sign * (step % 2 == 0 ? 9.0 : 8.0);
      if (in_gap(x, x + segment)) continue;
      cfg.walls.push_back(wall(x, y, x + segment, y));
      if (x + segment < x_max && !in_gap(x + segment, x + 2.0 * segment)) {
        cfg.walls.push_back(wall(x + segment, y, x + segment, next_y));
      }
    }
  }
  for (double x = -20.0; x <= 100.0; x += 10.0) {
    if (has_gap && x > gap_from && x < gap_to) continue;
    cfg.poles.push_back(pole(x, -6.0));
    cfg.poles.push_back(pole(x, 6.0));
  }
  cfg.ground.push_back(ground(x_min, -9.0, x_max, 9.0));
}

void add_racks(ScenarioConfig& cfg, int first_id) {
  const double xs[] = {6.0, 12.0, 34.0, 40.0};
  for (int i = 0; i < 4; ++i) {
    cfg.objects.push_back(rack(first_id + i, xs[i], i % 2 == 0 ? -5.5 : 5.5));
  }
}

ScenarioConfig straight() {
  ScenarioConfig cfg;
  cfg.name = "straight-15kmh";
  cfg.duration = 10.0;
  cfg.ego = ConstantVelocity{Vec3(kStreetSpeed, 0.0, 0.0)};
  add_street(cfg);
  add_racks(cfg, 100);
  cfg.noise = {0.02, 0.05, 0.05};
  cfg.seed = 11;
  return cfg;
}

ScenarioConfig turn() {
  ScenarioConfig cfg;
  cfg.name = "turn";
  cfg.duration = 8.0;
  cfg.ego = ConstantTurn{5.0, 0.2};
  const double x0 = -20.0, y0 = -12.0, x1 = 45.0, y1 = 55.0;
  cfg.walls = {wall(x0, y0, x1, y0), wall(x1, y0, x1, y1), wall(x1, y1, x0, y1),
               wall(x0, y1, x0, y0)};
  for (double x = -10.0; x <= 40.0; x += 10.0) {
    cfg.poles.push_back(pole(x, -9.0));
    cfg.poles.push_back(pole(x, 52.0));
  }
  for (double y = 0.0; y <= 50.0; y += 10.0) {
    cfg.poles.push_back(pole(42.0, y));
    cfg.poles.push_back(pole(-17.0, y));
  }
  cfg.ground.push_back(ground(x0, y0, x1, y1));
  cfg.objects.push_back(
      object(1, "Car", {4.5, 1.8, 1.6}, {30.0, 40.0, 0.8}, std::numbers::pi, {-5.0, 0.0, 0.0}));
  cfg.noise = {0.02, 0.05, 0.05};
  cfg.seed = 12;
  return cfg;
}

ScenarioConfig oncoming_car() {
  ScenarioConfig cfg;
  cfg.name = "oncoming-car";
  cfg.duration = 3.0;
  cfg.ego = ConstantVelocity{Vec3(kStreetSpeed, 0.0, 0.0)};
  add_street(cfg);
  SimObject car =
      object(1, "Car", {4.5, 1.8, 1.6}, {45.0, 0.0, 0.8}, std::numbers::pi, {-5.0, 0.0, 0.0});
  car.scatter_points = 24;
  cfg.objects.push_back(car);
  cfg.noise = {0.02, 0.05, 0.05};
  cfg.seed = 13;
  return cfg;
}

ScenarioConfig crossing_cyclist() {
  ScenarioConfig cfg;
  cfg.name = "crossing-cyclist";
  cfg.duration = 3.0;
  cfg.ego = ConstantVelocity{Vec3(kStreetSpeed, 0.0, 0.0)};
  add_street(cfg, 17.0, 27.0);
  SimObject cyclist = object(1, "Cyclist", {1.8, 0.6, 1.7}, {22.0, -5.0, 0.85},
                             std::numbers::pi / 2.0, {0.0, 4.0, 0.0});
  cyclist.scatter_points = 16;
  cfg.objects.push_back(cyclist);
  cfg.noise = {0.02, 0.05, 0.05};
  cfg.seed = 14;
  return cfg;
}

ScenarioConfig cluttered_urban() {
  ScenarioConfig cfg;
  cfg.name = "cluttered-urban";
  cfg.duration = 5.0;
  cfg.frame_rate = 13.0;
  cfg.drop_every = 4;
  cfg.ego = ConstantVelocity{Vec3(kStreetSpeed, 0.0, 0.0)};
  add_street(cfg);
  const Vec3 car(4.5, 1.8, 1.6);
  const Vec3 person(0.6, 0.6, 1.8);
  const Vec3 bike(1.8, 0.6, 1.7);
  cfg.objects.push_back(object(1, "Car", car, {20.0, 0.0, 0.8}, 0.0, {6.0, 0.0, 0.0}));
  cfg.objects.push_back(
      object(2, "Car", car, {60.0, 3.0, 0.8}, std::numbers::pi, {-6.0, 0.0, 0.0}));
  cfg.objects.push_back(object(3, "Pedestrian", person, {10.0, 7.0, 0.9}, 0.0, {1.4, 0.0, 0.0}));
  cfg.objects.push_back(object(4, "Pedestrian", person, {30.0, -7.0, 0.9}, std::numbers::pi / 2.0,
                               {0.0, 1.2, 0.0}));
  cfg.objects.push_back(object(5, "Cyclist", bike, {8.0, -5.0, 0.85}, 0.0, {5.0, 0.0, 0.0}));
  for (int i = 0; i < 3; ++i) {
    SimObject parked = object(20 + i, "Car", car, {15.0 + 18.0 * i, i % 2 == 0 ? 4.5 : -4.5, 0.8},
                              0.0, Vec3::Zero());
    parked.is_static = true;
    cfg.objects.push_back(parked);
  }
  add_racks(cfg, 100);
  cfg.noise = {0.03, 0.05, 0.1};
  cfg.seed = 15;
  return cfg;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"straight-15kmh", "turn", "oncoming-car", "crossing-cyclist", "cluttered-urban"};
}

ScenarioConfig builtin_scenario(std::string_view name) {
  if (name == "straight-15kmh") return straight();
  if (name == "turn") return turn();
  if (name == "oncoming-car") return oncoming_car();
  if (name == "crossing-cyclist") return crossing_cyclist();
  if (name == "cluttered-urban") return cluttered_urban();
  throw Error("unknown scenario '" + std::string(name) + "'");
}

}  // namespace radaccum::synth
