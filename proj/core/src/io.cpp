#include "radaccum/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "radaccum/error.hpp"

namespace fs = std::filesystem;

namespace radaccum {

// ---------------------------------------------------------------------------
// Sequence accessors

std::optional<RigidTransform> Sequence::ego_pose(std::size_t index) const {
  const auto& m = frames.at(index).ego_to_world;
  if (!m) return std::nullopt;
  return RigidTransform::FromMatrix(*m);
}

std::size_t Sequence::index_of(FrameId id) const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].id == id) return i;
  }
  throw Error("frame " + std::to_string(id) + " is not part of the sequence");
}

RadarFrame Sequence::radar_frame(std::size_t index) const {
  const SequenceFrame& f = frames.at(index);
  RadarFrame out;
  out.frame_id = f.id;
  out.timestamp = f.timestamp;
  if (auto pose = ego_pose(index)) out.sensor_pose = *pose * radar_mounting();
  out.points = f.radar;
  return out;
}

LidarFrame Sequence::lidar_frame(std::size_t index) const {
  const SequenceFrame& f = frames.at(index);
  LidarFrame out;
  out.frame_id = f.id;
  out.timestamp = f.timestamp;
  if (auto pose = ego_pose(index)) out.sensor_pose = *pose * lidar_mounting();
  out.points = f.lidar;
  return out;
}

// ---------------------------------------------------------------------------
// Number formatting

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (res.ec != std::errc()) throw Error("failed to format number");
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw Error("not a number: '" + std::string(token) + "'");
  }
  return value;
}

namespace {

long long parse_integer(std::string_view token) {
  long long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
    throw Error("not an integer: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Little-endian float32 packing

void put_f32(std::string& out, double value) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

double get_f32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return static_cast<double>(std::bit_cast<float>(bits));
}

std::string read_binary(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + file.string());
  return data;
}

void write_binary(const fs::path& file, const std::string& data) { write_text_file(file, data); }

std::string matrix_text(const Mat4& m) {
  std::string out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out += format_double(m(r, c));
      out += c == 3 ? '\n' : ' ';
    }
  }
  return out;
}

Mat4 matrix_from_tokens(const std::vector<std::string>& tokens, std::size_t offset,
                        const fs::path& file) {
  if (tokens.size() < offset + 16) {
    throw IoError(file.string() + ": expected 16 matrix entries");
  }
  Mat4 m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = parse_double(tokens[offset + i]);
  return m;
}

Mat4 matrix_from_json(const nlohmann::json& j, const char* key, const fs::path& file) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 16) {
    throw IoError(file.string() + ": '" + key + "' must be an array of 16 numbers");
  }
  Mat4 m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = j[key][i].get<double>();
  return m;
}

nlohmann::json matrix_to_json(const Mat4& m) {
  auto arr = nlohmann::json::array();
  for (int i = 0; i < 16; ++i) arr.push_back(m(i / 4, i % 4));
  return arr;
}

std::vector<TrackedBox> parse_labels(const fs::path& file, FrameId frame) {
  std::vector<TrackedBox> boxes;
  for (const std::string& line : lines_of(read_text_file(file))) {
    const auto tok = split_ws(line);
    if (tok.size() != 10) throw IoError(file.string() + ": label line needs 10 fields: " + line);
    try {
      TrackedBox b;
      b.track_id = static_cast<int>(parse_integer(tok[0]));
      b.class_name = tok[1];
      b.center = Vec3(parse_double(tok[2]), parse_double(tok[3]), parse_double(tok[4]));
      b.dimensions = Vec3(parse_double(tok[5]), parse_double(tok[6]), parse_double(tok[7]));
      b.yaw = parse_double(tok[8]);
      const long long flag = parse_integer(tok[9]);
      if (flag != 0 && flag != 1) throw Error("is_static must be 0 or 1");
      b.is_static = flag == 1;
      b.frame_id = frame;
      if (!(b.dimensions.array() > 0.0).all()) throw Error("box dimensions must be positive");
      boxes.push_back(std::move(b));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      throw IoError(file.string() + ": " + e.what());
    }
  }
  return boxes;
}

std::string labels_text(const std::vector<TrackedBox>& boxes) {
  std::string out;
  for (const TrackedBox& b : boxes) {
    if (b.class_name.empty() ||
        b.class_name.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error("label class names must be non-empty and contain no whitespace");
    }
    out += std::to_string(b.track_id) + ' ' + b.class_name;
    for (double v : {b.center.x(), b.center.y(), b.center.z(), b.dimensions.x(),
                     b.dimensions.y(), b.dimensions.z(), b.yaw}) {
      out += ' ' + format_double(v);
    }
    out += b.is_static ? " 1\n" : " 0\n";
  }
  return out;
}

std::string frame_name(FrameId id) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%05u", static_cast<unsigned>(id));
  return buf.data();
}

}  // namespace

// ---------------------------------------------------------------------------
// Files

void write_text_file(const fs::path& file, const std::string& content) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + file.parent_path().string());
  }
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + file.string());
}

std::string read_text_file(const fs::path& file) {
  if (!fs::exists(file)) throw IoError("missing file " + file.string());
  return read_binary(file);
}

fs::path frame_directory(const fs::path& sequence_dir, FrameId id) {
  return sequence_dir / "frames" / frame_name(id);
}

std::vector<RadarPoint> read_radar_bin(const fs::path& file) {
  if (!fs::exists(file)) throw IoError("missing file " + file.string());
  const std::string data = read_binary(file);
  if (data.size() % kRadarRecordBytes != 0) {
    throw IoError(file.string() + ": size " + std::to_string(data.size()) +
                  " is not a multiple of the " + std::to_string(kRadarRecordBytes) +
                  "-byte radar record");
  }
  std::vector<RadarPoint> points(data.size() / kRadarRecordBytes);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < points.size(); ++i, p += kRadarRecordBytes) {
    RadarPoint& r = points[i];
    r.position = Vec3(get_f32(p), get_f32(p + 4), get_f32(p + 8));
    r.rcs = get_f32(p + 12);
    r.v_rr = get_f32(p + 16);
    if (!r.position.allFinite() || !std::isfinite(r.v_rr)) {
      throw IoError(file.string() + ": non-finite value in record " + std::to_string(i));
    }
  }
  return points;
}

std::vector<LidarPoint> read_lidar_bin(const fs::path& file) {
  if (!fs::exists(file)) throw IoError("missing file " + file.string());
  const std::string data = read_binary(file);
  if (data.size() % kLidarRecordBytes != 0) {
    throw IoError(file.string() + ": size " + std::to_string(data.size()) +
                  " is not a multiple of the " + std::to_string(kLidarRecordBytes) +
                  "-byte lidar record");
  }
  std::vector<LidarPoint> points(data.size() / kLidarRecordBytes);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < points.size(); ++i, p += kLidarRecordBytes) {
    points[i].position = Vec3(get_f32(p), get_f32(p + 4), get_f32(p + 8));
    points[i].intensity = get_f32(p + 12);
    if (!points[i].position.allFinite()) {
      throw IoError(file.string() + ": non-finite value in record " + std::to_string(i));
    }
  }
  return points;
}

void write_radar_bin(const fs::path& file, std::span<const RadarPoint> points) {
  std::string data;
  data.reserve(points.size() * kRadarRecordBytes);
  for (const RadarPoint& r : points) {
    put_f32(data, r.position.x());
    put_f32(data, r.position.y());
    put_f32(data, r.position.z());
    put_f32(data, r.rcs);
    put_f32(data, r.v_rr);
  }
  write_binary(file, data);
}

void write_lidar_bin(const fs::path& file, std::span<const LidarPoint> points) {
  std::string data;
  data.reserve(points.size() * kLidarRecordBytes);
  for (const LidarPoint& l : points) {
    put_f32(data, l.position.x());
    put_f32(data, l.position.y());
    put_f32(data, l.position.z());
    put_f32(data, l.intensity);
  }
  write_binary(file, data);
}

void write_mask_bin(const fs::path& file, std::span<const std::uint8_t> mask) {
  write_binary(file, std::string(mask.begin(), mask.end()));
}

std::vector<std::uint8_t> read_mask_bin(const fs::path& file) {
  const std::string data = read_text_file(file);
  std::vector<std::uint8_t> mask(data.begin(), data.end());
  for (std::uint8_t m : mask) {
    if (m > 1) throw IoError(file.string() + ": mask bytes must be 0 or 1");
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Sequences

Sequence load_sequence(const fs::path& directory) {
  const fs::path meta_file = directory / "meta.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(meta_file));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(meta_file.string() + ": " + e.what());
  }

  Sequence seq;
  std::vector<FrameId> ids;
  try {
    seq.radar_to_ego = matrix_from_json(meta, "radar_to_ego", meta_file);
    seq.lidar_to_ego = matrix_from_json(meta, "lidar_to_ego", meta_file);
    if (!meta.contains("frame_ids") || !meta["frame_ids"].is_array()) {
      throw IoError(meta_file.string() + ": 'frame_ids' must be an array");
    }
    ids = meta["frame_ids"].get<std::vector<FrameId>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(meta_file.string() + ": " + e.what());
  }
  // Reject malformed mountings early, with the file name attached.
  try {
    (void)seq.radar_mounting();
    (void)seq.lidar_mounting();
  } catch (const Error& e) {
    throw IoError(meta_file.string() + ": " + e.what());
  }
  if (ids.empty()) throw IoError(directory.string() + ": no frames");
  if (std::set<FrameId>(ids.begin(), ids.end()).size() != ids.size()) {
    throw IoError(meta_file.string() + ": duplicate frame ids");
  }

  seq.frames.reserve(ids.size());
  for (FrameId id : ids) {
    const fs::path dir = frame_directory(directory, id);
    SequenceFrame f;
    f.id = id;
    try {
      f.radar = read_radar_bin(dir / "radar.bin");
      f.lidar = read_lidar_bin(dir / "lidar.bin");
      const auto time_tokens = split_ws(read_text_file(dir / "time.txt"));
      if (time_tokens.size() != 1) throw IoError((dir / "time.txt").string() + ": expected one number");
      f.timestamp = parse_double(time_tokens[0]);
      if (fs::exists(dir / "pose.txt")) {
        const auto tok = split_ws(read_text_file(dir / "pose.txt"));
        if (tok.size() != 16) throw IoError((dir / "pose.txt").string() + ": expected 16 numbers");
        f.ego_to_world = matrix_from_tokens(tok, 0, dir / "pose.txt");
        (void)RigidTransform::FromMatrix(*f.ego_to_world);
      }
      if (fs::exists(dir / "labels.txt")) f.labels = parse_labels(dir / "labels.txt", id);
    } catch (const IoError& e) {
      throw IoError("frame " + std::to_string(id) + ": " + e.what());
    } catch (const Error& e) {
      throw IoError("frame " + std::to_string(id) + " (" + dir.string() + "): " + e.what());
    }
    if (!seq.frames.empty() && !(f.timestamp > seq.frames.back().timestamp)) {
      throw IoError("frame " + std::to_string(id) + ": timestamps are not strictly increasing");
    }
    seq.frames.push_back(std::move(f));
  }

  const fs::path gt_dir = directory / "gt";
  if (fs::exists(gt_dir / "ego_motion.txt")) {
    GroundTruthRecord gt;
    const fs::path ego_file = gt_dir / "ego_motion.txt";
    for (const std::string& line : lines_of(read_text_file(ego_file))) {
      const auto tok = split_ws(line);
      if (tok.size() != 18) throw IoError(ego_file.string() + ": expected 18 fields per line");
      try {
        GroundTruthEgoMotion m;
        m.from = static_cast<FrameId>(parse_integer(tok[0]));
        m.to = static_cast<FrameId>(parse_integer(tok[1]));
        m.transform = matrix_from_tokens(tok, 2, ego_file);
        gt.ego_motion.push_back(m);
      } catch (const IoError&) {
        throw;
      } catch (const Error& e) {
        throw IoError(ego_file.string() + ": " + e.what());
      }
    }
    const fs::path obj_file = gt_dir / "objects.txt";
    if (fs::exists(obj_file)) {
      for (const std::string& line : lines_of(read_text_file(obj_file))) {
        const auto tok = split_ws(line);
        if (tok.size() != 5) throw IoError(obj_file.string() + ": expected 5 fields per line");
        try {
          GroundTruthObjectState s;
          s.frame = static_cast<FrameId>(parse_integer(tok[0]));
          s.track_id = static_cast<int>(parse_integer(tok[1]));
          s.velocity = Vec3(parse_double(tok[2]), parse_double(tok[3]), parse_double(tok[4]));
          gt.objects.push_back(s);
        } catch (const Error& e) {
          throw IoError(obj_file.string() + ": " + e.what());
        }
      }
    }
    seq.ground_truth = std::move(gt);
  }
  return seq;
}

void write_sequence(const Sequence& seq, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string());
  // Stale frames from an earlier write would otherwise survive next to the new ones.
  fs::remove_all(directory / "frames", ec);
  fs::remove_all(directory / "gt", ec);
  fs::create_directories(directory / "frames", ec);
  if (ec) throw IoError("cannot create directory " + (directory / "frames").string());

  nlohmann::json meta;
  meta["radar_to_ego"] = matrix_to_json(seq.radar_to_ego);
  meta["lidar_to_ego"] = matrix_to_json(seq.lidar_to_ego);
  auto ids = nlohmann::json::array();
  for (const SequenceFrame& f : seq.frames) ids.push_back(f.id);
  meta["frame_ids"] = ids;
  write_text_file(directory / "meta.json", meta.dump(2) + "\n");

  for (const SequenceFrame& f : seq.frames) {
    const fs::path dir = frame_directory(directory, f.id);
    write_radar_bin(dir / "radar.bin", f.radar);
    write_lidar_bin(dir / "lidar.bin", f.lidar);
    write_text_file(dir / "time.txt", format_double(f.timestamp) + "\n");
    if (f.ego_to_world) write_text_file(dir / "pose.txt", matrix_text(*f.ego_to_world));
    write_text_file(dir / "labels.txt", labels_text(f.labels));
  }

  if (seq.ground_truth) {
    std::string ego;
    for (const GroundTruthEgoMotion& m : seq.ground_truth->ego_motion) {
      ego += std::to_string(m.from) + ' ' + std::to_string(m.to);
      for (int i = 0; i < 16; ++i) ego += ' ' + format_double(m.transform(i / 4, i % 4));
      ego += '\n';
    }
    write_text_file(directory / "gt" / "ego_motion.txt", ego);
    std::string objects;
    for (const GroundTruthObjectState& s : seq.ground_truth->objects) {
      objects += std::to_string(s.frame) + ' ' + std::to_string(s.track_id) + ' ' +
                 format_double(s.velocity.x()) + ' ' + format_double(s.velocity.y()) + ' ' +
                 format_double(s.velocity.z()) + '\n';
    }
    write_text_file(directory / "gt" / "objects.txt", objects);
  }
}

}  // namespace radaccum
