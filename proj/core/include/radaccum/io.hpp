#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radaccum/types.hpp"

namespace radaccum {

/// Bytes per packed radar record: x, y, z, rcs, v_rr as little-endian float32.
inline constexpr std::size_t kRadarRecordBytes = 5 * sizeof(float);
/// Bytes per packed lidar record: x, y, z, intensity as little-endian float32.
inline constexpr std::size_t kLidarRecordBytes = 4 * sizeof(float);

/// Reads a sequence directory:
///
///   meta.json                   mountings and frame id list
///   frames/<id:05d>/radar.bin   packed radar records
///   frames/<id:05d>/lidar.bin   packed lidar records
///   frames/<id:05d>/time.txt    timestamp in seconds
///   frames/<id:05d>/pose.txt    optional ego->world 4x4, row-major
///   frames/<id:05d>/labels.txt  optional, one box per line
///   gt/ego_motion.txt, gt/objects.txt   optional simulator ground truth
///
/// Malformed content is rejected with an IoError naming the offending file.
Sequence load_sequence(const std::filesystem::path& directory);

/// Writes `seq` in the layout read by load_sequence. Point coordinates are
/// narrowed to float32; every other number is written as the shortest
/// decimal that parses back to the same double.
void write_sequence(const Sequence& seq, const std::filesystem::path& directory);

std::filesystem::path frame_directory(const std::filesystem::path& sequence_dir, FrameId id);

std::vector<RadarPoint> read_radar_bin(const std::filesystem::path& file);
std::vector<LidarPoint> read_lidar_bin(const std::filesystem::path& file);
void write_radar_bin(const std::filesystem::path& file, std::span<const RadarPoint> points);
void write_lidar_bin(const std::filesystem::path& file, std::span<const LidarPoint> points);

/// One byte per point, 0 = static, 1 = dynamic.
void write_mask_bin(const std::filesystem::path& file, std::span<const std::uint8_t> mask);
std::vector<std::uint8_t> read_mask_bin(const std::filesystem::path& file);

/// Shortest round-trip decimal representation ('.' decimal point, no locale).
std::string format_double(double value);
/// Parses a full token as a double; throws radaccum::Error on failure.
double parse_double(std::string_view token);

/// Writes `content` to `file` via a temporary file and rename.
void write_text_file(const std::filesystem::path& file, const std::string& content);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace radaccum
