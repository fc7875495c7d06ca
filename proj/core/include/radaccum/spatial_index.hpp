#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "radaccum/geometry.hpp"

namespace radaccum {

/// Immutable k-d tree over 3D points for exact nearest-neighbor queries.
/// Safe to share between threads once constructed.
class SpatialIndex {
 public:
  struct Neighbor {
    std::size_t index = 0;  // position in the constructor input
    double distance = 0.0;  // Euclidean, meters
  };

  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Vec3> points, std::size_t leaf_size = 8);

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t index) const { return points_[index]; }
  const std::vector<Vec3>& points() const { return points_; }

  /// Throws radaccum::Error on an empty index.
  Neighbor nearest(const Vec3& query) const;
  /// Nearest neighbor no farther than `max_distance`, if any.
  std::optional<Neighbor> nearest_within(const Vec3& query, double max_distance) const;
  /// Up to k neighbors sorted by ascending distance.
  std::vector<Neighbor> k_nearest(const Vec3& query, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t axis = -1;  // -1 marks a leaf
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search_nearest(std::int32_t node, const Vec3& q, Neighbor& best, double& best_sq) const;

  template <typename Heap>
  void search_k(std::int32_t node, const Vec3& q, std::size_t k, Heap& heap) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 8;
};

}  // namespace radaccum
