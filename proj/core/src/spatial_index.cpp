#include "radaccum/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "radaccum/error.hpp"

namespace radaccum {

SpatialIndex::SpatialIndex(std::vector<Vec3> points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("spatial index supports at most 2^32-1 points");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  Vec3::Index axis = 0;
  if ((hi - lo).maxCoeff(&axis) <= 0.0) return id;  // all duplicates

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = static_cast<std::int32_t>(axis);
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void SpatialIndex::search_nearest(std::int32_t id, const Vec3& q, Neighbor& best,
                                  double& best_sq) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double d = (points_[order_[i]] - q).squaredNorm();
      if (d < best_sq || (d == best_sq && order_[i] < best.index)) {
        best_sq = d;
        best.index = order_[i];
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0.0 ? node.left : node.right;
  const std::int32_t far = diff < 0.0 ? node.right : node.left;
  search_nearest(near, q, best, best_sq);
  if (diff * diff <= best_sq) search_nearest(far, q, best, best_sq);
}

SpatialIndex::Neighbor SpatialIndex::nearest(const Vec3& query) const {
  if (points_.empty()) throw Error("nearest-neighbor query on an empty index");
  Neighbor best{std::numeric_limits<std::size_t>::max(), 0.0};
  double best_sq = std::numeric_limits<double>::infinity();
  search_nearest(0, query, best, best_sq);
  best.distance = std::sqrt(best_sq);
  return best;
}

std::optional<SpatialIndex::Neighbor> SpatialIndex::nearest_within(const Vec3& query,
                                                                   double max_distance) const {
  if (points_.empty()) return std::nullopt;
  Neighbor best{std::numeric_limits<std::size_t>::max(), 0.0};
  // Slightly widened bound so a point exactly at max_distance is still found.
  double best_sq = std::nextafter(max_distance * max_distance,
                                  std::numeric_limits<double>::infinity());
  search_nearest(0, query, best, best_sq);
  if (best.index == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  best.distance = std::sqrt(best_sq);
  if (best.distance > max_distance) return std::nullopt;
  return best;
}

template <typename Heap>
void SpatialIndex::search_k(std::int32_t id, const Vec3& q, std::size_t k, Heap& heap) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double d = (points_[order_[i]] - q).squaredNorm();
      if (heap.size() < k) {
        heap.emplace(d, order_[i]);
      } else if (d < heap.top().first) {
        heap.pop();
        heap.emplace(d, order_[i]);
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0.0 ? node.left : node.right;
  const std::int32_t far = diff < 0.0 ? node.right : node.left;
  search_k(near, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.top().first) search_k(far, q, k, heap);
}

std::vector<SpatialIndex::Neighbor> SpatialIndex::k_nearest(const Vec3& query,
                                                            std::size_t k) const {
  std::vector<Neighbor> out;
  if (points_.empty() || k == 0) return out;
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry> heap;
  search_k(0, query, k, heap);
  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = Neighbor{heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

}  // namespace radaccum
