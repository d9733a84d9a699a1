#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phsadapt/types.hpp"

namespace phsadapt {

/// Static k-d tree over a snapshot of points. k-nearest queries return ids
/// ordered by (distance, id), so equidistant points resolve to the lower id.
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::span<const Point> points, int dim);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::vector<NodeId> nearest(const Point& q, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);

  int dim_ = 1;
  std::vector<Point> points_;
  std::vector<NodeId> order_;
  std::vector<Node> nodes_;
};

}  // namespace phsadapt
