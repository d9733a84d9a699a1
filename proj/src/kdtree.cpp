#include "phsadapt/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>

namespace phsadapt {

namespace {

constexpr std::size_t kLeafSize = 16;

using Candidate = std::pair<double, NodeId>;  // (squared distance, id); max-heap on this order

}  // namespace

KdTree::KdTree(std::span<const Point> points, int dim)
    : dim_(dim), points_(points.begin(), points.end()), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), NodeId{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < dim_; ++a) {
    double lo = points_[order_[begin]][static_cast<std::size_t>(a)];
    double hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = points_[order_[i]][static_cast<std::size_t>(a)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  if (widest <= 0.0) return id;

  const std::size_t mid = begin + (end - begin) / 2;
  const auto ax = static_cast<std::size_t>(axis);
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](NodeId a, NodeId b) { return points_[a][ax] < points_[b][ax]; });
  const double split = points_[order_[mid]][ax];

  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<NodeId> KdTree::nearest(const Point& q, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};

  std::priority_queue<Candidate> heap;
  auto offer = [&](NodeId i) {
    const Candidate c{squared_distance(points_[i], q), i};
    if (heap.size() < k) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
  };

  // Depth-first with the near child first; a subtree is skipped only when its
  // slab is strictly farther than the current k-th candidate, so ties on
  // distance still reach the lower id.
  struct Frame {
    std::size_t node;
    double bound;
  };
  std::vector<Frame> stack{{0, 0.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (heap.size() == k && f.bound > heap.top().first) continue;
    const Node& node = nodes_[f.node];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) offer(order_[i]);
      continue;
    }
    const double diff = q[static_cast<std::size_t>(node.axis)] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    stack.push_back({far, std::max(f.bound, diff * diff)});
    stack.push_back({near, f.bound});
  }

  std::vector<NodeId> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

}  // namespace phsadapt
