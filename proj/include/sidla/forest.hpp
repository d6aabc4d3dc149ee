#pragma once

// Per-vertex labelling shared by both pictures of the model: the geodesic
// forest of first-passage percolation and the particle-system forest. Each
// covered vertex records the boundary site whose tree owns it, the direction
// of the edge that entered it, and a time (distance to the boundary, or the
// time the vertex was occupied).

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "sidla/lattice.hpp"

namespace sidla {

inline constexpr std::int32_t kNoRoot = -1;

/// A finite monotone tree rooted at a boundary vertex, in lifted coordinates.
class MonotoneTree {
 public:
  explicit MonotoneTree(Vertex root, std::vector<Edge> edges = {}) : root_(root), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
  }

  const Vertex& root() const { return root_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  bool contains(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

  /// Root first, then edge heads, in level order.
  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    out.reserve(edges_.size() + 1);
    out.push_back(root_);
    for (const Edge& e : edges_) out.push_back(head(e));
    std::sort(out.begin(), out.end(), LevelOrder{});
    return out;
  }

  bool contains_vertex(const Vertex& v) const {
    if (v == root_) return true;
    return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return head(e) == v; });
  }

  void add(const Edge& e) { edges_.insert(std::upper_bound(edges_.begin(), edges_.end(), e), e); }

  void remove(const Edge& e) {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it != edges_.end() && *it == e) edges_.erase(it);
  }

  friend bool operator==(const MonotoneTree&, const MonotoneTree&) = default;

 private:
  Vertex root_;
  std::vector<Edge> edges_;
};

/// Structural check: every edge hangs off the root or off another edge's head,
/// and no vertex is entered twice.
inline bool is_monotone_tree(const MonotoneTree& t) {
  std::vector<Vertex> heads;
  for (const Edge& e : t.edges()) heads.push_back(head(e));
  std::sort(heads.begin(), heads.end());
  if (std::adjacent_find(heads.begin(), heads.end()) != heads.end()) return false;
  if (std::binary_search(heads.begin(), heads.end(), t.root())) return false;
  return std::all_of(t.edges().begin(), t.edges().end(), [&](const Edge& e) {
    return e.tail == t.root() || std::binary_search(heads.begin(), heads.end(), e.tail);
  });
}

class Forest {
 public:
  explicit Forest(const Window& window)
      : window_(window),
        time_(window.vertex_count(), std::numeric_limits<double>::infinity()),
        root_(window.vertex_count(), kNoRoot),
        parent_(window.vertex_count(), Dir::Left) {
    for (std::int64_t i = 0; i < window.width(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      root_[idx] = static_cast<std::int32_t>(i);
      time_[idx] = 0.0;
    }
    occupied_ = static_cast<std::size_t>(window.width());
  }

  const Window& window() const { return window_; }

  bool in_window(const Vertex& v) const { return window_.contains_level(v.y); }

  bool occupied(const Vertex& v) const { return root_[window_.index(v)] != kNoRoot; }

  /// Boundary site number owning v, or kNoRoot.
  std::int32_t root_site(const Vertex& v) const { return root_[window_.index(v)]; }

  Vertex root_vertex(const Vertex& v) const { return {2 * static_cast<std::int64_t>(root_site(v)), 0}; }

  Dir parent(const Vertex& v) const { return parent_[window_.index(v)]; }

  double time(const Vertex& v) const { return time_[window_.index(v)]; }

  void assign(const Vertex& v, std::int32_t site, Dir parent, double t) {
    const std::size_t i = window_.index(v);
    if (root_[i] == kNoRoot) ++occupied_;
    root_[i] = site;
    parent_[i] = parent;
    time_[i] = t;
  }

  /// Whether the edge belongs to the tree that owns its head.
  bool has_edge(const Edge& e) const {
    const Vertex h = head(e);
    if (h.y < 1 || !in_window(h)) return false;
    const std::size_t i = window_.index(h);
    return root_[i] != kNoRoot && parent_[i] == e.dir && root_[window_.index(e.tail)] == root_[i];
  }

  std::size_t occupied_count() const { return occupied_; }
  bool covered() const { return occupied_ == window_.vertex_count(); }

  const std::vector<double>& times() const { return time_; }
  const std::vector<std::int32_t>& roots() const { return root_; }
  const std::vector<Dir>& parents() const { return parent_; }

  friend bool operator==(const Forest&, const Forest&) = default;

 private:
  Window window_;
  std::vector<double> time_;
  std::vector<std::int32_t> root_;
  std::vector<Dir> parent_;
  std::size_t occupied_ = 0;
};

/// Edges reachable from `root` by following edges that the forest assigns to
/// root's tree. Coordinates are lifted so that the tree sits around `root`.
inline MonotoneTree tree_of(const Forest& forest, const Vertex& root) {
  const Window& w = forest.window();
  const std::int32_t site = static_cast<std::int32_t>(w.site_index(root));
  std::vector<Edge> edges;
  std::deque<Vertex> queue{root};
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    if (u.y >= w.height()) continue;
    for (Dir d : kDirs) {
      const Edge e{u, d};
      const Vertex h = head(e);
      if (forest.root_site(h) == site && forest.parent(h) == d) {
        edges.push_back(e);
        queue.push_back(h);
      }
    }
  }
  return MonotoneTree(root, std::move(edges));
}

}  // namespace sidla
