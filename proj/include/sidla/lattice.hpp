#pragma once

// Rotated upper half-plane lattice: vertices (x, y) with x + y even and y >= 0.
// Every vertex v has two outgoing edges, to v + (-1, 1) (Left) and v + (1, 1)
// (Right). Simulations run on a cyclic window of period 2W in x, capped at
// level M.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "sidla/error.hpp"

namespace sidla {

struct Vertex {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Orders vertices by level first, then horizontally.
struct LevelOrder {
  constexpr bool operator()(const Vertex& a, const Vertex& b) const {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

enum class Dir : std::uint8_t { Left = 0, Right = 1 };

inline constexpr Dir kDirs[2] = {Dir::Left, Dir::Right};

constexpr std::int64_t step_x(Dir d) { return d == Dir::Left ? -1 : 1; }
constexpr char dir_char(Dir d) { return d == Dir::Left ? 'L' : 'R'; }

struct Edge {
  Vertex tail;
  Dir dir = Dir::Left;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

constexpr bool is_lattice_vertex(const Vertex& v) {
  return v.y >= 0 && ((v.x + v.y) % 2 == 0);
}

constexpr Vertex head(const Edge& e) { return {e.tail.x + step_x(e.dir), e.tail.y + 1}; }

/// Level of an edge: the level of its upper endpoint.
constexpr std::int64_t level(const Edge& e) { return e.tail.y + 1; }

/// The tail of the edge that enters v moving in direction d.
constexpr Vertex predecessor(const Vertex& v, Dir d) { return {v.x - step_x(d), v.y - 1}; }

constexpr Vertex shift(const Vertex& v, std::int64_t k) { return {v.x + 2 * k, v.y}; }

constexpr bool in_cone(const Vertex& base, const Vertex& v) {
  const std::int64_t dy = v.y - base.y;
  const std::int64_t dx = v.x - base.x;
  return dy >= 0 && (dx < 0 ? -dx : dx) <= dy;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

/// Finite cyclic stand-in for the half-plane: x is periodic with period 2W and
/// only levels 0..M exist.
class Window {
 public:
  Window(std::int64_t width, std::int64_t height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw ConfigError("window: width and height must be positive");
    if (width < height + 1)
      throw ConfigError("window: width " + std::to_string(width) + " must be at least height+1 = " +
                        std::to_string(height + 1));
  }

  std::int64_t width() const { return width_; }
  std::int64_t height() const { return height_; }
  std::int64_t period() const { return 2 * width_; }

  /// Vertices with 0 <= y <= M.
  std::size_t vertex_count() const { return static_cast<std::size_t>(width_ * (height_ + 1)); }

  bool contains_level(std::int64_t y) const { return y >= 0 && y <= height_; }

  Vertex canonical(const Vertex& v) const { return {floor_mod(v.x, period()), v.y}; }

  Edge canonical(const Edge& e) const { return {canonical(e.tail), e.dir}; }

  /// Dense index of a vertex, level-major. Accepts non-canonical x.
  std::size_t index(const Vertex& v) const {
    const std::int64_t x = floor_mod(v.x, period());
    return static_cast<std::size_t>(v.y * width_ + (x >> 1));
  }

  Vertex vertex_at(std::size_t index) const {
    const auto y = static_cast<std::int64_t>(index) / width_;
    const auto i = static_cast<std::int64_t>(index) % width_;
    return {2 * i + (y & 1), y};
  }

  Vertex vertex_at(std::int64_t y, std::int64_t i) const { return {2 * i + (y & 1), y}; }

  /// Boundary site number (0..W-1) of a level-0 vertex.
  std::int64_t site_index(const Vertex& root) const { return floor_mod(root.x, period()) >> 1; }

  /// Representative of v closest horizontally to base; displacement in (-W, W].
  Vertex lift(const Vertex& base, const Vertex& v) const {
    std::int64_t dx = floor_mod(v.x - base.x, period());
    if (dx > width_) dx -= period();
    return {base.x + dx, v.y};
  }

  bool in_cone(const Vertex& base, const Vertex& v) const { return sidla::in_cone(base, lift(base, v)); }

  friend bool operator==(const Window&, const Window&) = default;

 private:
  std::int64_t width_;
  std::int64_t height_;
};

inline Vertex canonicalize(const Vertex& v, const Window& w) { return w.canonical(v); }

/// The W canonical vertices at level m, sorted by x.
inline std::vector<Vertex> level_vertices(const Window& w, std::int64_t m) {
  if (!w.contains_level(m))
    throw ConfigError("level_vertices: level " + std::to_string(m) + " outside window");
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(w.width()));
  for (std::int64_t i = 0; i < w.width(); ++i) out.push_back(w.vertex_at(m, i));
  return out;
}

inline std::string to_string(const Vertex& v) { return std::to_string(v.x) + "," + std::to_string(v.y); }

inline std::string to_string(const Edge& e) { return to_string(e.tail) + "," + dir_char(e.dir); }

inline std::ostream& operator<<(std::ostream& os, const Vertex& v) { return os << '(' << v.x << ',' << v.y << ')'; }

inline std::ostream& operator<<(std::ostream& os, const Edge& e) {
  return os << '[' << e.tail << ' ' << dir_char(e.dir) << ']';
}

}  // namespace sidla
