#pragma once

// First-passage percolation on the capped lattice window: seeded exponential
// edge weights, distances to the boundary along monotone paths, and the
// geodesic forest grouping every vertex under the boundary site where its
// geodesic starts.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "sidla/error.hpp"
#include "sidla/forest.hpp"
#include "sidla/lattice.hpp"
#include "sidla/random.hpp"

namespace sidla {

/// Rate of the exponential weight on an edge at level h.
enum class WeightProfile {
  Stretch,     // 2^-h
  Eden,        // 1
  Decreasing,  // 2^h
};

inline double rate(WeightProfile profile, std::int64_t h) {
  switch (profile) {
    case WeightProfile::Stretch:
      return std::ldexp(1.0, static_cast<int>(-h));
    case WeightProfile::Eden:
      return 1.0;
    case WeightProfile::Decreasing:
      return std::ldexp(1.0, static_cast<int>(h));
  }
  return 1.0;
}

inline std::string_view to_string(WeightProfile p) {
  switch (p) {
    case WeightProfile::Stretch:
      return "stretch";
    case WeightProfile::Eden:
      return "eden";
    case WeightProfile::Decreasing:
      return "decreasing";
  }
  return "stretch";
}

inline WeightProfile parse_profile(std::string_view s) {
  if (s == "stretch") return WeightProfile::Stretch;
  if (s == "eden") return WeightProfile::Eden;
  if (s == "decreasing") return WeightProfile::Decreasing;
  throw ConfigError("unknown weight profile '" + std::string(s) + "'");
}

/// Exponential weight with the profile's rate at level h, from a uniform u in [0,1).
/// Scaling is by an exact power of two so the result is bit-stable.
inline double weight_from_unit(WeightProfile profile, std::int64_t h, double u) {
  const double e = standard_exponential(u);
  switch (profile) {
    case WeightProfile::Stretch:
      return std::ldexp(e, static_cast<int>(h));
    case WeightProfile::Eden:
      return e;
    case WeightProfile::Decreasing: {
      const double w = std::ldexp(e, static_cast<int>(-h));
      return w > 0.0 ? w : std::numeric_limits<double>::denorm_min();
    }
  }
  return e;
}

/// Immutable field of edge weights. Each weight is a pure function of the
/// seed and the canonical edge; `offset` re-roots the hash domain by a
/// horizontal shift.
class WeightField {
 public:
  WeightField(std::uint64_t seed, WeightProfile profile, const Window& window, std::int64_t offset = 0)
      : seed_(seed), profile_(profile), window_(window), offset_(offset) {}

  std::uint64_t seed() const { return seed_; }
  WeightProfile profile() const { return profile_; }
  const Window& window() const { return window_; }
  std::int64_t offset() const { return offset_; }

  /// The field seen through a shift by k: weight'(e) = weight(e shifted by k).
  WeightField shifted(std::int64_t k) const { return WeightField(seed_, profile_, window_, offset_ + k); }

  double unit(const Edge& e) const {
    const Vertex t = window_.canonical(shift(e.tail, offset_));
    return unit_from_bits(hash_words(seed_, Domain::Weight,
                                     {static_cast<std::uint64_t>(t.x), static_cast<std::uint64_t>(t.y),
                                      static_cast<std::uint64_t>(e.dir)}));
  }

  double weight(const Edge& e) const {
    const std::int64_t h = level(e);
    if (h < 1 || h > window_.height())
      throw ConfigError("sample_weight: edge level " + std::to_string(h) + " outside window");
    return weight_from_unit(profile_, h, unit(e));
  }

 private:
  std::uint64_t seed_;
  WeightProfile profile_;
  Window window_;
  std::int64_t offset_;
};

inline double sample_weight(const WeightField& field, const Edge& e) { return field.weight(e); }

/// dist = distance to the boundary, parent = direction of the last geodesic
/// edge, root = boundary site where the geodesic starts.
using GeodesicForest = Forest;

/// Level-by-level dynamic program over the two predecessors of each vertex.
/// `weight` maps a canonical edge to its weight. Exact ties go to the Left
/// predecessor.
template <class WeightFn>
GeodesicForest build_forest(const Window& w, WeightFn&& weight) {
  GeodesicForest forest(w);
  for (std::int64_t y = 1; y <= w.height(); ++y) {
    for (std::int64_t i = 0; i < w.width(); ++i) {
      const Vertex v = w.vertex_at(y, i);
      const Vertex pl = w.canonical(predecessor(v, Dir::Left));
      const Vertex pr = w.canonical(predecessor(v, Dir::Right));
      const double via_left = forest.time(pl) + weight(Edge{pl, Dir::Left});
      const double via_right = forest.time(pr) + weight(Edge{pr, Dir::Right});
      if (via_left <= via_right)
        forest.assign(v, forest.root_site(pl), Dir::Left, via_left);
      else
        forest.assign(v, forest.root_site(pr), Dir::Right, via_right);
    }
  }
  return forest;
}

inline GeodesicForest build_forest(const WeightField& field) {
  return build_forest(field.window(), [&](const Edge& e) { return field.weight(e); });
}

inline double distance(const GeodesicForest& forest, const Vertex& v) {
  if (!forest.in_window(v))
    throw ConfigError("distance: vertex " + to_string(v) + " outside window");
  return forest.time(v);
}

/// Sum of weights along a path, accumulated from the first edge upward; this
/// matches the association order of build_forest bit for bit.
template <class Range>
double path_length(const WeightField& field, const Range& path) {
  double total = 0.0;
  for (const Edge& e : path) total += field.weight(e);
  return total;
}

}  // namespace sidla
