#pragma once

// Construction of the particle system from a first-passage percolation sample.
//
// For every boundary site x and every monotone path from x that stays in the
// geodesic tree of x except possibly for its final edge:
//   * a path inside the tree rings once, at its FPP length;
//   * a path whose last edge leaves the tree rings at its FPP length and then
//     again at every arrival of an auxiliary Poisson clock on that last edge,
//     restarted at the path length.
// Replaying these rings through the particle rules regrows the geodesic
// forest, each vertex being occupied exactly at its FPP distance.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sidla/error.hpp"
#include "sidla/fpp.hpp"
#include "sidla/sidla.hpp"

namespace sidla {

/// Independent Poisson clocks on the edges, one per edge, at the profile rate.
class AuxClockField {
 public:
  AuxClockField(std::uint64_t seed, const Window& window, WeightProfile profile = WeightProfile::Stretch)
      : seed_(seed), window_(window), profile_(profile) {}

  /// Arrivals of the edge clock restarted at `origin`, restricted to
  /// [begin, end]. By memorylessness, starting the draw at max(origin, begin)
  /// yields an exact Poisson process on the window.
  std::vector<double> arrivals(const Edge& e, double origin, double begin, double end) const {
    std::vector<double> out;
    double t = std::max(origin, begin);
    if (t > end) return out;
    const Edge c = window_.canonical(e);
    const std::uint64_t key = (static_cast<std::uint64_t>(c.tail.x) << 33) ^
                              (static_cast<std::uint64_t>(c.tail.y) << 1) ^ static_cast<std::uint64_t>(c.dir);
    CounterStream stream(seed_, Domain::Aux, key);
    const double r = rate(profile_, level(e));
    for (;;) {
      t += stream.exponential(r);
      if (t > end) break;
      out.push_back(t);
    }
    return out;
  }

 private:
  std::uint64_t seed_;
  Window window_;
  WeightProfile profile_;
};

enum class RingKind : std::uint8_t { Interior, BoundaryRepeat };

struct CoupledRing {
  Vertex site;
  double time = 0.0;
  std::vector<Edge> path;  // lifted around the site
  RingKind kind = RingKind::Interior;
};

/// Time interval on which repeat rings are materialised. Repeat rings always
/// vanish, so restricting them leaves the replayed forest unchanged.
struct RepeatWindow {
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
};

inline double max_distance(const GeodesicForest& forest) {
  double m = 0.0;
  for (double t : forest.times()) m = std::max(m, t);
  return m;
}

namespace detail {

struct RingBuilder {
  const GeodesicForest& forest;
  const WeightField& field;
  const AuxClockField& aux;
  double horizon;
  RepeatWindow repeats;
  std::vector<CoupledRing>& out;
  Vertex site;
  std::int32_t site_index;
  std::vector<Edge> path;

  void visit(const Vertex& u, double length) {
    const std::int64_t cap = forest.window().height();
    for (Dir d : kDirs) {
      const Edge e{u, d};
      const Vertex h = head(e);
      if (h.y > cap) continue;
      const double t = length + field.weight(e);
      path.push_back(e);
      if (forest.root_site(h) == site_index && forest.parent(h) == d) {
        out.push_back({site, t, path, RingKind::Interior});
        visit(h, t);
      } else {
        if (t <= horizon) out.push_back({site, t, path, RingKind::BoundaryRepeat});
        for (double a : aux.arrivals(e, t, repeats.begin, std::min(repeats.end, horizon)))
          out.push_back({site, a, path, RingKind::BoundaryRepeat});
      }
      path.pop_back();
    }
  }
};

}  // namespace detail

/// All rings of all sites up to `horizon`, sorted by time, then site, then
/// path length.
inline std::vector<CoupledRing> generate_rings(const GeodesicForest& forest, const WeightField& field,
                                               const AuxClockField& aux, double horizon,
                                               const RepeatWindow& repeats = {}) {
  const double needed = max_distance(forest);
  if (!(horizon >= needed))
    throw ConfigError("generate_rings: horizon " + std::to_string(horizon) + " is below the coverage time " +
                      std::to_string(needed));
  const Window& w = forest.window();
  std::vector<CoupledRing> rings;
  for (std::int64_t i = 0; i < w.width(); ++i) {
    const Vertex site = w.vertex_at(0, i);
    detail::RingBuilder b{forest, field, aux, horizon, repeats, rings, site, static_cast<std::int32_t>(i), {}};
    b.visit(site, 0.0);
  }
  std::stable_sort(rings.begin(), rings.end(), [](const CoupledRing& a, const CoupledRing& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.site.x != b.site.x) return a.site.x < b.site.x;
    return a.path.size() < b.path.size();
  });
  return rings;
}

/// Feeds each ring's path to the particle rules as its coin sequence.
/// Throws CouplingFault if an interior ring's particle stops before the end of
/// its path, which the construction rules out.
inline SidlaState replay(const std::vector<CoupledRing>& rings, const Window& window) {
  SidlaState state(window);
  for (const CoupledRing& ring : rings) {
    std::size_t steps = 0;
    auto coins = [&]() -> Dir {
      if (steps >= ring.path.size())
        throw CouplingFault("replay: particle from " + to_string(ring.site) + " at t=" + std::to_string(ring.time) +
                            " ran past the end of its path");
      return ring.path[steps++].dir;
    };
    const WalkOutcome result = walk_particle(state, ring.site, coins);
    if (ring.kind == RingKind::Interior && steps != ring.path.size())
      throw CouplingFault("replay: interior ring of " + to_string(ring.site) + " at t=" + std::to_string(ring.time) +
                          " stopped after " + std::to_string(steps) + " of " + std::to_string(ring.path.size()) +
                          " steps; its path prefix is not in the tree");
    state.clock = ring.time;
    state.apply({ring.site, ring.time}, result);
  }
  return state;
}

/// Successive differences of the ring times at one site.
inline std::vector<double> interring_gaps(const std::vector<CoupledRing>& rings, const Vertex& site,
                                          const Window& window) {
  const Vertex s = window.canonical(site);
  std::vector<double> times;
  for (const CoupledRing& r : rings)
    if (window.canonical(r.site) == s) times.push_back(r.time);
  if (times.size() < 2)
    throw ConfigError("interring_gaps: site " + to_string(s) + " has fewer than 2 rings");
  std::sort(times.begin(), times.end());
  std::vector<double> gaps;
  gaps.reserve(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) gaps.push_back(times[i] - times[i - 1]);
  return gaps;
}

struct CouplingOptions {
  WeightProfile profile = WeightProfile::Stretch;
  double horizon_factor = 1.5;
  /// Gaps are taken from the first `gaps_per_site` + 1 rings of each site at
  /// or after `gap_begin`.
  double gap_begin = 0.0;
  std::size_t gaps_per_site = 16;
};

struct CouplingReport {
  bool edges_equal = false;
  bool times_equal = false;
  bool forest_equal = false;
  std::size_t mismatched_vertices = 0;
  std::size_t rings = 0;
  std::size_t extends = 0;
  std::size_t repeat_extends = 0;  // boundary-repeat rings that extended; always 0 for a correct coupling
  std::size_t censored_count = 0;
  double horizon = 0.0;
  std::vector<std::vector<double>> site_gaps;  // per site, in time order
  std::vector<double> gap_sample;              // pooled
};

/// Compares the replayed forest with the geodesic forest vertex by vertex:
/// owner, entering edge, and occupancy time bit for bit.
inline void compare_forests(const Forest& fpp, const Forest& replayed, CouplingReport& report) {
  const Window& w = fpp.window();
  bool edges = true;
  bool times = true;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < w.vertex_count(); ++i) {
    const bool e = fpp.roots()[i] == replayed.roots()[i] && (i < static_cast<std::size_t>(w.width()) ||
                                                             fpp.parents()[i] == replayed.parents()[i]);
    const bool t = fpp.times()[i] == replayed.times()[i];
    edges = edges && e;
    times = times && t;
    bad += !(e && t);
  }
  report.edges_equal = edges;
  report.times_equal = times;
  report.forest_equal = edges && times;
  report.mismatched_vertices = bad;
}

inline CouplingReport verify_coupling(std::uint64_t seed, const Window& window, const CouplingOptions& opt = {}) {
  if (!(opt.horizon_factor >= 1.0))
    throw ConfigError("verify_coupling: horizon factor " + std::to_string(opt.horizon_factor) +
                      " puts the horizon below the coverage time");
  const WeightField field(seed, opt.profile, window);
  const GeodesicForest forest = build_forest(field);
  const AuxClockField aux(seed, window, opt.profile);

  CouplingReport report;
  report.horizon = opt.horizon_factor * max_distance(forest);
  if (opt.gap_begin > report.horizon) throw ConfigError("verify_coupling: gap window starts after the horizon");

  RepeatWindow repeats{opt.gap_begin, opt.gap_begin};
  if (opt.gaps_per_site > 0) repeats.end = opt.gap_begin + 4.0 * static_cast<double>(opt.gaps_per_site) + 64.0;
  repeats.end = std::min(repeats.end, report.horizon);

  const std::vector<CoupledRing> rings = generate_rings(forest, field, aux, report.horizon, repeats);
  const SidlaState state = replay(rings, window);
  compare_forests(forest, state.forest, report);
  report.rings = rings.size();
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (state.ring_log[i].result.outcome != Outcome::Extend) continue;
    ++report.extends;
    if (rings[i].kind == RingKind::BoundaryRepeat) ++report.repeat_extends;
  }
  report.censored_count = state.censored_count();

  const auto width = static_cast<std::size_t>(window.width());
  std::vector<std::vector<double>> times(width);
  for (const CoupledRing& r : rings) {
    if (r.time < repeats.begin || r.time > repeats.end) continue;
    auto& t = times[static_cast<std::size_t>(window.site_index(r.site))];
    if (t.size() < opt.gaps_per_site + 1) t.push_back(r.time);
  }
  report.site_gaps.resize(width);
  for (std::size_t s = 0; s < width; ++s) {
    for (std::size_t i = 1; i < times[s].size(); ++i) report.site_gaps[s].push_back(times[s][i] - times[s][i - 1]);
    report.gap_sample.insert(report.gap_sample.end(), report.site_gaps[s].begin(), report.site_gaps[s].end());
  }
  return report;
}

}  // namespace sidla
