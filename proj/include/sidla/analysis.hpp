#pragma once

// Exact and statistical checks on monotone trees and forests: level profiles,
// heights, outer-boundary shells and their dyadic identity, exhaustive tree
// enumeration, slim levels, flank vertices, and coverage.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sidla/dyadic.hpp"
#include "sidla/error.hpp"
#include "sidla/forest.hpp"
#include "sidla/lattice.hpp"
#include "sidla/stats.hpp"

namespace sidla {

// ---------------------------------------------------------------------------
// Level profiles and heights

/// Number of tree vertices at level m (the root counts at its own level).
inline std::int64_t level_profile(const MonotoneTree& tree, std::int64_t m) {
  std::int64_t n = tree.root().y == m ? 1 : 0;
  for (const Edge& e : tree.edges()) n += level(e) == m;
  return n;
}

inline std::int64_t level_profile(const Forest& forest, const Vertex& root, std::int64_t m) {
  if (!forest.window().contains_level(m))
    throw ConfigError("level_profile: level " + std::to_string(m) + " outside window");
  return level_profile(tree_of(forest, root), m);
}

/// counts[m] = vertices at level m, for m = 0..height.
inline std::vector<std::int64_t> level_counts(const MonotoneTree& tree) {
  std::vector<std::int64_t> counts(1, 1);
  for (const Edge& e : tree.edges()) {
    const auto m = static_cast<std::size_t>(level(e) - tree.root().y);
    if (counts.size() <= m) counts.resize(m + 1, 0);
    ++counts[m];
  }
  return counts;
}

struct TreeHeight {
  std::int64_t value = 0;
  bool censored = false;  // reached the cap, so the true height is only bounded below

  friend bool operator==(const TreeHeight&, const TreeHeight&) = default;
};

inline TreeHeight tree_height(const MonotoneTree& tree, std::int64_t cap = std::numeric_limits<std::int64_t>::max()) {
  std::int64_t h = tree.root().y;
  for (const Edge& e : tree.edges()) h = std::max(h, level(e));
  return {h, h >= cap};
}

/// Heights of every tree of a covered forest, indexed by boundary site.
inline std::vector<TreeHeight> root_heights(const Forest& forest) {
  const Window& w = forest.window();
  std::vector<TreeHeight> out(static_cast<std::size_t>(w.width()));
  for (std::size_t i = static_cast<std::size_t>(w.width()); i < w.vertex_count(); ++i) {
    const std::int32_t r = forest.roots()[i];
    if (r == kNoRoot) continue;
    auto& h = out[static_cast<std::size_t>(r)];
    h.value = std::max(h.value, w.vertex_at(i).y);
  }
  for (auto& h : out) h.censored = h.value >= w.height();
  return out;
}

inline bool touches_cap(const Forest& forest, const Vertex& root) {
  return tree_height(tree_of(forest, root), forest.window().height()).censored;
}

// ---------------------------------------------------------------------------
// Outer boundary shells

/// counts[i] = number of edges at level i whose tail is in the tree and which
/// are not themselves tree edges.
struct ShellProfile {
  std::map<std::int64_t, std::int64_t> counts;

  std::int64_t at(std::int64_t i) const {
    auto it = counts.find(i);
    return it == counts.end() ? 0 : it->second;
  }

  friend bool operator==(const ShellProfile&, const ShellProfile&) = default;
};

inline ShellProfile shell_profile(const MonotoneTree& tree) {
  ShellProfile p;
  for (const Vertex& u : tree.vertices())
    for (Dir d : kDirs)
      if (!tree.contains({u, d})) ++p.counts[u.y + 1 - tree.root().y];
  return p;
}

/// Sum over levels of 2^-i |shell_i|, exactly.
inline Dyadic shell_sum(const ShellProfile& p) {
  Dyadic total;
  for (const auto& [i, n] : p.counts) total += Dyadic::scaled(n, static_cast<std::uint32_t>(i));
  return total;
}

inline bool shell_identity_check(const MonotoneTree& tree) { return shell_sum(shell_profile(tree)) == Dyadic::integer(1); }

/// The subtree hanging below the root's child in direction d, translated so
/// that the child sits on the root. Empty if the root edge is absent.
inline MonotoneTree child_subtree(const MonotoneTree& tree, Dir d) {
  if (!tree.contains({tree.root(), d})) return MonotoneTree(tree.root());
  const Vertex child = head(Edge{tree.root(), d});
  const Vertex offset{tree.root().x - child.x, tree.root().y - child.y};
  std::vector<Edge> edges;
  std::set<Vertex> reached{child};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Edge& e : tree.edges()) {
      if (reached.count(e.tail) && !reached.count(head(e))) {
        reached.insert(head(e));
        grew = true;
      }
    }
  }
  for (const Edge& e : tree.edges())
    if (reached.count(e.tail)) edges.push_back({{e.tail.x + offset.x, e.tail.y + offset.y}, e.dir});
  return MonotoneTree(tree.root(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

inline constexpr std::size_t kMaxEnumerationEdges = 12;

namespace detail {

template <class Fn>
void grow_trees(MonotoneTree& tree, std::set<Vertex>& occupied, std::vector<Edge> untried, std::size_t max_edges,
                Fn& fn) {
  fn(static_cast<const MonotoneTree&>(tree));
  if (tree.edge_count() == max_edges) return;
  while (!untried.empty()) {
    const Edge e = untried.back();
    untried.pop_back();
    const Vertex h = head(e);
    if (occupied.count(h)) continue;
    std::vector<Edge> next = untried;
    next.push_back({h, Dir::Right});
    next.push_back({h, Dir::Left});
    tree.add(e);
    occupied.insert(h);
    grow_trees(tree, occupied, std::move(next), max_edges, fn);
    occupied.erase(h);
    tree.remove(e);
  }
}

}  // namespace detail

/// Calls fn once for every monotone tree rooted at (0,0) with at most
/// max_edges edges. Each candidate edge, once passed over, stays excluded in
/// that branch, so every tree is produced exactly once.
template <class Fn>
void for_each_monotone_tree(std::size_t max_edges, Fn&& fn) {
  if (max_edges > kMaxEnumerationEdges)
    throw ConfigError("enumerate_monotone_trees: max_edges " + std::to_string(max_edges) + " exceeds the guard of " +
                      std::to_string(kMaxEnumerationEdges));
  const Vertex root{0, 0};
  MonotoneTree tree(root);
  std::set<Vertex> occupied{root};
  detail::grow_trees(tree, occupied, {{root, Dir::Right}, {root, Dir::Left}}, max_edges, fn);
}

inline std::vector<MonotoneTree> enumerate_monotone_trees(std::size_t max_edges) {
  std::vector<MonotoneTree> out;
  for_each_monotone_tree(max_edges, [&](const MonotoneTree& t) { out.push_back(t); });
  return out;
}

struct ShellCheckSummary {
  std::size_t max_edges = 0;
  std::uint64_t trees = 0;
  bool pass = true;
  std::vector<MonotoneTree> counterexamples;  // first few failures
};

inline ShellCheckSummary check_all_shells(std::size_t max_edges) {
  ShellCheckSummary s;
  s.max_edges = max_edges;
  for_each_monotone_tree(max_edges, [&](const MonotoneTree& t) {
    ++s.trees;
    if (!shell_identity_check(t)) {
      s.pass = false;
      if (s.counterexamples.size() < 8) s.counterexamples.push_back(t);
    }
  });
  return s;
}

// ---------------------------------------------------------------------------
// Slim levels

struct SlimParams {
  double D = std::numeric_limits<double>::infinity();
  double delta = 0.5;
  double beta_hat = 0.0;
};

/// Levels 1..height where 0 < |T^n| < D.
inline std::vector<std::int64_t> slim_levels(const MonotoneTree& tree, const SlimParams& params) {
  const auto counts = level_counts(tree);
  std::vector<std::int64_t> out;
  for (std::size_t n = 1; n < counts.size(); ++n)
    if (counts[n] > 0 && static_cast<double>(counts[n]) < params.D) out.push_back(static_cast<std::int64_t>(n));
  return out;
}

// ---------------------------------------------------------------------------
// Flanks

/// Lattice points of the closed triangle abc with y >= 0.
inline std::vector<Vertex> triangle_points(const Vertex& a, const Vertex& b, const Vertex& c) {
  const auto cross = [](const Vertex& o, const Vertex& p, const Vertex& q) {
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
  };
  const std::int64_t x0 = std::min({a.x, b.x, c.x});
  const std::int64_t x1 = std::max({a.x, b.x, c.x});
  const std::int64_t y0 = std::max<std::int64_t>(0, std::min({a.y, b.y, c.y}));
  const std::int64_t y1 = std::max({a.y, b.y, c.y});
  std::vector<Vertex> out;
  for (std::int64_t y = y0; y <= y1; ++y) {
    for (std::int64_t x = x0; x <= x1; ++x) {
      const Vertex p{x, y};
      if (!is_lattice_vertex(p)) continue;
      const std::int64_t d1 = cross(a, b, p);
      const std::int64_t d2 = cross(b, c, p);
      const std::int64_t d3 = cross(c, a, p);
      const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
      const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
      if (!(has_neg && has_pos)) out.push_back(p);
    }
  }
  return out;
}

struct FlankInfo {
  std::int64_t n = 0;
  Vertex left;   // l_n
  Vertex right;  // r_n
  std::int64_t slice_size = 0;
  bool contiguous = true;
  double max_distance = 0.0;  // max of the two flank times
  std::vector<Vertex> triangle;
};

/// Flanking vertices of the level-n slice of root's tree, their distances,
/// and the lattice triangle on l_n, r_n and l_n + (|slice|+1) * (1,1).
inline FlankInfo flanks(const Forest& forest, const Vertex& root, std::int64_t n) {
  const Window& w = forest.window();
  if (!w.contains_level(n)) throw ConfigError("flanks: level " + std::to_string(n) + " outside window");
  const MonotoneTree tree = tree_of(forest, root);
  std::vector<std::int64_t> xs;
  if (n == root.y) xs.push_back(root.x);
  for (const Edge& e : tree.edges())
    if (level(e) == n) xs.push_back(head(e).x);
  if (xs.empty()) throw ConfigError("flanks: tree of " + to_string(root) + " is empty at level " + std::to_string(n));
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  FlankInfo f;
  f.n = n;
  f.left = {*lo - 2, n};
  f.right = {*hi + 2, n};
  if (f.right.x - f.left.x >= w.period())
    throw ConfigError("flanks: level-" + std::to_string(n) + " slice wraps around the window");
  f.slice_size = static_cast<std::int64_t>(xs.size());
  f.contiguous = (*hi - *lo) / 2 + 1 == f.slice_size;
  f.max_distance = std::max(forest.time(f.left), forest.time(f.right));
  const Vertex apex{f.left.x + f.slice_size + 1, f.left.y + f.slice_size + 1};
  f.triangle = triangle_points(f.left, f.right, apex);
  return f;
}

struct FlankBoundReport {
  std::int64_t n = 0;
  double kappa = 0.0;
  std::size_t samples = 0;
  std::size_t exceed = 0;
  double threshold = 0.0;  // kappa * 2^(n+1)
  double frequency = 0.0;
  double upper = 1.0;  // 99% one-sided upper confidence bound
  double bound = 0.0;  // 1/kappa + 0.05
  bool pass = false;
};

/// Empirical frequency of {distance > kappa * 2^(n+1)} against 1/kappa.
inline FlankBoundReport flank_bound_test(const std::vector<double>& distances, std::int64_t n, double kappa) {
  if (!(kappa > 1.0)) throw ConfigError("flank_bound_test: kappa must exceed 1");
  if (distances.size() < 100) throw ConfigError("flank_bound_test: need at least 100 samples");
  FlankBoundReport r;
  r.n = n;
  r.kappa = kappa;
  r.samples = distances.size();
  r.threshold = kappa * std::ldexp(1.0, static_cast<int>(n + 1));
  r.exceed = static_cast<std::size_t>(
      std::count_if(distances.begin(), distances.end(), [&](double d) { return d > r.threshold; }));
  r.frequency = static_cast<double>(r.exceed) / static_cast<double>(r.samples);
  r.upper = binomial_upper_bound(r.exceed, r.samples, 0.01);
  r.bound = 1.0 / kappa + 0.05;
  r.pass = r.upper <= r.bound;
  return r;
}

// ---------------------------------------------------------------------------
// Coverage and tails

/// Every level 1..M is split among the trees with nothing left over: the sum
/// over roots of |T^m(root)|, counted by walking each tree, equals W.
inline bool coverage_partition_check(const Forest& forest) {
  const Window& w = forest.window();
  std::vector<std::int64_t> per_level(static_cast<std::size_t>(w.height()) + 1, 0);
  for (std::int64_t i = 0; i < w.width(); ++i) {
    const MonotoneTree t = tree_of(forest, w.vertex_at(0, i));
    for (const Edge& e : t.edges()) ++per_level[static_cast<std::size_t>(level(e))];
  }
  for (std::int64_t m = 1; m <= w.height(); ++m)
    if (per_level[static_cast<std::size_t>(m)] != w.width()) return false;
  return true;
}

struct SurvivalPoint {
  std::int64_t level = 0;
  Proportion p;  // P(h >= level) with a 95% interval
};

/// Empirical P(h >= n). Censored heights count as reaching every level up to
/// the cap and are excluded above it.
inline std::vector<SurvivalPoint> tail_height_estimate(const std::vector<TreeHeight>& heights,
                                                       const std::vector<std::int64_t>& levels, double alpha = 0.05) {
  std::vector<SurvivalPoint> out;
  for (std::int64_t n : levels) {
    std::uint64_t hit = 0;
    std::uint64_t total = 0;
    for (const TreeHeight& h : heights) {
      if (h.censored && n > h.value) continue;
      ++total;
      hit += h.value >= n;
    }
    out.push_back({n, binomial_interval(hit, total, alpha)});
  }
  return out;
}

struct MarkovCheck {
  double threshold = 0.0;
  double frequency = 0.0;    // P(X > D)
  double lower = 0.0;        // 99% one-sided lower bound on the frequency
  double mean_bound = 0.0;   // (mean + 3 SE) / D
  bool pass = false;
};

/// Markov's inequality on the sample itself: P(X > D) <= E[X] / D.
inline MarkovCheck markov_check(const std::vector<double>& xs, double threshold) {
  MarkovCheck c;
  c.threshold = threshold;
  const MeanEstimate m = mean_estimate(xs);
  const auto exceed = static_cast<std::uint64_t>(std::count_if(xs.begin(), xs.end(), [&](double x) { return x > threshold; }));
  c.frequency = xs.empty() ? 0.0 : static_cast<double>(exceed) / static_cast<double>(xs.size());
  c.lower = xs.empty() ? 0.0
                       : boost::math::binomial_distribution<>::find_lower_bound_on_p(static_cast<double>(xs.size()),
                                                                                     static_cast<double>(exceed), 0.01);
  c.mean_bound = (m.mean + 3.0 * m.std_error) / threshold;
  c.pass = c.lower <= c.mean_bound;
  return c;
}

}  // namespace sidla
