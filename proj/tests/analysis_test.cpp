#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sidla/analysis.hpp"
#include "sidla/fpp.hpp"

using namespace sidla;

namespace {

const Vertex kOrigin{0, 0};
const Edge kL{kOrigin, Dir::Left};
const Edge kR{kOrigin, Dir::Right};

// Brute-force tree count: grow edge sets one edge at a time and deduplicate.
std::vector<std::size_t> brute_tree_counts(std::size_t max_edges) {
  std::set<std::vector<Edge>> frontier{{}};
  std::vector<std::size_t> counts{1};
  for (std::size_t k = 1; k <= max_edges; ++k) {
    std::set<std::vector<Edge>> next;
    for (const auto& edges : frontier) {
      std::set<Vertex> verts{kOrigin};
      for (const Edge& e : edges) verts.insert(head(e));
      for (const Vertex& u : verts)
        for (Dir d : kDirs) {
          const Edge e{u, d};
          if (verts.count(head(e))) continue;
          auto grown = edges;
          grown.push_back(e);
          std::sort(grown.begin(), grown.end());
          next.insert(grown);
        }
    }
    counts.push_back(counts.back() + next.size());
    frontier = std::move(next);
  }
  return counts;
}

// Forest on W=4, M=3 whose tree at the origin is exactly {(0,0)->(1,1)} at level 1.
GeodesicForest single_vertex_forest() {
  return build_forest(Window(4, 3), [](const Edge& e) {
    if (e == kR) return 0.1;
    if (e == Edge{{2, 0}, Dir::Left} || e == kL) return 10.0;
    if (e.tail == Vertex{1, 1}) return 10.0;
    return 1.0;
  });
}

}  // namespace

TEST(Analysis, LevelProfileAndHeight) {
  const MonotoneTree t(kOrigin, {kR, {{1, 1}, Dir::Left}, {{1, 1}, Dir::Right}, kL});
  EXPECT_EQ(level_profile(t, 0), 1);
  EXPECT_EQ(level_profile(t, 1), 2);
  EXPECT_EQ(level_profile(t, 2), 2);
  EXPECT_EQ(level_profile(t, 3), 0);
  EXPECT_EQ(level_counts(t), (std::vector<std::int64_t>{1, 2, 2}));
  EXPECT_EQ(tree_height(t), (TreeHeight{2, false}));
  EXPECT_EQ(tree_height(t, 2), (TreeHeight{2, true}));
  EXPECT_EQ(tree_height(MonotoneTree(kOrigin)), (TreeHeight{0, false}));
}

TEST(Analysis, ShellExamples) {
  EXPECT_EQ(shell_profile(MonotoneTree(kOrigin)).counts, (std::map<std::int64_t, std::int64_t>{{1, 2}}));
  EXPECT_EQ(shell_profile(MonotoneTree(kOrigin, {kR})).counts, (std::map<std::int64_t, std::int64_t>{{1, 1}, {2, 2}}));
  EXPECT_EQ(shell_profile(MonotoneTree(kOrigin, {kL, kR})).counts, (std::map<std::int64_t, std::int64_t>{{2, 4}}));
  // Shells are measured from the root's level.
  EXPECT_EQ(shell_profile(MonotoneTree({3, 1})).counts, (std::map<std::int64_t, std::int64_t>{{1, 2}}));
}

TEST(Analysis, DyadicArithmetic) {
  EXPECT_EQ(Dyadic::scaled(1, 1) + Dyadic::scaled(1, 1), Dyadic::integer(1));
  EXPECT_EQ(Dyadic::scaled(6, 3), Dyadic::scaled(3, 2));
  EXPECT_EQ(Dyadic::scaled(3, 2).str(), "3/2^2");
  EXPECT_EQ(Dyadic::scaled(1, 200) + Dyadic::scaled(1, 200), Dyadic::scaled(1, 199));
  EXPECT_FALSE(Dyadic::scaled(1, 60) + Dyadic::integer(1) == Dyadic::integer(1));
}

TEST(Analysis, EnumerationMatchesBruteForce) {
  const auto oracle = brute_tree_counts(6);
  EXPECT_EQ(oracle[0], 1u);
  EXPECT_EQ(oracle[1], 3u);
  EXPECT_EQ(oracle[2], 8u);
  for (std::size_t k = 0; k <= 6; ++k) EXPECT_EQ(enumerate_monotone_trees(k).size(), oracle[k]) << "k=" << k;

  std::set<MonotoneTree, bool (*)(const MonotoneTree&, const MonotoneTree&)> seen(
      [](const MonotoneTree& a, const MonotoneTree& b) { return a.edges() < b.edges(); });
  for (const MonotoneTree& t : enumerate_monotone_trees(6)) {
    EXPECT_TRUE(is_monotone_tree(t));
    EXPECT_TRUE(seen.insert(t).second);
  }
}

TEST(Analysis, EnumerationGuard) {
  EXPECT_THROW(enumerate_monotone_trees(kMaxEnumerationEdges + 1), ConfigError);
}

TEST(Analysis, ShellIdentityHoldsForAllSmallTrees) {
  const ShellCheckSummary s = check_all_shells(8);
  EXPECT_TRUE(s.pass);
  EXPECT_EQ(s.trees, enumerate_monotone_trees(8).size());
  EXPECT_TRUE(s.counterexamples.empty());
}

TEST(Analysis, ShellIdentityDetectsBrokenTree) {
  // Not a tree: (1,1)->(2,2) hangs off a vertex the tree never reaches.
  const MonotoneTree t(kOrigin, {kL, {{1, 1}, Dir::Right}});
  EXPECT_FALSE(is_monotone_tree(t));
  EXPECT_FALSE(shell_identity_check(t));
}

TEST(Analysis, ShellsSplitAcrossRootChildren) {
  for (const MonotoneTree& t : enumerate_monotone_trees(7)) {
    const ShellProfile whole = shell_profile(t);
    ShellProfile parts;
    for (Dir d : kDirs) {
      if (!t.contains({kOrigin, d})) {
        ++parts.counts[1];
        continue;
      }
      for (const auto& [i, n] : shell_profile(child_subtree(t, d)).counts) parts.counts[i + 1] += n;
    }
    EXPECT_EQ(whole, parts);
    EXPECT_EQ(child_subtree(t, Dir::Left).edge_count() + child_subtree(t, Dir::Right).edge_count() +
                  t.contains(kL) + t.contains(kR),
              t.edge_count());
  }
}

TEST(Analysis, SlimLevels) {
  const MonotoneTree t(kOrigin, {kR, kL, {{1, 1}, Dir::Right}});
  EXPECT_EQ(slim_levels(t, {}), (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(slim_levels(t, {2.0}), (std::vector<std::int64_t>{2}));
  EXPECT_TRUE(slim_levels(MonotoneTree(kOrigin), {}).empty());
}

TEST(Analysis, TrianglePointCounts) {
  for (std::int64_t k = 1; k <= 6; ++k) {
    const Vertex l{-1, 3};
    const Vertex r{l.x + 2 * k + 2, l.y};
    const Vertex apex{l.x + k + 1, l.y + k + 1};
    const auto pts = triangle_points(l, r, apex);
    // Rows above the base shrink by one point each.
    EXPECT_EQ(static_cast<std::int64_t>(pts.size()), (k + 2) * (k + 3) / 2) << "k=" << k;
    for (const Vertex& p : pts) EXPECT_LE(std::abs(p.x - apex.x), apex.y - p.y);
  }
}

TEST(Analysis, FlanksOfSingleVertexSlice) {
  const GeodesicForest f = single_vertex_forest();
  ASSERT_EQ(tree_of(f, kOrigin), MonotoneTree(kOrigin, {kR}));
  const FlankInfo info = flanks(f, kOrigin, 1);
  EXPECT_EQ(info.left, (Vertex{-1, 1}));
  EXPECT_EQ(info.right, (Vertex{3, 1}));
  EXPECT_EQ(info.slice_size, 1);
  EXPECT_TRUE(info.contiguous);
  EXPECT_EQ(info.max_distance, std::max(f.time({-1, 1}), f.time({3, 1})));
  EXPECT_EQ(info.triangle.size(), 6u);
  EXPECT_THROW(flanks(f, kOrigin, 2), ConfigError);
}

TEST(Analysis, FlanksBracketSlicesInRandomForests) {
  const Window w(33, 8);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const GeodesicForest f = build_forest(WeightField(seed, WeightProfile::Stretch, w));
    const MonotoneTree t = tree_of(f, kOrigin);
    const auto counts = level_counts(t);
    for (std::size_t n = 1; n < counts.size(); ++n) {
      if (counts[n] == 0) continue;
      const FlankInfo info = flanks(f, kOrigin, static_cast<std::int64_t>(n));
      EXPECT_EQ(info.slice_size, counts[n]);
      for (const Edge& e : t.edges()) {
        if (level(e) != static_cast<std::int64_t>(n)) continue;
        EXPECT_LT(info.left.x, head(e).x);
        EXPECT_LT(head(e).x, info.right.x);
      }
      EXPECT_NE(f.root_site(info.left), 0);
      EXPECT_NE(f.root_site(info.right), 0);
    }
  }
}

TEST(Analysis, FlankBoundTest) {
  std::vector<double> low(100, 1.0);
  const FlankBoundReport ok = flank_bound_test(low, 2, 4.0);
  EXPECT_EQ(ok.exceed, 0u);
  EXPECT_DOUBLE_EQ(ok.threshold, 32.0);
  EXPECT_NEAR(ok.upper, 1.0 - std::pow(0.01, 1.0 / 100), 1e-9);
  EXPECT_TRUE(ok.pass);

  std::vector<double> high(100, 1000.0);
  EXPECT_FALSE(flank_bound_test(high, 2, 4.0).pass);
  EXPECT_THROW(flank_bound_test(low, 2, 1.0), ConfigError);
  EXPECT_THROW(flank_bound_test(std::vector<double>(99, 1.0), 2, 4.0), ConfigError);
}

TEST(Analysis, CoveragePartition) {
  const GeodesicForest f = build_forest(WeightField(3, WeightProfile::Eden, Window(7, 5)));
  EXPECT_TRUE(coverage_partition_check(f));
  // Hand (1,1) to a site that does not own its parent: no tree reaches it.
  Forest broken = f;
  broken.assign({1, 1}, (f.root_site({1, 1}) + 2) % 7, f.parent({1, 1}), f.time({1, 1}));
  EXPECT_FALSE(coverage_partition_check(broken));
  EXPECT_EQ(root_heights(f).size(), 7u);
}

TEST(Analysis, TailEstimateHandlesCensoring) {
  const std::vector<TreeHeight> hs{{3, false}, {5, true}, {1, false}};
  const auto pts = tail_height_estimate(hs, {1, 4, 6});
  EXPECT_EQ(pts[0].p.successes, 3u);
  EXPECT_EQ(pts[1].p.successes, 1u);
  EXPECT_EQ(pts[1].p.trials, 3u);
  EXPECT_EQ(pts[2].p.successes, 0u);
  EXPECT_EQ(pts[2].p.trials, 2u);
  EXPECT_LE(pts[1].p.lower, 1.0 / 3);
  EXPECT_GE(pts[1].p.upper, 1.0 / 3);
}

TEST(Analysis, MarkovHoldsOnExponentialSample) {
  CounterStream s(8, Domain::Choice);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(s.exponential(1.0));
  const MarkovCheck c = markov_check(xs, 3.0);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.frequency, std::exp(-3.0), 0.01);
}
