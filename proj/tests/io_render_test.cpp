#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>

#include "sidla/fpp.hpp"
#include "sidla/io.hpp"
#include "sidla/render.hpp"
#include "sidla/sidla.hpp"

using namespace sidla;

namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Io, RealsRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(2.0), "2");
  for (double v : {0.1, 1.0 / 3, 12345.678901234567, 5e-324, 1.7976931348623157e308})
    EXPECT_EQ(std::strtod(format_real(v).c_str(), nullptr), v);
}

TEST(Io, SnapshotRoundTrip) {
  const Window w(5, 4);
  const GeodesicForest f = build_forest(WeightField(12, WeightProfile::Stretch, w));
  const std::string text = forest_snapshot_json(f, {"stretch", 12, "dist"});
  const Snapshot s = parse_forest_snapshot(text);
  EXPECT_EQ(s.forest, f);
  EXPECT_EQ(s.meta.seed, 12u);
  EXPECT_EQ(s.meta.profile, "stretch");
  EXPECT_EQ(forest_snapshot_json(s.forest, s.meta), text);
  EXPECT_EQ(count_of(text, "\"x\":"), w.vertex_count() - 5);
}

TEST(Io, SnapshotListsVerticesByLevelThenX) {
  const GeodesicForest f = build_forest(WeightField(1, WeightProfile::Eden, Window(2, 1)));
  const std::string text = forest_snapshot_json(f, {"eden", 1, "dist"});
  EXPECT_LT(text.find("{\"x\":1,\"y\":1"), text.find("{\"x\":3,\"y\":1"));
  EXPECT_EQ(text.find("\"y\":0"), std::string::npos);
  EXPECT_NE(text.find("\"window\":{\"W\":2,\"M\":1}"), std::string::npos);
}

TEST(Io, ParticleSnapshotUsesOccupancyTime) {
  const SidlaState s = run_until_covered(Window(3, 2), 4);
  const std::string text = forest_snapshot_json(s.forest, {"stretch", 4, "occupancy_time"});
  EXPECT_NE(text.find("\"occupancy_time\":"), std::string::npos);
  const Snapshot back = parse_forest_snapshot(text);
  EXPECT_EQ(back.meta.time_field, "occupancy_time");
  EXPECT_EQ(back.forest, s.forest);
}

TEST(Io, EventLogQuotesEdges) {
  const SidlaState s = run_until_covered(Window(2, 1), 3, {Engine::Literal});
  const std::string csv = event_log_csv(s);
  EXPECT_EQ(csv.rfind("site_x,time,outcome,edge\n", 0), 0u);
  const std::regex row(R"(^(0|2),[0-9.e+-]+,(extend|vanish),"-?[0-9]+,-?[0-9]+,[LR]"$)");
  std::size_t rows = 0;
  std::size_t start = csv.find('\n') + 1;
  while (start < csv.size()) {
    const std::size_t end = csv.find('\n', start);
    EXPECT_TRUE(std::regex_match(csv.substr(start, end - start), row)) << csv.substr(start, end - start);
    ++rows;
    start = end + 1;
  }
  EXPECT_EQ(rows, s.ring_log.size());
}

TEST(Io, GapsCsv) {
  const Window w(3, 2);
  EXPECT_EQ(gaps_csv({{0.5, 1.25}, {}, {2.0}}, w), "site_x,gap\n0,0.5\n0,1.25\n4,2\n");
}

TEST(Io, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "sidla_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "sub" / "out.txt";
  atomic_write(path, "abc");
  atomic_write(path, "defg");
  EXPECT_EQ(read_file(path), "defg");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_THROW(read_file(dir / "missing"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Render, OneSegmentPerTreeEdge) {
  const Window w(6, 4);
  const GeodesicForest f = build_forest(WeightField(5, WeightProfile::Stretch, w));
  const std::string svg = render_svg(f);
  EXPECT_EQ(count_of(svg, "<line "), w.vertex_count() - 6);
  EXPECT_EQ(count_of(svg, "<circle "), 6u);
  EXPECT_EQ(render_svg(f), svg);
  EXPECT_EQ(count_of(render_svg(f, {Vertex{0, 0}, 8.0, 2}), "<line "), 12u);
}

TEST(Render, HighlightedTreeIsRed) {
  const Window w(6, 4);
  const GeodesicForest f = build_forest(WeightField(5, WeightProfile::Stretch, w));
  const MonotoneTree t = tree_of(f, {0, 0});
  const std::string svg = render_svg(f, {Vertex{0, 0}, 10.0, -1});
  // The origin's circle plus one line per tree edge.
  EXPECT_EQ(count_of(svg, "#ff0000"), t.edge_count() + 1);
  if (t.contains({{0, 0}, Dir::Left})) {
    // Drawn from the canonical tail, which for (0,0) is itself.
    EXPECT_NE(svg.find("<line x1=\"0\" y1=\"0\" x2=\"-10\" y2=\"10\" stroke=\"#ff0000\"/>"), std::string::npos);
  }
  for (std::int64_t x = 2; x < 12; x += 2) EXPECT_NE(root_colour(x), "#ff0000");
  EXPECT_EQ(count_of(render_svg(f, {std::nullopt, 10.0, -1}), "#ff0000"), 0u);
}

TEST(Render, WellFormedXml) {
  const std::string svg = render_svg(build_forest(WeightField(2, WeightProfile::Eden, Window(4, 3))));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count_of(svg, "<svg "), 1u);
  EXPECT_EQ(count_of(svg, "</svg>"), 1u);
  EXPECT_EQ(count_of(svg, "<g "), count_of(svg, "</g>"));
  EXPECT_EQ(count_of(svg, "<"), count_of(svg, ">"));
  // Every element that is not self-closing is closed; the declaration is not an element.
  EXPECT_EQ(count_of(svg, "<") - count_of(svg, "/>") - count_of(svg, "</") - 1, count_of(svg, "</"));
}
