#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include "sidla/forest.hpp"
#include "sidla/random.hpp"

namespace sidla {

struct RenderOptions {
  std::optional<Vertex> highlight_root = Vertex{0, 0};
  double scale = 8.0;
  std::int64_t max_level = -1;  // negative: no clipping below the window cap
};

/// Colour of a non-highlighted tree, from a hash of its root.
inline std::string root_colour(std::int64_t root_x) {
  const std::uint64_t h = mix64(static_cast<std::uint64_t>(root_x) ^ 0x7265646e6572ULL);
  // Keep away from pure red so the highlighted tree stays distinct.
  const int r = 40 + static_cast<int>(h % 140);
  const int g = 60 + static_cast<int>((h >> 16) % 170);
  const int b = 60 + static_cast<int>((h >> 32) % 180);
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

/// One line segment per tree edge in lattice coordinates times `scale`, with
/// y pointing up; boundary sites drawn as dots. Edges leaving the period are
/// drawn from their canonical tail.
inline std::string render_svg(const Forest& forest, const RenderOptions& opt = {}) {
  const Window& w = forest.window();
  const double s = opt.scale;
  const std::int64_t top = opt.max_level < 0 ? w.height() : std::min(opt.max_level, w.height());
  const std::int32_t highlight =
      opt.highlight_root ? static_cast<std::int32_t>(w.site_index(*opt.highlight_root)) : kNoRoot;

  const double pad = s;
  const double x0 = -s - pad;
  const double width = (static_cast<double>(w.period()) + 1.0) * s + 2 * pad;
  const double height = static_cast<double>(top) * s + 2 * pad;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
      width, height, x0, -(static_cast<double>(top) * s + pad), width, height);
  out += "<g transform=\"scale(1,-1)\" stroke-width=\"1\" stroke-linecap=\"round\">\n";
  for (std::size_t i = static_cast<std::size_t>(w.width()); i < w.vertex_count(); ++i) {
    const Vertex v = w.vertex_at(i);
    if (v.y > top || !forest.occupied(v)) continue;
    const Vertex tail = w.canonical(predecessor(v, forest.parent(v)));
    const Vertex tip = head(Edge{tail, forest.parent(v)});
    const std::int32_t r = forest.root_site(v);
    const std::string colour = r == highlight ? "#ff0000" : root_colour(2 * static_cast<std::int64_t>(r));
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n", static_cast<double>(tail.x) * s,
                       static_cast<double>(tail.y) * s, static_cast<double>(tip.x) * s, static_cast<double>(tip.y) * s,
                       colour);
  }
  for (std::int64_t i = 0; i < w.width(); ++i) {
    const Vertex root = w.vertex_at(0, i);
    const std::string colour = static_cast<std::int32_t>(i) == highlight ? "#ff0000" : "#000000";
    out += fmt::format("<circle cx=\"{}\" cy=\"0\" r=\"{}\" fill=\"{}\"/>\n", static_cast<double>(root.x) * s, s / 4,
                       colour);
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace sidla
