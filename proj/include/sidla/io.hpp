#pragma once

// File formats: forest snapshots (JSON), ring event logs and gap samples
// (CSV). Writers produce byte-stable text; reals use 17 significant digits.

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sidla/error.hpp"
#include "sidla/forest.hpp"
#include "sidla/sidla.hpp"

namespace sidla {

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return fmt::format("{:.17g}", v);
}

struct SnapshotMeta {
  std::string profile = "stretch";
  std::uint64_t seed = 0;
  std::string time_field = "dist";  // "occupancy_time" for particle-system states
};

/// {window:{W,M}, profile, seed, vertices:[{x,y,<time_field>,parentDir,rootX}]}
/// listing vertices with 1 <= y <= M in (y, x) order.
inline std::string forest_snapshot_json(const Forest& forest, const SnapshotMeta& meta) {
  const Window& w = forest.window();
  std::string out;
  out.reserve(w.vertex_count() * 80);
  out += fmt::format("{{\"window\":{{\"W\":{},\"M\":{}}},\"profile\":\"{}\",\"seed\":{},\"vertices\":[", w.width(),
                     w.height(), meta.profile, meta.seed);
  bool first = true;
  for (std::size_t i = static_cast<std::size_t>(w.width()); i < w.vertex_count(); ++i) {
    const Vertex v = w.vertex_at(i);
    if (!first) out += ',';
    first = false;
    if (!forest.occupied(v)) {
      out += fmt::format("\n{{\"x\":{},\"y\":{},\"{}\":null,\"parentDir\":null,\"rootX\":null}}", v.x, v.y,
                         meta.time_field);
      continue;
    }
    out += fmt::format("\n{{\"x\":{},\"y\":{},\"{}\":{},\"parentDir\":\"{}\",\"rootX\":{}}}", v.x, v.y,
                       meta.time_field, format_real(forest.time(v)), dir_char(forest.parent(v)),
                       forest.root_vertex(v).x);
  }
  out += "\n]}\n";
  return out;
}

struct Snapshot {
  Forest forest;
  SnapshotMeta meta;
};

inline Snapshot parse_forest_snapshot(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const Window w(j.at("window").at("W").get<std::int64_t>(), j.at("window").at("M").get<std::int64_t>());
  Snapshot s{Forest(w), {}};
  s.meta.profile = j.at("profile").get<std::string>();
  s.meta.seed = j.at("seed").get<std::uint64_t>();
  s.meta.time_field = j.at("vertices").empty() || j["vertices"][0].contains("dist") ? "dist" : "occupancy_time";
  for (const auto& v : j.at("vertices")) {
    if (v.at("rootX").is_null()) continue;
    const Vertex vx{v.at("x").get<std::int64_t>(), v.at("y").get<std::int64_t>()};
    const Dir d = v.at("parentDir").get<std::string>() == "L" ? Dir::Left : Dir::Right;
    const auto site = static_cast<std::int32_t>(v.at("rootX").get<std::int64_t>() / 2);
    s.forest.assign(vx, site, d, v.at(s.meta.time_field).get<double>());
  }
  return s;
}

/// site_x,time,outcome,edge -- the edge field is quoted since it contains commas.
inline std::string event_log_csv(const SidlaState& state) {
  std::string out = "site_x,time,outcome,edge\n";
  const Window& w = state.window();
  for (const LoggedRing& r : state.ring_log) {
    out += fmt::format("{},{},{},\"{}\"\n", w.canonical(r.ring.site).x, format_real(r.ring.time),
                       to_string(r.result.outcome), to_string(w.canonical(r.result.edge)));
  }
  return out;
}

inline std::string gaps_csv(const std::vector<std::vector<double>>& site_gaps, const Window& w) {
  std::string out = "site_x,gap\n";
  for (std::size_t s = 0; s < site_gaps.size(); ++s)
    for (double g : site_gaps[s]) out += fmt::format("{},{}\n", w.vertex_at(0, static_cast<std::int64_t>(s)).x, format_real(g));
  return out;
}

/// Writes via a temporary file and rename, so readers never see a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw ConfigError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace sidla
