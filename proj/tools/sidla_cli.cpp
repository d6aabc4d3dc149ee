// sidla: sampling, simulation, coupling checks, statistics and rendering for
// the stretched IDLA model on a cyclic lattice window.
//
// Exit codes: 0 success, 1 configuration error, 2 verification failure,
// 3 internal fault.

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sidla/analysis.hpp"
#include "sidla/coupling.hpp"
#include "sidla/fpp.hpp"
#include "sidla/io.hpp"
#include "sidla/render.hpp"
#include "sidla/sidla.hpp"
#include "sidla/stats.hpp"

namespace fs = std::filesystem;
using namespace sidla;

namespace {

constexpr double kAlpha = 0.01;  // significance for every statistical verdict

struct Config {
  std::uint64_t seed = 1;
  std::int64_t width = 64;
  std::int64_t height = 32;
  std::string profile = "stretch";
  std::size_t replicas = 1;
  std::string out = "out";
  unsigned threads = 0;

  double horizon_factor = 1.5;
  double gap_begin = 0.0;
  std::size_t gaps_per_site = 16;
  std::size_t max_edges = 8;
  std::string engine = "fast";
  std::string source = "fpp";
  std::string highlight_root = "0";
  double scale = 8.0;
  std::int64_t max_level = -1;

  Window window() const { return Window(width, height); }
  WeightProfile weight_profile() const { return parse_profile(profile); }
  std::uint64_t replica_seed(std::size_t r) const { return seed + r; }

  std::string stem(const std::string& cmd, std::uint64_t s) const {
    return fmt::format("{}_{}_W{}_M{}_seed{}", cmd, profile, width, height, s);
  }
  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

Engine parse_engine(const std::string& s) {
  if (s == "literal") return Engine::Literal;
  if (s == "fast") return Engine::RejectionFree;
  throw ConfigError("unknown engine '" + s + "' (expected literal or fast)");
}

/// Runs fn(0..n-1) on a pool of worker threads. Results must be written to
/// per-index slots so the output does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_common(const Config& c) {
  (void)c.window();
  (void)c.weight_profile();
  if (c.replicas < 1) throw ConfigError("--replicas must be at least 1");
}

std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

// ---------------------------------------------------------------------------

int cmd_fpp(const Config& c) {
  check_common(c);
  const Window w = c.window();
  std::vector<std::size_t> censored(c.replicas);
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const std::uint64_t s = c.replica_seed(r);
    const GeodesicForest f = build_forest(WeightField(s, c.weight_profile(), w));
    for (const TreeHeight& h : root_heights(f)) censored[r] += h.censored;
    atomic_write(c.path(c.stem("fpp", s) + ".json"), forest_snapshot_json(f, {c.profile, s, "dist"}));
  });
  for (std::size_t r = 0; r < c.replicas; ++r)
    fmt::print("fpp seed={} W={} M={} profile={} vertices={} censored={} file={}\n", c.replica_seed(r), c.width,
               c.height, c.profile, w.vertex_count() - static_cast<std::size_t>(w.width()), censored[r],
               c.path(c.stem("fpp", c.replica_seed(r)) + ".json").string());
  return 0;
}

int cmd_sidla(const Config& c) {
  check_common(c);
  const Window w = c.window();
  const Engine engine = parse_engine(c.engine);
  struct Summary {
    std::size_t rings = 0;
    std::size_t censored = 0;
    double time = 0.0;
    std::int64_t level_one = 0;
  };
  std::vector<Summary> out(c.replicas);
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const std::uint64_t s = c.replica_seed(r);
    const SidlaState state = run_until_covered(w, s, {engine, true});
    if (!coverage_partition_check(state.forest))
      throw VerificationError(fmt::format("sidla seed={}: covered state is not a partition", s));
    out[r].rings = state.ring_log.size();
    out[r].censored = state.censored_count();
    out[r].time = state.clock;
    for (const Vertex& root : level_vertices(w, 0)) out[r].level_one += level_profile(state.forest, root, 1);
    const std::string stem = c.stem("sidla", s);
    atomic_write(c.path(stem + ".json"), forest_snapshot_json(state.forest, {c.profile, s, "occupancy_time"}));
    atomic_write(c.path(stem + "_events.csv"), event_log_csv(state));
  });
  for (std::size_t r = 0; r < c.replicas; ++r)
    fmt::print("sidla seed={} W={} M={} engine={} rings={} cover_time={} level1={} censored={}\n", c.replica_seed(r),
               c.width, c.height, c.engine, out[r].rings, format_real(out[r].time), out[r].level_one, out[r].censored);
  return 0;
}

std::string coupling_json(const CouplingReport& r, const Config& c, std::uint64_t s) {
  nlohmann::ordered_json j;
  j["window"] = {{"W", c.width}, {"M", c.height}};
  j["profile"] = c.profile;
  j["seed"] = s;
  j["horizon"] = r.horizon;
  j["forest_equal"] = r.forest_equal;
  j["edges_equal"] = r.edges_equal;
  j["times_equal"] = r.times_equal;
  j["mismatched_vertices"] = r.mismatched_vertices;
  j["rings"] = r.rings;
  j["extends"] = r.extends;
  j["repeat_extends"] = r.repeat_extends;
  j["censored"] = r.censored_count;
  j["gap_begin"] = c.gap_begin;
  j["gaps"] = r.gap_sample.size();
  return j.dump(2) + "\n";
}

int cmd_couple(const Config& c) {
  check_common(c);
  const Window w = c.window();
  CouplingOptions opt;
  opt.profile = c.weight_profile();
  opt.horizon_factor = c.horizon_factor;
  opt.gap_begin = c.gap_begin;
  opt.gaps_per_site = c.gaps_per_site;
  if (!(opt.horizon_factor >= 1.0))
    throw ConfigError(fmt::format("--horizon-factor {} puts the horizon below the coverage time", c.horizon_factor));

  std::vector<CouplingReport> reports(c.replicas);
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const std::uint64_t s = c.replica_seed(r);
    reports[r] = verify_coupling(s, w, opt);
    const std::string stem = c.stem("couple", s);
    atomic_write(c.path(stem + ".json"), coupling_json(reports[r], c, s));
    atomic_write(c.path(stem + "_gaps.csv"), gaps_csv(reports[r].site_gaps, w));
  });

  std::size_t equal = 0;
  std::vector<double> pooled;
  std::vector<std::vector<double>> sequences;
  for (std::size_t r = 0; r < c.replicas; ++r) {
    const CouplingReport& rep = reports[r];
    equal += rep.forest_equal;
    pooled.insert(pooled.end(), rep.gap_sample.begin(), rep.gap_sample.end());
    sequences.insert(sequences.end(), rep.site_gaps.begin(), rep.site_gaps.end());
    fmt::print("couple seed={} forest_equal={} mismatched={} rings={} extends={} repeat_extends={} censored={}\n",
               c.replica_seed(r), rep.forest_equal, rep.mismatched_vertices, rep.rings, rep.extends,
               rep.repeat_extends, rep.censored_count);
  }
  bool pass = equal == c.replicas;
  fmt::print("couple forest_equal={}/{} {}\n", equal, c.replicas, verdict(pass));
  if (pooled.size() >= 10) {
    const TestResult ks = ks_test_exp1(pooled);
    const MeanEstimate m = mean_estimate(pooled);
    const Autocorrelation ac = lag1_autocorrelation(sequences);
    fmt::print("couple gaps n={} mean={:.6f} se={:.6f} ks_D={:.6g} ks_p={:.6g} lag1_r={:.6g} {}\n", pooled.size(),
               m.mean, m.std_error, ks.statistic, ks.p_value, ac.r, verdict(ks.p_value > kAlpha));
    pass = pass && ks.p_value > kAlpha;
  }
  if (!pass) throw VerificationError("coupling verification failed");
  return 0;
}

int cmd_shells(const Config& c) {
  const ShellCheckSummary s = check_all_shells(c.max_edges);
  if (s.pass) {
    fmt::print("SHELL-IDENTITY PASS k={} trees={}\n", s.max_edges, s.trees);
    return 0;
  }
  fmt::print("SHELL-IDENTITY FAIL k={} trees={}\n", s.max_edges, s.trees);
  for (const MonotoneTree& t : s.counterexamples) {
    std::string edges;
    for (const Edge& e : t.edges()) edges += " " + to_string(e);
    fmt::print("counterexample sum={} edges:{}\n", shell_sum(shell_profile(t)).str(), edges);
  }
  throw VerificationError("shell identity violated");
}

int cmd_stats(const Config& c) {
  check_common(c);
  const Window w = c.window();
  std::vector<std::vector<TreeHeight>> heights(c.replicas);
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    heights[r] = root_heights(build_forest(WeightField(c.replica_seed(r), c.weight_profile(), w)));
  });
  std::vector<TreeHeight> all;
  std::vector<double> truncated;
  for (const auto& hs : heights)
    for (const TreeHeight& h : hs) {
      all.push_back(h);
      truncated.push_back(static_cast<double>(h.value));
    }
  std::vector<std::int64_t> levels;
  for (std::int64_t n = 1; n <= c.height; n *= 2) levels.push_back(n);
  if (levels.back() != c.height) levels.push_back(c.height);

  std::string csv = "level,reached,trials,estimate,lower,upper\n";
  for (const SurvivalPoint& p : tail_height_estimate(all, levels, 0.05))
    csv += fmt::format("{},{},{},{},{},{}\n", p.level, p.p.successes, p.p.trials, format_real(p.p.estimate),
                       format_real(p.p.lower), format_real(p.p.upper));
  const auto file = c.path(fmt::format("{}_r{}.csv", c.stem("stats", c.seed), c.replicas));
  atomic_write(file, csv);

  const MeanEstimate m = mean_estimate(truncated);
  const MarkovCheck mk = markov_check(truncated, static_cast<double>(c.height) / 2);
  fmt::print("stats replicas={} roots={} mean_height={:.6f} se={:.6f} file={}\n", c.replicas, all.size(), m.mean,
             m.std_error, file.string());
  fmt::print("stats markov threshold={} frequency={:.6g} lower={:.6g} bound={:.6g} {}\n", mk.threshold, mk.frequency,
             mk.lower, mk.mean_bound, verdict(mk.pass));
  if (!mk.pass) throw VerificationError("Markov bound violated");
  return 0;
}

int cmd_compare(const Config& c) {
  check_common(c);
  const Window w = c.window();
  const Engine engine = parse_engine(c.engine);
  const auto bins = static_cast<std::size_t>(w.width()) + 1;
  std::vector<std::int64_t> direct_size(c.replicas);
  std::vector<std::int64_t> direct_height(c.replicas);
  std::vector<std::int64_t> fpp_size(c.replicas);
  std::vector<std::int64_t> fpp_height(c.replicas);
  const Vertex origin{0, 0};
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const std::uint64_t s = c.replica_seed(r);
    const SidlaState state = run_until_covered(w, s, {engine, false});
    const MonotoneTree a = tree_of(state.forest, origin);
    direct_size[r] = level_profile(a, 1);
    direct_height[r] = std::min<std::int64_t>(tree_height(a).value, 16);
    const MonotoneTree b = tree_of(build_forest(WeightField(s, c.weight_profile(), w)), origin);
    fpp_size[r] = level_profile(b, 1);
    fpp_height[r] = std::min<std::int64_t>(tree_height(b).value, 16);
  });
  auto histogram = [](const std::vector<std::int64_t>& xs, std::size_t n) {
    std::vector<std::uint64_t> h(n, 0);
    for (std::int64_t x : xs) ++h[static_cast<std::size_t>(x)];
    return h;
  };
  const auto hs_a = histogram(direct_size, bins);
  const auto hs_b = histogram(fpp_size, bins);
  const auto hh_a = histogram(direct_height, 17);
  const auto hh_b = histogram(fpp_height, 17);
  const TestResult size_test = chi_square_compare(hs_a, hs_b);
  const TestResult height_test = chi_square_compare(hh_a, hh_b);

  std::string csv = "quantity,value,sidla,fpp\n";
  for (std::size_t i = 0; i < bins; ++i)
    if (hs_a[i] + hs_b[i] > 0) csv += fmt::format("level1_size,{},{},{}\n", i, hs_a[i], hs_b[i]);
  for (std::size_t i = 0; i < hh_a.size(); ++i)
    if (hh_a[i] + hh_b[i] > 0) csv += fmt::format("height_min16,{},{},{}\n", i, hh_a[i], hh_b[i]);
  atomic_write(c.path(fmt::format("{}_r{}.csv", c.stem("compare", c.seed), c.replicas)), csv);

  const bool pass_size = size_test.p_value > kAlpha;
  const bool pass_height = height_test.p_value > kAlpha;
  fmt::print("compare level1_size chi2={:.6g} p={:.6g} {}\n", size_test.statistic, size_test.p_value,
             verdict(pass_size));
  fmt::print("compare height_min16 chi2={:.6g} p={:.6g} {}\n", height_test.statistic, height_test.p_value,
             verdict(pass_height));
  if (!(pass_size && pass_height)) throw VerificationError("sidla and fpp histograms differ");
  return 0;
}

int cmd_render(const Config& c) {
  Forest forest = [&]() -> Forest {
    if (c.source == "fpp") return build_forest(WeightField(c.seed, c.weight_profile(), c.window()));
    if (c.source == "sidla") return run_until_covered(c.window(), c.seed, {parse_engine(c.engine), false}).forest;
    return parse_forest_snapshot(read_file(c.source)).forest;
  }();
  RenderOptions opt;
  if (c.highlight_root == "none") {
    opt.highlight_root.reset();
  } else {
    std::int64_t x = 0;
    try {
      x = std::stoll(c.highlight_root);
    } catch (const std::exception&) {
      throw ConfigError("--highlight-root expects an even x coordinate or 'none'");
    }
    if (floor_mod(x, 2) != 0) throw ConfigError("--highlight-root must be an even x coordinate");
    opt.highlight_root = Vertex{x, 0};
  }
  if (!(c.scale > 0)) throw ConfigError("--scale must be positive");
  opt.scale = c.scale;
  opt.max_level = c.max_level;
  const Window& w = forest.window();
  const std::string name = c.source == "fpp" || c.source == "sidla"
                               ? c.stem("render_" + c.source, c.seed) + ".svg"
                               : fs::path(c.source).stem().string() + ".svg";
  const auto file = c.path(name);
  atomic_write(file, render_svg(forest, opt));
  fmt::print("render W={} M={} edges={} file={}\n", w.width(), w.height(),
             w.vertex_count() - static_cast<std::size_t>(w.width()), file.string());
  return 0;
}

void add_common(CLI::App* cmd, Config& c) {
  cmd->add_option("--seed", c.seed, "base seed; replica r uses seed + r");
  cmd->add_option("--width", c.width, "boundary sites W (period 2W)");
  cmd->add_option("--height", c.height, "level cap M");
  cmd->add_option("--profile", c.profile, "edge-weight profile: stretch, eden or decreasing");
  cmd->add_option("--replicas", c.replicas, "independent replicas");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Stretched IDLA and first-passage percolation on a lattice window"};
  app.require_subcommand(1);

  auto* fpp = app.add_subcommand("fpp", "sample geodesic forests and write JSON snapshots");
  add_common(fpp, c);

  auto* sim = app.add_subcommand("sidla", "simulate the particle system until the window is covered");
  add_common(sim, c);
  sim->add_option("--engine", c.engine, "literal (every ring) or fast (extending rings only)");

  auto* couple = app.add_subcommand("couple", "build the particle system from an FPP sample and compare");
  add_common(couple, c);
  couple->add_option("--horizon-factor", c.horizon_factor, "horizon as a multiple of the coverage time");
  couple->add_option("--gap-begin", c.gap_begin, "start of the inter-ring gap window");
  couple->add_option("--gaps-per-site", c.gaps_per_site, "gaps sampled per site");

  auto* shells = app.add_subcommand("shells", "check the dyadic shell identity on all small trees");
  shells->add_option("--max-edges", c.max_edges, "largest tree size enumerated");

  auto* stats = app.add_subcommand("stats", "tree-height survival estimates over FPP replicas");
  add_common(stats, c);

  auto* compare = app.add_subcommand("compare", "compare particle-system and FPP tree statistics");
  add_common(compare, c);
  compare->add_option("--engine", c.engine, "literal or fast");

  auto* render = app.add_subcommand("render", "draw a forest as SVG");
  add_common(render, c);
  render->add_option("--source", c.source, "fpp, sidla, or a snapshot JSON path");
  render->add_option("--engine", c.engine, "engine when --source sidla");
  render->add_option("--highlight-root", c.highlight_root, "x of the root drawn in red, or none");
  render->add_option("--scale", c.scale, "pixels per lattice step");
  render->add_option("--max-level", c.max_level, "highest level drawn (negative: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fpp) return cmd_fpp(c);
    if (*sim) return cmd_sidla(c);
    if (*couple) return cmd_couple(c);
    if (*shells) return cmd_shells(c);
    if (*stats) return cmd_stats(c);
    if (*compare) return cmd_compare(c);
    if (*render) return cmd_render(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: malformed snapshot: " << e.what() << "\n";
    return 1;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal fault: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
