#pragma once

// Direct simulation of the stretched internal-DLA particle system. Each
// boundary site carries a rate-1 Poisson clock; a ring releases a particle
// that walks up its own tree by fair coin flips, adds the first edge it steps
// across if the edge's head is free, and vanishes otherwise.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sidla/error.hpp"
#include "sidla/forest.hpp"
#include "sidla/lattice.hpp"
#include "sidla/random.hpp"

namespace sidla {

struct RingEvent {
  Vertex site;
  double time = 0.0;
};

enum class Outcome : std::uint8_t { Extend, Vanish };

inline const char* to_string(Outcome o) { return o == Outcome::Extend ? "extend" : "vanish"; }

/// Result of one particle walk. `edge` is the added edge on Extend and the
/// edge whose step failed on Vanish; `above_cap` marks a step past level M.
struct WalkOutcome {
  Outcome outcome = Outcome::Vanish;
  Edge edge;
  bool above_cap = false;
};

struct LoggedRing {
  RingEvent ring;
  WalkOutcome result;
};

struct SidlaState {
  explicit SidlaState(const Window& w) : forest(w), censored(static_cast<std::size_t>(w.width()), 0) {}

  Forest forest;  // times are occupancy times
  double clock = 0.0;
  std::vector<LoggedRing> ring_log;
  std::vector<char> censored;  // per boundary site: tree touched the cap
  bool keep_log = true;

  const Window& window() const { return forest.window(); }

  std::size_t censored_count() const {
    std::size_t n = 0;
    for (char c : censored) n += c != 0;
    return n;
  }

  /// Applies a walk outcome at the ring's time and logs it.
  void apply(const RingEvent& ring, const WalkOutcome& result) {
    const Window& w = window();
    const auto site = static_cast<std::int32_t>(w.site_index(ring.site));
    if (result.outcome == Outcome::Extend) {
      const Vertex h = w.canonical(head(result.edge));
      forest.assign(h, site, result.edge.dir, ring.time);
      if (h.y == w.height()) censored[static_cast<std::size_t>(site)] = 1;
    }
    if (result.above_cap) censored[static_cast<std::size_t>(site)] = 1;
    if (keep_log) ring_log.push_back({ring, result});
  }
};

/// Superposition of the W unit-rate site clocks: one Exp(W) gap, uniform site.
inline RingEvent next_ring(SidlaState& state, CounterStream& clock) {
  const Window& w = state.window();
  state.clock += clock.exponential(static_cast<double>(w.width()));
  const auto site = static_cast<std::int64_t>(clock.below(static_cast<std::uint64_t>(w.width())));
  return {w.vertex_at(0, site), state.clock};
}

/// Fair coins drawn from a counter stream.
class CoinStream {
 public:
  explicit CoinStream(std::uint64_t seed) : stream_(seed, Domain::Coin) {}
  Dir operator()() { return stream_.coin() ? Dir::Right : Dir::Left; }

 private:
  CounterStream stream_;
};

/// One particle released at `root`. `coin` is any callable returning a Dir.
template <class CoinSource>
WalkOutcome walk_particle(const SidlaState& state, const Vertex& root, CoinSource&& coin) {
  const Forest& f = state.forest;
  const Window& w = f.window();
  const std::int32_t site = static_cast<std::int32_t>(w.site_index(root));
  Vertex current = w.canonical(root);
  for (;;) {
    const Edge e{current, coin()};
    const Vertex a = head(e);
    if (a.y > w.height()) return {Outcome::Vanish, e, true};
    if (f.root_site(a) == site && f.parent(a) == e.dir) {
      current = w.canonical(a);
      continue;
    }
    if (!f.occupied(a)) return {Outcome::Extend, e, false};
    return {Outcome::Vanish, e, false};
  }
}

enum class Engine {
  Literal,        // every ring and every particle walk
  RejectionFree,  // only the rings that extend a tree
};

struct RunOptions {
  Engine engine = Engine::RejectionFree;
  bool keep_log = true;
  /// Literal engine ring budget; 0 selects 10^4 * W * M.
  std::uint64_t max_rings = 0;
};

namespace detail {

inline SidlaState run_literal(const Window& w, std::uint64_t seed, const RunOptions& opt) {
  SidlaState state(w);
  state.keep_log = opt.keep_log;
  CounterStream clock(seed, Domain::Clock);
  CoinStream coin(seed);
  const std::uint64_t limit =
      opt.max_rings != 0 ? opt.max_rings : 10000ULL * static_cast<std::uint64_t>(w.width() * w.height());
  std::uint64_t rings = 0;
  while (!state.forest.covered()) {
    if (++rings > limit)
      throw SimulationLimit("run_until_covered: " + std::to_string(limit) + " rings without covering W=" +
                            std::to_string(w.width()) + " M=" + std::to_string(w.height()) + " (" +
                            std::to_string(state.forest.occupied_count()) + "/" +
                            std::to_string(w.vertex_count()) + " vertices)");
    const RingEvent ring = next_ring(state, clock);
    state.apply(ring, walk_particle(state, ring.site, coin));
  }
  return state;
}

// Between state changes, an extendable edge e of any tree fires at rate
// 2^-h(e): the ring rate of its site (1) times the probability of the coin
// sequence leading to it. Vanishing rings do not change the state and are
// skipped.
class ExtensionQueue {
 public:
  explicit ExtensionQueue(const Window& w)
      : w_(w),
        by_level_(static_cast<std::size_t>(w.height()) + 1),
        slot_(w.vertex_count() * 2, -1) {}

  void add(const Edge& e) {
    const std::size_t id = key(e);
    if (slot_[id] >= 0) return;
    auto& bucket = by_level_[static_cast<std::size_t>(level(e))];
    slot_[id] = static_cast<std::int64_t>(bucket.size());
    bucket.push_back(id);
  }

  void remove(const Edge& e) {
    const std::size_t id = key(e);
    const std::int64_t pos = slot_[id];
    if (pos < 0) return;
    auto& bucket = by_level_[static_cast<std::size_t>(level(e))];
    const std::size_t last = bucket.back();
    bucket[static_cast<std::size_t>(pos)] = last;
    slot_[last] = pos;
    bucket.pop_back();
    slot_[id] = -1;
  }

  double total_rate() const {
    double r = 0.0;
    for (std::size_t h = 1; h < by_level_.size(); ++h)
      if (!by_level_[h].empty()) r += std::ldexp(static_cast<double>(by_level_[h].size()), -static_cast<int>(h));
    return r;
  }

  /// Picks a level with probability proportional to count * 2^-h, then a
  /// uniform edge within it.
  Edge pick(double total, CounterStream& choice) const {
    double u = choice.uniform() * total;
    std::size_t chosen = 0;
    for (std::size_t h = 1; h < by_level_.size(); ++h) {
      if (by_level_[h].empty()) continue;
      chosen = h;
      const double r = std::ldexp(static_cast<double>(by_level_[h].size()), -static_cast<int>(h));
      if (u < r) break;
      u -= r;
    }
    const auto& bucket = by_level_[chosen];
    const std::size_t id = bucket[choice.below(bucket.size())];
    return {w_.vertex_at(id / 2), static_cast<Dir>(id % 2)};
  }

 private:
  std::size_t key(const Edge& e) const { return w_.index(e.tail) * 2 + static_cast<std::size_t>(e.dir); }

  Window w_;
  std::vector<std::vector<std::size_t>> by_level_;
  std::vector<std::int64_t> slot_;
};

inline SidlaState run_rejection_free(const Window& w, std::uint64_t seed, const RunOptions& opt) {
  SidlaState state(w);
  state.keep_log = opt.keep_log;
  CounterStream clock(seed, Domain::Clock);
  CounterStream choice(seed, Domain::Choice);
  ExtensionQueue queue(w);
  for (std::int64_t i = 0; i < w.width(); ++i)
    for (Dir d : kDirs) queue.add({w.vertex_at(0, i), d});

  while (!state.forest.covered()) {
    const double total = queue.total_rate();
    if (total <= 0.0) throw SimulationLimit("run_until_covered: no extendable edge left before coverage");
    state.clock += clock.exponential(total);
    const Edge e = queue.pick(total, choice);
    const Vertex v = w.canonical(head(e));
    const Vertex root{2 * static_cast<std::int64_t>(state.forest.root_site(e.tail)), 0};
    state.apply({root, state.clock}, {Outcome::Extend, e, false});
    for (Dir d : kDirs) queue.remove({w.canonical(predecessor(v, d)), d});
    if (v.y < w.height())
      for (Dir d : kDirs)
        if (!state.forest.occupied(head(Edge{v, d}))) queue.add({v, d});
  }
  return state;
}

}  // namespace detail

/// Runs until every vertex with y <= M is occupied. Trees that reach level M
/// are flagged censored.
inline SidlaState run_until_covered(const Window& w, std::uint64_t seed, const RunOptions& opt = {}) {
  return opt.engine == Engine::Literal ? detail::run_literal(w, seed, opt) : detail::run_rejection_free(w, seed, opt);
}

}  // namespace sidla
