#include "acquaint/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "acquaint/error.hpp"

namespace acquaint {

namespace {

constexpr std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
constexpr std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

void link(SimState& s, Walker w, Vertex v) {
  s.prev[w] = kNoWalker;
  s.next[w] = s.head[v];
  if (s.head[v] != kNoWalker) s.prev[s.head[v]] = w;
  s.head[v] = w;
  ++s.occupancy[v];
}

void unlink(SimState& s, Walker w, Vertex v) {
  if (s.prev[w] != kNoWalker) {
    s.next[s.prev[w]] = s.next[w];
  } else {
    s.head[v] = s.next[w];
  }
  if (s.next[w] != kNoWalker) s.prev[s.next[w]] = s.prev[w];
  --s.occupancy[v];
}

void visit(SimState& s, Vertex v) {
  if (!s.visited[v]) {
    s.visited[v] = 1;
    ++s.visited_count;
  }
}

void mark_met(SimState& s, Walker w) {
  if (s.met_any[w]) return;
  s.met_any[w] = 1;
  --s.never_met;
  if (!s.left_start[w]) --s.lazy_isolated;
}

void mark_moved(SimState& s, Walker w) {
  if (s.left_start[w]) return;
  s.left_start[w] = 1;
  if (!s.met_any[w]) --s.lazy_isolated;
}

void note_pair(SimState& s, Walker a, Walker b) {
  if (a > b) std::swap(a, b);
  if (s.pairs.insert((std::uint64_t{a} << 32) | b).second) {
    ++s.partner_count[a];
    ++s.partner_count[b];
  }
}

// Everyone at v joins one class.
void meet_bucket(SimState& s, Vertex v, std::vector<Walker>& scratch) {
  scratch.clear();
  for (Walker w = s.head[v]; w != kNoWalker; w = s.next[w]) scratch.push_back(w);
  if (scratch.size() < 2) return;
  for (Walker w : scratch) {
    s.classes.unite(scratch.front(), w);
    mark_met(s, w);
  }
  if (!s.track_partners) return;
  const std::uint64_t k = scratch.size();
  if (k * (k - 1) / 2 > kPairCensusCap) {
    s.partners_truncated = true;
    return;
  }
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    for (std::size_t j = i + 1; j < scratch.size(); ++j) note_pair(s, scratch[i], scratch[j]);
  }
}

void check_milestones(SimState& s, const Graph& g) {
  if (!s.sc_time && s.classes.class_count() <= 1) {
    s.sc_time = s.time;
    s.degrees_at_sc = acquaintance_degrees(s);
  }
  if (!s.tau1_time && (s.walker_count() <= 1 || s.classes.singleton_count() == 0)) s.tau1_time = s.time;
  if (!s.tau2_time && s.visited_count == g.vertex_count()) s.tau2_time = s.time;
}

SimState build_state(const Graph& g, std::vector<Vertex> positions, std::uint64_t seed, bool track_partners) {
  const auto n = g.vertex_count();
  const auto w_count = static_cast<Walker>(positions.size());
  SimState s;
  s.seed = seed;
  s.key = make_key(seed);
  s.starts = positions;
  s.positions = std::move(positions);
  s.classes = UnionFind(w_count);
  s.occupancy.assign(n, 0);
  s.head.assign(n, kNoWalker);
  s.next.assign(w_count, kNoWalker);
  s.prev.assign(w_count, kNoWalker);
  s.met_any.assign(w_count, 0);
  s.left_start.assign(w_count, 0);
  s.never_met = w_count;
  s.lazy_isolated = w_count;
  s.track_partners = track_partners;
  if (track_partners) s.partner_count.assign(w_count, 0);
  s.visited.assign(n, 0);
  // Link in reverse so each resident list runs in increasing walker id.
  for (Walker w = w_count; w-- > 0;) {
    require(s.positions[w] < n, ErrorKind::invalid_input, "walker position out of range");
    link(s, w, s.positions[w]);
    visit(s, s.positions[w]);
  }
  std::vector<Walker> scratch;
  for (Vertex v = 0; v < n; ++v) {
    if (s.occupancy[v] >= 2) meet_bucket(s, v, scratch);
  }
  check_milestones(s, g);
  return s;
}

double waiting_time(const Philox4x32::Key& key, Walker w, std::uint64_t jump) {
  const auto r = Philox4x32::generate(
      {w, lo32(jump), static_cast<std::uint32_t>(Domain::continuous_jump), hi32(jump)}, key);
  return -std::log1p(-to_unit(r[0], r[1]));
}

Vertex jump_target(const Graph& g, const Philox4x32::Key& key, Walker w, std::uint64_t jump, Vertex from) {
  const auto r = Philox4x32::generate(
      {w, lo32(jump), static_cast<std::uint32_t>(Domain::continuous_jump), hi32(jump)}, key);
  const auto nbrs = g.out_neighbors(from);
  return nbrs[to_bounded(r[2], r[3], static_cast<std::uint32_t>(nbrs.size()))];
}

void ensure_events(SimState& s) {
  if (s.events_ready) return;
  s.jumps.assign(s.walker_count(), 0);
  for (Walker w = 0; w < s.walker_count(); ++w) s.events.emplace(s.time + waiting_time(s.key, w, 0), w);
  s.events_ready = true;
}

// Processes jumps with time <= until. With `stop` set, returns early once SC
// (and tau2 when `need_tau2`) has been observed, leaving time at that event.
bool advance_events(SimState& s, const Graph& g, double until, bool stop, bool need_tau2) {
  ensure_events(s);
  auto finished = [&] { return s.sc_time && (!need_tau2 || s.tau2_time); };
  if (stop && finished()) return true;
  while (!s.events.empty() && s.events.top().first <= until) {
    const auto [t, w] = s.events.top();
    s.events.pop();
    s.time = t;
    const std::uint64_t j = s.jumps[w]++;
    const Vertex from = s.positions[w];
    const Vertex to = jump_target(g, s.key, w, j, from);
    mark_moved(s, w);
    if (to != from) {
      unlink(s, w, from);
      // Meet whoever is already there.
      if (s.occupancy[to] > 0) {
        const Walker first = s.head[to];
        s.classes.unite(first, w);
        mark_met(s, w);
        const bool census = s.track_partners && s.occupancy[to] <= kPairCensusCap;
        if (s.track_partners && !census) s.partners_truncated = true;
        for (Walker r = first; r != kNoWalker; r = s.next[r]) {
          mark_met(s, r);
          if (census) note_pair(s, w, r);
        }
      }
      link(s, w, to);
      s.positions[w] = to;
      visit(s, to);
    }
    ++s.steps;
    s.events.emplace(t + waiting_time(s.key, w, j + 1), w);
    check_milestones(s, g);
    if (stop && finished()) return true;
  }
  if (std::isfinite(until) && until > s.time) s.time = until;
  return false;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a(std::uint64_t h, const T& value) {
  return fnv1a(h, &value, sizeof(T));
}

}  // namespace

SimState sample_initial(const Graph& g, const InitScheme& scheme, std::uint64_t seed, bool track_partners) {
  const auto n = g.vertex_count();
  std::vector<Vertex> positions;
  switch (scheme.kind) {
    case InitScheme::Kind::poisson: {
      require(scheme.density > 0.0 && std::isfinite(scheme.density), ErrorKind::invalid_parameter,
              "poisson density must be positive");
      const double scale = scheme.density * n / static_cast<double>(g.arc_count());
      for (Vertex v = 0; v < n; ++v) {
        PhiloxStream stream(seed, v, 0, Domain::init);
        std::poisson_distribution<std::uint32_t> count(scale * g.degree(v));
        for (std::uint32_t k = count(stream); k > 0; --k) positions.push_back(v);
      }
      break;
    }
    case InitScheme::Kind::one_per_site:
      positions.resize(n);
      for (Vertex v = 0; v < n; ++v) positions[v] = v;
      break;
    case InitScheme::Kind::fixed_m: {
      require(scheme.count < kNoWalker, ErrorKind::invalid_parameter, "too many walkers");
      PhiloxStream stream(seed, 0xFFFFFFFFu, 0, Domain::init);
      positions.reserve(scheme.count);
      for (std::uint64_t i = 0; i < scheme.count; ++i) positions.push_back(g.arc_tail(stream.bounded(g.arc_count())));
      break;
    }
  }
  return build_state(g, std::move(positions), seed, track_partners);
}

SimState sample_from_positions(const Graph& g, std::vector<Vertex> positions, std::uint64_t seed,
                               bool track_partners) {
  return build_state(g, std::move(positions), seed, track_partners);
}

Vertex next_position(const Graph& g, const Philox4x32::Key& key, Walker walker, std::uint64_t step, Vertex from,
                     double holding, bool* moved) {
  const auto r =
      Philox4x32::generate({walker, lo32(step), static_cast<std::uint32_t>(Domain::discrete_step), hi32(step)}, key);
  if (holding > 0.0 && to_unit(r[0], r[1]) < holding) {
    if (moved) *moved = false;
    return from;
  }
  if (moved) *moved = true;
  const auto nbrs = g.out_neighbors(from);
  return nbrs[to_bounded(r[2], r[3], static_cast<std::uint32_t>(nbrs.size()))];
}

void step_discrete(SimState& s, const Graph& g, double holding) {
  std::vector<Vertex> dirty;
  for (Walker w = 0; w < s.walker_count(); ++w) {
    bool moved = false;
    const Vertex from = s.positions[w];
    const Vertex to = next_position(g, s.key, w, s.steps, from, holding, &moved);
    if (moved) mark_moved(s, w);
    if (to == from) continue;
    unlink(s, w, from);
    link(s, w, to);
    s.positions[w] = to;
    visit(s, to);
    dirty.push_back(to);
  }
  std::sort(dirty.begin(), dirty.end());
  dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
  std::vector<Walker> scratch;
  for (Vertex v : dirty) {
    if (s.occupancy[v] >= 2) meet_bucket(s, v, scratch);
  }
  ++s.steps;
  s.time = static_cast<double>(s.steps);
  check_milestones(s, g);
}

void advance_continuous(SimState& s, const Graph& g, double until) {
  if (until <= s.time) return;
  advance_events(s, g, until, false, false);
}

double default_cap(const Graph& g, Mode mode) {
  const double logn = std::log(static_cast<double>(g.vertex_count()));
  if (mode == Mode::continuous) return std::max(100.0 * logn * logn, 1.0);
  const double d = g.average_degree();
  const double xi = g.is_regular() ? 0.0 : 1.0;
  const double c = std::ceil(logn);
  return std::max(10.0 * std::pow(d, 1.0 + xi) * c * c * c, 1e4);
}

std::uint64_t config_hash(const Graph& g, const InitScheme& scheme, const TrialOptions& options) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a(h, g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    for (Vertex u : g.out_neighbors(v)) {
      h = fnv1a(h, v);
      h = fnv1a(h, u);
    }
  }
  h = fnv1a(h, static_cast<int>(scheme.kind));
  h = fnv1a(h, scheme.density);
  h = fnv1a(h, scheme.count);
  h = fnv1a(h, static_cast<int>(options.mode));
  h = fnv1a(h, options.holding);
  h = fnv1a(h, options.caps.max_time.value_or(-1.0));
  h = fnv1a(h, options.track_tau2);
  h = fnv1a(h, options.resample_until_two);
  h = fnv1a(h, options.giant_at.value_or(-1.0));
  h = fnv1a(h, options.isolated_at.value_or(-1.0));
  return h;
}

TrialResult run_trial(const Graph& g, const InitScheme& scheme, const TrialOptions& options, std::uint64_t seed) {
  require(options.holding >= 0.0 && options.holding < 1.0, ErrorKind::invalid_parameter,
          "holding probability must lie in [0,1)");
  const double cap = options.caps.max_time.value_or(default_cap(g, options.mode));
  require(cap > 0.0, ErrorKind::invalid_parameter, "max_time must be positive");

  SimState s = sample_initial(g, scheme, seed, options.track_degrees);
  if (options.resample_until_two) {
    for (std::uint64_t attempt = 1; s.walker_count() < 2; ++attempt) {
      require(attempt <= 1000, ErrorKind::generation_failure, "could not draw two walkers in 1000 attempts");
      s = sample_initial(g, scheme, derive_seed(seed, attempt), options.track_degrees);
    }
  }

  TrialResult r;
  r.seed = seed;
  r.config_hash = config_hash(g, scheme, options);
  r.walker_count = s.walker_count();

  auto record = [&] {
    if (!options.trace) return;
    r.giant_trajectory.emplace_back(s.time, s.classes.largest_class());
    r.isolated_trajectory.push_back({s.time, s.never_met, s.lazy_isolated});
  };
  auto sample = [&] {
    if (options.giant_at && !r.giant_at_s && s.time >= *options.giant_at) r.giant_at_s = s.classes.largest_class();
    if (options.isolated_at && !r.isolated_at_t && s.time >= *options.isolated_at) r.isolated_at_t = s.never_met;
  };
  auto finished = [&] { return s.sc_time && (!options.track_tau2 || s.tau2_time); };

  record();
  sample();
  if (options.mode == Mode::discrete) {
    while (!finished() && s.time < cap) {
      step_discrete(s, g, options.holding);
      record();
      sample();
    }
  } else {
    while (!finished() && s.time < cap) {
      double boundary = std::min(std::floor(s.time) + 1.0, cap);
      if (options.giant_at && !r.giant_at_s && *options.giant_at > s.time) boundary = std::min(boundary, *options.giant_at);
      if (options.isolated_at && !r.isolated_at_t && *options.isolated_at > s.time) {
        boundary = std::min(boundary, *options.isolated_at);
      }
      if (advance_events(s, g, boundary, true, options.track_tau2)) break;
      if (s.time == std::floor(s.time)) record();
      sample();
    }
  }

  if (s.sc_time) {
    // The partition is frozen after SC, so later sample points are known.
    const std::uint32_t w = s.walker_count();
    if (options.giant_at && !r.giant_at_s) r.giant_at_s = w;
    if (options.isolated_at && !r.isolated_at_t) r.isolated_at_t = w >= 2 ? 0 : w;
    r.sc = *s.sc_time;
  } else {
    r.sc = cap;
    r.sc_capped = true;
  }
  r.tau1 = s.tau1_time;
  r.tau2 = s.tau2_time;
  r.ag_degree_summary = s.degrees_at_sc.value_or(acquaintance_degrees(s));
  return r;
}

IsolationCensus isolation_census(const SimState& s, const Graph& g) {
  IsolationCensus c;
  c.never_met = s.never_met;
  c.lazy_isolated = s.lazy_isolated;
  c.il_vertex.assign(g.vertex_count(), 0);
  for (Walker w = 0; w < s.walker_count(); ++w) {
    if (!s.met_any[w] && !s.left_start[w]) c.il_vertex[s.starts[w]] = 1;
  }
  return c;
}

ClassStats giant_class_stats(SimState& s) {
  ClassStats stats;
  stats.largest = s.classes.largest_class();
  for (Walker w = 0; w < s.walker_count(); ++w) {
    if (s.classes.find(w) == w) ++stats.histogram[s.classes.class_size(w)];
  }
  return stats;
}

DegreeSummary acquaintance_degrees(const SimState& s) {
  DegreeSummary d;
  d.truncated = s.partners_truncated || !s.track_partners;
  if (!s.track_partners || s.partner_count.empty()) return d;
  std::uint64_t total = 0;
  for (auto c : s.partner_count) {
    total += c;
    d.max = std::max(d.max, c);
  }
  d.mean = static_cast<double>(total) / static_cast<double>(s.partner_count.size());
  return d;
}

}  // namespace acquaint
