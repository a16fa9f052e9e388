#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <unordered_set>
#include <utility>
#include <vector>

#include "acquaint/graph.hpp"
#include "acquaint/rng.hpp"
#include "acquaint/union_find.hpp"

namespace acquaint {

using Walker = std::uint32_t;

enum class Mode { discrete, continuous };

struct InitScheme {
  enum class Kind { poisson, one_per_site, fixed_m };
  Kind kind = Kind::poisson;
  double density = 1.0;    // poisson: mean lambda * pibar_v walkers at v
  std::uint64_t count = 0;  // fixed_m: number of walkers, each placed ~ pi

  static InitScheme poisson(double density = 1.0) { return {Kind::poisson, density, 0}; }
  static InitScheme one_per_site() { return {Kind::one_per_site, 1.0, 0}; }
  static InitScheme fixed_m(std::uint64_t m) { return {Kind::fixed_m, 1.0, m}; }
};

struct DegreeSummary {
  double mean = 0.0;
  std::uint32_t max = 0;
  bool truncated = false;
};

// Pairs enumerated per bucket when counting distinct partners; above this the
// acquaintance degrees become lower bounds.
inline constexpr std::uint64_t kPairCensusCap = 10'000;

struct SimState {
  std::uint64_t seed = 0;
  Philox4x32::Key key{};
  double time = 0.0;
  std::uint64_t steps = 0;  // discrete steps taken or continuous jumps processed

  std::vector<Vertex> positions;
  std::vector<Vertex> starts;
  UnionFind classes;
  std::vector<std::uint32_t> occupancy;  // Y_v(t)

  // Residents of each vertex as an intrusive doubly linked list.
  std::vector<Walker> head;
  std::vector<Walker> next;
  std::vector<Walker> prev;

  std::vector<std::uint8_t> met_any;
  std::vector<std::uint8_t> left_start;  // took at least one non-holding step
  std::uint32_t never_met = 0;
  std::uint32_t lazy_isolated = 0;  // never moved and never met

  // Acquaintance graph: distinct partners per walker, pairs keyed (lo << 32 | hi).
  bool track_partners = true;
  bool partners_truncated = false;
  std::vector<std::uint32_t> partner_count;
  std::unordered_set<std::uint64_t> pairs;

  std::vector<std::uint8_t> visited;
  std::uint32_t visited_count = 0;

  // First observation times of the stopping events.
  std::optional<double> sc_time;
  std::optional<double> tau1_time;
  std::optional<double> tau2_time;
  std::optional<DegreeSummary> degrees_at_sc;

  // Continuous mode: per-walker jump counters and the pending-jump queue.
  std::vector<std::uint64_t> jumps;
  using Event = std::pair<double, Walker>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  bool events_ready = false;

  std::uint32_t walker_count() const { return static_cast<std::uint32_t>(positions.size()); }
};

inline constexpr Walker kNoWalker = 0xFFFFFFFFu;

// Draws the initial configuration and performs the time-0 meeting sweep.
SimState sample_initial(const Graph& g, const InitScheme& scheme, std::uint64_t seed, bool track_partners = true);
// Same, from explicit starting positions.
SimState sample_from_positions(const Graph& g, std::vector<Vertex> positions, std::uint64_t seed,
                               bool track_partners = true);

// Next vertex of `walker` for its step number `step` (0-based); the stream is a
// pure function of (key, walker, step), so trajectories do not depend on the
// order in which walkers are advanced. `moved` reports a non-holding step.
Vertex next_position(const Graph& g, const Philox4x32::Key& key, Walker walker, std::uint64_t step, Vertex from,
                     double holding, bool* moved = nullptr);

// One synchronous step of every walker, then one meeting sweep.
void step_discrete(SimState& s, const Graph& g, double holding);

// Event-driven rate-1 jumps up to time `until`; an arriving walker joins the
// class of the occupants. Holding is not used in continuous time.
void advance_continuous(SimState& s, const Graph& g, double until);

struct Caps {
  std::optional<double> max_time;  // empty selects the default cap
};

// Default caps: max(10 d^{1+xi} ceil(ln n)^3, 1e4) steps, or 100 ln^2 n seconds.
double default_cap(const Graph& g, Mode mode);

struct TrialOptions {
  Mode mode = Mode::discrete;
  double holding = 0.5;
  Caps caps{};
  bool track_tau2 = false;
  bool track_degrees = true;
  bool trace = false;
  // Redraw the initial configuration until it holds at least two walkers.
  bool resample_until_two = false;
  std::optional<double> giant_at;
  std::optional<double> isolated_at;
};

struct IsolationPoint {
  double time = 0.0;
  std::uint32_t never_met = 0;      // Y(t)
  std::uint32_t lazy_isolated = 0;  // Z(t)
};

struct TrialResult {
  double sc = 0.0;
  bool sc_capped = false;
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::uint64_t walker_count = 0;
  std::vector<std::pair<double, std::uint32_t>> giant_trajectory;
  std::vector<IsolationPoint> isolated_trajectory;
  DegreeSummary ag_degree_summary;
  std::optional<std::uint32_t> giant_at_s;
  std::optional<std::uint32_t> isolated_at_t;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

TrialResult run_trial(const Graph& g, const InitScheme& scheme, const TrialOptions& options, std::uint64_t seed);

std::uint64_t config_hash(const Graph& g, const InitScheme& scheme, const TrialOptions& options);

struct IsolationCensus {
  std::uint32_t never_met = 0;           // Y(t)
  std::uint32_t lazy_isolated = 0;       // Z(t)
  std::vector<std::uint8_t> il_vertex;   // IL_v(t)
};
IsolationCensus isolation_census(const SimState& s, const Graph& g);

struct ClassStats {
  std::uint32_t largest = 0;
  std::map<std::uint32_t, std::uint32_t> histogram;  // class size -> number of classes
};
ClassStats giant_class_stats(SimState& s);

DegreeSummary acquaintance_degrees(const SimState& s);

}  // namespace acquaint
