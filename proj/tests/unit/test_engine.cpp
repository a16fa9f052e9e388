#include <cmath>

#include "acquaint/engine.hpp"
#include "acquaint/oracle.hpp"
#include "acquaint/spectral.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace acquaint;

namespace {

std::uint32_t total(const std::vector<std::uint32_t>& y) {
  std::uint32_t s = 0;
  for (auto x : y) s += x;
  return s;
}

// Every pair of co-located walkers must share a class.
bool colocated_merged(SimState& s) {
  for (Walker a = 0; a < s.walker_count(); ++a)
    for (Walker b = a + 1; b < s.walker_count(); ++b)
      if (s.positions[a] == s.positions[b] && !s.classes.same(a, b)) return false;
  return true;
}

}  // namespace

TEST_CASE("initial configurations") {
  const auto c5 = build_cycle(5);
  auto s = sample_initial(c5, InitScheme::one_per_site(), 1);
  CHECK(s.walker_count() == 5);
  for (auto y : s.occupancy) CHECK(y == 1);
  CHECK(s.classes.class_count() == 5);

  const auto c64 = build_cycle(64);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) sum += sample_initial(c64, InitScheme::poisson(1.0), seed).walker_count();
  CHECK(std::abs(sum / 10000.0 - 64.0) <= 4.0 * std::sqrt(64.0));
  CHECK(std::abs(sum / 10000.0 - 64.0) <= 4.0 * std::sqrt(64.0 / 10000.0));

  // Two walkers on K_2 placed from pi share a vertex half the time.
  const auto k2 = build_complete(2);
  std::uint64_t together = 0;
  const std::uint64_t draws = 10000;
  for (std::uint64_t seed = 0; seed < draws; ++seed) {
    auto t = sample_initial(k2, InitScheme::fixed_m(2), seed);
    REQUIRE(t.walker_count() == 2);
    together += t.positions[0] == t.positions[1];
    CHECK(t.classes.same(0, 1) == (t.positions[0] == t.positions[1]));
  }
  CHECK(std::abs(together / double(draws) - 0.5) <= 3.0 * std::sqrt(0.25 / draws));

  // Density scales the mean.
  double dense = 0.0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed)
    dense += sample_initial(c64, InitScheme::poisson(2.5), seed).walker_count();
  CHECK(std::abs(dense / 2000.0 - 160.0) <= 4.0 * std::sqrt(160.0 / 2000.0));
}

TEST_CASE("poisson initial counts are independent with mean pibar") {
  const auto g = build_clique_star(3, 2);
  const auto pibar = stationary_distribution(g).pibar;
  std::vector<std::uint64_t> center, leaf;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = sample_initial(g, InitScheme::poisson(1.0), seed, false);
    center.push_back(s.occupancy[0]);
    leaf.push_back(s.occupancy[8]);
  }
  const Vertex leaf_v = 8;
  REQUIRE(g.degree(0) == 4);
  REQUIRE(g.degree(leaf_v) == 1);
  CHECK(chi_square_poisson(center, pibar[0]).p_value > 0.01);
  CHECK(chi_square_poisson(leaf, pibar[leaf_v]).p_value > 0.01);
}

TEST_CASE("discrete steps") {
  const auto k2 = build_complete(2);
  auto empty = sample_from_positions(k2, {}, 1);
  step_discrete(empty, k2, 0.5);
  CHECK(empty.time == 1.0);
  CHECK(empty.walker_count() == 0);

  std::uint64_t merged = 0;
  const std::uint64_t trials = 20000;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    auto s = sample_from_positions(k2, {0, 1}, seed);
    REQUIRE_FALSE(s.classes.same(0, 1));
    step_discrete(s, k2, 0.5);
    merged += s.classes.same(0, 1);
  }
  CHECK(std::abs(merged / double(trials) - 0.5) <= 3.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("occupancy after five steps is Poisson") {
  const auto g = build_cycle(32);
  std::vector<std::uint64_t> y;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    auto s = sample_initial(g, InitScheme::poisson(1.0), seed, false);
    for (int t = 0; t < 5; ++t) step_discrete(s, g, 0.5);
    y.push_back(s.occupancy[7]);
  }
  CHECK(chi_square_poisson(y, 1.0).p_value > 0.01);
}

TEST_CASE("continuous time") {
  const auto c10 = build_cycle(10);
  auto s = sample_from_positions(c10, {0, 5}, 3);
  advance_continuous(s, c10, 0.0);
  CHECK(s.positions == std::vector<Vertex>{0, 5});
  CHECK(s.steps == 0);

  double jumps = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto one = sample_from_positions(c10, {0}, seed);
    advance_continuous(one, c10, 1000.0);
    CHECK(one.time == 1000.0);
    jumps += one.steps;
  }
  CHECK(std::abs(jumps / 200.0 - 1000.0) <= 3.0 * std::sqrt(1000.0));
}

TEST_CASE("continuous walkers cannot swap on a cycle without meeting") {
  const std::uint32_t n = 12;
  const auto g = build_cycle(n);
  int swapped = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto s = sample_from_positions(g, {0, 1}, seed);
    advance_continuous(s, g, 3.0);
    // With at most four jumps neither walker can wrap around, so walker 0
    // ending just clockwise of walker 1 means they crossed.
    if (s.steps <= 4 && s.positions[0] == (s.positions[1] + 1) % n) {
      ++swapped;
      CHECK(s.classes.same(0, 1));
    }
  }
  CHECK(swapped > 0);
}

TEST_CASE("trial conventions and small exact laws") {
  const auto k2 = build_complete(2);
  TrialOptions o;
  const auto one = run_trial(k2, InitScheme::fixed_m(1), o, 1);
  CHECK(one.walker_count == 1);
  CHECK(one.sc == 0.0);
  REQUIRE(one.tau1.has_value());
  CHECK(*one.tau1 == 0.0);

  double sum = 0.0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) sum += run_trial(k2, InitScheme::one_per_site(), o, seed).sc;
  CHECK(std::abs(sum / trials - 2.0) <= 0.05);
}

TEST_CASE("cap hits are flagged") {
  TrialOptions o;
  o.caps.max_time = 2.0;
  const auto r = run_trial(build_cycle(200), InitScheme::one_per_site(), o, 5);
  CHECK(r.sc_capped);
  CHECK(r.sc == 2.0);
  CHECK(default_cap(build_cycle(64), Mode::discrete) >= 1e4);
  CHECK(default_cap(build_cycle(64), Mode::continuous) == doctest::Approx(100.0 * std::pow(std::log(64.0), 2)));
}

TEST_CASE("trial determinism and milestones") {
  const auto g = build_torus(2, 6);
  TrialOptions o;
  o.track_tau2 = true;
  o.trace = true;
  o.giant_at = 3.0;
  o.isolated_at = 2.0;
  for (Mode mode : {Mode::discrete, Mode::continuous}) {
    o.mode = mode;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto a = run_trial(g, InitScheme::poisson(1.0), o, seed);
      const auto b = run_trial(g, InitScheme::poisson(1.0), o, seed);
      CHECK(a.sc == b.sc);
      CHECK(a.tau1 == b.tau1);
      CHECK(a.tau2 == b.tau2);
      CHECK(a.giant_trajectory == b.giant_trajectory);
      CHECK(a.ag_degree_summary.mean == b.ag_degree_summary.mean);
      CHECK(a.config_hash == b.config_hash);
      if (a.walker_count >= 2) {
        REQUIRE(a.tau1.has_value());
        CHECK(*a.tau1 <= a.sc);
        CHECK(a.ag_degree_summary.max >= 1);
      }
      REQUIRE(a.tau2.has_value());
      CHECK(a.giant_at_s.has_value());
      CHECK(a.isolated_at_t.has_value());
      for (std::size_t i = 1; i < a.giant_trajectory.size(); ++i) {
        CHECK(a.giant_trajectory[i].first >= a.giant_trajectory[i - 1].first);
        CHECK(a.giant_trajectory[i].second >= a.giant_trajectory[i - 1].second);
      }
      for (std::size_t i = 1; i < a.isolated_trajectory.size(); ++i) {
        CHECK(a.isolated_trajectory[i].never_met <= a.isolated_trajectory[i - 1].never_met);
        CHECK(a.isolated_trajectory[i].lazy_isolated <= a.isolated_trajectory[i - 1].lazy_isolated);
      }
    }
  }
  CHECK(config_hash(g, InitScheme::poisson(1.0), o) != config_hash(g, InitScheme::one_per_site(), o));
}

TEST_CASE("resampling until two walkers") {
  TrialOptions o;
  o.resample_until_two = true;
  const auto g = build_complete(2);
  for (std::uint64_t seed = 0; seed < 200; ++seed) CHECK(run_trial(g, InitScheme::poisson(0.3), o, seed).walker_count >= 2);
}

TEST_CASE("isolation census and class statistics") {
  const auto g = build_cycle(16);
  auto s = sample_initial(g, InitScheme::one_per_site(), 2);
  auto c = isolation_census(s, g);
  CHECK(c.never_met == 16);
  CHECK(c.lazy_isolated == 16);
  auto stats = giant_class_stats(s);
  CHECK(stats.largest == 1);
  CHECK(stats.histogram.at(1) == 16);

  auto p = sample_initial(g, InitScheme::poisson(1.0), 9);
  std::uint32_t alone = 0;
  for (Walker w = 0; w < p.walker_count(); ++w) alone += p.occupancy[p.positions[w]] == 1;
  CHECK(isolation_census(p, g).never_met == alone);

  TrialOptions o;
  auto q = sample_initial(g, InitScheme::one_per_site(), 4);
  while (q.classes.class_count() > 1) step_discrete(q, g, 0.5);
  CHECK(giant_class_stats(q).largest == q.walker_count());
  CHECK(giant_class_stats(q).histogram.size() == 1);
}

TEST_CASE("property: conservation, coalescence and meeting sweeps") {
  auto cases = testing::graph_zoo(5, 40);
  for (auto& c : testing::named_graphs()) cases.push_back(std::move(c));
  std::uint64_t seed = 0;
  for (const auto& [label, g] : cases) {
    INFO(label);
    for (Mode mode : {Mode::discrete, Mode::continuous}) {
      auto s = sample_initial(g, InitScheme::poisson(1.5), ++seed);
      const auto walkers = s.walker_count();
      CHECK(total(s.occupancy) == walkers);
      CHECK(colocated_merged(s));
      auto classes = s.classes.class_count();
      auto census = isolation_census(s, g);
      for (int t = 1; t <= 30; ++t) {
        if (mode == Mode::discrete) {
          step_discrete(s, g, 0.5);
        } else {
          advance_continuous(s, g, t * 0.5);
        }
        REQUIRE(total(s.occupancy) == walkers);
        CHECK(s.classes.class_count() <= classes);
        classes = s.classes.class_count();
        const auto next = isolation_census(s, g);
        CHECK(next.never_met <= census.never_met);
        CHECK(next.lazy_isolated <= census.lazy_isolated);
        CHECK(next.lazy_isolated <= next.never_met);
        census = next;
        if (mode == Mode::discrete) CHECK(colocated_merged(s));
        std::vector<std::uint32_t> recount(g.vertex_count(), 0);
        for (auto v : s.positions) ++recount[v];
        CHECK(recount == s.occupancy);
      }
    }
  }
}

TEST_CASE("property: walker trajectories do not depend on step order") {
  const auto g = build_torus(2, 5);
  const auto key = make_key(77);
  for (Walker w = 0; w < 20; ++w) {
    Vertex a = w % g.vertex_count();
    for (std::uint64_t step = 0; step < 50; ++step) {
      const Vertex b = next_position(g, key, w, step, a, 0.5);
      CHECK(b == next_position(g, key, w, step, a, 0.5));
      CHECK((b == a || g.arc_multiplicity(a, b) > 0));
      a = b;
    }
  }
}

TEST_CASE("acquaintance degrees count distinct partners") {
  const auto g = build_complete(3);
  auto s = sample_from_positions(g, {0, 0, 0, 1}, 1);
  const auto d = acquaintance_degrees(s);
  CHECK(d.max == 2);
  CHECK(d.mean == doctest::Approx(1.5));
  CHECK_FALSE(d.truncated);
}
