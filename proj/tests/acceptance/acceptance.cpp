// Acceptance suite: one criterion per invocation ("c01".."c11", or "all").
// Each criterion prints exactly one line "criterion N: PASS|FAIL ..." and the
// process exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "acquaint/balance.hpp"
#include "acquaint/engine.hpp"
#include "acquaint/harness.hpp"
#include "acquaint/oracle.hpp"
#include "acquaint/spectral.hpp"
#include "acquaint/stats.hpp"
#include "generators.hpp"

using namespace acquaint;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check and returns its verdict.
  bool check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "[failed] ") << what << "; ";
    return ok;
  }
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

ExperimentSpec spec_from(const std::string& text) { return ExperimentSpec::from_json(nlohmann::json::parse(text)); }

std::map<std::uint32_t, std::vector<const ResultRow*>> by_n(const ResultTable& t) {
  std::map<std::uint32_t, std::vector<const ResultRow*>> out;
  for (const auto& r : t.rows) out[r.n].push_back(&r);
  return out;
}

std::size_t capped(const ResultTable& t) {
  return static_cast<std::size_t>(std::count_if(t.rows.begin(), t.rows.end(), [](const auto& r) { return r.sc_capped; }));
}

bool mc_agrees(const MonteCarloMean& mc, double exact) {
  return std::abs(mc.mean - exact) <= 3.0 * std::max(mc.stderr_, 1e-12);
}

// 1. Cycle, continuous time, one walker per site: SC grows like ln^2 n.
void cycle_upper(Outcome& o) {
  const auto spec = spec_from(R"({"family":"cycle","n":[64,128,256,512,1024,2048,4096],"init":"one-per-site",
    "mode":"continuous","trials":50,"seed_base":101,"metrics":[]})");
  const auto table = run_sweep(spec);
  o.check(table.failures.empty() && table.rows.size() == 350, "350 rows");
  o.check(capped(table) == 0, "cap hits " + std::to_string(capped(table)));
  const auto f2 = fit_scaling(table.rows, FitModel::log2_n);
  const auto f1 = fit_scaling(table.rows, FitModel::log_n);
  o.check(f2.r2 >= 0.9, "R2(ln^2 n) = " + fmt(f2.r2) + " >= 0.9");
  double lo = INFINITY, hi = 0.0;
  for (const auto& p : f2.points) {
    const double ratio = p.median / p.feature;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  o.check(hi / lo <= 3.0, "median/ln^2 n spread " + fmt(hi / lo) + " <= 3 (range " + fmt(lo) + ".." + fmt(hi) + ")");
  o.detail << "a = " << fmt(f2.a) << ", R2(ln n) = " << fmt(f1.r2) << "; ";
}

// 2. Cycle C_4096, Poisson(1): isolated walkers survive to floor(0.05 ln^2 n).
void cycle_lower(Outcome& o) {
  const auto spec = spec_from(R"({"family":"cycle","n":[4096],"init":"poisson","trials":100,"seed_base":202,
    "metrics":["isolation"],"isolation_at":"auto"})");
  const auto table = run_sweep(spec);
  std::size_t hits = 0;
  for (const auto& r : table.rows) hits += r.isolated_at_t.value_or(0) >= 1;
  const auto t = static_cast<std::uint64_t>(std::floor(0.05 * std::pow(std::log(4096.0), 2)));
  o.detail << "t = " << t << "; ";
  o.check(table.rows.size() == 100, "100 trials");
  o.check(hits >= 95, std::to_string(hits) + "/100 trials with Y(t) >= 1 (need 95)");
}

// 3. Random 8-regular expanders: SC against gamma^-1 ln n.
void expander_law(Outcome& o) {
  const auto spec = spec_from(R"({"family":"random_regular","d":8,"n":[256,512,1024,2048,4096],"init":"poisson",
    "trials":30,"seed_base":303,"metrics":["gamma"]})");
  const auto table = run_sweep(spec);
  o.check(table.failures.empty() && table.rows.size() == 150, "150 rows");
  o.check(capped(table) == 0, "cap hits " + std::to_string(capped(table)));
  const auto fg = fit_scaling(table.rows, FitModel::inv_gap_log_n);
  const auto f2 = fit_scaling(table.rows, FitModel::log2_n);
  double c = 0.0;
  for (const auto& p : fg.points) c = std::max(c, p.median / p.feature);
  bool all_below = true;
  for (const auto& p : fg.points) all_below = all_below && p.median <= c * p.feature + 1e-12;
  std::ostringstream gammas;
  for (const auto& [n, rows] : by_n(table)) gammas << n << ":" << fmt(rows.front()->gamma.value_or(0.0), 3) << " ";
  o.detail << "gamma " << gammas.str() << "; ";
  o.check(all_below && std::isfinite(c), "single C = " + fmt(c) + " bounds every median");
  o.check(fg.r2 > f2.r2, "R2(gamma^-1 ln n) = " + fmt(fg.r2) + " > R2(ln^2 n) = " + fmt(f2.r2));
}

// 4. Giant class on a random 8-regular graph after ceil(8/gamma) steps.
void giant_class(Outcome& o) {
  const auto spec = spec_from(R"({"family":"random_regular","d":8,"n":[2048],"init":"poisson","trials":100,
    "seed_base":404,"metrics":["giant","gamma"],"giant_at":"auto"})");
  const auto table = run_sweep(spec);
  o.check(table.rows.size() == 100, "100 trials");
  std::size_t ok = 0;
  for (const auto& r : table.rows) ok += r.giant_at_s.value_or(0) * 6 >= 2048;
  const double gamma = table.rows.empty() ? 0.0 : table.rows.front().gamma.value_or(0.0);
  o.detail << "gamma = " << fmt(gamma) << ", s = " << std::ceil(8.0 / gamma) << "; ";
  o.check(ok >= 95, std::to_string(ok) + "/100 trials with largest class >= n/6 (need 95)");
}

// 5. Complete graph with holding 1/n: SC concentrates around ln n.
void complete_concentration(Outcome& o) {
  const auto spec = spec_from(R"({"family":"complete","n":[256,1024,4096],"init":"poisson","holding":"1/n",
    "trials":200,"seed_base":505,"metrics":[]})");
  const auto table = run_sweep(spec);
  o.check(table.rows.size() == 600, "600 rows");
  for (const auto& s : summarize(table.rows)) {
    const double ln = std::log(static_cast<double>(s.n));
    o.check(s.sc_iqr <= 4.0, "n=" + std::to_string(s.n) + " IQR " + fmt(s.sc_iqr) + " <= 4");
    o.check(std::abs(s.sc_median - ln) <= 3.0,
            "n=" + std::to_string(s.n) + " median " + fmt(s.sc_median) + " within ln n = " + fmt(ln) + " +- 3");
  }
}

// 6. No trial on a regular graph finishes before s_*(G).
void regular_lower(Outcome& o) {
  std::vector<testing::GraphCase> graphs;
  for (auto& c : testing::named_graphs())
    if (c.graph.is_regular()) graphs.push_back(std::move(c));
  for (auto& c : testing::graph_zoo(606, 40))
    if (c.graph.is_regular()) graphs.push_back(std::move(c));
  graphs.push_back({"C_1024", build_cycle(1024)});
  graphs.push_back({"random_regular 512,8", build_random_regular(512, 8, 6)});
  const std::size_t pooled = 500;
  std::size_t below = 0, done = 0;
  TrialOptions opt;
  opt.track_degrees = false;
  for (std::size_t i = 0; i < pooled; ++i) {
    const auto& [label, g] = graphs[i % graphs.size()];
    const auto s = s_star(g, 0.5);
    const auto r = run_trial(g, InitScheme::poisson(1.0), opt, derive_seed(606, i));
    below += r.walker_count >= 2 && r.sc < static_cast<double>(s);
    ++done;
  }
  o.detail << graphs.size() << " regular graphs; ";
  o.check(done == pooled, std::to_string(done) + " pooled trials");
  o.check(below == 0, std::to_string(below) + " trials with SC < s_*(G)");
}

// 7. Poisson thinning on C_64.
void poisson_thinning(Outcome& o) {
  const auto g = build_cycle(64);
  const std::uint64_t trials = 10000;
  for (std::size_t t : {0u, 5u, 50u}) {
    const auto r = thinning_check_vertex(g, 17, t, InitScheme::poisson(1.0), trials, 700 + t);
    o.check(r.p_value > 0.01, "t=" + std::to_string(t) + " chi-square p = " + fmt(r.p_value));
    const auto c = occupancy_correlation(g, 17, 18, t, InitScheme::poisson(1.0), trials, 710 + t);
    o.check(c.within, "t=" + std::to_string(t) + " |rho| = " + fmt(std::abs(c.rho)) + " <= " + fmt(c.bound));
  }
}

// 8. Exact oracles against the engine.
void oracle_equivalence(Outcome& o) {
  const std::uint64_t trials = 100000;
  struct PairCase {
    const char* label;
    Graph g;
    Vertex u, v;
    std::size_t t;
  };
  const PairCase pairs[] = {{"K_2", build_complete(2), 0, 1, 1},
                            {"C_3", build_cycle(3), 0, 1, 2},
                            {"C_4", build_cycle(4), 0, 2, 3}};
  for (const auto& c : pairs) {
    const double exact = pair_meeting_exact(c.g, c.u, c.v, c.t);
    const auto mc = pair_meeting_mc(c.g, c.u, c.v, c.t, trials, 801);
    o.check(mc_agrees(mc, exact), std::string("pair ") + c.label + " " + fmt(exact) + " vs " + fmt(mc.mean));
  }
  const auto k2 = build_complete(2);
  const auto c4 = build_cycle(4);
  const auto a1 = acquaintance_rate(k2, {0, 0});
  o.check(mc_agrees(acquaintance_rate_mc(k2, {0, 0}, trials, 802), a1.a_gamma) && a1.bound_holds, "a_gamma K_2");
  const auto a2 = acquaintance_rate(c4, {0, 1, 2});
  o.check(mc_agrees(acquaintance_rate_mc(c4, {0, 1, 2}, trials, 803), a2.a_gamma) && a2.bound_holds, "a_gamma C_4");
  const auto il = il_probability(c4, 0, 1);
  o.check(il.exact && mc_agrees(il_probability_mc(c4, 0, 1, trials, 804), *il.exact) && il.bound_holds, "IL C_4");

  std::mt19937_64 rng(805);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t dominated = 0;
  for (int i = 0; i < 100; ++i) {
    const auto n = testing::pick(rng, 1, 3);
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    const auto k = testing::pick(rng, 1, n);
    dominated += dominance_check(p, k).dominates;
  }
  o.check(dominated == 100, "dominance " + std::to_string(dominated) + "/100");

  std::size_t neg = 0, neg_total = 0;
  for (int i = 0; i < 100; ++i) {
    const auto m = testing::pick(rng, 1, 6);
    const auto n = testing::pick(rng, 1, 4);
    std::vector<std::vector<double>> laws;
    for (std::uint32_t j = 0; j < m; ++j) laws.push_back(testing::random_law(rng, n));
    neg += negative_correlation_exact(laws).holds;
    ++neg_total;
  }
  for (const auto& starts : std::vector<std::vector<Vertex>>{{0, 1}, {0, 0, 2}, {0, 1, 2, 3}, {1, 1, 1, 3, 3, 0}}) {
    neg += negative_correlation_check(c4, starts, 2, 1000, 806).holds;
    ++neg_total;
  }
  o.check(neg == neg_total, "negative correlation " + std::to_string(neg) + "/" + std::to_string(neg_total));
}

// 9. Spectral exactness.
void spectral_exactness(Outcome& o) {
  double worst_gap = 0.0;
  for (std::uint32_t n = 3; n <= 64; ++n)
    worst_gap = std::max(worst_gap, std::abs(spectral_gap(build_cycle(n), 0.5) -
                                             (1.0 - std::cos(2.0 * std::numbers::pi / n)) / 2.0));
  o.check(worst_gap <= 1e-9, "gap error " + fmt(worst_gap, 3));

  auto zoo = testing::graph_zoo(909, 60);
  for (auto& c : testing::named_graphs()) zoo.push_back(std::move(c));
  double worst_kappa = 0.0;
  for (const auto& [label, g] : zoo) {
    const auto k = kappa(g, 0.5, 16);
    // Independent path: plain powers of P, diagonal of every even power.
    const Eigen::MatrixXd p = kernel(g, 0.5).p;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(g.vertex_count(), g.vertex_count());
    std::vector<double> sums(g.vertex_count(), 0.0);
    for (std::size_t t = 0; t <= 16; ++t) {
      for (Vertex v = 0; v < g.vertex_count(); ++v) sums[v] += m(v, v);
      const double naive = *std::min_element(sums.begin(), sums.end());
      worst_kappa = std::max(worst_kappa, std::abs(k[t] - naive) / naive);
      m = m * p * p;
    }
  }
  o.check(worst_kappa <= 1e-12, "kappa relative error " + fmt(worst_kappa, 3));

  std::size_t violations = 0;
  for (const auto& [label, g] : zoo) violations += !mixing_bound_check(g, 0.5, 256).envelope_holds;
  o.check(violations == 0, "decay envelope violations " + std::to_string(violations) + "/" + std::to_string(zoo.size()));

  double lo = INFINITY, hi = 0.0;
  std::ostringstream values;
  for (std::uint32_t e = 6; e <= 12; ++e) {
    const std::uint32_t n = 1u << e;
    const auto s = s_star(build_cycle(n), 0.5);
    const double ratio = static_cast<double>(s) / std::pow(std::log(static_cast<double>(n)), 2);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    values << s << (e < 12 ? "," : "");
  }
  const bool band = lo > 0.0 && hi / lo <= 4.0;
  o.check(band, "s_*(C_n) for n=2^6..2^12 = {" + values.str() + "}, ratio to ln^2 n in [" + fmt(lo) + ", " + fmt(hi) +
                    "], need a factor-4 band");
}

// 10. Balance at t_star_regular on C_256.
void balance(Outcome& o) {
  const auto g = build_cycle(256);
  const auto t = t_star_regular(g, 0.5).value;
  const auto pt = power(kernel(g, 0.5), t);
  std::size_t ok = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto s = sample_initial(g, InitScheme::poisson(1.0), derive_seed(1010, i), false);
    ok += check_balanced(s.occupancy, g, 0.125, t, pt).balanced;
  }
  o.detail << "t = " << t << "; ";
  o.check(ok >= 190, std::to_string(ok) + "/200 configurations balanced (need 190)");

  std::vector<testing::GraphCase> regular;
  for (auto& c : testing::named_graphs())
    if (c.graph.is_regular() && c.graph.vertex_count() >= 3) regular.push_back(std::move(c));
  regular.push_back({"C_256", build_cycle(256)});
  std::size_t det = 0, det_total = 0;
  for (const auto& [label, h] : regular)
    for (std::uint64_t s : {0u, 1u, 3u, 10u, 50u}) {
      const std::vector<std::uint32_t> ones(h.vertex_count(), 1);
      det += check_balanced(ones, h, 0.125, s, 0.5).balanced;
      ++det_total;
    }
  o.check(det == det_total, "one-per-site balanced " + std::to_string(det) + "/" + std::to_string(det_total));
}

// 11. Linked cliques of total size 1024: SC nondecreasing in clique size.
void extremal(Outcome& o) {
  const auto spec = spec_from(R"({"family":"linked_cliques","points":[{"n":1024,"clique":4},{"n":1024,"clique":8},
    {"n":1024,"clique":16}],"init":"poisson","trials":30,"seed_base":1111,"metrics":[]})");
  const auto table = run_sweep(spec);
  o.check(table.failures.empty() && table.rows.size() == 90, "90 rows");
  o.check(capped(table) == 0, "cap hits " + std::to_string(capped(table)));
  std::vector<double> medians;
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<double> sc;
    for (std::size_t k = 0; k < 30; ++k) sc.push_back(table.rows[p * 30 + k].sc);
    medians.push_back(median(sc));
  }
  o.check(medians[0] <= medians[1] && medians[1] <= medians[2],
          "medians m=4,8,16: " + fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2]));
}

struct Criterion {
  int id;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, 600, cycle_upper},     {2, 60, cycle_lower},          {3, 600, expander_law},
      {4, 120, giant_class},     {5, 300, complete_concentration}, {6, 300, regular_lower},
      {7, 120, poisson_thinning}, {8, 180, oracle_equivalence},  {9, 120, spectral_exactness},
      {10, 180, balance},        {11, 300, extremal},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "all") {
      for (const auto& c : all) selected.push_back(c.id);
    } else if (a.size() == 3 && a[0] == 'c') {
      selected.push_back(std::stoi(a.substr(1)));
    } else {
      std::cerr << "usage: acceptance all | c01 .. c11\n";
      return 1;
    }
  }
  if (selected.empty()) {
    std::cerr << "usage: acceptance all | c01 .. c11\n";
    return 1;
  }
  bool all_pass = true;
  for (int id : selected) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.id == id; });
    if (it == all.end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 1;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(secs <= it->budget_seconds, "runtime " + fmt(secs, 3) + " s <= " + fmt(it->budget_seconds, 3) + " s");
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
