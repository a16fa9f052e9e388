#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "acquaint/engine.hpp"
#include "acquaint/graph.hpp"

namespace acquaint {

// A length-t walk gamma with p(gamma) = prod P(gamma_i, gamma_{i+1}) and
// q(gamma) = pibar_{gamma_0} p(gamma), the expected number of Poisson(pibar)
// walkers tracing it.
struct Walk {
  std::vector<Vertex> vertices;
  double p = 0.0;
  double q = 0.0;
};

inline constexpr std::uint64_t kWalkBudget = 10'000'000;

// Every walk of length t (with its lazy steps). Throws budget_exceeded when
// n (maxdeg + 1)^t > budget.
std::vector<Walk> enumerate_walks(const Graph& g, std::size_t t, double holding = 0.5,
                                  std::uint64_t budget = kWalkBudget);
// p(gamma), zero when gamma is not a walk of the kernel.
double walk_weight(const Graph& g, const std::vector<Vertex>& walk, double holding = 0.5);

struct BoundInputs {
  double mu = 0.0;              // sum of pibar_v over v with pibar_v <= 2
  double a_t = 0.0;             // mu 2^{-t} e^{-2(t+1)}
  std::uint64_t s_beta = 0;     // max(floor(c_beta ln n - 2 ln ln n) - 1, 0)
  double c_beta = 0.0;          // beta / (2 ln(2 e^2))
};
BoundInputs bound_inputs(const Graph& g, std::size_t t, double beta);

struct MonteCarloMean {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
};

// Chi-square goodness of fit of counts against Pois(mean). Bins are merged
// upward until each expects at least five observations.
struct ChiSquareResult {
  bool applicable = true;
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  std::uint64_t trials = 0;
  double sample_mean = 0.0;
  double expected_mean = 0.0;
};
ChiSquareResult chi_square_poisson(const std::vector<std::uint64_t>& samples, double mean);

// Law of Y_v(t) after t steps from `scheme` against Pois(lambda pibar_v).
// Deterministic schemes return applicable = false.
ChiSquareResult thinning_check_vertex(const Graph& g, Vertex v, std::size_t t, const InitScheme& scheme,
                                      std::uint64_t trials, std::uint64_t seed, double holding = 0.5);
// Law of X_gamma (walkers tracing gamma) against Pois(lambda q(gamma)).
ChiSquareResult thinning_check_walk(const Graph& g, const std::vector<Vertex>& walk, const InitScheme& scheme,
                                    std::uint64_t trials, std::uint64_t seed, double holding = 0.5);

struct CorrelationResult {
  bool applicable = true;
  double rho = 0.0;
  double bound = 0.0;  // 3 / sqrt(trials)
  bool within = true;
  std::uint64_t trials = 0;
};
CorrelationResult occupancy_correlation(const Graph& g, Vertex u, Vertex v, std::size_t t, const InitScheme& scheme,
                                        std::uint64_t trials, std::uint64_t seed, double holding = 0.5);

// a_gamma = sum of q(gamma') over gamma' != gamma sharing a position with
// gamma at some time, against -q(gamma) + sum_i pibar_{gamma_i}.
struct AcquaintanceRate {
  double a_gamma = 0.0;
  double q_gamma = 0.0;
  double bound = 0.0;
  bool bound_holds = true;
};
AcquaintanceRate acquaintance_rate(const Graph& g, const std::vector<Vertex>& walk, double holding = 0.5,
                                   std::uint64_t budget = kWalkBudget);
// Mean number of Poisson(pibar) walkers, other than those tracing gamma, met
// by a walker planted on gamma.
MonteCarloMean acquaintance_rate_mc(const Graph& g, const std::vector<Vertex>& walk, std::uint64_t trials,
                                    std::uint64_t seed, double holding = 0.5);

// P[IL_v(t)] for the lazy walk (holding 1/2) under Poisson(pibar) init.
struct IlProbability {
  double bound = 0.0;  // 2^{-t} pibar_v e^{-(t+1) pibar_v}
  std::optional<double> exact;
  bool bound_holds = true;
};
double il_lower_bound(const Graph& g, Vertex v, std::size_t t);
IlProbability il_probability(const Graph& g, Vertex v, std::size_t t, std::uint64_t budget = kWalkBudget);
MonteCarloMean il_probability_mc(const Graph& g, Vertex v, std::size_t t, std::uint64_t trials, std::uint64_t seed);

// Lower bounds on E[Z(t)] (ml1) and, for regular graphs, E[Y(t)] (ml2) with m
// walkers placed independently from pi. Non-positive bases are reported as 0.
struct IsolatedBounds {
  double ml1 = 0.0;
  std::optional<double> ml2;
};
IsolatedBounds isolated_expectation_bounds(const Graph& g, std::uint64_t m, std::size_t t, double holding = 0.5);
// The regular-graph bound alone; invalid_input on non-regular graphs.
double isolated_bound_regular(const Graph& g, std::uint64_t m, std::size_t t, double holding = 0.5);

struct IsolatedMeans {
  MonteCarloMean never_met;      // Y(t)
  MonteCarloMean lazy_isolated;  // Z(t)
};
IsolatedMeans isolated_counts_mc(const Graph& g, std::uint64_t m, std::size_t t, std::uint64_t trials,
                                 std::uint64_t seed, double holding = 0.5);

// J = {i : event i occurs}, events independent with probabilities p. Checks
// P[J in U | |J| = k] >= P[J in U | |J| = k-1] over every up-set U.
struct DominanceResult {
  bool dominates = true;
  std::size_t upsets_checked = 0;
  double worst_margin = 0.0;  // min over U of the difference
};
DominanceResult dominance_check(const std::vector<double>& p, std::size_t k);

// Test functions for the product inequality E[prod f_i(Y_i)] <= prod E[f_i(Y_i)].
enum class TestFunction {
  at_least_one,  // min(x, 1), increasing
  identity,      // x, increasing
  is_zero,       // 1[x = 0], decreasing
  reciprocal,    // 1 / (1 + x), decreasing
};
double apply(TestFunction f, std::uint32_t x);
bool is_increasing(TestFunction f);

struct NegativeCorrelationResult {
  bool holds = true;
  bool exact = true;
  std::size_t combinations = 0;
  double worst_gap = -1.0;  // max over combinations of lhs - rhs (with 3 SE slack in Monte Carlo)
};
// Independent balls: ball j lands in bin i with probability laws[j][i]
// (at most 6 balls, 4 bins). With `functions` empty every all-increasing and
// all-decreasing assignment is checked; mixed assignments are invalid_input.
NegativeCorrelationResult negative_correlation_exact(const std::vector<std::vector<double>>& laws,
                                                     const std::vector<TestFunction>& functions = {});
// Walkers started at `starts` run t steps; exact for small instances (laws
// from P^t rows), otherwise Monte Carlo over `trials`.
NegativeCorrelationResult negative_correlation_check(const Graph& g, const std::vector<Vertex>& starts, std::size_t t,
                                                     std::uint64_t trials, std::uint64_t seed, double holding = 0.5);

// P[two walkers from u and v share a vertex at some time in 0..t], by dynamic
// programming over the product chain.
double pair_meeting_exact(const Graph& g, Vertex u, Vertex v, std::size_t t, double holding = 0.5);
MonteCarloMean pair_meeting_mc(const Graph& g, Vertex u, Vertex v, std::size_t t, std::uint64_t trials,
                               std::uint64_t seed, double holding = 0.5);

// P[D = j] for D the difference of two independent Pois(k/2) counts.
double skellam_pmf(std::int64_t j, double k);
struct SkellamSurvival {
  double value = 0.0;                // P[D in {-i+1..i}]
  std::optional<double> envelope;    // 1 - 2 e^{-i^2/(8k)} when floor(4 sqrt k) < i <= 1.2 k
  bool envelope_holds = true;
};
SkellamSurvival skellam_survival(std::int64_t i, double k);

// mu_t = sum_u P_u[T_v <= t] on a cycle, t = 0..t_max, and the smallest C
// with mu_t <= C (2t+1) / sqrt(t+1).
struct CrossingProfile {
  std::vector<double> mu;
  std::vector<double> ratio;
  double c_needed = 0.0;
};
CrossingProfile crossing_mean_bound(const Graph& g, Vertex v, std::size_t t_max, double holding = 0.5);
// Mean number of Poisson(1) walkers that visit v by time t.
MonteCarloMean crossing_visitors_mc(const Graph& g, Vertex v, std::size_t t, std::uint64_t trials, std::uint64_t seed,
                                    double holding = 0.5);

// P[walk from `start` (or from pi when empty) is at targets[i-1] at time i
// for some i = 1..len].
MonteCarloMean hit_probability_mc(const Graph& g, std::optional<Vertex> start, const std::vector<Vertex>& targets,
                                  std::uint64_t walks, std::uint64_t seed, double holding = 0.5);

struct HitSequenceResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  bool ok = true;  // estimate >= bound - 3 SE
};
struct ExpanderHitReport {
  double gamma = 0.0;
  std::uint64_t t = 0;  // ceil(C ln n / gamma)
  double bound = 0.0;   // (1/8) min(gamma t / n, 1)
  std::vector<HitSequenceResult> sequences;
  bool verdict = true;
};
ExpanderHitReport expander_hit_bound_check(const Graph& g, std::size_t sequences, std::uint64_t walks,
                                           std::uint64_t seed, double c = 1.0, double holding = 0.5);

}  // namespace acquaint
