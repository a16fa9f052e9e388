#include "acquaint/oracle.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "acquaint/error.hpp"
#include "acquaint/spectral.hpp"

namespace acquaint {

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }

  MonteCarloMean result() const {
    MonteCarloMean m;
    m.trials = count;
    if (count == 0) return m;
    const double n = static_cast<double>(count);
    m.mean = sum / n;
    const double var = count > 1 ? std::max(0.0, (sum_sq - n * m.mean * m.mean) / (n - 1.0)) : 0.0;
    m.stderr_ = std::sqrt(var / n);
    return m;
  }
};

double kernel_entry(const SparseKernel& k, Vertex u, Vertex v) {
  const auto begin = k.columns.begin() + k.offsets[u];
  const auto end = k.columns.begin() + k.offsets[u + 1];
  const auto it = std::lower_bound(begin, end, v);
  return it != end && *it == v ? k.values[it - k.columns.begin()] : 0.0;
}

void check_vertex(const Graph& g, Vertex v) {
  require(v < g.vertex_count(), ErrorKind::invalid_parameter, "vertex out of range");
}

void check_trials(std::uint64_t trials) {
  require(trials >= 1, ErrorKind::invalid_parameter, "trials must be at least 1");
}

double log_poisson_pmf(std::uint64_t k, double mean) {
  return static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
}

bool is_deterministic(const InitScheme& scheme) { return scheme.kind == InitScheme::Kind::one_per_site; }

// Positions of all walkers after t steps of an engine run, sampled fresh.
SimState evolve(const Graph& g, const InitScheme& scheme, std::size_t t, std::uint64_t seed, double holding) {
  SimState s = sample_initial(g, scheme, seed, false);
  for (std::size_t i = 0; i < t; ++i) step_discrete(s, g, holding);
  return s;
}

}  // namespace

std::vector<Walk> enumerate_walks(const Graph& g, std::size_t t, double holding, std::uint64_t budget) {
  const double size = g.vertex_count() * std::pow(g.max_degree() + 1.0, static_cast<double>(t));
  require(size <= static_cast<double>(budget), ErrorKind::budget_exceeded,
          "walk enumeration exceeds the budget of " + std::to_string(budget));
  const auto k = sparse_kernel(g, holding);
  const auto pibar = stationary_distribution(g).pibar;
  std::vector<Walk> out;
  std::vector<Vertex> path;
  std::vector<double> weight;
  // Depth-first over successor lists.
  auto extend = [&](auto&& self) -> void {
    if (path.size() == t + 1) {
      out.push_back({path, weight.back(), pibar[path.front()] * weight.back()});
      return;
    }
    const Vertex x = path.back();
    for (auto e = k.offsets[x]; e < k.offsets[x + 1]; ++e) {
      path.push_back(k.columns[e]);
      weight.push_back(weight.back() * k.values[e]);
      self(self);
      path.pop_back();
      weight.pop_back();
    }
  };
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    path = {v};
    weight = {1.0};
    extend(extend);
  }
  return out;
}

double walk_weight(const Graph& g, const std::vector<Vertex>& walk, double holding) {
  require(!walk.empty(), ErrorKind::invalid_input, "walk must contain at least one vertex");
  for (Vertex v : walk) check_vertex(g, v);
  const auto k = sparse_kernel(g, holding);
  double p = 1.0;
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) p *= kernel_entry(k, walk[i], walk[i + 1]);
  return p;
}

BoundInputs bound_inputs(const Graph& g, std::size_t t, double beta) {
  require(beta > 0.0, ErrorKind::invalid_parameter, "beta must be positive");
  const auto pibar = stationary_distribution(g).pibar;
  BoundInputs b;
  for (double x : pibar) {
    if (x <= 2.0) b.mu += x;
  }
  const double td = static_cast<double>(t);
  b.a_t = b.mu * std::exp2(-td) * std::exp(-2.0 * (td + 1.0));
  b.c_beta = beta / (2.0 * std::log(2.0 * std::exp(2.0)));
  const double logn = std::log(static_cast<double>(g.vertex_count()));
  const double raw = std::floor(b.c_beta * logn - 2.0 * std::log(logn)) - 1.0;
  b.s_beta = raw > 0.0 ? static_cast<std::uint64_t>(raw) : 0;
  return b;
}

ChiSquareResult chi_square_poisson(const std::vector<std::uint64_t>& samples, double mean) {
  ChiSquareResult r;
  r.trials = samples.size();
  r.expected_mean = mean;
  require(samples.size() >= 20, ErrorKind::invalid_parameter, "chi-square test needs at least 20 trials");
  if (!(mean > 0.0)) {
    r.applicable = false;
    return r;
  }
  const double n = static_cast<double>(samples.size());
  std::uint64_t top = 0;
  double total = 0.0;
  for (auto x : samples) {
    top = std::max(top, x);
    total += static_cast<double>(x);
  }
  r.sample_mean = total / n;
  std::vector<std::uint64_t> hist(top + 1, 0);
  for (auto x : samples) ++hist[x];
  auto observed = [&](std::uint64_t k) { return k < hist.size() ? hist[k] : 0; };

  std::vector<std::pair<double, double>> bins;  // expected, observed
  double acc_e = 0.0, acc_o = 0.0, cum = 0.0;
  std::uint64_t k = 0;
  for (;; ++k) {
    const double pk = std::exp(log_poisson_pmf(k, mean));
    cum += pk;
    acc_e += n * pk;
    acc_o += static_cast<double>(observed(k));
    const double tail_e = n * std::max(0.0, 1.0 - cum);
    if (tail_e < 5.0) break;
    if (acc_e >= 5.0) {
      bins.emplace_back(acc_e, acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  // Last bin takes everything from its first count upward.
  double tail_o = 0.0;
  for (std::uint64_t j = k + 1; j < hist.size(); ++j) tail_o += static_cast<double>(hist[j]);
  acc_e += n * std::max(0.0, 1.0 - cum);
  acc_o += tail_o;
  if (acc_e >= 5.0 || bins.empty()) {
    bins.emplace_back(acc_e, acc_o);
  } else {
    bins.back().first += acc_e;
    bins.back().second += acc_o;
  }
  require(bins.size() >= 2, ErrorKind::invalid_parameter, "too few trials for a chi-square test at this mean");
  for (const auto& [e, o] : bins) r.statistic += (o - e) * (o - e) / e;
  r.df = bins.size() - 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.df), 0.5 * r.statistic);
  return r;
}

ChiSquareResult thinning_check_vertex(const Graph& g, Vertex v, std::size_t t, const InitScheme& scheme,
                                      std::uint64_t trials, std::uint64_t seed, double holding) {
  check_vertex(g, v);
  check_trials(trials);
  if (scheme.kind != InitScheme::Kind::poisson) {
    ChiSquareResult r;
    r.applicable = false;
    r.trials = trials;
    return r;
  }
  std::vector<std::uint64_t> samples;
  samples.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    samples.push_back(evolve(g, scheme, t, derive_seed(seed, i), holding).occupancy[v]);
  }
  return chi_square_poisson(samples, scheme.density * stationary_distribution(g).pibar[v]);
}

ChiSquareResult thinning_check_walk(const Graph& g, const std::vector<Vertex>& walk, const InitScheme& scheme,
                                    std::uint64_t trials, std::uint64_t seed, double holding) {
  check_trials(trials);
  const double p = walk_weight(g, walk, holding);
  require(p > 0.0, ErrorKind::invalid_input, "sequence is not a walk of the kernel");
  if (scheme.kind != InitScheme::Kind::poisson) {
    ChiSquareResult r;
    r.applicable = false;
    r.trials = trials;
    return r;
  }
  std::vector<std::uint64_t> samples;
  samples.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = sample_initial(g, scheme, derive_seed(seed, i), false);
    std::uint64_t count = 0;
    for (Walker w = 0; w < s.walker_count(); ++w) {
      if (s.starts[w] != walk.front()) continue;
      Vertex x = walk.front();
      bool traced = true;
      for (std::size_t j = 0; j + 1 < walk.size() && traced; ++j) {
        x = next_position(g, s.key, w, j, x, holding);
        traced = x == walk[j + 1];
      }
      count += traced;
    }
    samples.push_back(count);
  }
  return chi_square_poisson(samples, scheme.density * stationary_distribution(g).pibar[walk.front()] * p);
}

CorrelationResult occupancy_correlation(const Graph& g, Vertex u, Vertex v, std::size_t t, const InitScheme& scheme,
                                        std::uint64_t trials, std::uint64_t seed, double holding) {
  check_vertex(g, u);
  check_vertex(g, v);
  check_trials(trials);
  CorrelationResult r;
  r.trials = trials;
  r.bound = 3.0 / std::sqrt(static_cast<double>(trials));
  if (is_deterministic(scheme)) {
    r.applicable = false;
    return r;
  }
  double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = evolve(g, scheme, t, derive_seed(seed, i), holding);
    const double a = s.occupancy[u], b = s.occupancy[v];
    su += a;
    sv += b;
    suu += a * a;
    svv += b * b;
    suv += a * b;
  }
  const double n = static_cast<double>(trials);
  const double cov = suv / n - (su / n) * (sv / n);
  const double var_u = suu / n - (su / n) * (su / n);
  const double var_v = svv / n - (sv / n) * (sv / n);
  r.rho = var_u > 0.0 && var_v > 0.0 ? cov / std::sqrt(var_u * var_v) : 0.0;
  r.within = std::abs(r.rho) <= r.bound;
  return r;
}

AcquaintanceRate acquaintance_rate(const Graph& g, const std::vector<Vertex>& walk, double holding,
                                   std::uint64_t budget) {
  const double p = walk_weight(g, walk, holding);
  require(p > 0.0, ErrorKind::invalid_input, "sequence is not a walk of the kernel");
  const auto pibar = stationary_distribution(g).pibar;
  AcquaintanceRate r;
  r.q_gamma = pibar[walk.front()] * p;
  for (const auto& other : enumerate_walks(g, walk.size() - 1, holding, budget)) {
    if (other.vertices == walk) continue;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (other.vertices[i] == walk[i]) {
        r.a_gamma += other.q;
        break;
      }
    }
  }
  r.bound = -r.q_gamma;
  for (Vertex x : walk) r.bound += pibar[x];
  r.bound_holds = r.a_gamma <= r.bound + 1e-12;
  return r;
}

MonteCarloMean acquaintance_rate_mc(const Graph& g, const std::vector<Vertex>& walk, std::uint64_t trials,
                                    std::uint64_t seed, double holding) {
  check_trials(trials);
  require(walk_weight(g, walk, holding) > 0.0, ErrorKind::invalid_input, "sequence is not a walk of the kernel");
  Accumulator acc;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = sample_initial(g, InitScheme::poisson(1.0), derive_seed(seed, i), false);
    std::uint64_t met = 0;
    for (Walker w = 0; w < s.walker_count(); ++w) {
      Vertex x = s.starts[w];
      bool hit = x == walk.front();
      bool same = hit;
      for (std::size_t j = 0; j + 1 < walk.size(); ++j) {
        x = next_position(g, s.key, w, j, x, holding);
        if (x == walk[j + 1]) {
          hit = true;
        } else {
          same = false;
        }
      }
      met += hit && !same;
    }
    acc.add(static_cast<double>(met));
  }
  return acc.result();
}

double il_lower_bound(const Graph& g, Vertex v, std::size_t t) {
  check_vertex(g, v);
  const double pibar = stationary_distribution(g).pibar[v];
  const double td = static_cast<double>(t);
  return std::exp2(-td) * pibar * std::exp(-(td + 1.0) * pibar);
}

IlProbability il_probability(const Graph& g, Vertex v, std::size_t t, std::uint64_t budget) {
  IlProbability r;
  r.bound = il_lower_bound(g, v, t);
  const std::vector<Vertex> stay(t + 1, v);
  double q_stay = 0.0, others = 0.0;
  for (const auto& w : enumerate_walks(g, t, 0.5, budget)) {
    if (w.vertices == stay) {
      q_stay = w.q;
    } else if (std::find(w.vertices.begin(), w.vertices.end(), v) != w.vertices.end()) {
      // Positions are time-indexed, so any occurrence of v is a shared time.
      others += w.q;
    }
  }
  // Exactly one walker traces the constant walk and nobody else visits v.
  r.exact = q_stay * std::exp(-q_stay) * std::exp(-others);
  r.bound_holds = r.bound <= *r.exact + 1e-12;
  return r;
}

MonteCarloMean il_probability_mc(const Graph& g, Vertex v, std::size_t t, std::uint64_t trials, std::uint64_t seed) {
  check_vertex(g, v);
  check_trials(trials);
  Accumulator acc;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = evolve(g, InitScheme::poisson(1.0), t, derive_seed(seed, i), 0.5);
    acc.add(isolation_census(s, g).il_vertex[v]);
  }
  return acc.result();
}

IsolatedBounds isolated_expectation_bounds(const Graph& g, std::uint64_t m, std::size_t t, double holding) {
  require(m >= 1, ErrorKind::invalid_parameter, "m must be at least 1");
  const auto dist = stationary_distribution(g);
  const double n = g.vertex_count();
  const double td = static_cast<double>(t);
  double light_mass = 0.0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (dist.pibar[v] <= 2.0) light_mass += dist.pi[v];
  }
  IsolatedBounds b;
  const double base = 1.0 - 2.0 * (td + 1.0) / n;
  b.ml1 = base > 0.0 ? static_cast<double>(m) * light_mass * std::exp2(-td) *
                           std::pow(base, static_cast<double>(m - 1))
                     : 0.0;
  if (g.is_regular()) b.ml2 = isolated_bound_regular(g, m, t, holding);
  return b;
}

double isolated_bound_regular(const Graph& g, std::uint64_t m, std::size_t t, double holding) {
  require(g.is_regular(), ErrorKind::invalid_input, "this bound needs a regular graph");
  require(m >= 1, ErrorKind::invalid_parameter, "m must be at least 1");
  const double kappa_t = kappa(g, holding, t).back();
  const double n = g.vertex_count();
  const double base = 1.0 - ((2.0 * static_cast<double>(t) + 1.0) / n) / kappa_t;
  return base > 0.0 ? static_cast<double>(m) * std::pow(base, static_cast<double>(m - 1)) : 0.0;
}

IsolatedMeans isolated_counts_mc(const Graph& g, std::uint64_t m, std::size_t t, std::uint64_t trials,
                                 std::uint64_t seed, double holding) {
  check_trials(trials);
  Accumulator y, z;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = evolve(g, InitScheme::fixed_m(m), t, derive_seed(seed, i), holding);
    y.add(s.never_met);
    z.add(s.lazy_isolated);
  }
  return {y.result(), z.result()};
}

DominanceResult dominance_check(const std::vector<double>& p, std::size_t k) {
  const std::size_t n = p.size();
  require(n >= 1 && n <= 3, ErrorKind::invalid_parameter, "dominance check supports 1 to 3 events");
  require(k >= 1 && k <= n, ErrorKind::invalid_parameter, "k must lie in 1..n");
  for (double x : p) require(x >= 0.0 && x <= 1.0, ErrorKind::invalid_parameter, "probabilities must lie in [0,1]");
  const unsigned states = 1u << n;
  std::vector<double> mass(states);
  for (unsigned s = 0; s < states; ++s) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= (s >> i) & 1u ? p[i] : 1.0 - p[i];
    mass[s] = w;
  }
  double z_hi = 0.0, z_lo = 0.0;
  for (unsigned s = 0; s < states; ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) == k) z_hi += mass[s];
    if (static_cast<std::size_t>(std::popcount(s)) == k - 1) z_lo += mass[s];
  }
  require(z_hi > 0.0 && z_lo > 0.0, ErrorKind::invalid_parameter, "conditioning event has probability zero");

  DominanceResult r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  // Families of subsets as bitmasks over the 2^n states.
  for (std::uint32_t family = 0; family < (1u << states); ++family) {
    bool up_closed = true;
    for (unsigned s = 0; s < states && up_closed; ++s) {
      if (!((family >> s) & 1u)) continue;
      for (unsigned sup = 0; sup < states; ++sup) {
        if ((sup & s) == s && !((family >> sup) & 1u)) {
          up_closed = false;
          break;
        }
      }
    }
    if (!up_closed) continue;
    ++r.upsets_checked;
    double hi = 0.0, lo = 0.0;
    for (unsigned s = 0; s < states; ++s) {
      if (!((family >> s) & 1u)) continue;
      if (static_cast<std::size_t>(std::popcount(s)) == k) hi += mass[s];
      if (static_cast<std::size_t>(std::popcount(s)) == k - 1) lo += mass[s];
    }
    const double margin = hi / z_hi - lo / z_lo;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -1e-12) r.dominates = false;
  }
  return r;
}

double apply(TestFunction f, std::uint32_t x) {
  switch (f) {
    case TestFunction::at_least_one:
      return x > 0 ? 1.0 : 0.0;
    case TestFunction::identity:
      return x;
    case TestFunction::is_zero:
      return x == 0 ? 1.0 : 0.0;
    case TestFunction::reciprocal:
      return 1.0 / (1.0 + x);
  }
  return 0.0;
}

bool is_increasing(TestFunction f) { return f == TestFunction::at_least_one || f == TestFunction::identity; }

namespace {

// All uniform-monotone assignments of two candidate functions to n bins.
std::vector<std::vector<TestFunction>> monotone_assignments(std::size_t n) {
  std::vector<std::vector<TestFunction>> out;
  const std::pair<TestFunction, TestFunction> families[] = {
      {TestFunction::at_least_one, TestFunction::identity},
      {TestFunction::is_zero, TestFunction::reciprocal},
  };
  for (const auto& [a, b] : families) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<TestFunction> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = (mask >> i) & 1u ? b : a;
      out.push_back(std::move(f));
    }
  }
  return out;
}

void check_monotone(const std::vector<TestFunction>& f) {
  const bool inc = is_increasing(f.front());
  for (auto x : f) {
    require(is_increasing(x) == inc, ErrorKind::invalid_input,
            "test functions must be all increasing or all decreasing");
  }
}

}  // namespace

NegativeCorrelationResult negative_correlation_exact(const std::vector<std::vector<double>>& laws,
                                                     const std::vector<TestFunction>& functions) {
  const std::size_t m = laws.size();
  require(m >= 1 && m <= 6, ErrorKind::invalid_parameter, "exact check supports 1 to 6 balls");
  const std::size_t n = laws.front().size();
  require(n >= 1 && n <= 4, ErrorKind::invalid_parameter, "exact check supports 1 to 4 bins");
  for (const auto& law : laws) {
    require(law.size() == n, ErrorKind::invalid_input, "every ball needs a law over the same bins");
    double total = 0.0;
    for (double x : law) {
      require(x >= 0.0, ErrorKind::invalid_input, "probabilities must be nonnegative");
      total += x;
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorKind::invalid_input, "each ball law must sum to 1");
  }
  std::vector<std::vector<TestFunction>> combos;
  if (functions.empty()) {
    combos = monotone_assignments(n);
  } else {
    require(functions.size() == n, ErrorKind::invalid_input, "one test function per bin");
    check_monotone(functions);
    combos.push_back(functions);
  }

  // Outcome distribution of the count vector.
  std::size_t outcomes = 1;
  for (std::size_t j = 0; j < m; ++j) outcomes *= n;
  std::vector<std::pair<double, std::vector<std::uint32_t>>> table;
  table.reserve(outcomes);
  for (std::size_t code = 0; code < outcomes; ++code) {
    std::vector<std::uint32_t> y(n, 0);
    double w = 1.0;
    std::size_t c = code;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t bin = c % n;
      c /= n;
      ++y[bin];
      w *= laws[j][bin];
    }
    if (w > 0.0) table.emplace_back(w, std::move(y));
  }

  NegativeCorrelationResult r;
  r.combinations = combos.size();
  r.worst_gap = -std::numeric_limits<double>::infinity();
  for (const auto& f : combos) {
    double lhs = 0.0;
    std::vector<double> marginal(n, 0.0);
    for (const auto& [w, y] : table) {
      double prod = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double fi = apply(f[i], y[i]);
        prod *= fi;
        marginal[i] += w * fi;
      }
      lhs += w * prod;
    }
    double rhs = 1.0;
    for (double e : marginal) rhs *= e;
    r.worst_gap = std::max(r.worst_gap, lhs - rhs);
    if (lhs > rhs + 1e-12) r.holds = false;
  }
  return r;
}

NegativeCorrelationResult negative_correlation_check(const Graph& g, const std::vector<Vertex>& starts, std::size_t t,
                                                     std::uint64_t trials, std::uint64_t seed, double holding) {
  require(!starts.empty(), ErrorKind::invalid_input, "at least one walker is needed");
  for (Vertex v : starts) check_vertex(g, v);
  const auto n = g.vertex_count();
  if (n <= 4 && starts.size() <= 6) {
    const Eigen::MatrixXd pt = power(kernel(g, holding), t);
    std::vector<std::vector<double>> laws;
    for (Vertex v : starts) {
      std::vector<double> row(n);
      for (Vertex x = 0; x < n; ++x) row[x] = pt(v, x);
      laws.push_back(std::move(row));
    }
    return negative_correlation_exact(laws);
  }

  check_trials(trials);
  const TestFunction uniform[] = {TestFunction::at_least_one, TestFunction::identity, TestFunction::is_zero,
                                  TestFunction::reciprocal};
  NegativeCorrelationResult r;
  r.exact = false;
  r.combinations = std::size(uniform);
  r.worst_gap = -std::numeric_limits<double>::infinity();
  std::vector<Accumulator> prod(std::size(uniform));
  std::vector<std::vector<double>> marginal(std::size(uniform), std::vector<double>(n, 0.0));
  std::vector<std::uint32_t> y(n);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto key = make_key(derive_seed(seed, i));
    std::fill(y.begin(), y.end(), 0);
    for (std::size_t w = 0; w < starts.size(); ++w) {
      Vertex x = starts[w];
      for (std::size_t j = 0; j < t; ++j) x = next_position(g, key, static_cast<Walker>(w), j, x, holding);
      ++y[x];
    }
    for (std::size_t f = 0; f < std::size(uniform); ++f) {
      double p = 1.0;
      for (Vertex v = 0; v < n; ++v) {
        const double fv = apply(uniform[f], y[v]);
        p *= fv;
        marginal[f][v] += fv;
      }
      prod[f].add(p);
    }
  }
  for (std::size_t f = 0; f < std::size(uniform); ++f) {
    const auto lhs = prod[f].result();
    double rhs = 1.0;
    for (double e : marginal[f]) rhs *= e / static_cast<double>(trials);
    const double gap = lhs.mean - rhs - 3.0 * lhs.stderr_;
    r.worst_gap = std::max(r.worst_gap, gap);
    if (gap > 0.0) r.holds = false;
  }
  return r;
}

double pair_meeting_exact(const Graph& g, Vertex u, Vertex v, std::size_t t, double holding) {
  check_vertex(g, u);
  check_vertex(g, v);
  if (u == v) return 1.0;
  const auto n = g.vertex_count();
  require(n <= 2048, ErrorKind::budget_exceeded, "pair chain limited to n <= 2048");
  const auto k = sparse_kernel(g, holding);
  // Joint law of the two positions restricted to "not met yet".
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(n, n);
  joint(u, v) = 1.0;
  double met = 0.0;
  for (std::size_t step = 0; step < t; ++step) {
    const Eigen::MatrixXd right = multiply_by_kernel(joint, k);  // second walker moves
    joint = multiply_by_kernel(right.transpose(), k).transpose();
    for (Vertex x = 0; x < n; ++x) {
      met += joint(x, x);
      joint(x, x) = 0.0;
    }
  }
  return std::min(met, 1.0);
}

MonteCarloMean pair_meeting_mc(const Graph& g, Vertex u, Vertex v, std::size_t t, std::uint64_t trials,
                               std::uint64_t seed, double holding) {
  check_vertex(g, u);
  check_vertex(g, v);
  check_trials(trials);
  Accumulator acc;
  for (std::uint64_t i = 0; i < trials; ++i) {
    SimState s = sample_from_positions(g, {u, v}, derive_seed(seed, i), false);
    for (std::size_t j = 0; j < t && s.classes.class_count() > 1; ++j) step_discrete(s, g, holding);
    acc.add(s.classes.class_count() == 1 ? 1.0 : 0.0);
  }
  return acc.result();
}

double skellam_pmf(std::int64_t j, double k) {
  require(k >= 0.0 && std::isfinite(k), ErrorKind::invalid_parameter, "k must be a nonnegative real");
  if (k == 0.0) return j == 0 ? 1.0 : 0.0;
  const double lambda = 0.5 * k;
  const std::uint64_t a_max = static_cast<std::uint64_t>(std::ceil(k + 40.0 * std::sqrt(k + 1.0)));
  const double shift = static_cast<double>(j < 0 ? -j : j);
  const double log_lambda = std::log(lambda);
  std::vector<double> logs;
  logs.reserve(a_max + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t a = 0; a <= a_max; ++a) {
    const double ad = static_cast<double>(a);
    const double l = -k + (2.0 * ad + shift) * log_lambda - std::lgamma(ad + 1.0) - std::lgamma(ad + shift + 1.0);
    logs.push_back(l);
    top = std::max(top, l);
  }
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - top);
  return std::exp(top) * sum;
}

SkellamSurvival skellam_survival(std::int64_t i, double k) {
  require(i >= 1, ErrorKind::invalid_parameter, "i must be at least 1");
  SkellamSurvival r;
  double sum = skellam_pmf(0, k);
  for (std::int64_t j = 1; j < i; ++j) sum += 2.0 * skellam_pmf(j, k);
  sum += skellam_pmf(i, k);
  r.value = std::min(sum, 1.0);
  const double id = static_cast<double>(i);
  if (k > 0.0 && std::floor(4.0 * std::sqrt(k)) < id && id <= 1.2 * k) {
    r.envelope = 1.0 - 2.0 * std::exp(-id * id / (8.0 * k));
    r.envelope_holds = r.value >= *r.envelope - 1e-12;
  }
  return r;
}

CrossingProfile crossing_mean_bound(const Graph& g, Vertex v, std::size_t t_max, double holding) {
  check_vertex(g, v);
  const auto n = g.vertex_count();
  require(g.is_symmetric() && g.is_regular() && g.min_degree() == 2 && n >= 3, ErrorKind::invalid_input,
          "crossing bound is defined on cycles");
  require(t_max <= static_cast<std::size_t>(n) * n, ErrorKind::invalid_parameter, "t must not exceed n^2");
  const auto k = sparse_kernel(g, holding);
  // h(u) = P_u[T_v <= t]
  std::vector<double> h(n, 0.0), next(n);
  h[v] = 1.0;
  CrossingProfile r;
  for (std::size_t t = 0;; ++t) {
    double mu = 0.0;
    for (double x : h) mu += x;
    const double td = static_cast<double>(t);
    const double ratio = mu * std::sqrt(td + 1.0) / (2.0 * td + 1.0);
    r.mu.push_back(mu);
    r.ratio.push_back(ratio);
    r.c_needed = std::max(r.c_needed, ratio);
    if (t == t_max) break;
    for (Vertex u = 0; u < n; ++u) {
      if (u == v) {
        next[u] = 1.0;
        continue;
      }
      double acc = 0.0;
      for (auto e = k.offsets[u]; e < k.offsets[u + 1]; ++e) acc += k.values[e] * h[k.columns[e]];
      next[u] = acc;
    }
    h.swap(next);
  }
  return r;
}

MonteCarloMean crossing_visitors_mc(const Graph& g, Vertex v, std::size_t t, std::uint64_t trials, std::uint64_t seed,
                                    double holding) {
  check_vertex(g, v);
  check_trials(trials);
  Accumulator acc;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const SimState s = sample_initial(g, InitScheme::poisson(1.0), derive_seed(seed, i), false);
    std::uint64_t visitors = 0;
    for (Walker w = 0; w < s.walker_count(); ++w) {
      Vertex x = s.starts[w];
      bool hit = x == v;
      for (std::size_t j = 0; j < t && !hit; ++j) {
        x = next_position(g, s.key, w, j, x, holding);
        hit = x == v;
      }
      visitors += hit;
    }
    acc.add(static_cast<double>(visitors));
  }
  return acc.result();
}

MonteCarloMean hit_probability_mc(const Graph& g, std::optional<Vertex> start, const std::vector<Vertex>& targets,
                                  std::uint64_t walks, std::uint64_t seed, double holding) {
  check_trials(walks);
  if (start) check_vertex(g, *start);
  for (Vertex x : targets) check_vertex(g, x);
  Accumulator acc;
  for (std::uint64_t i = 0; i < walks; ++i) {
    const std::uint64_t walk_seed = derive_seed(seed, i);
    const auto key = make_key(walk_seed);
    Vertex x;
    if (start) {
      x = *start;
    } else {
      PhiloxStream stream(walk_seed, 0, 1, Domain::oracle);
      x = g.arc_tail(stream.bounded(g.arc_count()));
    }
    bool hit = false;
    for (std::size_t j = 0; j < targets.size() && !hit; ++j) {
      x = next_position(g, key, 0, j, x, holding);
      hit = x == targets[j];
    }
    acc.add(hit ? 1.0 : 0.0);
  }
  return acc.result();
}

ExpanderHitReport expander_hit_bound_check(const Graph& g, std::size_t sequences, std::uint64_t walks,
                                           std::uint64_t seed, double c, double holding) {
  require(g.is_regular() && g.is_symmetric(), ErrorKind::invalid_input, "expander check needs a regular undirected graph");
  require(c > 0.0, ErrorKind::invalid_parameter, "C must be positive");
  require(sequences >= 1, ErrorKind::invalid_parameter, "at least one target sequence is needed");
  const double n = g.vertex_count();
  ExpanderHitReport r;
  r.gamma = spectral_gap(g, holding);
  r.t = static_cast<std::uint64_t>(std::ceil(c * std::log(n) / r.gamma));
  r.bound = 0.125 * std::min(r.gamma * static_cast<double>(r.t) / n, 1.0);
  for (std::size_t s = 0; s < sequences; ++s) {
    PhiloxStream stream(derive_seed(seed, s), 0, 2, Domain::oracle);
    std::vector<Vertex> targets(r.t);
    for (auto& x : targets) x = static_cast<Vertex>(stream.bounded(g.vertex_count()));
    const auto mc = hit_probability_mc(g, std::nullopt, targets, walks, derive_seed(~seed, s), holding);
    HitSequenceResult h{mc.mean, mc.stderr_, mc.mean >= r.bound - 3.0 * mc.stderr_};
    r.verdict = r.verdict && h.ok;
    r.sequences.push_back(h);
  }
  return r;
}

}  // namespace acquaint
