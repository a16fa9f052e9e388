#include "acquaint/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "acquaint/engine.hpp"
#include "acquaint/error.hpp"
#include "acquaint/spectral.hpp"

namespace acquaint {

namespace {

void push_witness(std::vector<Vertex>& list, Vertex v) {
  if (list.size() < kMaxWitnesses) list.push_back(v);
}

}  // namespace

std::vector<std::uint32_t> occupancy_of(const Graph& g, const std::vector<Vertex>& positions) {
  std::vector<std::uint32_t> y(g.vertex_count(), 0);
  for (Vertex v : positions) {
    require(v < g.vertex_count(), ErrorKind::invalid_input, "walker position out of range");
    ++y[v];
  }
  return y;
}

BalanceReport check_balanced(const std::vector<std::uint32_t>& occupancy, const Graph& g, double delta,
                             std::uint64_t t, double holding) {
  require(delta > 0.0 && delta <= 0.125, ErrorKind::invalid_parameter, "delta must lie in (0, 1/8]");
  return check_balanced(occupancy, g, delta, t, power(kernel(g, holding), t));
}

BalanceReport check_balanced(const std::vector<std::uint32_t>& occupancy, const Graph& g, double delta,
                             std::uint64_t t, const Eigen::MatrixXd& p_t) {
  require(delta > 0.0 && delta <= 0.125, ErrorKind::invalid_parameter, "delta must lie in (0, 1/8]");
  const auto n = g.vertex_count();
  require(occupancy.size() == n, ErrorKind::invalid_input, "occupancy length must equal the vertex count");
  require(p_t.rows() == n && p_t.cols() == n, ErrorKind::invalid_input, "P^t has the wrong shape");

  Eigen::RowVectorXd y(n);
  for (Vertex u = 0; u < n; ++u) y(u) = occupancy[u];
  const Eigen::RowVectorXd z = y * p_t;
  const auto pibar = stationary_distribution(g).pibar;

  BalanceReport r;
  r.delta = delta;
  r.t = t;
  r.density_limit = std::log(static_cast<double>(n));
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = 0.0;
  bool low_ok = true, high_ok = true;
  for (Vertex v = 0; v < n; ++v) {
    const double ratio = z(v) / pibar[v];
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (z(v) < (1.0 - delta) * pibar[v]) {
      low_ok = false;
      push_witness(r.low_witnesses, v);
    }
    if (z(v) >= (1.0 + 2.0 * delta) * pibar[v]) {
      high_ok = false;
      push_witness(r.high_witnesses, v);
    }
    const double density = static_cast<double>(occupancy[v]) / g.degree(v);
    r.max_density = std::max(r.max_density, density);
    if (density > r.density_limit) push_witness(r.density_witnesses, v);
  }
  r.balanced = low_ok && r.max_density <= r.density_limit;
  r.fully_balanced = r.balanced && high_ok;
  return r;
}

MergingEstimate estimate_merging(const std::vector<Vertex>& positions, const std::vector<std::uint32_t>& part_of,
                                 const Graph& g, std::uint64_t t, double holding, std::uint64_t trials,
                                 std::uint64_t seed) {
  require(trials >= 1, ErrorKind::invalid_parameter, "trials must be at least 1");
  require(holding >= 0.0 && holding < 1.0, ErrorKind::invalid_parameter, "holding probability must lie in [0,1)");
  require(positions.size() == part_of.size(), ErrorKind::invalid_input, "one part label per walker");
  const auto n = g.vertex_count();

  // Dense part ids, and the vertex-respecting check.
  std::map<std::uint32_t, std::uint32_t> dense;
  for (auto label : part_of) dense.emplace(label, 0);
  std::uint32_t next_id = 0;
  for (auto& [label, id] : dense) id = next_id++;
  std::vector<std::uint32_t> part(positions.size());
  std::vector<std::uint32_t> owner(n, kNoWalker);
  for (std::size_t w = 0; w < positions.size(); ++w) {
    require(positions[w] < n, ErrorKind::invalid_input, "walker position out of range");
    part[w] = dense[part_of[w]];
    auto& o = owner[positions[w]];
    require(o == kNoWalker || o == part[w], ErrorKind::invalid_input,
            "partition must put walkers sharing a vertex in the same part");
    o = part[w];
  }

  MergingEstimate est;
  est.trials = trials;
  est.t = t;
  const std::uint32_t parts = next_id;
  if (parts < 2) return est;

  std::vector<std::uint64_t> merged_count(parts, 0);
  double frac_sum = 0.0, frac_sq = 0.0;
  std::vector<Vertex> pos;
  std::vector<std::uint64_t> stamp(n, 0);
  std::vector<std::uint32_t> first_part(n);
  std::vector<std::uint8_t> mixed(n);
  std::vector<std::uint8_t> merged(parts);
  std::uint64_t clock = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const auto key = make_key(derive_seed(seed, trial));
    pos = positions;
    std::fill(merged.begin(), merged.end(), 0);
    for (std::uint64_t step = 0; step < t; ++step) {
      ++clock;
      for (std::size_t w = 0; w < pos.size(); ++w) {
        pos[w] = next_position(g, key, static_cast<Walker>(w), step, pos[w], holding);
        const Vertex v = pos[w];
        if (stamp[v] != clock) {
          stamp[v] = clock;
          first_part[v] = part[w];
          mixed[v] = 0;
        } else if (first_part[v] != part[w]) {
          mixed[v] = 1;
        }
      }
      for (std::size_t w = 0; w < pos.size(); ++w) {
        if (mixed[pos[w]]) merged[part[w]] = 1;
      }
    }
    std::uint32_t merged_parts = 0;
    for (std::uint32_t i = 0; i < parts; ++i) {
      merged_count[i] += merged[i];
      merged_parts += merged[i];
    }
    const double frac = static_cast<double>(merged_parts) / parts;
    frac_sum += frac;
    frac_sq += frac * frac;
  }

  const double nt = static_cast<double>(trials);
  for (std::uint32_t i = 0; i < parts; ++i) {
    const double p = merged_count[i] / nt;
    est.part_probability.push_back(p);
    est.part_stderr.push_back(std::sqrt(p * (1.0 - p) / nt));
  }
  const double mean = frac_sum / nt;
  est.global_fraction = mean;
  const double var = trials > 1 ? std::max(0.0, (frac_sq - nt * mean * mean) / (nt - 1.0)) : 0.0;
  est.global_stderr = std::sqrt(var / nt);
  return est;
}

}  // namespace acquaint
