#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "acquaint/graph.hpp"

namespace acquaint {

// Exact (delta, t)-balance evaluation of an occupancy vector Y.
//   z_v = sum_u Y_u P^t(u,v)
//   balanced:       z_v >= (1 - delta) pibar_v for all v, and max_u Y_u / d_u <= ln n
//   fully balanced: balanced and z_v < (1 + 2 delta) pibar_v for all v
struct BalanceReport {
  double delta = 0.0;
  std::uint64_t t = 0;
  double min_ratio = 0.0;    // min_v z_v / pibar_v
  double max_ratio = 0.0;    // max_v z_v / pibar_v
  double max_density = 0.0;  // max_u Y_u / d_u
  double density_limit = 0.0;
  bool balanced = false;
  bool fully_balanced = false;
  // At most kMaxWitnesses vertices per failure kind.
  std::vector<Vertex> low_witnesses;
  std::vector<Vertex> high_witnesses;
  std::vector<Vertex> density_witnesses;
};

inline constexpr std::size_t kMaxWitnesses = 32;

BalanceReport check_balanced(const std::vector<std::uint32_t>& occupancy, const Graph& g, double delta,
                             std::uint64_t t, double holding);
// Same with a precomputed P^t, for callers checking many configurations.
BalanceReport check_balanced(const std::vector<std::uint32_t>& occupancy, const Graph& g, double delta,
                             std::uint64_t t, const Eigen::MatrixXd& p_t);

// Walkers by position -> Y.
std::vector<std::uint32_t> occupancy_of(const Graph& g, const std::vector<Vertex>& positions);

struct MergingEstimate {
  std::uint64_t trials = 0;
  std::uint64_t t = 0;
  // Empty when the partition has a single part (no outsiders to meet).
  std::vector<double> part_probability;
  std::vector<double> part_stderr;
  std::optional<double> global_fraction;  // mean over trials of the fraction of parts that merged
  double global_stderr = 0.0;
};

// For each part, the fraction of `trials` independent t-step evolutions in
// which some member is co-located with a non-member at some time 1..t. Parts
// are the distinct values of `part_of`, in increasing order.
MergingEstimate estimate_merging(const std::vector<Vertex>& positions, const std::vector<std::uint32_t>& part_of,
                                 const Graph& g, std::uint64_t t, double holding, std::uint64_t trials,
                                 std::uint64_t seed);

}  // namespace acquaint
