#pragma once

// Hand-rolled generators for property tests. Every case is a pure function of
// (seed, index) so a failing case can be replayed from the printed label.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "acquaint/graph.hpp"

namespace acquaint::testing {

struct GraphCase {
  std::string label;
  Graph graph;
};

inline std::uint32_t pick(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

// A random member of one of the builder families, small enough for dense
// spectral work (n <= ~64).
inline GraphCase random_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  switch (pick(rng, 0, 7)) {
    case 0: {
      const auto n = pick(rng, 3, 48);
      return {"cycle n=" + std::to_string(n), build_cycle(n)};
    }
    case 1: {
      const auto dim = pick(rng, 1, 3);
      const auto side = pick(rng, 3, dim == 3 ? 3 : 6);
      return {"torus dim=" + std::to_string(dim) + " side=" + std::to_string(side), build_torus(dim, side)};
    }
    case 2: {
      const auto n = pick(rng, 2, 14);
      return {"complete n=" + std::to_string(n), build_complete(n)};
    }
    case 3: {
      auto n = pick(rng, 6, 40);
      const auto d = pick(rng, 3, 5);
      if ((n * d) % 2) ++n;
      const auto s = rng();
      return {"random_regular n=" + std::to_string(n) + " d=" + std::to_string(d) + " seed=" + std::to_string(s),
              build_random_regular(n, d, s)};
    }
    case 4: {
      const auto k = pick(rng, 2, 5);
      const auto l = pick(rng, 1, 4);
      return {"clique_star k=" + std::to_string(k) + " L=" + std::to_string(l), build_clique_star(k, l)};
    }
    case 5: {
      const auto k = pick(rng, 3, 5);
      const auto m = pick(rng, 4, 6);
      return {"linked_cliques k=" + std::to_string(k) + " m=" + std::to_string(m), build_linked_cliques(k, m)};
    }
    case 6: {
      const auto c = pick(rng, 4, 7);
      const auto len = pick(rng, 0, 5);
      return {"two_cliques n=" + std::to_string(c) + " len=" + std::to_string(len), build_two_cliques(c, len)};
    }
    default: {
      const auto l = pick(rng, 1, 7);
      return {"star leaves=" + std::to_string(l), build_star(l)};
    }
  }
}

inline std::vector<GraphCase> graph_zoo(std::uint64_t seed, std::size_t count) {
  std::vector<GraphCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_graph(seed * 1'000'003ull + i));
  return out;
}

// Fixed named instances that every property suite also covers.
inline std::vector<GraphCase> named_graphs() {
  std::vector<GraphCase> out;
  out.push_back({"C_3", build_cycle(3)});
  out.push_back({"C_8", build_cycle(8)});
  out.push_back({"K_2", build_complete(2)});
  out.push_back({"K_5", build_complete(5)});
  out.push_back({"torus 2x4", build_torus(2, 4)});
  out.push_back({"clique_star 3,2", build_clique_star(3, 2)});
  out.push_back({"linked_cliques 3,4", build_linked_cliques(3, 4)});
  out.push_back({"two_cliques 5,path 5", build_two_cliques(5, 5)});
  out.push_back({"star 3", build_star(3)});
  out.push_back({"random_regular 64,3", build_random_regular(64, 3, 7)});
  return out;
}

// Random probability vector of length n with no tiny entries.
inline std::vector<double> random_law(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace acquaint::testing
