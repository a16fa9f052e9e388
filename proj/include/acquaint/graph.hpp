#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace acquaint {

using Vertex = std::uint32_t;
using Arc = std::pair<Vertex, Vertex>;

// Connected Eulerian digraph stored as a sorted arc multiset in CSR form.
// An undirected edge {u,v} is the two arcs (u,v) and (v,u). Immutable after
// construction; every constructor path validates the Eulerian and strong
// connectivity invariants.
class Graph {
 public:
  // Throws Error{not_eulerian | not_connected | invalid_input}.
  static Graph from_arcs(std::uint32_t n, std::vector<Arc> arcs, std::string family_tag);

  std::uint32_t vertex_count() const { return n_; }
  std::uint64_t arc_count() const { return heads_.size(); }
  std::uint32_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Vertex> out_neighbors(Vertex v) const {
    return {heads_.data() + offsets_[v], heads_.data() + offsets_[v + 1]};
  }
  // Tail of the arc with global index `arc` (arcs are numbered in CSR order).
  Vertex arc_tail(std::uint64_t arc) const;

  std::vector<Arc> arcs() const;
  std::vector<std::uint32_t> degrees() const;

  double average_degree() const { return static_cast<double>(arc_count()) / n_; }
  std::uint32_t min_degree() const { return min_degree_; }
  std::uint32_t max_degree() const { return max_degree_; }
  bool is_regular() const { return min_degree_ == max_degree_; }
  // r_* = min_u d_u / d as the exact fraction (min_degree * n) / arc_count.
  std::pair<std::uint64_t, std::uint64_t> r_star_fraction() const {
    return {std::uint64_t{min_degree_} * n_, arc_count()};
  }
  double r_star() const { return static_cast<double>(min_degree_) * n_ / static_cast<double>(arc_count()); }
  // True when the arc multiset is symmetric (the graph is undirected).
  bool is_symmetric() const { return symmetric_; }
  // Multiplicity of arc (u,v).
  std::uint32_t arc_multiplicity(Vertex u, Vertex v) const;

  const std::string& family_tag() const { return family_tag_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.heads_ == b.heads_;
  }

 private:
  Graph() = default;

  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<Vertex> heads_;
  std::uint32_t min_degree_ = 0;
  std::uint32_t max_degree_ = 0;
  bool symmetric_ = false;
  std::string family_tag_;
};

struct StationaryDistribution {
  std::vector<double> pi;     // d_v / m
  std::vector<double> pibar;  // n * pi_v = d_v / d
};

StationaryDistribution stationary_distribution(const Graph& g);

// Builders. Vertex layouts are documented in graph.cpp next to each builder.
Graph build_cycle(std::uint32_t n);
Graph build_torus(std::uint32_t dim, std::uint32_t side);
Graph build_complete(std::uint32_t n);
Graph build_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed);
Graph build_clique_star(std::uint32_t clique_size, std::uint32_t star_size);
Graph build_linked_cliques(std::uint32_t copies, std::uint32_t clique);
// path_length == 0 selects the edge-pair mode: each clique loses one edge and
// two cross edges restore (n-1)-regularity.
Graph build_two_cliques(std::uint32_t clique, std::uint32_t path_length);
// Star with `leaves` leaves around vertex 0; not part of the studied
// families but handy for non-regular checks.
Graph build_star(std::uint32_t leaves);

// Edge-list text format: "arcs <n> <m>" then m lines "<u> <v>"; '#' lines
// are comments. save_edge_list writes arcs sorted lexicographically.
Graph load_edge_list(std::string_view text, std::string family_tag = "file");
std::string save_edge_list(const Graph& g);

// Strong connectivity of an arbitrary arc list (used by validation and tests).
bool arcs_strongly_connected(std::uint32_t n, const std::vector<Arc>& arcs);

}  // namespace acquaint
