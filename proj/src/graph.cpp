#include "acquaint/graph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "acquaint/error.hpp"
#include "acquaint/rng.hpp"

namespace acquaint {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::not_eulerian: return "not-Eulerian";
    case ErrorKind::not_connected: return "not-connected";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::generation_failure: return "generation-failure";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::no_convergence: return "no-convergence";
  }
  return "error";
}

namespace {

void add_edge(std::vector<Arc>& arcs, Vertex u, Vertex v) {
  arcs.emplace_back(u, v);
  arcs.emplace_back(v, u);
}

std::vector<std::vector<Vertex>> adjacency(std::uint32_t n, const std::vector<Arc>& arcs, bool reverse) {
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& [u, v] : arcs) {
    if (reverse) {
      adj[v].push_back(u);
    } else {
      adj[u].push_back(v);
    }
  }
  return adj;
}

bool reaches_all(const std::vector<std::vector<Vertex>>& adj) {
  const auto n = adj.size();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace

bool arcs_strongly_connected(std::uint32_t n, const std::vector<Arc>& arcs) {
  return reaches_all(adjacency(n, arcs, false)) && reaches_all(adjacency(n, arcs, true));
}

Graph Graph::from_arcs(std::uint32_t n, std::vector<Arc> arcs, std::string family_tag) {
  require(n >= 1, ErrorKind::invalid_input, "graph needs at least one vertex");
  require(arcs.size() < std::numeric_limits<std::uint32_t>::max(), ErrorKind::invalid_input,
          "arc count does not fit the 32-bit index");
  for (const auto& [u, v] : arcs) {
    require(u < n && v < n, ErrorKind::invalid_input,
            "arc (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
  }
  std::vector<std::uint32_t> out(n, 0), in(n, 0);
  for (const auto& [u, v] : arcs) {
    ++out[u];
    ++in[v];
  }
  for (Vertex v = 0; v < n; ++v) {
    require(out[v] == in[v], ErrorKind::not_eulerian,
            "vertex " + std::to_string(v) + " has out-degree " + std::to_string(out[v]) + " but in-degree " +
                std::to_string(in[v]));
    require(out[v] > 0, ErrorKind::not_connected, "vertex " + std::to_string(v) + " is isolated");
  }
  require(arcs_strongly_connected(n, arcs), ErrorKind::not_connected, "graph is not strongly connected");

  std::sort(arcs.begin(), arcs.end());
  Graph g;
  g.n_ = n;
  g.family_tag_ = std::move(family_tag);
  g.offsets_.assign(n + 1, 0);
  g.heads_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.offsets_[u + 1];
    g.heads_.push_back(v);
  }
  for (Vertex v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.min_degree_ = *std::min_element(out.begin(), out.end());
  g.max_degree_ = *std::max_element(out.begin(), out.end());

  std::vector<Arc> reversed;
  reversed.reserve(arcs.size());
  for (const auto& [u, v] : arcs) reversed.emplace_back(v, u);
  std::sort(reversed.begin(), reversed.end());
  g.symmetric_ = reversed == arcs;
  return g;
}

Vertex Graph::arc_tail(std::uint64_t arc) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), static_cast<std::uint32_t>(arc));
  return static_cast<Vertex>(std::distance(offsets_.begin(), it) - 1);
}

std::vector<Arc> Graph::arcs() const {
  std::vector<Arc> out;
  out.reserve(heads_.size());
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v : out_neighbors(u)) out.emplace_back(u, v);
  }
  return out;
}

std::vector<std::uint32_t> Graph::degrees() const {
  std::vector<std::uint32_t> d(n_);
  for (Vertex v = 0; v < n_; ++v) d[v] = degree(v);
  return d;
}

std::uint32_t Graph::arc_multiplicity(Vertex u, Vertex v) const {
  const auto nb = out_neighbors(u);
  const auto [lo, hi] = std::equal_range(nb.begin(), nb.end(), v);
  return static_cast<std::uint32_t>(hi - lo);
}

StationaryDistribution stationary_distribution(const Graph& g) {
  const auto n = g.vertex_count();
  const auto m = static_cast<double>(g.arc_count());
  StationaryDistribution s;
  s.pi.resize(n);
  s.pibar.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    s.pi[v] = g.degree(v) / m;
    s.pibar[v] = static_cast<double>(g.degree(v)) * n / m;
  }
  return s;
}

// Vertex i is adjacent to i-1 and i+1 (mod n).
Graph build_cycle(std::uint32_t n) {
  require(n >= 3, ErrorKind::invalid_parameter, "cycle needs n >= 3");
  std::vector<Arc> arcs;
  arcs.reserve(2 * std::size_t{n});
  for (Vertex i = 0; i < n; ++i) add_edge(arcs, i, (i + 1) % n);
  return Graph::from_arcs(n, std::move(arcs), "cycle");
}

// Vertex index is sum_i x_i * side^i; neighbours differ by +-1 mod side in
// one coordinate. dim = 1 reproduces build_cycle(side).
Graph build_torus(std::uint32_t dim, std::uint32_t side) {
  require(dim >= 1, ErrorKind::invalid_parameter, "torus needs dim >= 1");
  require(side >= 3, ErrorKind::invalid_parameter, "torus needs side >= 3");
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < dim; ++i) {
    count *= side;
    require(count <= (1ull << 28), ErrorKind::invalid_parameter, "side^dim overflows the vertex budget");
  }
  const auto n = static_cast<std::uint32_t>(count);
  std::vector<Arc> arcs;
  arcs.reserve(2 * std::size_t{dim} * n);
  std::uint64_t stride = 1;
  for (std::uint32_t axis = 0; axis < dim; ++axis) {
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t coord = (v / stride) % side;
      const std::uint64_t next = coord + 1 == side ? v - coord * stride : v + stride;
      add_edge(arcs, v, static_cast<Vertex>(next));
    }
    stride *= side;
  }
  return Graph::from_arcs(n, std::move(arcs), dim == 1 ? "cycle" : "torus");
}

Graph build_complete(std::uint32_t n) {
  require(n >= 2, ErrorKind::invalid_parameter, "complete graph needs n >= 2");
  require(std::uint64_t{n} * (n - 1) < (1ull << 31), ErrorKind::invalid_parameter, "complete graph too large");
  std::vector<Arc> arcs;
  arcs.reserve(std::size_t{n} * (n - 1));
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = 0; v < n; ++v) {
      if (u != v) arcs.emplace_back(u, v);
    }
  }
  return Graph::from_arcs(n, std::move(arcs), "complete");
}

// Pairing model with per-pair rejection: two random unpaired stubs are joined
// unless that would create a loop or a repeated edge; a pairing that gets stuck
// (or ends disconnected) is restarted, at most 1000 times.
Graph build_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed) {
  require(d >= 3 && d < n, ErrorKind::invalid_parameter, "random regular needs 3 <= d < n");
  require((std::uint64_t{n} * d) % 2 == 0, ErrorKind::invalid_parameter, "n*d must be even");
  require(std::uint64_t{n} * d < (1ull << 31), ErrorKind::invalid_parameter, "random regular graph too large");
  constexpr int kRestarts = 1000;
  constexpr int kRandomTries = 64;
  constexpr std::size_t kExhaustiveLimit = 4096;

  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    PhiloxStream rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)), 0, 0, Domain::graph_build);
    std::vector<Vertex> stubs;
    stubs.reserve(std::size_t{n} * d);
    for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);
    std::vector<std::vector<Vertex>> adj(n);
    auto suitable = [&](Vertex u, Vertex v) {
      return u != v && std::find(adj[u].begin(), adj[u].end(), v) == adj[u].end();
    };
    auto take = [&](std::size_t i, std::size_t j) {
      const Vertex u = stubs[i], v = stubs[j];
      adj[u].push_back(v);
      adj[v].push_back(u);
      if (i < j) std::swap(i, j);
      stubs[i] = stubs.back();
      stubs.pop_back();
      stubs[j] = stubs.back();
      stubs.pop_back();
    };

    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      const std::size_t k = stubs.size();
      bool paired = false;
      for (int tries = 0; tries < kRandomTries && !paired; ++tries) {
        const auto i = static_cast<std::size_t>(rng.bounded(k));
        const auto j = static_cast<std::size_t>(rng.bounded(k));
        if (i != j && suitable(stubs[i], stubs[j])) {
          take(i, j);
          paired = true;
        }
      }
      if (paired) continue;
      if (k > kExhaustiveLimit) {
        stuck = true;
        break;
      }
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          if (suitable(stubs[i], stubs[j])) options.emplace_back(i, j);
        }
      }
      if (options.empty()) {
        stuck = true;
      } else {
        const auto pick = options[static_cast<std::size_t>(rng.bounded(options.size()))];
        take(pick.first, pick.second);
      }
    }
    if (stuck) continue;

    std::vector<Arc> arcs;
    arcs.reserve(std::size_t{n} * d);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v : adj[u]) arcs.emplace_back(u, v);
    }
    if (!arcs_strongly_connected(n, arcs)) continue;
    return Graph::from_arcs(n, std::move(arcs), "random-regular");
  }
  throw Error(ErrorKind::generation_failure, "pairing model exhausted its restart budget");
}

// Clique vertices are 0..k-1; the leaves of centre c are k + c*L .. k + c*L + L-1.
Graph build_clique_star(std::uint32_t clique_size, std::uint32_t star_size) {
  require(clique_size >= 2, ErrorKind::invalid_parameter, "clique-star needs clique size >= 2");
  require(star_size >= 1, ErrorKind::invalid_parameter, "clique-star needs star size >= 1");
  const std::uint64_t count = std::uint64_t{clique_size} * (1 + std::uint64_t{star_size});
  require(count < (1ull << 28), ErrorKind::invalid_parameter, "clique-star too large");
  std::vector<Arc> arcs;
  for (Vertex u = 0; u < clique_size; ++u) {
    for (Vertex v = u + 1; v < clique_size; ++v) add_edge(arcs, u, v);
    for (std::uint32_t j = 0; j < star_size; ++j) add_edge(arcs, u, clique_size + u * star_size + j);
  }
  return Graph::from_arcs(static_cast<std::uint32_t>(count), std::move(arcs), "clique-star");
}

// Copy j occupies j*m .. j*m+m-1 and is K_m without the edge {j*m, j*m+1};
// copy j's vertex j*m+1 is joined to copy j+1's vertex (j+1)*m (mod copies).
// Every vertex ends with degree m-1.
Graph build_linked_cliques(std::uint32_t copies, std::uint32_t clique) {
  require(copies >= 3, ErrorKind::invalid_parameter, "linked cliques need at least 3 copies");
  require(clique >= 4, ErrorKind::invalid_parameter, "linked cliques need clique size >= 4");
  const std::uint64_t count = std::uint64_t{copies} * clique;
  require(count < (1ull << 28), ErrorKind::invalid_parameter, "linked cliques too large");
  std::vector<Arc> arcs;
  for (std::uint32_t j = 0; j < copies; ++j) {
    const Vertex base = j * clique;
    for (Vertex a = 0; a < clique; ++a) {
      for (Vertex b = a + 1; b < clique; ++b) {
        if (a == 0 && b == 1) continue;
        add_edge(arcs, base + a, base + b);
      }
    }
    const Vertex next = ((j + 1) % copies) * clique;
    add_edge(arcs, base + 1, next);
  }
  return Graph::from_arcs(static_cast<std::uint32_t>(count), std::move(arcs), "linked-cliques");
}

// Cliques occupy 0..n-1 and n..2n-1. Edge-pair mode removes {0,1} and
// {n,n+1} and adds {0,n}, {1,n+1}. Path mode joins n-1 to n through the
// internal path vertices 2n .. 2n+len-2.
Graph build_two_cliques(std::uint32_t clique, std::uint32_t path_length) {
  require(clique >= 4, ErrorKind::invalid_parameter, "two cliques need clique size >= 4");
  require(clique < (1u << 14), ErrorKind::invalid_parameter, "two cliques too large");
  std::vector<Arc> arcs;
  const bool edge_pair = path_length == 0;
  for (std::uint32_t side = 0; side < 2; ++side) {
    const Vertex base = side * clique;
    for (Vertex a = 0; a < clique; ++a) {
      for (Vertex b = a + 1; b < clique; ++b) {
        if (edge_pair && a == 0 && b == 1) continue;
        add_edge(arcs, base + a, base + b);
      }
    }
  }
  std::uint32_t n = 2 * clique;
  if (edge_pair) {
    add_edge(arcs, 0, clique);
    add_edge(arcs, 1, clique + 1);
  } else {
    Vertex prev = clique - 1;
    for (std::uint32_t i = 0; i + 1 < path_length; ++i) {
      add_edge(arcs, prev, n);
      prev = n++;
    }
    add_edge(arcs, prev, clique);
  }
  return Graph::from_arcs(n, std::move(arcs), "two-cliques");
}

Graph build_star(std::uint32_t leaves) {
  require(leaves >= 1, ErrorKind::invalid_parameter, "star needs at least one leaf");
  std::vector<Arc> arcs;
  for (Vertex v = 1; v <= leaves; ++v) add_edge(arcs, 0, v);
  return Graph::from_arcs(leaves + 1, std::move(arcs), "star");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::uint64_t> parse_numbers(std::string_view line, std::size_t line_no) {
  std::vector<std::uint64_t> out;
  while (!line.empty()) {
    line = trim(line);
    if (line.empty()) break;
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    require(ec == std::errc{} && (ptr == line.data() + line.size() || *ptr == ' ' || *ptr == '\t'),
            ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected an unsigned integer");
    line.remove_prefix(static_cast<std::size_t>(ptr - line.data()));
    out.push_back(value);
  }
  return out;
}

}  // namespace

Graph load_edge_list(std::string_view text, std::string family_tag) {
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t n = 0, m = 0;
  std::vector<Arc> arcs;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      require(line.substr(0, 4) == "arcs", ErrorKind::parse_error,
              "line " + std::to_string(line_no) + ": expected header 'arcs <n> <m>'");
      const auto nums = parse_numbers(line.substr(4), line_no);
      require(nums.size() == 2, ErrorKind::parse_error, "header needs exactly two integers");
      n = nums[0];
      m = nums[1];
      require(n >= 1 && n < (1ull << 31), ErrorKind::parse_error, "vertex count out of range");
      require(m < (1ull << 31), ErrorKind::parse_error, "arc count out of range");
      arcs.reserve(m);
      have_header = true;
      continue;
    }
    const auto nums = parse_numbers(line, line_no);
    require(nums.size() == 2, ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected '<u> <v>'");
    require(nums[0] < n && nums[1] < n, ErrorKind::parse_error,
            "line " + std::to_string(line_no) + ": vertex index out of range");
    arcs.emplace_back(static_cast<Vertex>(nums[0]), static_cast<Vertex>(nums[1]));
  }
  require(have_header, ErrorKind::parse_error, "missing 'arcs <n> <m>' header");
  require(arcs.size() == m, ErrorKind::parse_error,
          "header declares " + std::to_string(m) + " arcs but " + std::to_string(arcs.size()) + " were read");
  return Graph::from_arcs(static_cast<std::uint32_t>(n), std::move(arcs), std::move(family_tag));
}

std::string save_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "arcs " << g.vertex_count() << ' ' << g.arc_count() << '\n';
  for (const auto& [u, v] : g.arcs()) out << u << ' ' << v << '\n';
  return out.str();
}

}  // namespace acquaint
