#include "acquaint/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acquaint {

double SpectralConstants::log(double x) const {
  return log_base > 0.0 ? std::log(x) / std::log(log_base) : std::log(x);
}

namespace detail {

void check_dense_size(const Graph& g) {
  require(g.vertex_count() <= kDenseVertexCap, ErrorKind::resource_limit,
          "dense matrix routines are capped at n <= " + std::to_string(kDenseVertexCap));
}

}  // namespace detail

namespace {

void check_holding(double holding) {
  require(holding >= 0.0 && holding < 1.0, ErrorKind::invalid_parameter, "holding probability must lie in [0,1)");
}

// Period of the kernel's support graph via BFS levels.
std::uint64_t period(const Graph& g, double holding) {
  if (holding > 0.0) return 1;
  const auto n = g.vertex_count();
  std::vector<std::int64_t> level(n, -1);
  std::vector<Vertex> queue{0};
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex v : g.out_neighbors(u)) {
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::uint64_t gcd = 0;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : g.out_neighbors(u)) {
      gcd = std::gcd(gcd, static_cast<std::uint64_t>(std::llabs(level[u] + 1 - level[v])));
    }
  }
  return gcd == 0 ? 1 : gcd;
}

std::vector<double> stationary_pi(const Graph& g) { return stationary_distribution(g).pi; }

}  // namespace

TransitionMatrix kernel(const Graph& g, double holding) {
  check_holding(holding);
  detail::check_dense_size(g);
  const auto n = g.vertex_count();
  TransitionMatrix out;
  out.holding = holding;
  out.graph_id = g.family_tag() + ":" + std::to_string(n);
  out.p = Eigen::MatrixXd::Zero(n, n);
  for (Vertex u = 0; u < n; ++u) {
    out.p(u, u) += holding;
    const double w = (1.0 - holding) / g.degree(u);
    for (Vertex v : g.out_neighbors(u)) out.p(u, v) += w;
  }
  return out;
}

SparseKernel sparse_kernel(const Graph& g, double holding) {
  check_holding(holding);
  const auto n = g.vertex_count();
  SparseKernel k;
  k.offsets.assign(n + 1, 0);
  for (Vertex u = 0; u < n; ++u) {
    const double w = (1.0 - holding) / g.degree(u);
    bool self_written = false;
    auto emit = [&](Vertex v, double value) {
      if (!k.columns.empty() && k.offsets[u] < k.columns.size() && k.columns.back() == v) {
        k.values.back() += value;
      } else {
        k.columns.push_back(v);
        k.values.push_back(value);
      }
    };
    // Columns in ascending order, the diagonal merged with any self-loop arcs.
    for (Vertex v : g.out_neighbors(u)) {
      if (!self_written && v >= u) {
        if (holding > 0.0 || v == u) emit(u, holding);
        self_written = true;
      }
      emit(v, w);
    }
    if (!self_written && holding > 0.0) emit(u, holding);
    k.offsets[u + 1] = static_cast<std::uint32_t>(k.columns.size());
  }
  return k;
}

Eigen::MatrixXd power(const TransitionMatrix& p, std::uint64_t t) {
  const auto n = p.p.rows();
  require(n <= static_cast<Eigen::Index>(kDenseVertexCap), ErrorKind::resource_limit, "matrix exceeds dense cap");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  if (t == 0) return result;
  Eigen::MatrixXd base = p.p;
  bool first = true;
  while (t > 0) {
    if (t & 1u) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = result * base;
      }
    }
    t >>= 1u;
    if (t > 0) base = base * base;
  }
  return result;
}

Eigen::MatrixXd multiply_by_kernel(const Eigen::MatrixXd& m, const SparseKernel& p) {
  const auto n = static_cast<Eigen::Index>(p.offsets.size() - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), n);
  for (Eigen::Index w = 0; w < n; ++w) {
    for (auto e = p.offsets[w]; e < p.offsets[w + 1]; ++e) {
      out.col(p.columns[e]) += p.values[e] * m.col(w);
    }
  }
  return out;
}

namespace {

// Running sums S(v) = sum_{i<=t} P^{2i}(v,v), advanced one i at a time.
class ReturnSums {
 public:
  ReturnSums(const Graph& g, double holding)
      : kernel_(sparse_kernel(g, holding)),
        current_(Eigen::MatrixXd::Identity(g.vertex_count(), g.vertex_count())),
        sums_(Eigen::VectorXd::Ones(g.vertex_count())) {
    detail::check_dense_size(g);
  }

  double kappa() const { return sums_.minCoeff(); }

  void advance() {
    current_ = multiply_by_kernel(current_, kernel_);
    // P^{2i}(v,v) = sum_w P^i(v,w) P^i(w,v)
    sums_ += current_.cwiseProduct(current_.transpose()).rowwise().sum();
  }

 private:
  SparseKernel kernel_;
  Eigen::MatrixXd current_;
  Eigen::VectorXd sums_;
};

std::size_t first_ratio_above(const Graph& g, double holding, double threshold) {
  ReturnSums sums(g, holding);
  constexpr std::size_t kLimit = 1'000'000;
  for (std::size_t t = 0; t < kLimit; ++t) {
    sums.advance();  // sums now hold kappa_{t+1}
    if (static_cast<double>(t + 1) / sums.kappa() > threshold) return t;
  }
  throw Error(ErrorKind::no_convergence, "(t+1)/kappa_{t+1} never exceeded the threshold");
}

}  // namespace

std::vector<double> kappa(const Graph& g, double holding, std::size_t t_max) {
  ReturnSums sums(g, holding);
  std::vector<double> table{sums.kappa()};
  table.reserve(t_max + 1);
  for (std::size_t t = 1; t <= t_max; ++t) {
    sums.advance();
    table.push_back(sums.kappa());
  }
  return table;
}

std::size_t s_star(const Graph& g, double holding, const SpectralConstants& c) {
  return first_ratio_above(g, holding, c.log(g.vertex_count()) / 32.0);
}

std::size_t s_alpha(const Graph& g, double holding, double alpha, const SpectralConstants& c) {
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::invalid_parameter, "alpha must lie in (0,1]");
  return first_ratio_above(g, holding, alpha / 16.0 * c.log(g.vertex_count()));
}

std::vector<double> mixing_profile(const Graph& g, double holding, std::size_t t_max) {
  detail::check_dense_size(g);
  const auto pi = stationary_pi(g);
  const Eigen::Map<const Eigen::RowVectorXd> pi_row(pi.data(), static_cast<Eigen::Index>(pi.size()));
  const auto k = sparse_kernel(g, holding);
  const auto n = g.vertex_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  std::vector<double> profile;
  profile.reserve(t_max + 1);
  for (std::size_t t = 0;; ++t) {
    profile.push_back((m.rowwise() - pi_row).cwiseAbs().maxCoeff());
    if (t == t_max) break;
    m = multiply_by_kernel(m, k);
  }
  return profile;
}

std::uint64_t t_star_general(const Graph& g, double holding, const SpectralConstants& c) {
  detail::check_dense_size(g);
  require(period(g, holding) == 1, ErrorKind::no_convergence, "periodic non-lazy kernel never mixes");
  const auto n = g.vertex_count();
  const auto pi = stationary_pi(g);
  const double d = g.average_degree();
  const double logn = c.log(n);
  Eigen::RowVectorXd threshold(n);
  Eigen::RowVectorXd pi_row(n);
  for (Vertex y = 0; y < n; ++y) {
    threshold(y) = g.degree(y) / (3.0 * 512.0 * d * logn);
    pi_row(y) = pi[y];
  }
  // Search budget ceil(C d^xi log n)^2 with C = 12 M / delta^2.
  const double xi = g.is_regular() ? 0.0 : 1.0;
  const double root = std::ceil(12.0 * c.decay_m / (c.delta * c.delta) * std::pow(d, xi) * std::max(logn, 1.0));
  const auto budget = static_cast<std::uint64_t>(root * root);
  const auto p = kernel(g, holding);
  return first_power_satisfying(
      p,
      [&](const Eigen::MatrixXd& m) {
        const Eigen::RowVectorXd worst = (m.rowwise() - pi_row).cwiseAbs().colwise().maxCoeff();
        return (worst.array() <= threshold.array()).all();
      },
      budget);
}

TStarRegular t_star_regular(const Graph& g, double holding, const SpectralConstants& c) {
  require(g.is_regular(), ErrorKind::invalid_input, "t_star_regular needs a regular graph");
  detail::check_dense_size(g);
  require(period(g, holding) == 1, ErrorKind::no_convergence, "periodic non-lazy kernel never mixes");
  const auto n = g.vertex_count();
  const double logn = c.log(n);
  const double threshold = 1.0 / (3.0 * 256.0 * logn);
  const double uniform = 1.0 / n;
  const double root = std::ceil(12.0 * c.decay_m / (c.delta * c.delta) * std::max(logn, 1.0));
  const auto budget = static_cast<std::uint64_t>(root * root);
  TStarRegular out;
  out.hat_t = first_power_satisfying(
      kernel(g, holding),
      [&](const Eigen::MatrixXd& m) { return (m.array() - uniform).abs().maxCoeff() <= threshold; }, budget);
  const double loglog = logn > 1.0 ? c.log(logn) : 0.0;
  out.loglog_term = static_cast<std::uint64_t>(std::max(0.0, std::ceil(2.0 / c.c1 * loglog)));
  out.value = std::max(out.hat_t, out.loglog_term);
  return out;
}

Eigen::VectorXd kernel_eigenvalues(const Graph& g, double holding) {
  require(g.is_symmetric(), ErrorKind::unsupported, "spectral gap needs a reversible (undirected) graph");
  const auto p = kernel(g, holding);
  const auto pi = stationary_pi(g);
  const auto n = g.vertex_count();
  Eigen::VectorXd root(n);
  for (Vertex v = 0; v < n; ++v) root(v) = std::sqrt(pi[v]);
  // D^{1/2} P D^{-1/2} is symmetric for reversible P.
  Eigen::MatrixXd s = root.asDiagonal() * p.p * root.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::no_convergence, "eigen-solver failed");
  return solver.eigenvalues();
}

double spectral_gap(const Graph& g, double holding) {
  require(g.vertex_count() >= 2, ErrorKind::invalid_input, "spectral gap needs at least two vertices");
  const auto eig = kernel_eigenvalues(g, holding);
  return 1.0 - eig(eig.size() - 2);
}

MixingBoundReport mixing_bound_check(const Graph& g, double holding, std::size_t t_max) {
  const auto eig = kernel_eigenvalues(g, holding);
  const auto n = g.vertex_count();
  MixingBoundReport report;
  report.gamma = 1.0 - eig(n - 2);
  report.t_max = t_max;
  const double rate = std::max(1.0 - report.gamma, std::abs(eig(0)));
  const auto pi = stationary_pi(g);
  const bool regular = g.is_regular();

  Eigen::MatrixXd weight(n, n);  // sqrt(pi_y / pi_x), identically 1 when regular
  Eigen::RowVectorXd pi_row(n), decay_weight(n);
  for (Vertex y = 0; y < n; ++y) {
    pi_row(y) = pi[y];
    decay_weight(y) = regular ? 1.0 : static_cast<double>(g.degree(y));
    for (Vertex x = 0; x < n; ++x) weight(x, y) = regular ? 1.0 : std::sqrt(pi[y] / pi[x]);
  }

  const auto k = sparse_kernel(g, holding);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  double envelope = 1.0;
  for (std::size_t t = 0;; ++t) {
    const Eigen::MatrixXd dev = (m.rowwise() - pi_row).cwiseAbs();
    report.profile.push_back(dev.maxCoeff());
    if (t >= 1) {
      const Eigen::MatrixXd bound = weight * envelope;
      const double ratio = (dev.array() / bound.array().max(1e-300)).maxCoeff();
      report.worst_envelope_ratio = std::max(report.worst_envelope_ratio, ratio);
      if (((dev - bound).array() > 1e-12).any() && !report.first_violation) {
        report.envelope_holds = false;
        report.first_violation = t;
      }
      const double m_here =
          (dev.array().rowwise() / decay_weight.array()).maxCoeff() * std::sqrt(static_cast<double>(t));
      report.empirical_m = std::max(report.empirical_m, m_here);
    }
    if (t == t_max) break;
    m = multiply_by_kernel(m, k);
    envelope *= rate;
  }
  return report;
}

std::uint64_t t_of_g(const Graph& g, double holding, Vertex origin, const SpectralConstants& c) {
  require(origin < g.vertex_count(), ErrorKind::invalid_parameter, "origin out of range");
  const auto k = sparse_kernel(g, holding);
  const auto n = g.vertex_count();
  const double logn = c.log(n);
  // The partial sums grow like (t+1) pi_o, so no t exists once log n * pi_o > 1.
  const double pi_o = static_cast<double>(g.degree(origin)) / static_cast<double>(g.arc_count());
  require(logn * pi_o <= 1.0, ErrorKind::no_convergence, "t(G) does not exist: log n * pi_o > 1");
  std::vector<double> row(n, 0.0), next(n, 0.0);
  row[origin] = 1.0;
  double sum = 0.0;
  constexpr std::uint64_t kLimit = 10'000'000;
  for (std::uint64_t t = 0; t < kLimit; ++t) {
    sum += row[origin];
    if (static_cast<double>(t) >= logn * sum) return t;
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex u = 0; u < n; ++u) {
      if (row[u] == 0.0) continue;
      for (auto e = k.offsets[u]; e < k.offsets[u + 1]; ++e) next[k.columns[e]] += row[u] * k.values[e];
    }
    row.swap(next);
  }
  throw Error(ErrorKind::no_convergence, "t(G) scan exceeded its iteration limit");
}

SpectralSummary summarize_spectrum(const Graph& g, const SpectralOptions& options) {
  SpectralSummary s;
  const auto& c = options.constants;
  if (g.is_symmetric() && g.vertex_count() >= 2) s.gamma = spectral_gap(g, options.holding);
  s.kappa = kappa(g, options.holding, options.kappa_t_max);
  s.s_star = s_star(g, options.holding, c);
  s.alpha = options.alpha;
  s.s_alpha = s_alpha(g, options.holding, options.alpha, c);
  try {
    s.t_star_general = t_star_general(g, options.holding, c);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::no_convergence) throw;
  }
  if (g.is_regular()) {
    try {
      s.t_star_regular = t_star_regular(g, options.holding, c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_convergence) throw;
    }
  }
  s.origin = options.origin;
  try {
    s.t_of_g = t_of_g(g, options.holding, options.origin, c);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::no_convergence) throw;
  }
  const auto profile = mixing_profile(g, options.holding, options.profile_t_max);
  for (std::size_t t = 0; t < profile.size(); ++t) s.mixing_profile.emplace_back(t, profile[t]);
  return s;
}

}  // namespace acquaint
