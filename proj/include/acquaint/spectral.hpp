#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acquaint/error.hpp"
#include "acquaint/graph.hpp"

namespace acquaint {

// Dense routines refuse graphs above this size.
inline constexpr std::uint32_t kDenseVertexCap = 8192;

// Constants the theory leaves unspecified. Logarithms are natural unless
// log_base is changed; M, c_1 and delta only size search budgets.
struct SpectralConstants {
  double log_base = 0.0;  // 0 means natural log
  double decay_m = 4.0;   // M of the t^{-1/2} decay estimate
  double c1 = 1.0;        // c_1 in the regular t_* definition
  double delta = 0.125;

  double log(double x) const;
};

struct TransitionMatrix {
  Eigen::MatrixXd p;
  double holding = 0.5;
  std::string graph_id;
};

// Row-sparse form of the kernel: entry (u, v) for v in row u.
struct SparseKernel {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
};

// P(u,v) = p*1[u=v] + (1-p) * #arcs(u->v) / d_u.
TransitionMatrix kernel(const Graph& g, double holding);
SparseKernel sparse_kernel(const Graph& g, double holding);

// P^t by repeated squaring.
Eigen::MatrixXd power(const TransitionMatrix& p, std::uint64_t t);
// M * P for a dense M and the sparse kernel P, O(n * nnz).
Eigen::MatrixXd multiply_by_kernel(const Eigen::MatrixXd& m, const SparseKernel& p);

// kappa_t = min_v sum_{i<=t} P^{2i}(v,v) for t = 0..t_max.
std::vector<double> kappa(const Graph& g, double holding, std::size_t t_max);

// min{t : (t+1)/kappa_{t+1} > (scale) log n}; s_* uses scale 1/32, s_alpha
// uses alpha/16.
std::size_t s_star(const Graph& g, double holding, const SpectralConstants& c = {});
std::size_t s_alpha(const Graph& g, double holding, double alpha, const SpectralConstants& c = {});

// max_{x,y} |P^t(x,y) - pi_y| for t = 0..t_max.
std::vector<double> mixing_profile(const Graph& g, double holding, std::size_t t_max);

// inf{t : max_x |P^t(x,y) - pi_y| <= d_y / (3 * 2^9 * d * log n) for all y}.
std::uint64_t t_star_general(const Graph& g, double holding, const SpectralConstants& c = {});

struct TStarRegular {
  std::uint64_t hat_t = 0;       // inf{t : max|P^t - 1/n| <= 1/(3*2^8 log n)}
  std::uint64_t loglog_term = 0;  // ceil((2/c_1) log log n)
  std::uint64_t value = 0;        // max of the two
};
TStarRegular t_star_regular(const Graph& g, double holding, const SpectralConstants& c = {});

// Smallest t >= 0 with `within(P^t)` true, for a predicate that is monotone in
// t; doubling then bisection. Throws no_convergence beyond `budget`.
template <typename Predicate>
std::uint64_t first_power_satisfying(const TransitionMatrix& p, Predicate within, std::uint64_t budget);

// Smallest non-zero eigenvalue of I - P (reversible kernels only).
double spectral_gap(const Graph& g, double holding);
// All eigenvalues of P in ascending order (via the pi-symmetrised kernel).
Eigen::VectorXd kernel_eigenvalues(const Graph& g, double holding);

struct MixingBoundReport {
  double gamma = 0.0;
  std::size_t t_max = 0;
  bool envelope_holds = true;           // |P^t(x,y)-pi_y| <= w(x,y) (1-gamma)^t
  std::optional<std::size_t> first_violation;
  double worst_envelope_ratio = 0.0;    // max over t>=1 of profile / envelope
  double empirical_m = 0.0;             // smallest M in the t^{-1/2} decay shape
  std::vector<double> profile;          // t = 0..t_max
};
MixingBoundReport mixing_bound_check(const Graph& g, double holding, std::size_t t_max);

// Minimal t with t >= log n * sum_{i<=t} P^i(o,o). no_convergence when
// log n * pi_o > 1 (the right side then outgrows t).
std::uint64_t t_of_g(const Graph& g, double holding, Vertex origin, const SpectralConstants& c = {});

struct SpectralSummary {
  std::optional<double> gamma;
  std::vector<double> kappa;
  std::size_t s_star = 0;
  double alpha = 0.5;
  std::size_t s_alpha = 0;
  std::optional<std::uint64_t> t_star_general;
  std::optional<TStarRegular> t_star_regular;
  Vertex origin = 0;
  std::optional<std::uint64_t> t_of_g;  // empty when no finite t exists
  std::vector<std::pair<std::size_t, double>> mixing_profile;
};

struct SpectralOptions {
  double holding = 0.5;
  double alpha = 0.5;
  Vertex origin = 0;
  std::size_t kappa_t_max = 8;
  std::size_t profile_t_max = 32;
  SpectralConstants constants{};
};
SpectralSummary summarize_spectrum(const Graph& g, const SpectralOptions& options);

// ---------------------------------------------------------------------------

namespace detail {
void check_dense_size(const Graph& g);
}

template <typename Predicate>
std::uint64_t first_power_satisfying(const TransitionMatrix& p, Predicate within, std::uint64_t budget) {
  const auto n = p.p.rows();
  if (within(Eigen::MatrixXd::Identity(n, n).eval())) return 0;
  if (within(p.p)) return 1;
  // squares[k] = P^{2^k}
  std::vector<Eigen::MatrixXd> squares{p.p};
  std::uint64_t reach = 1;
  while (true) {
    if (reach >= budget) {
      throw Error(ErrorKind::no_convergence, "profile still above threshold at t = " + std::to_string(reach));
    }
    Eigen::MatrixXd next = squares.back() * squares.back();
    reach *= 2;
    const bool ok = within(next);
    squares.push_back(std::move(next));
    if (ok) break;
  }
  // within(P^reach) holds and within(P^{reach/2}) fails.
  std::uint64_t lo = reach / 2;
  Eigen::MatrixXd lo_power = squares[squares.size() - 2];
  for (std::size_t k = squares.size() - 2; k-- > 0;) {
    Eigen::MatrixXd candidate = lo_power * squares[k];
    if (!within(candidate)) {
      lo += std::uint64_t{1} << k;
      lo_power = std::move(candidate);
    }
  }
  return lo + 1;
}

}  // namespace acquaint
