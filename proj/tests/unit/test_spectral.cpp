#include <cmath>
#include <numbers>

#include "acquaint/error.hpp"
#include "acquaint/spectral.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace acquaint;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an acquaint::Error");
  return ErrorKind::invalid_input;
}

// kappa by plain matrix products, one power at a time.
std::vector<double> naive_kappa(const Graph& g, double holding, std::size_t t_max) {
  const Eigen::MatrixXd p = kernel(g, holding).p;
  const Eigen::MatrixXd p2 = p * p;
  const auto n = g.vertex_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  std::vector<double> sums(n, 0.0), out;
  for (std::size_t t = 0; t <= t_max; ++t) {
    for (Vertex v = 0; v < n; ++v) sums[v] += m(v, v);
    out.push_back(*std::min_element(sums.begin(), sums.end()));
    m = m * p2;
  }
  return out;
}

}  // namespace

TEST_CASE("kernel rows") {
  const auto c = kernel(build_cycle(6), 0.5);
  CHECK(c.p(2, 2) == 0.5);
  CHECK(c.p(2, 1) == 0.25);
  CHECK(c.p(2, 3) == 0.25);
  CHECK(c.p(2, 4) == 0.0);
  const auto k2 = kernel(build_complete(2), 0.0);
  CHECK(k2.p(0, 1) == 1.0);
  CHECK(k2.p(0, 0) == 0.0);
  const auto star = kernel(build_star(3), 0.5);
  CHECK(star.p(0, 0) == 0.5);
  for (int leaf = 1; leaf <= 3; ++leaf) CHECK(star.p(0, leaf) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(kind_of([] { kernel(build_cycle(4), 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { kernel(build_cycle(4), -0.1); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("sparse kernel agrees with dense kernel") {
  for (const auto& [label, g] : testing::graph_zoo(2, 40)) {
    INFO(label);
    const auto dense = kernel(g, 0.3).p;
    const auto sparse = sparse_kernel(g, 0.3);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
    for (Vertex u = 0; u < g.vertex_count(); ++u)
      for (auto i = sparse.offsets[u]; i < sparse.offsets[u + 1]; ++i) rebuilt(u, sparse.columns[i]) = sparse.values[i];
    CHECK((dense - rebuilt).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("powers") {
  const auto p = kernel(build_cycle(5), 0.5);
  CHECK(power(p, 0).isIdentity());
  CHECK((power(p, 1) - p.p).cwiseAbs().maxCoeff() == 0.0);
  CHECK(power(p, 2)(0, 0) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("kappa on the 5-cycle") {
  const auto k = kappa(build_cycle(5), 0.5, 4);
  REQUIRE(k.size() == 5);
  CHECK(k[0] == 1.0);
  CHECK(k[1] == doctest::Approx(11.0 / 8.0).epsilon(1e-15));
  CHECK(k[2] == doctest::Approx(211.0 / 128.0).epsilon(1e-15));
  CHECK(k[3] == doctest::Approx(1925.0 / 1024.0).epsilon(1e-15));
  CHECK(k[4] == doctest::Approx(68595.0 / 32768.0).epsilon(1e-15));
}

TEST_CASE("cycle return probabilities decay like t^{-1/2}") {
  const std::uint32_t n = 64;
  const auto k = kappa(build_cycle(n), 0.5, n * n / 16);
  for (std::size_t i = 1; i < k.size(); ++i) {
    const double ret = (k[i] - k[i - 1]) * std::sqrt(static_cast<double>(i + 1));
    CHECK(ret > 0.3);
    CHECK(ret < 1.2);
  }
}

TEST_CASE("s_star and s_alpha") {
  CHECK(s_star(build_cycle(8), 0.5) == 0);
  CHECK(s_alpha(build_cycle(8), 0.5, 0.5) == 0);
  CHECK(s_alpha(build_cycle(8), 0.5, 1.0) == 0);
  CHECK(kind_of([] { s_alpha(build_cycle(8), 0.5, 1.5); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { s_alpha(build_cycle(8), 0.5, 0.0); }) == ErrorKind::invalid_parameter);
  // A base close to 1 raises the threshold above the first ratio.
  SpectralConstants c;
  c.log_base = 1.02;
  const auto big = s_star(build_cycle(8), 0.5, c);
  CHECK(big > 0);
  const auto k = kappa(build_cycle(8), 0.5, big + 1);
  const double threshold = c.log(8.0) / 32.0;
  CHECK((big + 1) / k[big + 1] > threshold);
  CHECK(big / k[big] <= threshold);
}

TEST_CASE("t_star general and regular") {
  CHECK(t_star_general(build_cycle(8), 0.5) == 43);
  const auto r = t_star_regular(build_cycle(16), 0.5);
  CHECK(r.hat_t == 144);
  CHECK(r.loglog_term == 3);
  CHECK(r.value == 144);
  CHECK(r.value >= static_cast<std::uint64_t>(std::ceil(2.0 * std::log(std::log(16.0)))));
  CHECK(kind_of([] { t_star_regular(build_star(3), 0.5); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { t_star_general(build_cycle(4), 0.0); }) == ErrorKind::no_convergence);
}

TEST_CASE("t_star is minimal") {
  const auto g = build_complete(16);
  const auto t = t_star_general(g, 0.5);
  const auto profile = mixing_profile(g, 0.5, t);
  const double threshold = 1.0 / (3.0 * 512.0 * std::log(16.0));
  CHECK(profile[t] <= threshold);
  if (t > 0) CHECK(profile[t - 1] > threshold);
  const double budget = std::pow(std::ceil(12.0 * 4.0 / (0.125 * 0.125) * std::log(16.0)), 2);
  CHECK(static_cast<double>(t) <= budget);
}

TEST_CASE("spectral gap closed forms") {
  CHECK(spectral_gap(build_cycle(4), 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(spectral_gap(build_complete(4), 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  for (std::uint32_t n = 3; n <= 64; ++n) {
    INFO("n = " << n);
    CHECK(std::abs(spectral_gap(build_cycle(n), 0.5) - (1.0 - std::cos(2.0 * std::numbers::pi / n)) / 2.0) <= 1e-9);
  }
  const auto directed = Graph::from_arcs(3, {{0, 1}, {1, 2}, {2, 0}}, "directed");
  CHECK(kind_of([&] { spectral_gap(directed, 0.5); }) == ErrorKind::unsupported);
  CHECK(mixing_profile(directed, 0.5, 4).size() == 5);
}

TEST_CASE("mixing bound") {
  const auto c8 = mixing_bound_check(build_cycle(8), 0.5, 256);
  CHECK(c8.envelope_holds);
  CHECK_FALSE(c8.first_violation.has_value());
  CHECK(c8.profile[1] <= 1.0);
  const auto rr = mixing_bound_check(build_random_regular(64, 3, 3), 0.5, 256);
  CHECK(rr.envelope_holds);
  CHECK(rr.empirical_m <= 10.0);
}

TEST_CASE("t(G)") {
  CHECK(t_of_g(build_complete(64), 0.5, 0) == 9);
  CHECK(t_of_g(build_complete(2), 0.5, 0) == 2);
  CHECK(t_of_g(build_cycle(16), 0.5, 3) == 11);
  CHECK(kind_of([] { t_of_g(build_star(7), 0.5, 0); }) == ErrorKind::no_convergence);
}

TEST_CASE("summary") {
  SpectralOptions o;
  o.kappa_t_max = 4;
  o.profile_t_max = 8;
  const auto s = summarize_spectrum(build_cycle(8), o);
  REQUIRE(s.gamma.has_value());
  CHECK(*s.gamma == doctest::Approx((1.0 - std::cos(std::numbers::pi / 4.0)) / 2.0));
  CHECK(s.kappa.size() == 5);
  CHECK(s.s_star == 0);
  REQUIRE(s.t_star_general.has_value());
  CHECK(*s.t_star_general == 43);
  CHECK(s.t_star_regular.has_value());
  CHECK(s.mixing_profile.size() == 9);
  const auto star = summarize_spectrum(build_star(3), o);
  CHECK_FALSE(star.t_star_regular.has_value());
}

TEST_CASE("property: kernel, powers and spectra over random graphs") {
  auto cases = testing::graph_zoo(3, 60);
  for (auto& c : testing::named_graphs()) cases.push_back(std::move(c));
  for (const auto& [label, g] : cases) {
    INFO(label);
    const auto n = g.vertex_count();
    const auto p = kernel(g, 0.5);
    CHECK((p.p.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    const auto pi = stationary_distribution(g).pi;

    for (std::uint64_t a : {1u, 3u, 7u}) {
      const auto sum = power(p, a + 5);
      CHECK((sum - power(p, a) * power(p, 5)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    for (std::uint64_t t : {1u, 8u, 64u}) {
      const auto pt = power(p, t);
      CHECK((pt.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
      double worst = 0.0;
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v) worst = std::max(worst, std::abs(pi[v] * pt(v, u) - pi[u] * pt(u, v)));
      CHECK(worst <= 1e-10);
    }

    const auto k = kappa(g, 0.5, 12);
    const auto naive = naive_kappa(g, 0.5, 12);
    for (std::size_t t = 0; t < k.size(); ++t) CHECK(k[t] == doctest::Approx(naive[t]).epsilon(1e-13));
    CHECK(k[0] == 1.0);
    for (std::size_t t = 1; t < k.size(); ++t) CHECK(k[t] >= k[t - 1]);
    CHECK(static_cast<double>(s_star(g, 0.5)) + 1.0 > std::log(static_cast<double>(n)) / 32.0);

    const auto ev = kernel_eigenvalues(g, 0.5);
    CHECK(ev.minCoeff() >= -1e-10);
    const double gamma = spectral_gap(g, 0.5);
    CHECK(gamma > 0.0);
    CHECK(gamma <= 1.0 + 1e-12);

    const auto profile = mixing_profile(g, 0.5, 40);
    for (std::size_t t = 1; t < profile.size(); ++t) CHECK(profile[t] <= profile[t - 1] + 1e-12);

    const auto report = mixing_bound_check(g, 0.5, 128);
    CHECK(report.envelope_holds);

    if (std::log(static_cast<double>(n)) * pi[0] < 1.0) {
      CHECK(static_cast<double>(t_of_g(g, 0.5, 0)) >= std::log(static_cast<double>(n)));
    } else {
      CHECK(kind_of([&] { t_of_g(g, 0.5, 0); }) == ErrorKind::no_convergence);
    }
  }
}
