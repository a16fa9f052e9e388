#include "acquaint/serialize.hpp"

#include <sstream>

namespace acquaint {

namespace {

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const TrialResult& r, bool trace) {
  nlohmann::json j;
  j["sc"] = r.sc;
  j["sc_capped"] = r.sc_capped;
  j["tau1"] = opt(r.tau1);
  j["tau2"] = opt(r.tau2);
  j["walker_count"] = r.walker_count;
  j["ag_degree_summary"] = {
      {"mean", r.ag_degree_summary.mean}, {"max", r.ag_degree_summary.max}, {"truncated", r.ag_degree_summary.truncated}};
  j["giant_at_s"] = opt(r.giant_at_s);
  j["isolated_at_t"] = opt(r.isolated_at_t);
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  if (trace) {
    auto giant = nlohmann::json::array();
    for (const auto& [t, size] : r.giant_trajectory) giant.push_back({t, size});
    auto isolated = nlohmann::json::array();
    for (const auto& p : r.isolated_trajectory) isolated.push_back({p.time, p.never_met, p.lazy_isolated});
    j["giant_trajectory"] = giant;
    j["isolated_trajectory"] = isolated;
  }
  return j;
}

nlohmann::json to_json(const BalanceReport& r) {
  return {{"delta", r.delta},
          {"t", r.t},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio},
          {"max_density", r.max_density},
          {"density_limit", r.density_limit},
          {"balanced", r.balanced},
          {"fully_balanced", r.fully_balanced},
          {"low_witnesses", r.low_witnesses},
          {"high_witnesses", r.high_witnesses},
          {"density_witnesses", r.density_witnesses}};
}

nlohmann::json to_json(const SpectralSummary& s) {
  nlohmann::json j;
  j["gap"] = opt(s.gamma);
  j["s_star"] = s.s_star;
  j["alpha"] = s.alpha;
  j["s_alpha"] = s.s_alpha;
  j["t_star_general"] = opt(s.t_star_general);
  if (s.t_star_regular) {
    j["t_star_regular"] = {{"value", s.t_star_regular->value},
                           {"hat_t", s.t_star_regular->hat_t},
                           {"loglog_term", s.t_star_regular->loglog_term}};
  } else {
    j["t_star_regular"] = nullptr;
  }
  j["origin"] = s.origin;
  j["t_of_g"] = opt(s.t_of_g);
  j["kappa"] = s.kappa;
  auto profile = nlohmann::json::array();
  for (const auto& [t, v] : s.mixing_profile) profile.push_back({t, v});
  j["mixing_profile"] = profile;
  return j;
}

nlohmann::json to_json(const FitReport& r) {
  auto points = nlohmann::json::array();
  for (const auto& p : r.points) {
    points.push_back({{"n", p.n}, {"feature", p.feature}, {"median", p.median}, {"iqr", p.iqr}, {"rows", p.rows}});
  }
  nlohmann::json j = {{"model", to_string(r.model)},
                      {"a", r.a},
                      {"b", r.b},
                      {"r2", r.r2},
                      {"degenerate", r.degenerate},
                      {"censored", r.censored},
                      {"points", points},
                      {"residuals", r.residuals}};
  if (r.degenerate) j["note"] = "medians are constant; r2 reported as 0";
  return j;
}

nlohmann::json to_json(const PointSummary& s) {
  return {{"family", s.family},
          {"n", s.n},
          {"d", s.d},
          {"rows", s.rows},
          {"sc_mean", s.sc_mean},
          {"sc_q25", s.sc_q25},
          {"sc_median", s.sc_median},
          {"sc_q75", s.sc_q75},
          {"sc_iqr", s.sc_iqr},
          {"sc_min", s.sc_min},
          {"sc_max", s.sc_max},
          {"cap_hits", s.cap_hits},
          {"cap_rate_ci", {s.cap_rate_ci.first, s.cap_rate_ci.second}},
          {"tau1_median", opt(s.tau1_median)},
          {"tau2_median", opt(s.tau2_median)}};
}

std::string to_key_value(const SpectralSummary& s) {
  std::ostringstream out;
  out.precision(17);
  if (s.gamma) {
    out << "gap " << *s.gamma << '\n';
  } else {
    out << "gap none\n";
  }
  out << "s_star " << s.s_star << '\n';
  out << "s_alpha@" << s.alpha << ' ' << s.s_alpha << '\n';
  if (s.t_star_general) {
    out << "t_star_general " << *s.t_star_general << '\n';
  } else {
    out << "t_star_general none\n";
  }
  if (s.t_star_regular) {
    out << "t_star_regular " << s.t_star_regular->value << '\n';
  } else {
    out << "t_star_regular none\n";
  }
  out << "t_of_g@" << s.origin << ' ';
  if (s.t_of_g) {
    out << *s.t_of_g << '\n';
  } else {
    out << "none\n";
  }
  for (std::size_t t = 0; t < s.kappa.size(); ++t) out << "kappa " << t << ' ' << s.kappa[t] << '\n';
  for (const auto& [t, v] : s.mixing_profile) out << "profile " << t << ' ' << v << '\n';
  return out.str();
}

}  // namespace acquaint
