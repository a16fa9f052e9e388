#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acquaint/engine.hpp"
#include "acquaint/graph.hpp"
#include "json.hpp"

namespace acquaint {

inline constexpr const char* kCodeVersion = "0.1.0";

// Parameters of one graph instance. Unused fields are ignored by the family.
//   cycle n | torus dim, side (n is the side) | complete n | random_regular n, d
//   clique_star clique, leaves | linked_cliques clique, copies (or n / clique)
//   two_cliques clique, path_len (0 = edge-pair) | star leaves
struct FamilyParams {
  std::string family;
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t dim = 1;
  std::uint32_t leaves = 1;
  std::uint32_t clique = 4;
  std::uint32_t path_len = 0;
  std::uint32_t copies = 0;
};

bool known_family(const std::string& name);
// Throws invalid_input for an unknown family name.
Graph build_family(const FamilyParams& params, std::uint64_t seed);

struct Metrics {
  bool tau2 = false;
  bool giant = false;
  bool isolation = false;
  bool degrees = true;
  bool gamma = true;
};

struct ExperimentSpec {
  std::string family = "cycle";
  std::vector<FamilyParams> points;
  InitScheme init = InitScheme::poisson(1.0);
  Mode mode = Mode::discrete;
  double holding = 0.5;
  bool holding_inverse_n = false;  // use holding 1/n at each point
  std::uint64_t trials = 1;
  std::uint64_t seed_base = 1;
  Metrics metrics{};
  std::optional<double> max_time;     // empty: engine default
  std::optional<double> giant_at;     // empty with metrics.giant: ceil(8 / gamma)
  std::optional<double> isolated_at;  // empty with metrics.isolation: floor(0.05 ln^2 n)
  bool resample_until_two = false;
  unsigned threads = 0;  // 0: hardware concurrency

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

// FNV-1a of the canonical JSON dump.
std::uint64_t spec_hash(const ExperimentSpec& spec);

struct ResultRow {
  std::string family;
  std::uint32_t n = 0;
  double d = 0.0;
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t walkers = 0;
  double sc = 0.0;
  bool sc_capped = false;
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::optional<std::uint32_t> giant_at_s;
  std::optional<std::uint32_t> isolated_at_t;
  std::optional<double> ag_mean_deg;
  std::optional<std::uint32_t> ag_max_deg;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct PointFailure {
  std::size_t point = 0;
  std::string message;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<PointFailure> failures;
  std::optional<nlohmann::json> spec;
  std::string spec_hash;
  std::string code_version;
};

std::uint64_t point_seed(std::uint64_t seed_base, std::size_t point);
std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t point, std::uint64_t trial);

// One row per (point, trial) in that order, whatever the thread count.
ResultTable run_sweep(const ExperimentSpec& spec);

extern const char* const kCsvColumns;
std::string write_csv(const ResultTable& table);
ResultTable parse_csv(const std::string& text);

enum class FitModel { log_n, log2_n, inv_gap_log_n, degree_log_n };
std::string to_string(FitModel m);
FitModel parse_fit_model(const std::string& name);
double model_feature(FitModel m, double n, double d, std::optional<double> gamma);

struct FitPoint {
  std::uint32_t n = 0;
  double feature = 0.0;
  double median = 0.0;
  double iqr = 0.0;
  std::size_t rows = 0;
};

struct FitReport {
  FitModel model = FitModel::log_n;
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  bool degenerate = false;  // constant medians; r2 reported as 0
  std::vector<FitPoint> points;
  std::vector<double> residuals;
  std::size_t censored = 0;  // capped rows left out
};

// Least squares of per-n median SC on the model feature; needs 3 distinct n.
FitReport fit_scaling(const std::vector<ResultRow>& rows, FitModel model);

struct PointSummary {
  std::string family;
  std::uint32_t n = 0;
  double d = 0.0;
  std::size_t rows = 0;
  double sc_mean = 0.0;
  double sc_q25 = 0.0;
  double sc_median = 0.0;
  double sc_q75 = 0.0;
  double sc_iqr = 0.0;
  double sc_min = 0.0;
  double sc_max = 0.0;
  std::size_t cap_hits = 0;
  std::pair<double, double> cap_rate_ci{0.0, 0.0};
  std::optional<double> tau1_median;
  std::optional<double> tau2_median;
};

// Per (family, n, d) group, in sorted order. Empty input gives an empty list.
std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows);

}  // namespace acquaint
