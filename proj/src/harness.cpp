#include "acquaint/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "acquaint/error.hpp"
#include "acquaint/spectral.hpp"
#include "acquaint/stats.hpp"

namespace acquaint {

namespace {

const char* const kFamilies[] = {"cycle",          "torus",       "complete", "random_regular", "clique_star",
                                 "linked_cliques", "two_cliques", "star"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string init_name(InitScheme::Kind k) {
  switch (k) {
    case InitScheme::Kind::poisson:
      return "poisson";
    case InitScheme::Kind::one_per_site:
      return "one-per-site";
    case InitScheme::Kind::fixed_m:
      return "fixed-m";
  }
  return "poisson";
}

// A number, or "auto" for the default.
std::optional<double> auto_or_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_string()) {
    require(v.get<std::string>() == "auto", ErrorKind::invalid_input, std::string(key) + " must be a number or \"auto\"");
    return std::nullopt;
  }
  require(v.is_number(), ErrorKind::invalid_input, std::string(key) + " must be a number or \"auto\"");
  return v.get<double>();
}

nlohmann::json auto_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json("auto");
}

FamilyParams params_from_json(const nlohmann::json& j, FamilyParams base) {
  auto read = [&](const char* key, std::uint32_t& field) {
    if (j.contains(key) && !j.at(key).is_array()) field = j.at(key).get<std::uint32_t>();
  };
  read("n", base.n);
  read("d", base.d);
  read("dim", base.dim);
  read("leaves", base.leaves);
  read("clique", base.clique);
  read("path_len", base.path_len);
  read("copies", base.copies);
  return base;
}

nlohmann::json params_to_json(const FamilyParams& p) {
  return {{"n", p.n},           {"d", p.d},         {"dim", p.dim},       {"leaves", p.leaves},
          {"clique", p.clique}, {"path_len", p.path_len}, {"copies", p.copies}};
}

template <typename T>
std::string number(T value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string optional_number(const std::optional<T>& v) {
  return v ? number(*v) : std::string();
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  require(res.ec == std::errc() && res.ptr == field.data() + field.size(), ErrorKind::parse_error,
          "bad number '" + std::string(field) + "' on line " + std::to_string(line));
  return value;
}

template <typename T>
std::optional<T> parse_optional(std::string_view field, std::size_t line) {
  if (field.empty()) return std::nullopt;
  return parse_number<T>(field, line);
}

}  // namespace

bool known_family(const std::string& name) {
  return std::find(std::begin(kFamilies), std::end(kFamilies), name) != std::end(kFamilies);
}

Graph build_family(const FamilyParams& p, std::uint64_t seed) {
  require(known_family(p.family), ErrorKind::invalid_input, "unknown graph family '" + p.family + "'");
  if (p.family == "cycle") return build_cycle(p.n);
  if (p.family == "torus") return build_torus(p.dim, p.n);
  if (p.family == "complete") return build_complete(p.n);
  if (p.family == "random_regular") return build_random_regular(p.n, p.d, seed);
  if (p.family == "clique_star") return build_clique_star(p.clique, p.leaves);
  if (p.family == "linked_cliques") {
    require(p.clique > 0, ErrorKind::invalid_parameter, "clique size must be positive");
    return build_linked_cliques(p.copies > 0 ? p.copies : p.n / p.clique, p.clique);
  }
  if (p.family == "two_cliques") return build_two_cliques(p.clique, p.path_len);
  return build_star(p.leaves);
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) pts.push_back(params_to_json(p));
  nlohmann::json j;
  j["family"] = family;
  j["points"] = pts;
  j["init"] = init_name(init.kind);
  j["density"] = init.density;
  j["m"] = init.count;
  j["mode"] = mode == Mode::discrete ? "discrete" : "continuous";
  j["holding"] = holding_inverse_n ? nlohmann::json("1/n") : nlohmann::json(holding);
  j["trials"] = trials;
  j["seed_base"] = seed_base;
  j["metrics"] = {{"tau2", metrics.tau2},
                  {"giant", metrics.giant},
                  {"isolation", metrics.isolation},
                  {"degrees", metrics.degrees},
                  {"gamma", metrics.gamma}};
  j["max_steps"] = auto_json(max_time);
  j["giant_at"] = auto_json(giant_at);
  j["isolation_at"] = auto_json(isolated_at);
  j["resample"] = resample_until_two;
  j["threads"] = threads;
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  try {
    ExperimentSpec s;
    s.family = j.at("family").get<std::string>();
    require(known_family(s.family), ErrorKind::invalid_input, "unknown graph family '" + s.family + "'");
    FamilyParams base = params_from_json(j, FamilyParams{});
    base.family = s.family;
    if (j.contains("points")) {
      for (const auto& p : j.at("points")) s.points.push_back(params_from_json(p, base));
    } else if (j.contains("n") && j.at("n").is_array()) {
      for (const auto& n : j.at("n")) {
        FamilyParams p = base;
        p.n = n.get<std::uint32_t>();
        s.points.push_back(p);
      }
    } else {
      s.points.push_back(base);
    }
    require(!s.points.empty(), ErrorKind::invalid_input, "the parameter grid is empty");
    for (auto& p : s.points) p.family = s.family;

    const std::string init = j.value("init", std::string("poisson"));
    if (init == "poisson") {
      s.init = InitScheme::poisson(j.value("density", 1.0));
    } else if (init == "one-per-site" || init == "one_per_site") {
      s.init = InitScheme::one_per_site();
    } else if (init == "fixed-m" || init == "fixed_m") {
      s.init = InitScheme::fixed_m(j.at("m").get<std::uint64_t>());
    } else {
      throw Error(ErrorKind::invalid_input, "unknown init scheme '" + init + "'");
    }
    const std::string mode = j.value("mode", std::string("discrete"));
    require(mode == "discrete" || mode == "continuous", ErrorKind::invalid_input, "mode must be discrete or continuous");
    s.mode = mode == "discrete" ? Mode::discrete : Mode::continuous;
    if (j.contains("holding")) {
      const auto& h = j.at("holding");
      if (h.is_string()) {
        require(h.get<std::string>() == "1/n", ErrorKind::invalid_input, "holding must be a number or \"1/n\"");
        s.holding_inverse_n = true;
      } else {
        s.holding = h.get<double>();
      }
    }
    require(s.holding >= 0.0 && s.holding < 1.0, ErrorKind::invalid_parameter, "holding must lie in [0,1)");
    s.trials = j.value("trials", std::uint64_t{1});
    require(s.trials >= 1, ErrorKind::invalid_input, "trials must be at least 1");
    s.seed_base = j.value("seed_base", std::uint64_t{1});
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      if (m.is_array()) {
        std::set<std::string> names;
        for (const auto& x : m) names.insert(x.get<std::string>());
        s.metrics.tau2 = names.count("tau2") > 0;
        s.metrics.giant = names.count("giant") > 0;
        s.metrics.isolation = names.count("isolation") > 0;
        s.metrics.degrees = names.count("ag-degrees") > 0 || names.count("degrees") > 0;
        s.metrics.gamma = names.count("gamma") > 0;
      } else {
        s.metrics.tau2 = m.value("tau2", false);
        s.metrics.giant = m.value("giant", false);
        s.metrics.isolation = m.value("isolation", false);
        s.metrics.degrees = m.value("degrees", true);
        s.metrics.gamma = m.value("gamma", true);
      }
    }
    s.max_time = auto_or_number(j, "max_steps");
    s.giant_at = auto_or_number(j, "giant_at");
    s.isolated_at = auto_or_number(j, "isolation_at");
    s.resample_until_two = j.value("resample", false);
    s.threads = j.value("threads", 0u);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("experiment spec: ") + e.what());
  }
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
  auto j = spec.to_json();
  j.erase("threads");
  return fnv1a(j.dump());
}

std::uint64_t point_seed(std::uint64_t seed_base, std::size_t point) {
  return derive_seed(derive_seed(seed_base, point), 0xFFFFFFFFFFFFFFFFull);
}

std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t point, std::uint64_t trial) {
  return derive_seed(derive_seed(seed_base, point), trial);
}

ResultTable run_sweep(const ExperimentSpec& spec) {
  require(!spec.points.empty(), ErrorKind::invalid_input, "the parameter grid is empty");
  require(spec.trials >= 1, ErrorKind::invalid_input, "trials must be at least 1");
  ResultTable table;
  table.spec = spec.to_json();
  table.spec->erase("threads");  // output must not depend on the worker count
  table.spec_hash = hex(spec_hash(spec));
  table.code_version = kCodeVersion;

  struct Prepared {
    std::optional<Graph> graph;
    std::optional<double> gamma;
    TrialOptions options;
  };
  std::vector<Prepared> prepared(spec.points.size());
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    auto& p = prepared[i];
    try {
      p.graph = build_family(spec.points[i], point_seed(spec.seed_base, i));
      const Graph& g = *p.graph;
      const double n = g.vertex_count();
      const double holding = spec.holding_inverse_n ? 1.0 / n : spec.holding;
      if (spec.metrics.gamma && g.is_symmetric() && g.vertex_count() <= kDenseVertexCap) {
        p.gamma = spectral_gap(g, spec.mode == Mode::continuous ? 0.0 : holding);
      }
      auto& o = p.options;
      o.mode = spec.mode;
      o.holding = holding;
      o.caps.max_time = spec.max_time;
      o.track_tau2 = spec.metrics.tau2;
      o.track_degrees = spec.metrics.degrees;
      o.resample_until_two = spec.resample_until_two;
      if (spec.metrics.giant) {
        if (spec.giant_at) {
          o.giant_at = spec.giant_at;
        } else {
          require(p.gamma.has_value(), ErrorKind::invalid_input, "automatic giant_at needs the spectral gap");
          o.giant_at = std::ceil(8.0 / *p.gamma);
        }
      }
      if (spec.metrics.isolation) {
        const double ln = std::log(n);
        o.isolated_at = spec.isolated_at.value_or(std::floor(0.05 * ln * ln));
      }
    } catch (const Error& e) {
      p.graph.reset();
      table.failures.push_back({i, e.what()});
    }
  }

  std::vector<std::pair<std::size_t, std::uint64_t>> tasks;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (!prepared[i].graph) continue;
    for (std::uint64_t t = 0; t < spec.trials; ++t) tasks.emplace_back(i, t);
  }
  std::vector<std::optional<ResultRow>> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const auto [i, t] = tasks[k];
      const auto& p = prepared[i];
      const Graph& g = *p.graph;
      const std::uint64_t seed = trial_seed(spec.seed_base, i, t);
      try {
        const TrialResult r = run_trial(g, spec.init, p.options, seed);
        ResultRow row;
        row.family = spec.family;
        row.n = g.vertex_count();
        row.d = g.average_degree();
        row.gamma = p.gamma;
        row.seed = seed;
        row.trial = t;
        row.walkers = r.walker_count;
        row.sc = r.sc;
        row.sc_capped = r.sc_capped;
        row.tau1 = r.tau1;
        row.tau2 = r.tau2;
        row.giant_at_s = r.giant_at_s;
        row.isolated_at_t = r.isolated_at_t;
        if (spec.metrics.degrees) {
          row.ag_mean_deg = r.ag_degree_summary.mean;
          row.ag_max_deg = r.ag_degree_summary.max;
        }
        rows[k] = std::move(row);
      } catch (const Error& e) {
        errors[k] = e.what();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (rows[k]) {
      table.rows.push_back(std::move(*rows[k]));
    } else {
      table.failures.push_back({tasks[k].first, "trial " + std::to_string(tasks[k].second) + ": " + errors[k]});
    }
  }
  std::stable_sort(table.failures.begin(), table.failures.end(),
                   [](const PointFailure& a, const PointFailure& b) { return a.point < b.point; });
  return table;
}

const char* const kCsvColumns =
    "family,n,d,gamma,seed,trial,walkers,sc,sc_capped,tau1,tau2,giant_at_s,isolated_at_t,ag_mean_deg,ag_max_deg";

std::string write_csv(const ResultTable& table) {
  std::string out;
  out += "# code_version=" + (table.code_version.empty() ? std::string(kCodeVersion) : table.code_version) + "\n";
  if (!table.spec_hash.empty()) out += "# spec_hash=" + table.spec_hash + "\n";
  if (table.spec) out += "# spec=" + table.spec->dump() + "\n";
  for (const auto& f : table.failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out += "# failed_point=" + std::to_string(f.point) + " " + msg + "\n";
  }
  out += kCsvColumns;
  out += '\n';
  for (const auto& r : table.rows) {
    require(r.family.find_first_of(",\n") == std::string::npos, ErrorKind::invalid_input,
            "family names cannot contain commas");
    out += r.family;
    for (const std::string& field :
         {number(r.n), number(r.d), optional_number(r.gamma), number(r.seed), number(r.trial), number(r.walkers),
          number(r.sc), std::string(r.sc_capped ? "1" : "0"), optional_number(r.tau1), optional_number(r.tau2),
          optional_number(r.giant_at_s), optional_number(r.isolated_at_t), optional_number(r.ag_mean_deg),
          optional_number(r.ag_max_deg)}) {
      out += ',';
      out += field;
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(const std::string& text) {
  ResultTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      auto starts = [&](std::string_view prefix) { return body.substr(0, prefix.size()) == prefix; };
      if (starts("code_version=")) {
        table.code_version = std::string(body.substr(13));
      } else if (starts("spec_hash=")) {
        table.spec_hash = std::string(body.substr(10));
      } else if (starts("spec=")) {
        try {
          table.spec = nlohmann::json::parse(body.substr(5));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::parse_error, std::string("embedded spec: ") + e.what());
        }
      } else if (starts("failed_point=")) {
        body.remove_prefix(13);
        const auto space = body.find(' ');
        PointFailure f;
        f.point = parse_number<std::size_t>(body.substr(0, space), line_no);
        if (space != std::string_view::npos) f.message = std::string(body.substr(space + 1));
        table.failures.push_back(std::move(f));
      }
      continue;
    }
    if (!header_seen) {
      require(line == kCsvColumns, ErrorKind::parse_error, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    require(f.size() == 15, ErrorKind::parse_error, "expected 15 fields on line " + std::to_string(line_no));
    ResultRow r;
    r.family = std::string(f[0]);
    r.n = parse_number<std::uint32_t>(f[1], line_no);
    r.d = parse_number<double>(f[2], line_no);
    r.gamma = parse_optional<double>(f[3], line_no);
    r.seed = parse_number<std::uint64_t>(f[4], line_no);
    r.trial = parse_number<std::uint64_t>(f[5], line_no);
    r.walkers = parse_number<std::uint64_t>(f[6], line_no);
    r.sc = parse_number<double>(f[7], line_no);
    require(f[8] == "0" || f[8] == "1", ErrorKind::parse_error, "sc_capped must be 0 or 1");
    r.sc_capped = f[8] == "1";
    r.tau1 = parse_optional<double>(f[9], line_no);
    r.tau2 = parse_optional<double>(f[10], line_no);
    r.giant_at_s = parse_optional<std::uint32_t>(f[11], line_no);
    r.isolated_at_t = parse_optional<std::uint32_t>(f[12], line_no);
    r.ag_mean_deg = parse_optional<double>(f[13], line_no);
    r.ag_max_deg = parse_optional<std::uint32_t>(f[14], line_no);
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::log_n:
      return "log";
    case FitModel::log2_n:
      return "log2";
    case FitModel::inv_gap_log_n:
      return "gap-log";
    case FitModel::degree_log_n:
      return "d-log";
  }
  return "log";
}

FitModel parse_fit_model(const std::string& name) {
  for (auto m : {FitModel::log_n, FitModel::log2_n, FitModel::inv_gap_log_n, FitModel::degree_log_n}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::invalid_input, "unknown fit model '" + name + "' (log, log2, gap-log, d-log)");
}

double model_feature(FitModel m, double n, double d, std::optional<double> gamma) {
  const double ln = std::log(n);
  switch (m) {
    case FitModel::log_n:
      return ln;
    case FitModel::log2_n:
      return ln * ln;
    case FitModel::inv_gap_log_n:
      require(gamma.has_value() && *gamma > 0.0, ErrorKind::invalid_input, "gap model needs a positive gamma");
      return ln / *gamma;
    case FitModel::degree_log_n:
      return d * ln;
  }
  return ln;
}

FitReport fit_scaling(const std::vector<ResultRow>& rows, FitModel model) {
  FitReport report;
  report.model = model;
  struct Group {
    std::vector<double> sc, d, gamma;
  };
  std::map<std::uint32_t, Group> groups;
  for (const auto& r : rows) {
    if (r.sc_capped) {
      ++report.censored;
      continue;
    }
    auto& g = groups[r.n];
    g.sc.push_back(r.sc);
    g.d.push_back(r.d);
    if (r.gamma) g.gamma.push_back(*r.gamma);
  }
  require(groups.size() >= 3, ErrorKind::invalid_input, "scaling fit needs at least 3 distinct n values");
  std::vector<double> x, y;
  for (const auto& [n, g] : groups) {
    FitPoint p;
    p.n = n;
    p.rows = g.sc.size();
    p.median = median(g.sc);
    p.iqr = quantile(g.sc, 0.75) - quantile(g.sc, 0.25);
    const std::optional<double> gamma = g.gamma.empty() ? std::nullopt : std::optional<double>(median(g.gamma));
    p.feature = model_feature(model, n, median(g.d), gamma);
    x.push_back(p.feature);
    y.push_back(p.median);
    report.points.push_back(p);
  }
  const LinearFit fit = fit_line(x, y);
  report.a = fit.slope;
  report.b = fit.intercept;
  report.r2 = fit.r2;
  report.degenerate = fit.degenerate;
  report.residuals = fit.residuals;
  return report;
}

std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::uint32_t, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.family, r.n, r.d}].push_back(&r);
  std::vector<PointSummary> out;
  for (const auto& [key, members] : groups) {
    PointSummary s;
    std::tie(s.family, s.n, s.d) = key;
    s.rows = members.size();
    std::vector<double> sc, tau1, tau2;
    for (const auto* r : members) {
      sc.push_back(r->sc);
      s.cap_hits += r->sc_capped;
      if (r->tau1) tau1.push_back(*r->tau1);
      if (r->tau2) tau2.push_back(*r->tau2);
    }
    double total = 0.0;
    for (double v : sc) total += v;
    s.sc_mean = total / static_cast<double>(sc.size());
    s.sc_q25 = quantile(sc, 0.25);
    s.sc_median = quantile(sc, 0.5);
    s.sc_q75 = quantile(sc, 0.75);
    s.sc_iqr = s.sc_q75 - s.sc_q25;
    s.sc_min = *std::min_element(sc.begin(), sc.end());
    s.sc_max = *std::max_element(sc.begin(), sc.end());
    s.cap_rate_ci = wilson_interval(s.cap_hits, s.rows);
    if (!tau1.empty()) s.tau1_median = median(tau1);
    if (!tau2.empty()) s.tau2_median = median(tau2);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace acquaint
