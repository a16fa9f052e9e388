// acquaint: command-line front end (gen, run, sweep, spectral, oracle, fit).

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acquaint/balance.hpp"
#include "acquaint/engine.hpp"
#include "acquaint/error.hpp"
#include "acquaint/graph.hpp"
#include "acquaint/harness.hpp"
#include "acquaint/oracle.hpp"
#include "acquaint/serialize.hpp"
#include "acquaint/spectral.hpp"

using namespace acquaint;

namespace {

struct GraphArgs {
  std::string file;
  std::string family;
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t dim = 1;
  std::uint32_t leaves = 1;
  std::uint32_t clique = 4;
  std::uint32_t path_len = 0;
  std::uint32_t copies = 0;
  std::uint64_t seed = 1;
};

struct SimArgs {
  std::string init = "poisson";
  double density = 1.0;
  std::uint64_t m = 0;
  std::string mode = "discrete";
  double holding = 0.5;
  std::string max_steps = "auto";
  bool trace = false;
};

void add_graph_options(CLI::App* app, GraphArgs& g) {
  app->add_option("--graph", g.file, "edge-list file");
  app->add_option("--family", g.family, "graph family");
  app->add_option("--n", g.n, "vertex count (side length for torus)");
  app->add_option("--d", g.d, "degree (random_regular)");
  app->add_option("--dim", g.dim, "torus dimension");
  app->add_option("--leaves", g.leaves, "star size (clique_star, star)");
  app->add_option("--clique", g.clique, "clique size");
  app->add_option("--path-len", g.path_len, "two_cliques path length, 0 for edge-pair mode");
  app->add_option("--copies", g.copies, "linked_cliques copies");
  app->add_option("--seed", g.seed, "random seed");
}

void add_sim_options(CLI::App* app, SimArgs& s) {
  app->add_option("--init", s.init, "poisson|one-per-site|fixed-m");
  app->add_option("--density", s.density, "poisson density lambda");
  app->add_option("--m", s.m, "walker count for fixed-m");
  app->add_option("--mode", s.mode, "discrete|continuous");
  app->add_option("--holding", s.holding, "holding probability in [0,1)");
  app->add_option("--max-steps", s.max_steps, "time cap or 'auto'");
  app->add_flag("--trace", s.trace, "include trajectories");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::invalid_input, "cannot write '" + path + "'");
  out << text;
}

FamilyParams family_params(const GraphArgs& a) {
  FamilyParams p;
  p.family = a.family;
  p.n = a.n;
  p.d = a.d;
  p.dim = a.dim;
  p.leaves = a.leaves;
  p.clique = a.clique;
  p.path_len = a.path_len;
  p.copies = a.copies;
  return p;
}

Graph load_graph(const GraphArgs& a) {
  if (!a.file.empty()) return load_edge_list(read_file(a.file), a.file);
  require(!a.family.empty(), ErrorKind::invalid_input, "give --graph <file> or --family <name>");
  return build_family(family_params(a), a.seed);
}

InitScheme init_scheme(const SimArgs& s) {
  if (s.init == "poisson") return InitScheme::poisson(s.density);
  if (s.init == "one-per-site") return InitScheme::one_per_site();
  if (s.init == "fixed-m") return InitScheme::fixed_m(s.m);
  throw Error(ErrorKind::invalid_input, "unknown init scheme '" + s.init + "'");
}

Mode mode_of(const SimArgs& s) {
  if (s.mode == "discrete") return Mode::discrete;
  if (s.mode == "continuous") return Mode::continuous;
  throw Error(ErrorKind::invalid_input, "mode must be discrete or continuous");
}

std::optional<double> cap_of(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    require(used == text.size() && v > 0.0, ErrorKind::invalid_input, "");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_input, "--max-steps must be a positive number or 'auto'");
  }
}

std::vector<Vertex> parse_vertices(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<Vertex>(std::stoul(item)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, "bad vertex list '" + text + "'");
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, "bad number list '" + text + "'");
    }
  }
  return out;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::generation_failure:
    case ErrorKind::resource_limit:
    case ErrorKind::budget_exceeded:
    case ErrorKind::no_convergence:
      return 3;
    default:
      return 2;
  }
}

nlohmann::json mc_json(const MonteCarloMean& m) {
  return {{"mean", m.mean}, {"stderr", m.stderr_}, {"trials", m.trials}};
}

struct OracleArgs {
  std::string check;
  std::uint32_t v = 0;
  std::uint32_t u = 0;
  std::size_t t = 1;
  std::string walk;
  std::string probs;
  std::size_t k = 1;
  double kk = 0.0;
  std::int64_t i = 1;
  std::uint64_t trials = 10000;
  std::uint64_t m = 1;
  std::size_t sequences = 20;
  double c = 1.0;
  double delta = 0.125;
  double holding = 0.5;
  double beta = 1.0;
};

nlohmann::json run_oracle(const OracleArgs& o, const GraphArgs& ga) {
  nlohmann::json j;
  j["check"] = o.check;
  if (o.check == "dominance") {
    const auto r = dominance_check(parse_doubles(o.probs), o.k);
    j["dominates"] = r.dominates;
    j["upsets_checked"] = r.upsets_checked;
    j["worst_margin"] = r.worst_margin;
    return j;
  }
  if (o.check == "skellam") {
    const auto r = skellam_survival(o.i, o.kk);
    j["value"] = r.value;
    j["envelope"] = r.envelope ? nlohmann::json(*r.envelope) : nlohmann::json(nullptr);
    j["envelope_holds"] = r.envelope_holds;
    return j;
  }

  const Graph g = load_graph(ga);
  const std::uint64_t seed = ga.seed;
  if (o.check == "walks") {
    const auto walks = enumerate_walks(g, o.t, o.holding);
    double mass = 0.0;
    for (const auto& w : walks) mass += w.q;
    j["walks"] = walks.size();
    j["total_q"] = mass;
    j["n"] = g.vertex_count();
  } else if (o.check == "bound-inputs") {
    const auto b = bound_inputs(g, o.t, o.beta);
    j["mu"] = b.mu;
    j["a_t"] = b.a_t;
    j["s_beta"] = b.s_beta;
  } else if (o.check == "thinning") {
    const auto r = thinning_check_vertex(g, o.v, o.t, InitScheme::poisson(1.0), o.trials, seed, o.holding);
    j["applicable"] = r.applicable;
    j["statistic"] = r.statistic;
    j["df"] = r.df;
    j["p_value"] = r.p_value;
    j["sample_mean"] = r.sample_mean;
    j["expected_mean"] = r.expected_mean;
    const auto c = occupancy_correlation(g, o.u, o.v, o.t, InitScheme::poisson(1.0), o.trials, seed + 1, o.holding);
    j["correlation"] = {{"u", o.u}, {"v", o.v}, {"rho", c.rho}, {"bound", c.bound}, {"within", c.within}};
  } else if (o.check == "acquaintance") {
    const auto walk = parse_vertices(o.walk);
    const auto r = acquaintance_rate(g, walk, o.holding);
    j["a_gamma"] = r.a_gamma;
    j["q_gamma"] = r.q_gamma;
    j["bound"] = r.bound;
    j["bound_holds"] = r.bound_holds;
    j["monte_carlo"] = mc_json(acquaintance_rate_mc(g, walk, o.trials, seed, o.holding));
  } else if (o.check == "il") {
    const auto r = il_probability(g, o.v, o.t);
    j["bound"] = r.bound;
    j["exact"] = r.exact ? nlohmann::json(*r.exact) : nlohmann::json(nullptr);
    j["bound_holds"] = r.bound_holds;
    j["monte_carlo"] = mc_json(il_probability_mc(g, o.v, o.t, o.trials, seed));
  } else if (o.check == "isolated-bounds") {
    const auto b = isolated_expectation_bounds(g, o.m, o.t, o.holding);
    j["ml1"] = b.ml1;
    j["ml2"] = b.ml2 ? nlohmann::json(*b.ml2) : nlohmann::json(nullptr);
    const auto mc = isolated_counts_mc(g, o.m, o.t, o.trials, seed, o.holding);
    j["never_met"] = mc_json(mc.never_met);
    j["lazy_isolated"] = mc_json(mc.lazy_isolated);
  } else if (o.check == "negcorr") {
    const auto r = negative_correlation_check(g, parse_vertices(o.walk), o.t, o.trials, seed, o.holding);
    j["holds"] = r.holds;
    j["exact"] = r.exact;
    j["combinations"] = r.combinations;
    j["worst_gap"] = r.worst_gap;
  } else if (o.check == "pair-meeting") {
    j["exact"] = pair_meeting_exact(g, o.u, o.v, o.t, o.holding);
    j["monte_carlo"] = mc_json(pair_meeting_mc(g, o.u, o.v, o.t, o.trials, seed, o.holding));
  } else if (o.check == "crossing") {
    const auto r = crossing_mean_bound(g, o.v, o.t, o.holding);
    j["mu"] = r.mu;
    j["c_needed"] = r.c_needed;
  } else if (o.check == "expander-hit") {
    const auto r = expander_hit_bound_check(g, o.sequences, o.trials, seed, o.c, o.holding);
    j["gamma"] = r.gamma;
    j["t"] = r.t;
    j["bound"] = r.bound;
    j["verdict"] = r.verdict;
    auto seqs = nlohmann::json::array();
    for (const auto& s : r.sequences) seqs.push_back({{"estimate", s.estimate}, {"stderr", s.stderr_}, {"ok", s.ok}});
    j["sequences"] = seqs;
  } else if (o.check == "balance") {
    const SimState s = sample_initial(g, InitScheme::poisson(1.0), seed, false);
    j = to_json(check_balanced(s.occupancy, g, o.delta, o.t, o.holding));
    j["check"] = o.check;
  } else {
    throw Error(ErrorKind::invalid_input, "unknown oracle check '" + o.check + "'");
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk acquaintance simulator and spectral toolkit"};
  app.require_subcommand(1);

  GraphArgs graph_args;
  SimArgs sim_args;
  std::string out_path;

  auto* gen = app.add_subcommand("gen", "write a graph as an edge list");
  add_graph_options(gen, graph_args);
  gen->add_option("--out", out_path, "output path (default stdout)");

  auto* run = app.add_subcommand("run", "run one trial and print it as JSON");
  add_graph_options(run, graph_args);
  add_sim_options(run, sim_args);
  run->add_option("--out", out_path, "output path (default stdout)");
  bool want_tau2 = false;
  std::optional<double> giant_at, isolated_at;
  run->add_flag("--tau2", want_tau2, "continue until every vertex is visited");
  run->add_option("--giant-at", giant_at, "record the largest class at this time");
  run->add_option("--isolated-at", isolated_at, "record the never-met count at this time");

  auto* sweep = app.add_subcommand("sweep", "run an experiment grid and write CSV");
  std::string spec_path;
  std::vector<std::uint32_t> sweep_n;
  std::uint64_t trials = 1;
  std::uint64_t seed_base = 1;
  unsigned threads = 0;
  std::vector<std::string> metrics;
  sweep->add_option("--spec", spec_path, "experiment spec (JSON file)");
  add_graph_options(sweep, graph_args);
  add_sim_options(sweep, sim_args);
  sweep->add_option("--grid", sweep_n, "list of n values")->delimiter(',');
  sweep->add_option("--trials", trials, "trials per grid point");
  sweep->add_option("--seed-base", seed_base, "seed base");
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep->add_option("--metrics", metrics, "tau2,giant,isolation,degrees,gamma")->delimiter(',');
  sweep->add_option("--out", out_path, "output path (default stdout)");

  auto* spectral = app.add_subcommand("spectral", "spectral quantities of a graph");
  add_graph_options(spectral, graph_args);
  SpectralOptions spec_opts;
  std::string format = "kv";
  spectral->add_option("--holding", spec_opts.holding, "holding probability");
  spectral->add_option("--alpha", spec_opts.alpha, "alpha for s_alpha");
  spectral->add_option("--origin", spec_opts.origin, "origin vertex for t(G)");
  spectral->add_option("--kappa-t", spec_opts.kappa_t_max, "largest t in the kappa table");
  spectral->add_option("--profile-t", spec_opts.profile_t_max, "largest t in the mixing profile");
  spectral->add_option("--c1", spec_opts.constants.c1, "constant c_1 of the regular t_*");
  spectral->add_option("--decay-m", spec_opts.constants.decay_m, "constant M of the decay estimate");
  spectral->add_option("--format", format, "kv|json")->check(CLI::IsMember({"kv", "json"}));
  spectral->add_option("--out", out_path, "output path (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "exact small-instance checks as JSON");
  add_graph_options(oracle, graph_args);
  OracleArgs oa;
  oracle
      ->add_option("--check", oa.check,
                   "walks|bound-inputs|thinning|acquaintance|il|isolated-bounds|dominance|negcorr|pair-meeting|"
                   "skellam|crossing|expander-hit|balance")
      ->required();
  oracle->add_option("--u", oa.u, "first vertex");
  oracle->add_option("--v", oa.v, "second vertex / target vertex");
  oracle->add_option("--t", oa.t, "time horizon");
  oracle->add_option("--walk", oa.walk, "comma-separated vertices (walk, or walker starts for negcorr)");
  oracle->add_option("--probs", oa.probs, "comma-separated event probabilities (dominance)");
  oracle->add_option("--k", oa.k, "conditioning size (dominance)");
  oracle->add_option("--i", oa.i, "window half-width (skellam)");
  oracle->add_option("--time", oa.kk, "continuous time (skellam)");
  oracle->add_option("--trials", oa.trials, "Monte Carlo trials");
  oracle->add_option("--walkers", oa.m, "walker count (isolated-bounds)");
  oracle->add_option("--sequences", oa.sequences, "target sequences (expander-hit)");
  oracle->add_option("--c", oa.c, "constant C (expander-hit)");
  oracle->add_option("--delta", oa.delta, "delta (balance)");
  oracle->add_option("--holding", oa.holding, "holding probability");
  oracle->add_option("--beta", oa.beta, "beta (bound-inputs)");
  oracle->add_option("--out", out_path, "output path (default stdout)");

  auto* fit = app.add_subcommand("fit", "fit scaling models to a results CSV");
  std::string in_path;
  std::vector<std::string> models;
  bool summary_only = false;
  fit->add_option("--in", in_path, "results CSV")->required();
  fit->add_option("--model", models, "log,log2,gap-log,d-log (default all)")->delimiter(',');
  fit->add_flag("--summary", summary_only, "print per-point summaries only");
  fit->add_option("--out", out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      write_output(out_path, save_edge_list(load_graph(graph_args)));
    } else if (*run) {
      const Graph g = load_graph(graph_args);
      TrialOptions o;
      o.mode = mode_of(sim_args);
      o.holding = sim_args.holding;
      o.caps.max_time = cap_of(sim_args.max_steps);
      o.trace = sim_args.trace;
      o.track_tau2 = want_tau2;
      o.giant_at = giant_at;
      o.isolated_at = isolated_at;
      const auto r = run_trial(g, init_scheme(sim_args), o, graph_args.seed);
      write_output(out_path, to_json(r, sim_args.trace).dump(2) + "\n");
    } else if (*sweep) {
      ExperimentSpec spec;
      if (!spec_path.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_file(spec_path));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::invalid_input, std::string("spec file: ") + e.what());
        }
        spec = ExperimentSpec::from_json(j);
      } else {
        nlohmann::json j;
        j["family"] = graph_args.family;
        j["n"] = sweep_n.empty() ? std::vector<std::uint32_t>{graph_args.n} : sweep_n;
        j["d"] = graph_args.d;
        j["dim"] = graph_args.dim;
        j["leaves"] = graph_args.leaves;
        j["clique"] = graph_args.clique;
        j["path_len"] = graph_args.path_len;
        j["copies"] = graph_args.copies;
        j["init"] = sim_args.init;
        j["density"] = sim_args.density;
        j["m"] = sim_args.m;
        j["mode"] = sim_args.mode;
        j["holding"] = sim_args.holding;
        j["trials"] = trials;
        j["seed_base"] = seed_base;
        if (!metrics.empty()) j["metrics"] = metrics;
        j["max_steps"] = sim_args.max_steps == "auto" ? nlohmann::json("auto") : nlohmann::json(*cap_of(sim_args.max_steps));
        spec = ExperimentSpec::from_json(j);
      }
      if (threads) spec.threads = threads;
      const auto table = run_sweep(spec);
      write_output(out_path, write_csv(table));
      for (const auto& f : table.failures) std::cerr << "point " << f.point << " failed: " << f.message << '\n';
    } else if (*spectral) {
      const auto summary = summarize_spectrum(load_graph(graph_args), spec_opts);
      write_output(out_path, format == "json" ? to_json(summary).dump(2) + "\n" : to_key_value(summary));
    } else if (*oracle) {
      write_output(out_path, run_oracle(oa, graph_args).dump(2) + "\n");
    } else if (*fit) {
      const auto table = parse_csv(read_file(in_path));
      nlohmann::json j;
      auto summaries = nlohmann::json::array();
      for (const auto& s : summarize(table.rows)) summaries.push_back(to_json(s));
      j["summary"] = summaries;
      if (!summary_only) {
        if (models.empty()) models = {"log", "log2", "gap-log", "d-log"};
        auto fits = nlohmann::json::array();
        for (const auto& name : models) {
          try {
            fits.push_back(to_json(fit_scaling(table.rows, parse_fit_model(name))));
          } catch (const Error& e) {
            fits.push_back({{"model", name}, {"error", e.what()}});
          }
        }
        j["fits"] = fits;
      }
      write_output(out_path, j.dump(2) + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "acquaint: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "acquaint: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
