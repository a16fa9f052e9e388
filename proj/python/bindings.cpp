#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acquaint/engine.hpp"
#include "acquaint/error.hpp"
#include "acquaint/graph.hpp"
#include "acquaint/harness.hpp"
#include "acquaint/serialize.hpp"
#include "acquaint/spectral.hpp"

namespace py = pybind11;
using namespace acquaint;

namespace {

InitScheme parse_init(const std::string& init, double density, std::uint64_t count) {
  if (init == "poisson") return InitScheme::poisson(density);
  if (init == "one-per-site") return InitScheme::one_per_site();
  if (init == "fixed-m") return InitScheme::fixed_m(count);
  throw Error(ErrorKind::invalid_parameter, "unknown init scheme '" + init + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Acquaintance-time simulator core";

  static py::exception<Error> error(m, "AcquaintError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def_static("from_edge_list", [](const std::string& text) { return load_edge_list(text); })
      .def("to_edge_list", &save_edge_list)
      .def_property_readonly("n", &Graph::vertex_count)
      .def_property_readonly("arc_count", &Graph::arc_count)
      .def_property_readonly("degrees", &Graph::degrees)
      .def_property_readonly("average_degree", &Graph::average_degree)
      .def_property_readonly("is_regular", &Graph::is_regular)
      .def_property_readonly("r_star", &Graph::r_star)
      .def_property_readonly("family", &Graph::family_tag)
      .def("neighbors", [](const Graph& g, Vertex v) {
        require(v < g.vertex_count(), ErrorKind::invalid_parameter, "vertex out of range");
        const auto s = g.out_neighbors(v);
        return std::vector<Vertex>(s.begin(), s.end());
      })
      .def("stationary", [](const Graph& g) { return stationary_distribution(g).pi; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph " + g.family_tag() + " n=" + std::to_string(g.vertex_count()) +
               " arcs=" + std::to_string(g.arc_count()) + ">";
      });

  m.def("cycle", &build_cycle, py::arg("n"));
  m.def("torus", &build_torus, py::arg("dim"), py::arg("side"));
  m.def("complete", &build_complete, py::arg("n"));
  m.def("random_regular", &build_random_regular, py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def("clique_star", &build_clique_star, py::arg("clique"), py::arg("star"));
  m.def("linked_cliques", &build_linked_cliques, py::arg("copies"), py::arg("clique"));
  m.def("two_cliques", &build_two_cliques, py::arg("clique"), py::arg("path_length") = 0);
  m.def("star", &build_star, py::arg("leaves"));

  m.def("spectral_gap", &spectral_gap, py::arg("graph"), py::arg("holding") = 0.5);
  m.def("kappa", &kappa, py::arg("graph"), py::arg("holding") = 0.5, py::arg("t_max") = 8);
  m.def("s_star", [](const Graph& g, double h) { return s_star(g, h); }, py::arg("graph"), py::arg("holding") = 0.5);
  m.def("t_star_general", [](const Graph& g, double h) { return t_star_general(g, h); }, py::arg("graph"),
        py::arg("holding") = 0.5);
  m.def("t_star_regular", [](const Graph& g, double h) { return t_star_regular(g, h).value; }, py::arg("graph"),
        py::arg("holding") = 0.5);
  m.def(
      "spectral_summary_json",
      [](const Graph& g, double holding, Vertex origin) {
        SpectralOptions o;
        o.holding = holding;
        o.origin = origin;
        return to_json(summarize_spectrum(g, o)).dump();
      },
      py::arg("graph"), py::arg("holding") = 0.5, py::arg("origin") = 0);

  m.def(
      "run_trial_json",
      [](const Graph& g, std::uint64_t seed, const std::string& init, double density, std::uint64_t count,
         bool continuous, double holding, bool tau2) {
        TrialOptions o;
        o.mode = continuous ? Mode::continuous : Mode::discrete;
        o.holding = holding;
        o.track_tau2 = tau2;
        py::gil_scoped_release release;
        return to_json(run_trial(g, parse_init(init, density, count), o, seed)).dump();
      },
      py::arg("graph"), py::arg("seed"), py::arg("init") = "poisson", py::arg("density") = 1.0,
      py::arg("count") = 0, py::arg("continuous") = false, py::arg("holding") = 0.5, py::arg("tau2") = false);

  m.def(
      "run_sweep_csv",
      [](const std::string& spec_json) {
        const auto spec = ExperimentSpec::from_json(nlohmann::json::parse(spec_json));
        py::gil_scoped_release release;
        return write_csv(run_sweep(spec));
      },
      py::arg("spec_json"));
  m.def(
      "summarize_csv",
      [](const std::string& csv) {
        auto out = nlohmann::json::array();
        for (const auto& s : summarize(parse_csv(csv).rows)) out.push_back(to_json(s));
        return out.dump();
      },
      py::arg("csv"));
  m.def(
      "fit_csv",
      [](const std::string& csv, const std::string& model) {
        return to_json(fit_scaling(parse_csv(csv).rows, parse_fit_model(model))).dump();
      },
      py::arg("csv"), py::arg("model"));
}
