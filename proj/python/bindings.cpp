#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "encl/config.hpp"
#include "encl/errors.hpp"
#include "encl/io.hpp"
#include "encl/probe.hpp"
#include "encl/reconstruct.hpp"
#include "encl/shape.hpp"
#include "encl/validate.hpp"
#include "encl/wave.hpp"

namespace py = pybind11;
using namespace encl;

namespace {

Vec3 vec_from(py::handle obj) {
  if (py::isinstance<Vec3>(obj)) return obj.cast<Vec3>();
  auto seq = py::cast<py::sequence>(obj);
  if (seq.size() != 3) throw py::value_error("expected a 3-sequence");
  return {seq[0].cast<double>(), seq[1].cast<double>(), seq[2].cast<double>()};
}

std::string run_indicator_json(const std::string& config_text) {
  RunConfig cfg = RunConfig::from_json(nlohmann::json::parse(config_text), "config");
  Scene scene = build_scene(cfg);
  ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, cfg.probes.at(0));
  nlohmann::json out = {{"T", art.T},
                        {"verdict", to_string(art.verdict)},
                        {"series", series_to_json(art.series)},
                        {"report", report_to_json(art.report)}};
  if (!art.fit_error.empty()) out["fit_error"] = art.fit_error;
  return out.dump();
}

std::pair<std::string, py::array_t<double>> run_reconstruct_json(
    const std::string& config_text) {
  RunConfig cfg = RunConfig::from_json(nlohmann::json::parse(config_text), "config");
  Scene scene = build_scene(cfg);
  EnclosureResult res = run_plan(cfg, scene);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : res.records)
    records.push_back({{"center", {r.probe.center.x, r.probe.center.y, r.probe.center.z}},
                       {"radius", r.probe.radius},
                       {"usable", r.usable},
                       {"verdict", to_string(r.verdict)},
                       {"d_hat", r.d_hat},
                       {"point_distance", r.point_distance}});
  nlohmann::json out{{"records", records}};
  if (res.metrics)
    out["metrics"] = {{"median_rel_error", res.metrics->median_rel_error},
                      {"max_rel_error", res.metrics->max_rel_error},
                      {"hausdorff", res.metrics->hausdorff},
                      {"containment", res.metrics->containment}};
  const Grid3& g = res.region.grid;
  py::array_t<double> region({g.nz, g.ny, g.nx});
  std::copy(res.region.values.begin(), res.region.values.end(),
            region.mutable_data());
  return {out.dump(), region};
}

std::string run_suite_json(const std::string& name, bool quick, int threads,
                           std::uint64_t seed) {
  SuiteOptions opts;
  opts.quick = quick;
  opts.threads = threads;
  opts.seed = seed;
  return suite_to_json(run_suite(name, opts)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Acoustic wave scattering and probe-based distance reconstruction";

  py::register_exception<Error>(m, "EnclosureError");

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<double, double, double>())
      .def(py::init([](py::sequence s) { return vec_from(s); }))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("norm", &Vec3::norm)
      .def("__repr__", [](const Vec3& v) {
        return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
               std::to_string(v.z) + ")";
      });
  py::implicitly_convertible<py::sequence, Vec3>();

  py::class_<Shape>(m, "Shape")
      .def("sdf", [](const Shape& s, py::handle p) { return s.sdf(vec_from(p)); })
      .def("boundary_distance",
           [](const Shape& s, py::handle p) { return s.boundary_distance(vec_from(p)); });
  m.def("sphere", [](py::handle c, double r) { return Shape::sphere(vec_from(c), r); },
        py::arg("center"), py::arg("radius"));
  m.def("box", [](py::handle lo, py::handle hi) {
    return Shape::box(vec_from(lo), vec_from(hi));
  });
  m.def("union_of", [](std::vector<Shape> parts) { return Shape::unite(std::move(parts)); });

  m.def("dist_sets", &dist_sets);
  m.def("d_point", [](const Shape& a, py::handle p) { return d_point(a, vec_from(p)); });
  m.def("broken_path_length", &broken_path_length, py::arg("probe"),
        py::arg("obstacle"), py::arg("surface"));
  m.def("min_observation_time", &min_observation_time, py::arg("obstacle"),
        py::arg("probe"), py::arg("surface"));

  py::class_<ProbeBall>(m, "ProbeBall")
      .def(py::init([](py::handle c, double radius, double amplitude) {
             return ProbeBall{vec_from(c), radius, amplitude};
           }),
           py::arg("center"), py::arg("radius"), py::arg("amplitude") = 1.0)
      .def_readwrite("radius", &ProbeBall::radius)
      .def_readwrite("amplitude", &ProbeBall::amplitude);

  m.def("v_closed", [](const ProbeBall& probe, double tau, py::handle x) {
    return v_closed({probe, tau}, vec_from(x));
  });
  m.def("grad_v_closed", [](const ProbeBall& probe, double tau, py::handle x) {
    Vec3 g = grad_v_closed({probe, tau}, vec_from(x));
    return py::make_tuple(g.x, g.y, g.z);
  });
  m.def("v_quadrature", [](const ProbeBall& probe, double tau, py::handle x, double tol) {
    return v_quadrature(probe, tau, vec_from(x), tol).value;
  }, py::arg("probe"), py::arg("tau"), py::arg("x"), py::arg("tol") = 1e-8);
  m.def("free_space_oracle", [](py::handle x, double t, const ProbeBall& probe) {
    return free_space_oracle(vec_from(x), t, probe);
  });

  m.def("run_indicator_json", &run_indicator_json,
        "Run the single-probe indicator pipeline from a JSON config string");
  m.def("run_reconstruct_json", &run_reconstruct_json,
        "Run the multi-probe reconstruction; returns (summary json, region array)");
  m.def("run_suite_json", &run_suite_json, py::arg("name"), py::arg("quick") = false,
        py::arg("threads") = 1, py::arg("seed") = 1);
}
