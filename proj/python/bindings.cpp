#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "densfda/error.hpp"
#include "densfda/frechet.hpp"
#include "densfda/io.hpp"
#include "densfda/kde.hpp"
#include "densfda/simulation.hpp"
#include "densfda/transforms.hpp"

namespace py = pybind11;
using namespace densfda;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::InvalidArgument, "expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

DensityFn density(const Array& values, double lo, double hi, double floor) {
  std::vector<double> v = to_vector(values);
  const Grid g(lo, hi, v.size());
  return normalize(GridFn(g, std::move(v)), floor);
}

// Rows of a 2-d array are densities on a shared grid.
std::vector<DensityFn> sample(const Array& rows, double lo, double hi, double floor) {
  if (rows.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-d array with one density per row");
  const auto n = static_cast<std::size_t>(rows.shape(0));
  const auto m = static_cast<std::size_t>(rows.shape(1));
  const Grid g(lo, hi, m);
  std::vector<DensityFn> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows.data() + i * m;
    out.push_back(normalize(GridFn(g, std::vector<double>(r, r + m)), floor));
  }
  return out;
}

py::array_t<double> to_matrix(const std::vector<DensityFn>& fs) {
  const std::size_t m = fs.empty() ? 0 : fs.front().values().size();
  py::array_t<double> a({static_cast<py::ssize_t>(fs.size()), static_cast<py::ssize_t>(m)});
  double* out = a.mutable_data();
  for (const auto& f : fs) out = std::copy(f.values().begin(), f.values().end(), out);
  return a;
}

TransformSpec spec_of(const std::string& kind, double delta) {
  if (kind == "lqd") return TransformSpec::lqd();
  if (kind == "loghazard") return TransformSpec::log_hazard(delta);
  throw Error(ErrorCode::InvalidArgument, "unknown transform '" + kind + "'");
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Functional data analysis for samples of densities";
  m.attr("__version__") = DENSFDA_VERSION;

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string code(to_string(e.code()));
      py::object inst = py::reinterpret_borrow<py::object>(error)(code + ": " + e.what());
      inst.attr("code") = code;
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("normalize", [](const Array& v, double lo, double hi, double floor) {
        return to_array(density(v, lo, hi, floor).values());
      }, py::arg("values"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("floor") = kDefaultFloor);

  m.def("estimate_density",
        [](const Array& samples, double lo, double hi, std::size_t grid_points, double bandwidth,
           const std::string& kernel, double floor) {
          const std::vector<double> s = to_vector(samples);
          const double h = bandwidth > 0.0 ? bandwidth : default_bandwidth(s.size());
          const KdeConfig cfg{h, KernelSpec::parse(kernel), Grid(lo, hi, grid_points), floor};
          return to_array(estimate_density(s, cfg).values());
        },
        py::arg("samples"), py::arg("lo"), py::arg("hi"), py::arg("grid_points") = 512, py::arg("bandwidth") = 0.0,
        py::arg("kernel") = "gaussian", py::arg("floor") = kDefaultFloor,
        "Boundary-corrected kernel estimate; bandwidth is on the unit scale, 0 picks n^(-1/3).");

  m.def("forward",
        [](const Array& values, double lo, double hi, const std::string& kind, double delta) {
          const TransformedFn x = forward(density(values, lo, hi, 0.0), spec_of(kind, delta));
          return py::make_tuple(to_array(x.tgrid.points()), to_array(x.values));
        },
        py::arg("values"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("kind") = "lqd", py::arg("delta") = 0.1,
        "Returns (t, X) for the chosen transform.");

  m.def("inverse",
        [](const Array& x, double lo, double hi, std::size_t grid_points, const std::string& kind, double delta,
           double floor) {
          const TransformSpec spec = spec_of(kind, delta);
          std::vector<double> v = to_vector(x);
          const double thi = spec.kind == TransformKind::log_hazard ? 1.0 - delta : 1.0;
          const Grid tgrid(0.0, thi, v.size());
          const Grid xgrid(lo, hi, grid_points ? grid_points : v.size());
          return to_array(inverse(TransformedFn{tgrid, std::move(v), spec, xgrid}, floor).values());
        },
        py::arg("x"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("grid_points") = 0, py::arg("kind") = "lqd",
        py::arg("delta") = 0.1, py::arg("floor") = kDefaultFloor);

  m.def("dist_l2", [](const Array& a, const Array& b, double lo, double hi) {
        return dist_l2(density(a, lo, hi, 0.0), density(b, lo, hi, 0.0));
      }, py::arg("a"), py::arg("b"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def("dist_wasserstein", [](const Array& a, const Array& b, double lo, double hi) {
        return dist_wasserstein(density(a, lo, hi, 0.0), density(b, lo, hi, 0.0));
      }, py::arg("a"), py::arg("b"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  m.def("frechet_mean",
        [](const Array& rows, double lo, double hi, const std::string& metric, double floor) {
          return to_array(frechet_mean(sample(rows, lo, hi, 0.0), parse_metric(metric), floor).values());
        },
        py::arg("densities"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("metric") = "wasserstein",
        py::arg("floor") = kDefaultFloor);

  m.def("represent",
        [](const Array& rows, std::size_t K, const std::string& method, double lo, double hi, double delta) {
          return to_matrix(represent(sample(rows, lo, hi, 0.0), MethodKind::parse(method, delta), K));
        },
        py::arg("densities"), py::arg("K"), py::arg("method") = "lqd", py::arg("lo") = 0.0, py::arg("hi") = 1.0,
        py::arg("delta") = 0.1);

  m.def("mode",
        [](const Array& rows, std::size_t k, double alpha, const std::string& method, double lo, double hi,
           double delta) {
          const RepresentationModel model(sample(rows, lo, hi, 0.0), MethodKind::parse(method, delta));
          return to_array(model.mode(k, alpha).values());
        },
        py::arg("densities"), py::arg("k"), py::arg("alpha"), py::arg("method") = "lqd", py::arg("lo") = 0.0,
        py::arg("hi") = 1.0, py::arg("delta") = 0.1);

  m.def("fve",
        [](const Array& rows, const std::string& method, const std::string& metric, std::size_t k_max, double p,
           double lo, double hi, double delta) {
          const auto s = sample(rows, lo, hi, 0.0);
          const RepresentationModel model(s, MethodKind::parse(method, delta));
          const FrechetReport r = fve_curve(model, s, parse_metric(metric), k_max ? k_max : default_k_max(model), p);
          return json_to_py(io::to_json(r));
        },
        py::arg("densities"), py::arg("method") = "lqd", py::arg("metric") = "l2", py::arg("k_max") = 0,
        py::arg("p") = 0.9, py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("delta") = 0.1,
        "Frechet fraction of variance explained; returns a dict.");

  m.def("simulate",
        [](int setting, std::size_t n, std::size_t reps, std::size_t K, const std::string& metric,
           const std::vector<std::string>& methods, bool sampled, std::uint64_t seed, std::size_t threads) {
          if (setting < 1 || setting > 3) throw Error(ErrorCode::InvalidArgument, "setting must be 1, 2 or 3");
          SettingSpec spec;
          spec.id = static_cast<SettingId>(setting);
          spec.n = n;
          spec.seed = seed;
          spec.observed.sampled = sampled;
          std::vector<MethodKind> kinds;
          for (const auto& name : methods) kinds.push_back(MethodKind::parse(name));
          SimulationResult r;
          {
            py::gil_scoped_release release;
            r = run_comparison(spec, kinds, K, parse_metric(metric), reps, threads);
          }
          return json_to_py(io::to_json(r));
        },
        py::arg("setting"), py::arg("n") = 50, py::arg("reps") = 1, py::arg("K") = 1, py::arg("metric") = "l2",
        py::arg("methods") = std::vector<std::string>{"lqd", "fpca", "hs"}, py::arg("sampled") = false,
        py::arg("seed") = 7, py::arg("threads") = 1);
}
