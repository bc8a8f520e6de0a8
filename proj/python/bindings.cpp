#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maboost/boost.hpp"
#include "maboost/cli.hpp"
#include "maboost/dataset.hpp"
#include "maboost/error.hpp"
#include "maboost/geometry.hpp"
#include "maboost/projection.hpp"

namespace py = pybind11;
using namespace maboost;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                     const std::optional<std::vector<std::string>>& subsets) {
  if (rows.empty()) throw ConfigError("dataset needs at least one row");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ConfigError("rows have different lengths");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  std::vector<Subset> tags;
  if (subsets) {
    for (const auto& s : *subsets) {
      if (s == "A") {
        tags.push_back(Subset::A);
      } else if (s == "B") {
        tags.push_back(Subset::B);
      } else {
        throw ConfigError("subset tags must be \"A\" or \"B\", got \"" + s + "\"");
      }
    }
  }
  return Dataset(std::move(flat), dim, labels, std::move(tags));
}

Geometry geometry_for(const std::string& name, std::size_t n) { return Geometry::make(parse_geometry_kind(name), n); }

py::dict round_to_dict(const RoundTrace& r) {
  py::dict d;
  d["t"] = r.t;
  d["gamma"] = r.gamma;
  d["eta"] = r.eta;
  d["train_error"] = r.train_error;
  d["bound"] = r.bound;
  d["max_weight"] = r.max_weight;
  d["nnz"] = r.nnz;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) d[key] = *v;
  };
  put("margin", r.margin);
  put("nu", r.nu);
  put("eps_a", r.eps_a);
  put("eps_b", r.eps_b);
  put("y_norm", r.y_norm);
  put("y_norm_next", r.y_norm_next);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mirror-ascent boosting core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<UsageError>(m, "UsageError", base);
  py::register_exception<NoWeakLearnabilityError>(m, "NoWeakLearnabilityError", base);
  py::register_exception<BoundViolation>(m, "BoundViolation", base);
  py::register_exception<ParseError>(m, "ParseError", base);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("rows"), py::arg("labels"), py::arg("subsets") = std::nullopt)
      .def_property_readonly("size", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def("row", [](const Dataset& d, std::size_t i) {
        if (i >= d.size()) throw py::index_error("row index out of range");
        const auto r = d.row(i);
        return std::vector<double>(r.begin(), r.end());
      })
      .def_property_readonly("labels",
                             [](const Dataset& d) { return std::vector<int>(d.labels().begin(), d.labels().end()); })
      .def("__len__", &Dataset::size)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("gen_blobs", &gen_blobs, py::arg("seed"), py::arg("n"), py::arg("margin"));
  m.def("gen_noisy", &gen_noisy, py::arg("seed"), py::arg("n"), py::arg("flip_rate"));
  m.def("gen_diagonal", &gen_diagonal, py::arg("seed"), py::arg("n"), py::arg("margin"));
  m.def("gen_combined", &gen_combined, py::arg("seed"), py::arg("n_a"), py::arg("n_b"), py::arg("flip_rate"));
  m.def(
      "load_csv",
      [](const std::string& path, const std::string& label_column, std::optional<std::string> subset_column) {
        return load_csv(path, CsvOptions{label_column, std::move(subset_column)});
      },
      py::arg("path"), py::arg("label_column") = "label", py::arg("subset_column") = std::nullopt);
  m.def("load_libsvm", [](const std::string& path) { return load_libsvm(path); }, py::arg("path"));

  m.def(
      "divergence",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& geometry) {
        return divergence(geometry_for(geometry, x.size()), x, y);
      },
      py::arg("x"), py::arg("y"), py::arg("geometry"));

  m.def(
      "project_simplex",
      [](const std::vector<double>& z, const std::string& geometry) {
        return project(geometry_for(geometry, z.size()), z, Simplex{});
      },
      py::arg("z"), py::arg("geometry"));
  m.def(
      "project_capped",
      [](const std::vector<double>& z, double cap, const std::string& geometry) {
        return project(geometry_for(geometry, z.size()), z, CappedSimplex{cap});
      },
      py::arg("z"), py::arg("cap"), py::arg("geometry"));
  m.def(
      "project_mixed",
      [](const std::vector<double>& z, const std::vector<double>& caps, const std::string& geometry) {
        return project(geometry_for(geometry, z.size()), z, MixedCaps{caps});
      },
      py::arg("z"), py::arg("caps"), py::arg("geometry"));
  m.def(
      "project_orthant_l1", [](const std::vector<double>& z, double lambda) { return project_orthant_l1(z, lambda); },
      py::arg("z"), py::arg("l1"));
  m.def(
      "project_hypercube",
      [](const std::vector<double>& z, const std::string& geometry) {
        return project(geometry_for(geometry, z.size()), z, UnitHypercube{});
      },
      py::arg("z"), py::arg("geometry"));
  m.def(
      "project_double",
      [](const std::vector<double>& z, const std::string& geometry) {
        return project_double(geometry_for(geometry, z.size()), z, UnitHypercube{}, Simplex{});
      },
      py::arg("z"), py::arg("geometry"));

  py::class_<Ensemble>(m, "Ensemble")
      .def("__len__", &Ensemble::size)
      .def_property_readonly("eta_sum", &Ensemble::eta_sum)
      .def("score", [](const Ensemble& f, const std::vector<double>& x) { return f.score(x); })
      .def("predict", [](const Ensemble& f, const std::vector<double>& x) { return predict(f, x); })
      .def("margin", [](const Ensemble& f, const Dataset& d) { return margin(f, d); })
      .def_property_readonly("stumps", [](const Ensemble& f) {
        py::list out;
        for (const auto& s : f.members) {
          out.append(py::make_tuple(s.stump.feature, s.stump.threshold, s.stump.polarity, s.eta));
        }
        return out;
      });

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("ensemble", [](const RunResult& r) { return r.state.ensemble; })
      .def_property_readonly("weights", [](const RunResult& r) { return r.state.w; })
      .def_property_readonly("stop", [](const RunResult& r) { return std::string(to_string(r.stop)); })
      .def_property_readonly("trace", [](const RunResult& r) {
        py::list out;
        for (const auto& t : r.trace) out.append(round_to_dict(t));
        return out;
      })
      .def_property_readonly("train_error",
                             [](const RunResult& r) { return r.trace.empty() ? 1.0 : r.trace.back().train_error; });

  m.def(
      "train",
      [](const Dataset& data, const std::string& algo, std::optional<std::string> geometry, int rounds,
         std::optional<double> target_error, double k, const std::string& alpha_mode, const std::string& mada_eta,
         const std::string& combined_cap, bool stop_at_target) {
        BoosterConfig c;
        c.algorithm = parse_algorithm(algo);
        c.geometry = geometry ? parse_geometry_kind(*geometry)
                              : (c.algorithm == Algorithm::Sparse ? GeometryKind::Quadratic
                                                                   : GeometryKind::NegativeEntropy);
        c.max_rounds = rounds;
        c.target_error = target_error;
        c.k = k;
        c.alpha_mode = parse_alpha_mode(alpha_mode);
        c.mada_eta = parse_mada_eta(mada_eta);
        c.combined_cap = parse_combined_cap(combined_cap);
        c.stop_at_target = stop_at_target;
        py::gil_scoped_release release;
        return run(c, data);
      },
      py::arg("data"), py::arg("algo"), py::arg("geometry") = std::nullopt, py::arg("rounds") = 100,
      py::arg("target_error") = std::nullopt, py::arg("k") = 1.0, py::arg("alpha_mode") = "zero",
      py::arg("mada_eta") = "previous_error", py::arg("combined_cap") = "subset", py::arg("stop_at_target") = true);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::istringstream in(stdin_text);
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "",
      "Runs one CLI invocation in-process and returns (exit_code, stdout, stderr).");
}
