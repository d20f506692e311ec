#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rwt/cli.hpp"
#include "rwt/eq_bank.hpp"
#include "rwt/error.hpp"
#include "rwt/eval_report.hpp"
#include "rwt/expr.hpp"
#include "rwt/kan.hpp"
#include "rwt/model_io.hpp"
#include "rwt/shapley.hpp"
#include "rwt/trees.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

rwt::Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  rwt::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array predict(const rwt::Regressor& model, const Array& x) {
  if (x.ndim() == 1) {
    const std::vector<double> row = to_vector(x);
    Array out(1);
    out.mutable_at(0) = model.predict(row);
    return out;
  }
  const std::vector<double> y = model.predict_rows(to_matrix(x));
  return Array(static_cast<py::ssize_t>(y.size()), y.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reservoir water temperature models, attributions and equations";
  m.attr("__version__") = std::string(rwt::kVersion);

  static py::exception<rwt::Error> error(m, "RwtError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rwt::Error& e) {
      // args[0] is the stable code, args[1] the message
      const py::tuple args = py::make_tuple(std::string(rwt::to_string(e.code())), e.what());
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  py::class_<rwt::Regressor, std::shared_ptr<rwt::Regressor>>(m, "Model")
      .def_property_readonly("kind", &rwt::Regressor::kind)
      .def_property_readonly("input_dim", &rwt::Regressor::input_dim)
      .def("predict", &predict, py::arg("x"))
      .def("to_json", [](const rwt::Regressor& r) { return rwt::model_to_json(r); })
      .def("save", [](const rwt::Regressor& r, const std::string& path) {
        rwt::save_model(path, r);
      });

  m.def("load_model", [](const std::string& path) {
    return std::shared_ptr<rwt::Regressor>(rwt::load_model(path));
  });
  m.def("model_from_json", [](const std::string& text) {
    return std::shared_ptr<rwt::Regressor>(rwt::model_from_json(text));
  });

  m.def(
      "fit_forest",
      [](const Array& x, const Array& y, std::size_t n_estimators, std::size_t max_features,
         int max_depth, std::uint64_t seed) {
        rwt::ForestParams p;
        p.n_estimators = n_estimators;
        p.max_features = max_features;
        p.max_depth = max_depth;
        p.seed = seed;
        const auto yv = to_vector(y);
        return std::shared_ptr<rwt::Regressor>(
            std::make_shared<rwt::Forest>(rwt::rf_fit(to_matrix(x), yv, p)));
      },
      py::arg("x"), py::arg("y"), py::arg("n_estimators") = 100, py::arg("max_features") = 4,
      py::arg("max_depth") = 30, py::arg("seed") = 42);

  m.def(
      "fit_boosted",
      [](const Array& x, const Array& y, std::size_t n_estimators, double learning_rate,
         int max_depth, double gamma) {
        rwt::BoostParams p;
        p.n_estimators = n_estimators;
        p.learning_rate = learning_rate;
        p.max_depth = max_depth;
        p.gamma = gamma;
        const auto yv = to_vector(y);
        return std::shared_ptr<rwt::Regressor>(
            std::make_shared<rwt::BoostedEnsemble>(rwt::gbm_fit(to_matrix(x), yv, p)));
      },
      py::arg("x"), py::arg("y"), py::arg("n_estimators") = 600, py::arg("learning_rate") = 0.01,
      py::arg("max_depth") = 9, py::arg("gamma") = 0.3);

  m.def(
      "fit_kan",
      [](const Array& x, const Array& y, const std::string& regime, std::size_t steps,
         int grid, std::uint64_t seed) {
        const rwt::Matrix xm = to_matrix(x);
        const auto yv = to_vector(y);
        rwt::KanTrainConfig cfg;
        cfg.steps = steps;
        const auto layout = rwt::kan_regime_layout(rwt::parse_kan_regime(regime), xm.cols);
        return std::shared_ptr<rwt::Regressor>(std::make_shared<rwt::KanNetwork>(
            rwt::kan_train(rwt::kan_init(layout, grid, seed), xm, yv, cfg).net));
      },
      py::arg("x"), py::arg("y"), py::arg("regime") = "simple", py::arg("steps") = 3000,
      py::arg("grid") = rwt::kDefaultKanGrid, py::arg("seed") = 42);

  m.def(
      "snap_kan",
      [](const std::shared_ptr<rwt::Regressor>& model, const Array& sample,
         const std::string& regime) {
        const auto* net = dynamic_cast<const rwt::KanNetwork*>(model.get());
        if (!net) throw py::type_error("snap_kan needs a kan model");
        const rwt::SnapResult s = rwt::kan_snap(
            *net, rwt::SnapLibrary::for_regime(rwt::parse_kan_regime(regime)), to_matrix(sample));
        return py::dict(py::arg("expression") = rwt::to_string(s.expression),
                        py::arg("tolerance") = s.tolerance, py::arg("warnings") = s.warnings);
      },
      py::arg("model"), py::arg("sample"), py::arg("regime") = "simple");

  m.def(
      "shap_exact",
      [](const rwt::Regressor& model, const Array& x, const Array& background) {
        const auto e = rwt::shap_exact(model, to_vector(x), to_matrix(background));
        return py::dict(py::arg("base") = e.base, py::arg("phi") = e.phi, py::arg("fx") = e.fx);
      },
      py::arg("model"), py::arg("x"), py::arg("background"));

  m.def(
      "metrics",
      [](const Array& y_true, const Array& y_pred) {
        const rwt::MetricSet s = rwt::metrics(to_vector(y_true), to_vector(y_pred));
        py::object r2 = s.r2 ? py::object(py::float_(*s.r2)) : py::none();
        return py::dict(py::arg("rmse") = s.rmse, py::arg("mae") = s.mae, py::arg("r2") = r2,
                        py::arg("n") = s.n);
      },
      py::arg("y_true"), py::arg("y_pred"));

  m.def("bank_keys", [] {
    std::vector<std::string> keys;
    for (const auto& e : rwt::default_bank().entries()) {
      keys.push_back(std::string(rwt::to_string(e.set)) + "/" + std::to_string(e.n_inputs));
    }
    return keys;
  });
  m.def(
      "bank_equation",
      [](const std::string& set, int n_inputs) {
        const auto& e = rwt::default_bank().lookup(rwt::parse_bank_set(set), n_inputs);
        return py::dict(py::arg("text") = e.text, py::arg("r2") = e.r2);
      },
      py::arg("set"), py::arg("n_inputs"));
  m.def(
      "bank_evaluate",
      [](const std::string& set, int n_inputs, const Array& x) {
        const auto& e = rwt::default_bank().lookup(rwt::parse_bank_set(set), n_inputs);
        return rwt::evaluate(e.expression, to_vector(x));
      },
      py::arg("set"), py::arg("n_inputs"), py::arg("x"));
  m.def(
      "canonical_expression",
      [](const std::string& text) { return rwt::to_string(rwt::parse_expression(text)); },
      py::arg("text"));
  m.def(
      "evaluate_expression",
      [](const std::string& text, const Array& x) {
        return rwt::evaluate(rwt::parse_expression(text), to_vector(x));
      },
      py::arg("text"), py::arg("x"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int status = rwt::run_cli(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"));
}
