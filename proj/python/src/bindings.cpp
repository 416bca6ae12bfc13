#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "mlpinit/harness.hpp"
#include "mlpinit/model_io.hpp"

namespace py = pybind11;
using namespace mlpinit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array, got " + std::to_string(a.ndim()) + "-D");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  if (m.size()) std::memcpy(out.mutable_data(), m.data().data(), m.size() * sizeof(double));
  return out;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MLP initialization experiments";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<DivergedTrainingError>(m, "DivergedTrainingError", base.ptr());

  m.attr("FEATURE_COUNT") = kFeatureCount;
  m.attr("CLASS_COUNT") = kClassCount;

  py::enum_<Topology>(m, "Topology")
      .value("ONE_LAYER", Topology::OneLayer)
      .value("TWO_LAYER", Topology::TwoLayer)
      .value("THREE_LAYER", Topology::ThreeLayer);
  py::enum_<InitFamily>(m, "InitFamily")
      .value("XAVIER", InitFamily::Xavier)
      .value("KAIMING", InitFamily::Kaiming);
  py::enum_<InitDist>(m, "InitDist")
      .value("NORMAL", InitDist::Normal)
      .value("UNIFORM", InitDist::Uniform);

  py::class_<InitScheme>(m, "InitScheme")
      .def(py::init([](InitFamily f, InitDist d) { return InitScheme{f, d}; }), py::arg("family"),
           py::arg("dist") = InitDist::Normal)
      .def_readwrite("family", &InitScheme::family)
      .def_readwrite("dist", &InitScheme::dist);

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init([](std::size_t bs, double lr, double mom) { return Hyperparams{bs, lr, mom}; }),
           py::arg("batch_size"), py::arg("learning_rate"), py::arg("momentum"))
      .def_readwrite("batch_size", &Hyperparams::batch_size)
      .def_readwrite("learning_rate", &Hyperparams::learning_rate)
      .def_readwrite("momentum", &Hyperparams::momentum)
      .def("__eq__", [](const Hyperparams& a, const Hyperparams& b) { return a == b; })
      .def("__repr__", [](const Hyperparams& h) {
        return "Hyperparams(batch_size=" + std::to_string(h.batch_size) +
               ", learning_rate=" + py::repr(py::float_(h.learning_rate)).cast<std::string>() +
               ", momentum=" + py::repr(py::float_(h.momentum)).cast<std::string>() + ")";
      });

  m.def("preset_hyperparams", &preset_hyperparams, py::arg("topology"), py::arg("family"));
  m.def("target_variance", &target_variance, py::arg("scheme"), py::arg("fan_in"));
  m.def("uniform_bound", &uniform_bound, py::arg("scheme"), py::arg("fan_in"));

  m.def(
      "initialize",
      [](const InitScheme& scheme, std::size_t rows, std::size_t cols, std::uint64_t seed) {
        Rng rng(seed);
        return to_array(initialize(rng, scheme, cols, rows, cols));
      },
      py::arg("scheme"), py::arg("rows"), py::arg("cols"), py::arg("seed") = 0,
      "rows x cols weight matrix; fan-in is cols.");

  m.def(
      "propagate_variance",
      [](const InitScheme& scheme, std::size_t width, std::size_t depth, std::size_t rows,
         std::uint64_t seed) {
        Rng rng(seed);
        return propagate_variance(rng, scheme, width, depth, rows);
      },
      py::arg("scheme"), py::arg("width") = 256, py::arg("depth") = 10, py::arg("rows") = 10000,
      py::arg("seed") = 0);

  py::class_<MlpModel>(m, "Model")
      .def(py::init([](Topology t, const InitScheme& scheme, std::uint64_t seed) {
             Rng rng(seed);
             return build_model(rng, t, scheme);
           }),
           py::arg("topology"), py::arg("scheme"), py::arg("seed") = 0)
      .def_property_readonly("topology", &MlpModel::topology)
      .def_property_readonly("parameter_count", &MlpModel::parameter_count)
      .def("weights",
           [](const MlpModel& model) {
             py::list out;
             for (const auto& layer : model.layers()) out.append(to_array(layer.weights));
             return out;
           })
      .def("forward",
           [](const MlpModel& model, const Array& x) { return to_array(forward(model, to_matrix(x)).probs); })
      .def("predict", [](const MlpModel& model, const Array& x) { return predict(model, to_matrix(x)); })
      .def("loss", [](const MlpModel& model, const Array& x,
                      const std::vector<int>& labels) { return loss(model, to_matrix(x), labels); })
      .def(
          "grad_check",
          [](const MlpModel& model, const Array& x, const std::vector<int>& labels, double eps) {
            return grad_check(model, to_matrix(x), labels, eps);
          },
          py::arg("x"), py::arg("labels"), py::arg("epsilon") = 1e-5)
      .def("to_bytes", [](const MlpModel& model) { return py::bytes(serialize_model(model)); })
      .def_static("from_bytes", [](const py::bytes& b) { return deserialize_model(std::string(b)); })
      .def("__eq__", [](const MlpModel& a, const MlpModel& b) { return a == b; });

  m.def(
      "synthesize",
      [](std::uint64_t seed, std::size_t participants, std::size_t records, double separation) {
        const Dataset d = synthesize_dataset({seed, participants, records, separation});
        std::vector<int> ids;
        for (const auto& s : d.samples) ids.push_back(s.participant);
        return py::make_tuple(to_array(d.features()), d.labels(), ids);
      },
      py::arg("seed") = 0, py::arg("participants") = 16, py::arg("records") = 12,
      py::arg("separation") = 2.0, "Returns (features, labels, participant ids).");

  m.def(
      "evaluate",
      [](const std::vector<int>& preds, const std::vector<int>& labels) {
        return json_to_py(to_json(summarize(accumulate_confusion(preds, labels))));
      },
      py::arg("predictions"), py::arg("labels"));

  m.def(
      "run_experiment",
      [](Topology topology, const InitScheme& scheme, std::uint64_t seed, std::size_t epochs,
         bool loo, double separation, std::optional<std::string> csv) {
        ExperimentConfig cfg;
        cfg.topology = topology;
        cfg.init = scheme;
        cfg.seed = seed;
        cfg.split_seed = seed;
        cfg.epochs = epochs;
        cfg.loo_enabled = loo;
        if (csv) {
          cfg.data.csv = *csv;
        } else {
          cfg.data.synthetic = {seed, 16, 12, separation};
        }
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(cfg);
        }
        return json_to_py(to_json(result));
      },
      py::arg("topology"), py::arg("scheme"), py::arg("seed") = 0, py::arg("epochs") = 200,
      py::arg("loo") = false, py::arg("separation") = 2.0, py::arg("csv") = py::none());
}
