#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "texshuffle/dataset.hpp"
#include "texshuffle/error.hpp"
#include "texshuffle/evaluation.hpp"
#include "texshuffle/experiment.hpp"
#include "texshuffle/model.hpp"
#include "texshuffle/random.hpp"
#include "texshuffle/report.hpp"
#include "texshuffle/transforms.hpp"

namespace py = pybind11;
namespace ts = texshuffle;

namespace {

template <typename T>
ts::Raster<T> to_raster(const py::array& array) {
  const auto typed = py::array_t<T, py::array::c_style | py::array::forcecast>::ensure(array);
  if (!typed || typed.ndim() != 3 || typed.shape(2) != 3) {
    throw py::value_error("expected an (H, W, 3) image array");
  }
  ts::Raster<T> raster(static_cast<int>(typed.shape(0)), static_cast<int>(typed.shape(1)), 3);
  std::copy(typed.data(), typed.data() + typed.size(), raster.data.begin());
  return raster;
}

template <typename T>
py::array_t<T> to_array(const ts::Raster<T>& raster) {
  py::array_t<T> out({raster.height, raster.width, raster.channels});
  std::copy(raster.data.begin(), raster.data.end(), out.mutable_data());
  return out;
}

ts::ClassLabel parse_or_throw(const std::string& text) {
  const auto label = ts::parse_label(text);
  if (!label) throw ts::ValidationError("unknown label '" + text + "'");
  return *label;
}

ts::ClassLabel to_label(const py::handle& value) {
  if (py::isinstance<py::str>(value)) return parse_or_throw(value.cast<std::string>());
  return ts::label_from_index(value.cast<std::size_t>());
}

std::vector<ts::ClassLabel> to_labels(const py::sequence& values) {
  std::vector<ts::ClassLabel> labels;
  for (const auto& v : values) labels.push_back(to_label(v));
  return labels;
}

ts::ConfusionMatrix to_confusion(const py::array& array) {
  const auto typed =
      py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>::ensure(array);
  if (!typed || typed.ndim() != 2 || typed.shape(0) != 4 || typed.shape(1) != 4) {
    throw py::value_error("expected a 4x4 confusion matrix");
  }
  ts::ConfusionMatrix m{};
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t p = 0; p < 4; ++p) m[t][p] = typed.at(t, p);
  }
  return m;
}

py::dict per_class_dict(const ts::PerClassAccuracy& values) {
  py::dict out;
  for (const auto label : ts::kAllLabels) {
    const auto& v = values[ts::label_index(label)];
    out[py::str(ts::label_name(label))] = v ? py::cast(*v) : py::none();
  }
  return out;
}

py::object json_to_python(const nlohmann::json& value) {
  return py::module_::import("json").attr("loads")(value.dump());
}

nlohmann::json python_to_json(const py::object& value) {
  return nlohmann::json::parse(
      py::module_::import("json").attr("dumps")(value).cast<std::string>());
}

ts::AugmentConfig augment_config(double max_rotation_deg, std::pair<double, double> zoom,
                                 std::pair<double, double> illumination) {
  ts::AugmentConfig config;
  config.max_rotation_deg = max_rotation_deg;
  config.zoom_min = zoom.first;
  config.zoom_max = zoom.second;
  config.illumination_min = illumination.first;
  config.illumination_max = illumination.second;
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Patch-and-shuffle texture classification core";

  py::register_exception<ts::IngestionError>(m, "IngestionError", PyExc_OSError);
  py::register_exception<ts::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ts::TrainingError>(m, "TrainingError", PyExc_RuntimeError);
  py::register_exception<ts::PretrainedWeightsUnavailable>(m, "PretrainedWeightsUnavailable",
                                                           PyExc_FileNotFoundError);

  py::list names;
  for (const auto label : ts::kAllLabels) names.append(ts::label_name(label));
  m.attr("CLASS_NAMES") = py::tuple(names);
  m.def("parse_label", [](const std::string& text) { return std::string(ts::label_name(parse_or_throw(text))); },
        py::arg("text"), "Canonical class name for a label string.");

  m.def(
      "patch_grid",
      [](int height, int width, int patch_size) {
        const ts::PatchGrid g = ts::make_patch_grid(height, width, patch_size);
        py::dict out;
        out["rows"] = g.rows;
        out["cols"] = g.cols;
        out["fitted_height"] = g.fitted_height;
        out["fitted_width"] = g.fitted_width;
        out["crop_top"] = g.crop_top;
        out["crop_left"] = g.crop_left;
        return out;
      },
      py::arg("height"), py::arg("width"), py::arg("patch_size"));

  m.def(
      "shuffled_patch_order",
      [](int count, std::uint64_t seed) {
        ts::RandomStream rng(seed);
        return ts::shuffled_patch_order(count, rng);
      },
      py::arg("count"), py::arg("seed"),
      "Permutation where output patch k is input patch order[k].");

  m.def(
      "patch_and_shuffle",
      [](const py::array& image, int patch_size, std::uint64_t seed) -> py::array {
        ts::RandomStream rng(seed);
        if (image.dtype().is(py::dtype::of<float>())) {
          return to_array(ts::patch_and_shuffle(to_raster<float>(image), patch_size, rng));
        }
        if (image.dtype().is(py::dtype::of<std::uint8_t>())) {
          return to_array(ts::patch_and_shuffle(to_raster<std::uint8_t>(image), patch_size, rng));
        }
        throw py::type_error("patch_and_shuffle expects uint8 or float32 images");
      },
      py::arg("image"), py::arg("patch_size"), py::arg("seed"));

  m.def(
      "augment",
      [](const py::array& image, std::uint64_t seed, double max_rotation_deg,
         std::pair<double, double> zoom, std::pair<double, double> illumination) {
        ts::RandomStream rng(seed);
        return to_array(ts::augment(to_raster<std::uint8_t>(image),
                                    augment_config(max_rotation_deg, zoom, illumination), rng));
      },
      py::arg("image"), py::arg("seed"), py::arg("max_rotation_deg") = 15.0,
      py::arg("zoom") = std::pair{0.9, 1.1}, py::arg("illumination") = std::pair{0.8, 1.2});

  m.def(
      "normalize_for_backbone",
      [](const py::array& image, int height, int width) {
        return to_array(ts::normalize_for_backbone(to_raster<std::uint8_t>(image), height, width));
      },
      py::arg("image"), py::arg("height") = 224, py::arg("width") = 224);

  py::class_<ts::Dataset>(m, "Dataset")
      .def_static("synthetic", &ts::generate_synthetic_textures, py::arg("n_per_class"),
                  py::arg("height"), py::arg("width"), py::arg("seed"))
      .def_static(
          "load",
          [](const std::filesystem::path& labels_csv, const std::filesystem::path& image_dir) {
            return ts::load_dataset(image_dir, ts::load_label_map(labels_csv));
          },
          py::arg("labels_csv"), py::arg("image_dir"))
      .def("__len__", &ts::Dataset::size)
      .def("image", [](const ts::Dataset& d, std::size_t i) {
        if (i >= d.size()) throw py::index_error("sample index out of range");
        return to_array(d[i].image);
      })
      .def_property_readonly("labels",
                             [](const ts::Dataset& d) {
                               std::vector<std::string> out;
                               for (const auto& s : d) out.emplace_back(ts::label_name(s.label));
                               return out;
                             })
      .def_property_readonly("ids",
                             [](const ts::Dataset& d) {
                               std::vector<std::string> out;
                               for (const auto& s : d) out.push_back(s.source_id);
                               return out;
                             })
      .def_property_readonly("class_counts",
                             [](const ts::Dataset& d) {
                               py::dict out;
                               for (const auto label : ts::kAllLabels) {
                                 out[py::str(ts::label_name(label))] =
                                     d.class_counts()[ts::label_index(label)];
                               }
                               return out;
                             })
      .def("checksum", &ts::dataset_checksum)
      .def(
          "split",
          [](const ts::Dataset& d, double train_fraction, std::uint64_t seed) {
            ts::Split s = ts::stratified_split(d, train_fraction, seed);
            return py::make_tuple(std::move(s.train), std::move(s.test));
          },
          py::arg("train_fraction"), py::arg("seed"))
      .def("save", &ts::save_dataset, py::arg("dir"));

  m.def(
      "confusion_matrix",
      [](const py::sequence& predictions, const py::sequence& truths) {
        const ts::ConfusionMatrix cm = ts::confusion_matrix(to_labels(predictions), to_labels(truths));
        py::array_t<std::int64_t> out({4, 4});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t t = 0; t < 4; ++t) {
          for (std::size_t p = 0; p < 4; ++p) view(t, p) = cm[t][p];
        }
        return out;
      },
      py::arg("predictions"), py::arg("truths"),
      "Counts indexed [truth][prediction]; labels may be names or indices.");
  m.def("overall_accuracy",
        [](const py::array& cm) { return ts::overall_accuracy(to_confusion(cm)); });
  m.def("per_class_accuracy",
        [](const py::array& cm) { return per_class_dict(ts::per_class_accuracy(to_confusion(cm))); });

  m.def(
      "run_experiment",
      [](const py::object& manifest, bool echo) {
        const auto parsed = python_to_json(manifest).get<ts::ExperimentManifest>();
        parsed.train.validate();
        std::ostringstream log;
        ts::ExperimentOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = ts::run_experiment(parsed, log);
        }
        if (echo) py::print(log.str(), py::arg("end") = "");
        nlohmann::json result{{"runs", outcome.runs}, {"artifacts", nlohmann::json::array()}};
        for (const auto& path : outcome.artifacts) result["artifacts"].push_back(path.string());
        if (outcome.comparison) result["comparison"] = ts::comparison_to_json(*outcome.comparison);
        return json_to_python(result);
      },
      py::arg("manifest"), py::arg("echo") = false,
      "Runs a manifest dict and returns the run reports and artifact paths.");

  m.def(
      "backbone_features",
      [](const py::array& batch, const std::string& weights, std::uint64_t seed) {
        const auto typed =
            py::array_t<float, py::array::c_style | py::array::forcecast>::ensure(batch);
        if (!typed || typed.ndim() != 4 || typed.shape(3) != 3) {
          throw py::value_error("expected an (N, H, W, 3) float32 batch");
        }
        ts::ClassifierSpec spec;
        spec.pretrained = !weights.empty();
        spec.pretrained_weights = weights;
        py::array_t<float> out;
        torch::Tensor features;
        {
          py::gil_scoped_release release;
          ts::Classifier classifier(spec, seed);
          classifier.set_training(false);
          torch::NoGradGuard no_grad;
          const torch::Tensor input =
              torch::from_blob(const_cast<float*>(typed.data()),
                               {typed.shape(0), typed.shape(1), typed.shape(2), 3},
                               torch::kFloat32)
                  .permute({0, 3, 1, 2})
                  .contiguous();
          features = classifier.features(input).contiguous();
        }
        out = py::array_t<float>({features.size(0), features.size(1)});
        std::copy_n(features.data_ptr<float>(), features.numel(), out.mutable_data());
        return out;
      },
      py::arg("batch"), py::arg("weights") = "", py::arg("seed") = 0,
      "Pooled 512-d ResNet-18 features of a normalized NHWC batch, in eval mode.");
}
