/*
 * Copyright 2026 The oodkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "oodkit/embed_store.hpp"
#include "oodkit/error.hpp"
#include "oodkit/maha.hpp"
#include "oodkit/metrics.hpp"
#include "oodkit/oe_head.hpp"
#include "oodkit/probs.hpp"
#include "oodkit/zshot.hpp"

namespace py = pybind11;
using namespace oodkit;

namespace {

EmbeddingSet MakeSet(RowMatrixF data, std::optional<std::vector<std::uint32_t>> labels,
                     std::vector<std::string> class_names = {}, std::string tag = {}) {
  EmbeddingSet s;
  s.data = std::move(data);
  s.labels = std::move(labels);
  s.class_names = std::move(class_names);
  s.dataset_tag = std::move(tag);
  s.Validate();
  return s;
}

FileFormat ParseFormat(const std::string& f) {
  if (f == "binary") return FileFormat::kBinary;
  if (f == "csv") return FileFormat::kCsv;
  throw Error(ErrorKind::kInvalidArgument, "format must be 'binary' or 'csv', got '" + f + "'");
}

LogitSet MakeLogits(RowMatrixD logits, std::vector<std::size_t> in_indices, bool probabilities) {
  LogitSet l;
  l.logits = std::move(logits);
  l.in_indices = std::move(in_indices);
  l.are_probabilities = probabilities;
  return l;
}

}  // namespace

PYBIND11_MODULE(_oodkit, m) {
  m.doc() = "oodkit native core";

  py::register_exception<Error>(m, "OodkitError");

  m.def(
      "load_embeddings",
      [](const std::filesystem::path& path, bool csv_labels) {
        CsvOptions csv;
        csv.label_column = csv_labels;
        EmbeddingSet s = LoadEmbeddings(path, DetectFormat(path), csv);
        py::dict d;
        d["data"] = std::move(s.data);
        d["labels"] = std::move(s.labels);
        d["class_names"] = std::move(s.class_names);
        d["dataset_tag"] = std::move(s.dataset_tag);
        return d;
      },
      py::arg("path"), py::arg("csv_labels") = false);

  m.def(
      "save_embeddings",
      [](const std::filesystem::path& path, RowMatrixF data,
         std::optional<std::vector<std::uint32_t>> labels, std::vector<std::string> class_names,
         std::string dataset_tag, const std::string& format) {
        SaveEmbeddings(MakeSet(std::move(data), std::move(labels), std::move(class_names),
                               std::move(dataset_tag)),
                       path, ParseFormat(format));
      },
      py::arg("path"), py::arg("data"), py::arg("labels") = py::none(),
      py::arg("class_names") = std::vector<std::string>{}, py::arg("dataset_tag") = "",
      py::arg("format") = "binary");

  py::class_<GaussianModel>(m, "GaussianModel")
      .def_readonly("means", &GaussianModel::means)
      .def_readonly("epsilon", &GaussianModel::epsilon)
      .def_readonly("escalations", &GaussianModel::escalations)
      .def_readonly("class_ids", &GaussianModel::class_ids)
      .def_readonly("counts", &GaussianModel::counts)
      .def_property_readonly("covariance", [](const GaussianModel& g) { return Covariance(g); })
      .def("save", [](const GaussianModel& g, const std::filesystem::path& p) {
        SaveGaussianModel(g, p);
      });

  m.def(
      "fit_gaussian",
      [](RowMatrixF data, std::vector<std::uint32_t> labels, std::optional<double> epsilon) {
        return FitGaussian(MakeSet(std::move(data), std::move(labels)), epsilon);
      },
      py::arg("data"), py::arg("labels"), py::arg("epsilon") = py::none());
  m.def("load_gaussian", &LoadGaussianModel, py::arg("path"));
  m.def(
      "score_maha",
      [](const GaussianModel& g, RowMatrixF query) {
        return ScoreMaha(g, MakeSet(std::move(query), std::nullopt));
      },
      py::arg("model"), py::arg("query"));

  m.def(
      "auroc",
      [](std::vector<double> in, std::vector<double> out) {
        return Auroc({std::move(in), std::move(out)});
      },
      py::arg("in_scores"), py::arg("out_scores"));
  m.def(
      "auprc",
      [](std::vector<double> in, std::vector<double> out) {
        return Auprc({std::move(in), std::move(out)});
      },
      py::arg("in_scores"), py::arg("out_scores"));
  m.def(
      "fpr_at_tpr",
      [](std::vector<double> in, std::vector<double> out, double n) {
        return FprAtTpr({std::move(in), std::move(out)}, n);
      },
      py::arg("in_scores"), py::arg("out_scores"), py::arg("tpr_percent") = 95.0);

  m.def(
      "softmax", [](const std::vector<double>& row) { return Softmax(row); }, py::arg("row"));
  m.def(
      "score_msp",
      [](RowMatrixD logits, bool probabilities) {
        return ScoreMsp(MakeLogits(std::move(logits), {}, probabilities));
      },
      py::arg("logits"), py::arg("probabilities") = false);
  m.def(
      "score_in_mass",
      [](RowMatrixD logits, std::vector<std::size_t> in_indices, bool probabilities) {
        return ScoreInMass(MakeLogits(std::move(logits), std::move(in_indices), probabilities));
      },
      py::arg("logits"), py::arg("in_indices"), py::arg("probabilities") = false);

  py::class_<OeHead>(m, "OeHead")
      .def_property_readonly("input_dim", &OeHead::input_dim)
      .def_property_readonly("output_width", &OeHead::output_width)
      .def_readonly("oversampling", &OeHead::oversampling)
      .def_readonly("selected_step", &OeHead::selected_step)
      .def_readonly("training_log", &OeHead::training_log)
      .def("save", [](const OeHead& h, const std::filesystem::path& p) { SaveHead(h, p); });

  m.def(
      "train_oe_head",
      [](RowMatrixF in_data, std::vector<std::uint32_t> in_labels, RowMatrixF oe_data,
         std::vector<std::uint32_t> oe_labels, const std::string& head, bool collapse,
         std::optional<std::size_t> steps, std::optional<double> learning_rate,
         std::optional<double> l2_penalty, std::optional<std::size_t> batch_size,
         std::optional<std::size_t> hidden_units, std::optional<double> gamma,
         std::uint64_t seed) {
        OeConfig c;
        if (head == "linear") {
          c = OeConfig::LinearDefaults();
        } else if (head == "mlp") {
          c = OeConfig::MlpDefaults();
        } else {
          throw Error(ErrorKind::kInvalidArgument, "head must be 'linear' or 'mlp'");
        }
        if (collapse) c.mode = OutlierLabelMode::kCollapsedSingleClass;
        if (steps) c.max_steps = *steps;
        if (learning_rate) c.learning_rate = *learning_rate;
        if (l2_penalty) c.l2_penalty = *l2_penalty;
        if (batch_size) c.batch_size = *batch_size;
        if (hidden_units) c.hidden_units = *hidden_units;
        c.oversample_override = gamma;
        c.seed = seed;
        const EmbeddingSet in = MakeSet(std::move(in_data), std::move(in_labels));
        const EmbeddingSet oe = MakeSet(std::move(oe_data), std::move(oe_labels));
        py::gil_scoped_release release;
        return TrainOeHead(in, oe, c);
      },
      py::arg("in_data"), py::arg("in_labels"), py::arg("oe_data"), py::arg("oe_labels"),
      py::kw_only(), py::arg("head") = "linear", py::arg("collapse") = false,
      py::arg("steps") = py::none(), py::arg("learning_rate") = py::none(),
      py::arg("l2_penalty") = py::none(), py::arg("batch_size") = py::none(),
      py::arg("hidden_units") = py::none(), py::arg("gamma") = py::none(),
      py::arg("seed") = 0);
  m.def("load_head", &LoadHead, py::arg("path"));
  m.def(
      "score_oe",
      [](const OeHead& h, RowMatrixF query) {
        return ScoreOe(h, MakeSet(std::move(query), std::nullopt));
      },
      py::arg("head"), py::arg("query"));

  m.def(
      "score_zshot",
      [](RowMatrixF images, RowMatrixD in_text, std::optional<RowMatrixD> out_text,
         bool normalize, double temperature) {
        CandidateLabels labels;
        labels.in_text = std::move(in_text);
        labels.out_text = out_text ? std::move(*out_text) : RowMatrixD(0, labels.in_text.cols());
        labels.normalize = normalize;
        labels.temperature = temperature;
        return ScoreZshot(MakeSet(std::move(images), std::nullopt), labels);
      },
      py::arg("images"), py::arg("in_text"), py::arg("out_text") = py::none(),
      py::arg("normalize") = true, py::arg("temperature") = 0.01);
}
