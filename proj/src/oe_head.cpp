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

#include "oodkit/oe_head.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "container.hpp"
#include "oodkit/error.hpp"
#include "oodkit/metrics.hpp"

namespace oodkit {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Inputs and pre-activations of every layer, kept for backprop.
struct ForwardPass {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
};

Eigen::MatrixXd ForwardLogits(const OeHead& head, const Eigen::MatrixXd& x,
                              ForwardPass* pass) {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    const DenseLayer& layer = head.layers[l];
    Eigen::MatrixXd z = a * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (pass) {
      pass->inputs.push_back(a);
      pass->pre.push_back(z);
    }
    if (l + 1 == head.layers.size()) return z;
    a = z.cwiseMax(0.0);
  }
  return a;
}

double L2Term(const OeHead& head) {
  double sq = 0;
  for (const DenseLayer& layer : head.layers) sq += layer.weights.squaredNorm();
  return 0.5 * head.config.l2_penalty * sq;
}

// Mean cross-entropy + L2 on (x, targets); fills `grad` (flat order) if given.
double LossAndGradient(const OeHead& head, const Eigen::MatrixXd& x,
                       std::span<const std::size_t> targets, std::vector<double>* grad) {
  ForwardPass pass;
  const Eigen::MatrixXd logits = ForwardLogits(head, x, grad ? &pass : nullptr);
  const auto batch = logits.rows();
  const auto width = logits.cols();

  Eigen::MatrixXd delta(batch, width);
  double ce = 0;
  for (Eigen::Index r = 0; r < batch; ++r) {
    const double max = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd shifted = logits.row(r).array() - max;
    const Eigen::RowVectorXd e = shifted.array().exp();
    const double sum = e.sum();
    const auto y = static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)]);
    ce += std::log(sum) - shifted(y);
    delta.row(r) = e / sum;
    delta(r, y) -= 1.0;
  }
  const double loss = ce / static_cast<double>(batch) + L2Term(head);
  if (!grad) return loss;

  delta /= static_cast<double>(batch);
  std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> layer_grads(head.layers.size());
  for (std::size_t l = head.layers.size(); l-- > 0;) {
    const DenseLayer& layer = head.layers[l];
    layer_grads[l].first = delta.transpose() * pass.inputs[l] +
                           head.config.l2_penalty * layer.weights;
    layer_grads[l].second = delta.colwise().sum().transpose();
    if (l > 0) {
      const Eigen::MatrixXd upstream = delta * layer.weights;
      delta = upstream.cwiseProduct(
          (pass.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  grad->clear();
  for (const auto& [w, b] : layer_grads) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) grad->push_back(w(i, j));
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) grad->push_back(b(i));
  }
  return loss;
}

Eigen::MatrixXd ToDouble(const EmbeddingSet& set) { return set.data.cast<double>(); }

void CheckInput(const OeHead& head, const EmbeddingSet& query) {
  if (query.dim() != head.input_dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "query dimension " + std::to_string(query.dim()) +
                    " does not match head input dimension " +
                    std::to_string(head.input_dim()));
  }
}

std::vector<std::size_t> BatchTargets(const OeHead& head, const EmbeddingSet& batch) {
  if (!batch.labels) {
    throw Error(ErrorKind::kMissingLabels, "gradient batch needs labels (head output indices)");
  }
  std::vector<std::size_t> targets(batch.labels->begin(), batch.labels->end());
  for (std::size_t t : targets) {
    if (t >= head.output_width()) {
      throw Error(ErrorKind::kLabelOutOfRange,
                  "batch label " + std::to_string(t) + " exceeds head width " +
                      std::to_string(head.output_width()));
    }
  }
  return targets;
}

void CheckConfig(const OeConfig& c) {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::kInvalidArgument, "invalid OE config: " + what);
  };
  if (c.batch_size == 0) bad("batch_size must be positive");
  if (!(c.learning_rate > 0)) bad("learning_rate must be positive");
  if (!(c.l2_penalty >= 0)) bad("l2_penalty must be non-negative");
  if (c.max_steps == 0) bad("max_steps must be positive");
  if (c.head_kind == HeadKind::kMlpOneHidden && c.hidden_units == 0) bad("hidden_units must be positive");
  if (c.oversample_override && !(*c.oversample_override > 0)) bad("oversampling override must be positive");
  if (c.eval_every == 0) bad("eval_every must be positive");
}

const char* HeadKindName(HeadKind k) { return k == HeadKind::kLinear ? "linear" : "mlp_one_hidden"; }
const char* ModeName(OutlierLabelMode m) {
  return m == OutlierLabelMode::kLabeledOutliers ? "labeled_outliers" : "collapsed_single_class";
}

HeadKind ParseHeadKind(const std::string& s, const std::filesystem::path& path) {
  if (s == "linear") return HeadKind::kLinear;
  if (s == "mlp_one_hidden") return HeadKind::kMlpOneHidden;
  throw Error(ErrorKind::kMalformedHeader, path.string() + ": unknown head kind '" + s + "'");
}

OutlierLabelMode ParseMode(const std::string& s, const std::filesystem::path& path) {
  if (s == "labeled_outliers") return OutlierLabelMode::kLabeledOutliers;
  if (s == "collapsed_single_class") return OutlierLabelMode::kCollapsedSingleClass;
  throw Error(ErrorKind::kMalformedHeader, path.string() + ": unknown outlier mode '" + s + "'");
}

}  // namespace

OeConfig OeConfig::LinearDefaults() { return OeConfig{}; }

OeConfig OeConfig::MlpDefaults() {
  OeConfig c;
  c.head_kind = HeadKind::kMlpOneHidden;
  c.hidden_units = 1024;
  c.max_steps = 10000;
  return c;
}

std::size_t OeHead::input_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

std::size_t OeHead::output_width() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weights.rows());
}

double OversamplingFactor(std::size_t n_in, std::size_t n_oe, std::size_t k, std::size_t o) {
  if (n_in == 0 || n_oe == 0 || k == 0 || o == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "oversampling factor needs n_in, n_oe, k, o >= 1");
  }
  return (static_cast<double>(n_in) / static_cast<double>(n_oe)) *
         (static_cast<double>(o) / static_cast<double>(k));
}

std::vector<std::size_t> OversampleEpoch(std::size_t n_in,
                                         std::span<const std::uint32_t> oe_labels,
                                         double gamma, std::mt19937_64& rng) {
  if (!(gamma > 0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kInvalidArgument, "oversampling factor must be positive");
  }
  const double whole = std::floor(gamma);
  const double frac = gamma - whole;
  const auto copies = static_cast<std::size_t>(whole);

  std::vector<std::size_t> epoch(n_in);
  std::iota(epoch.begin(), epoch.end(), std::size_t{0});

  std::map<std::uint32_t, std::vector<std::size_t>> by_class;
  for (std::size_t j = 0; j < oe_labels.size(); ++j) by_class[oe_labels[j]].push_back(j);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& [cls, rows] : by_class) {
    for (std::size_t j : rows) epoch.insert(epoch.end(), copies, n_in + j);
    // frac * |class| extra copies: the integer part for sure, the remainder
    // with matching probability, spread over distinct rows.
    const double wanted = frac * static_cast<double>(rows.size());
    auto extra = static_cast<std::size_t>(std::floor(wanted));
    if (unit(rng) < wanted - std::floor(wanted)) ++extra;
    extra = std::min(extra, rows.size());
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < extra; ++i) epoch.push_back(n_in + rows[i]);
  }
  std::shuffle(epoch.begin(), epoch.end(), rng);
  return epoch;
}

OeHead MakeHead(HeadKind kind, std::size_t input_dim, std::size_t hidden_units,
                const ClassPartition& partition, std::uint64_t seed) {
  if (input_dim == 0 || partition.k_in == 0 || partition.o_out == 0) {
    throw Error(ErrorKind::kInvalidArgument, "head needs D, K and O >= 1");
  }
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](std::size_t fan_out, std::size_t fan_in) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out));
    return layer;
  };

  OeHead head;
  head.partition = partition;
  head.config.head_kind = kind;
  head.config.hidden_units = hidden_units;
  head.config.mode = partition.mode;
  head.config.seed = seed;
  const std::size_t width = partition.output_width();
  if (kind == HeadKind::kLinear) {
    head.layers.push_back(glorot(width, input_dim));
  } else {
    if (hidden_units == 0) {
      throw Error(ErrorKind::kInvalidArgument, "MLP head needs hidden_units >= 1");
    }
    head.layers.push_back(glorot(hidden_units, input_dim));
    head.layers.push_back(glorot(width, hidden_units));
  }
  return head;
}

OeHead TrainOeHead(const EmbeddingSet& in_train, const EmbeddingSet& oe_train,
                   const OeConfig& config, const OeValidation* validation) {
  CheckConfig(config);
  if (in_train.dim() != oe_train.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "in-distribution dimension " + std::to_string(in_train.dim()) +
                    " != outlier dimension " + std::to_string(oe_train.dim()));
  }
  if (!in_train.labels || !oe_train.labels) {
    throw Error(ErrorKind::kMissingLabels, "OE training needs labels on both sets");
  }
  const auto in_groups = SplitByLabel(in_train);
  const auto oe_groups = SplitByLabel(oe_train);
  if (in_groups.empty() || oe_groups.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "OE training needs K >= 1 and O >= 1");
  }

  ClassPartition partition{in_groups.size(), oe_groups.size(), config.mode};
  OeHead head = MakeHead(config.head_kind, in_train.dim(), config.hidden_units, partition,
                         config.seed);
  head.config = config;
  for (const auto& [id, rows] : in_groups) head.in_class_ids.push_back(id);
  for (const auto& [id, rows] : oe_groups) head.out_class_ids.push_back(id);

  // Training rows: in-distribution first, then outliers, as output indices.
  std::map<std::uint32_t, std::size_t> in_index, out_index;
  for (std::size_t i = 0; i < head.in_class_ids.size(); ++i) in_index[head.in_class_ids[i]] = i;
  for (std::size_t i = 0; i < head.out_class_ids.size(); ++i) {
    out_index[head.out_class_ids[i]] =
        partition.k_in + (config.mode == OutlierLabelMode::kCollapsedSingleClass ? 0 : i);
  }
  const std::size_t n_in = in_train.rows();
  const std::size_t n_oe = oe_train.rows();
  Eigen::MatrixXd all(static_cast<Eigen::Index>(n_in + n_oe),
                      static_cast<Eigen::Index>(in_train.dim()));
  all.topRows(static_cast<Eigen::Index>(n_in)) = ToDouble(in_train);
  all.bottomRows(static_cast<Eigen::Index>(n_oe)) = ToDouble(oe_train);
  std::vector<std::size_t> targets;
  targets.reserve(n_in + n_oe);
  for (std::uint32_t y : *in_train.labels) targets.push_back(in_index.at(y));
  for (std::uint32_t y : *oe_train.labels) targets.push_back(out_index.at(y));

  head.oversampling = config.oversample_override.value_or(
      OversamplingFactor(n_in, n_oe, partition.k_in, partition.o_out));

  // Separate stream from the initializer so the batch order does not depend
  // on the head size.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> epoch;
  std::size_t cursor = 0;

  std::vector<double> params = FlattenParameters(head);
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::optional<OeHead> best;
  auto evaluate = [&](std::size_t step) {
    ScoreSet s{ScoreOe(head, validation->in), ScoreOe(head, validation->out)};
    const double auroc = Auroc(s);
    if (!best || auroc > best->selected_auroc) {
      best = head;
      best->selected_step = step;
      best->selected_auroc = auroc;
    }
  };

  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    if (cursor >= epoch.size()) {
      epoch = OversampleEpoch(n_in, *oe_train.labels, head.oversampling, rng);
      cursor = 0;
    }
    const std::size_t take = std::min(config.batch_size, epoch.size() - cursor);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(take), all.cols());
    std::vector<std::size_t> y(take);
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t row = epoch[cursor + i];
      x.row(static_cast<Eigen::Index>(i)) = all.row(static_cast<Eigen::Index>(row));
      y[i] = targets[row];
    }
    cursor += take;

    const double loss = LossAndGradient(head, x, y, &grad);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::kNumerical, "non-finite training loss at step " + std::to_string(step));
    }
    head.training_log.push_back(loss);

    beta1_t *= kAdamBeta1;
    beta2_t *= kAdamBeta2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = kAdamBeta1 * m[i] + (1 - kAdamBeta1) * grad[i];
      v[i] = kAdamBeta2 * v[i] + (1 - kAdamBeta2) * grad[i] * grad[i];
      const double m_hat = m[i] / (1 - beta1_t);
      const double v_hat = v[i] / (1 - beta2_t);
      params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }
    SetParameters(head, params);

    if (validation && (step % config.eval_every == 0 || step == config.max_steps)) {
      evaluate(step);
    }
  }

  if (best) {
    // The selected checkpoint keeps the full loss log.
    best->training_log = head.training_log;
    return *best;
  }
  return head;
}

RowMatrixD HeadProbabilities(const OeHead& head, const EmbeddingSet& query) {
  CheckInput(head, query);
  RowMatrixD p = ForwardLogits(head, ToDouble(query), nullptr);
  SoftmaxRows(p);
  return p;
}

std::vector<double> ScoreOe(const OeHead& head, const EmbeddingSet& query) {
  CheckInput(head, query);
  LogitSet logits;
  logits.logits = ForwardLogits(head, ToDouble(query), nullptr);
  logits.in_indices.resize(head.partition.k_in);
  std::iota(logits.in_indices.begin(), logits.in_indices.end(), std::size_t{0});
  return ScoreInMass(logits);
}

std::vector<double> FlattenParameters(const OeHead& head) {
  std::vector<double> flat;
  for (const DenseLayer& layer : head.layers) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) flat.push_back(layer.weights(i, j));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) flat.push_back(layer.bias(i));
  }
  return flat;
}

void SetParameters(OeHead& head, std::span<const double> flat) {
  std::size_t pos = 0;
  for (DenseLayer& layer : head.layers) {
    const auto needed = static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    if (flat.size() - pos < needed) {
      throw Error(ErrorKind::kDimensionMismatch, "parameter vector too short for head");
    }
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = flat[pos++];
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = flat[pos++];
  }
  if (pos != flat.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "parameter vector too long for head");
  }
}

double HeadLoss(const OeHead& head, const EmbeddingSet& batch) {
  CheckInput(head, batch);
  const auto targets = BatchTargets(head, batch);
  return LossAndGradient(head, ToDouble(batch), targets, nullptr);
}

std::vector<double> HeadGradient(const OeHead& head, const EmbeddingSet& batch) {
  CheckInput(head, batch);
  const auto targets = BatchTargets(head, batch);
  std::vector<double> grad;
  LossAndGradient(head, ToDouble(batch), targets, &grad);
  return grad;
}

EmbeddingSet SubsampleShots(const EmbeddingSet& set, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) {
    throw Error(ErrorKind::kInvalidArgument, "shots must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  for (auto [cls, rows] : SplitByLabel(set)) {
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(std::min(shots, rows.size()));
    keep.insert(keep.end(), rows.begin(), rows.end());
  }
  std::sort(keep.begin(), keep.end());
  EmbeddingSet out;
  out.data.resize(static_cast<Eigen::Index>(keep.size()), set.data.cols());
  std::vector<std::uint32_t> labels;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) = set.data.row(static_cast<Eigen::Index>(keep[i]));
    labels.push_back((*set.labels)[keep[i]]);
  }
  out.labels = std::move(labels);
  out.dataset_tag = set.dataset_tag;
  out.class_names = set.class_names;
  return out;
}

void SaveHead(const OeHead& head, const std::filesystem::path& path) {
  nlohmann::json layers = nlohmann::json::array();
  for (const DenseLayer& layer : head.layers) {
    layers.push_back({{"rows", layer.weights.rows()}, {"cols", layer.weights.cols()}});
  }
  const OeConfig& c = head.config;
  nlohmann::json config = {
      {"head_kind", HeadKindName(c.head_kind)},
      {"hidden_units", c.hidden_units},
      {"mode", ModeName(c.mode)},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"l2_penalty", c.l2_penalty},
      {"max_steps", c.max_steps},
      {"seed", c.seed},
      {"eval_every", c.eval_every},
  };
  config["oversample_override"] =
      c.oversample_override ? nlohmann::json(*c.oversample_override) : nlohmann::json();
  nlohmann::json header = {
      {"kind", kHeadMagic},
      {"layers", layers},
      {"partition",
       {{"k_in", head.partition.k_in},
        {"o_out", head.partition.o_out},
        {"mode", ModeName(head.partition.mode)}}},
      {"in_class_ids", head.in_class_ids},
      {"out_class_ids", head.out_class_ids},
      {"oversampling", head.oversampling},
      {"selected_step", head.selected_step},
      {"selected_auroc", head.selected_auroc},
      {"training_steps", head.training_log.size()},
      {"config", config},
  };
  container::Writer writer(path, kHeadMagic);
  writer.Header(header);
  const std::vector<double> flat = FlattenParameters(head);
  writer.Array(std::span<const double>(flat));
  writer.Array(std::span<const double>(head.training_log));
  writer.Finish();
}

OeHead LoadHead(const std::filesystem::path& path) {
  container::Reader reader(path);
  reader.ExpectMagic(kHeadMagic);
  const nlohmann::json header = reader.Header();
  OeHead head;
  try {
    for (const auto& l : container::Field<nlohmann::json>(header, "layers", path)) {
      DenseLayer layer;
      layer.weights.resize(l.at("rows").get<Eigen::Index>(), l.at("cols").get<Eigen::Index>());
      layer.bias.resize(l.at("rows").get<Eigen::Index>());
      head.layers.push_back(std::move(layer));
    }
    const auto part = container::Field<nlohmann::json>(header, "partition", path);
    head.partition.k_in = part.at("k_in").get<std::size_t>();
    head.partition.o_out = part.at("o_out").get<std::size_t>();
    head.partition.mode = ParseMode(part.at("mode").get<std::string>(), path);
    const auto c = container::Field<nlohmann::json>(header, "config", path);
    head.config.head_kind = ParseHeadKind(c.at("head_kind").get<std::string>(), path);
    head.config.hidden_units = c.at("hidden_units").get<std::size_t>();
    head.config.mode = ParseMode(c.at("mode").get<std::string>(), path);
    head.config.batch_size = c.at("batch_size").get<std::size_t>();
    head.config.learning_rate = c.at("learning_rate").get<double>();
    head.config.l2_penalty = c.at("l2_penalty").get<double>();
    head.config.max_steps = c.at("max_steps").get<std::size_t>();
    head.config.seed = c.at("seed").get<std::uint64_t>();
    head.config.eval_every = c.at("eval_every").get<std::size_t>();
    if (!c.at("oversample_override").is_null()) {
      head.config.oversample_override = c.at("oversample_override").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kMalformedHeader, path.string() + ": bad head header: " + e.what());
  }
  head.in_class_ids = container::Field<std::vector<std::uint32_t>>(header, "in_class_ids", path);
  head.out_class_ids = container::Field<std::vector<std::uint32_t>>(header, "out_class_ids", path);
  head.oversampling = container::Field<double>(header, "oversampling", path);
  head.selected_step = container::Field<std::size_t>(header, "selected_step", path);
  head.selected_auroc = container::Field<double>(header, "selected_auroc", path);
  const auto steps = container::Field<std::size_t>(header, "training_steps", path);

  if (head.layers.empty() || head.output_width() != head.partition.output_width()) {
    throw Error(ErrorKind::kMalformedHeader,
                path.string() + ": layer shapes do not match the class partition");
  }
  for (std::size_t l = 1; l < head.layers.size(); ++l) {
    if (head.layers[l].weights.cols() != head.layers[l - 1].weights.rows()) {
      throw Error(ErrorKind::kMalformedHeader, path.string() + ": layer shapes do not chain");
    }
  }
  std::size_t count = 0;
  for (const DenseLayer& layer : head.layers) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  std::vector<double> flat(count);
  reader.Array(std::span<double>(flat), "head parameters");
  SetParameters(head, flat);
  head.training_log.resize(steps);
  reader.Array(std::span<double>(head.training_log), "training log");
  reader.ExpectEnd();
  return head;
}

}  // namespace oodkit
