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

#include "oodkit/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oodkit/analysis.hpp"
#include "oodkit/bench.hpp"
#include "oodkit/bench_server.hpp"
#include "oodkit/embed_store.hpp"
#include "oodkit/error.hpp"
#include "oodkit/maha.hpp"
#include "oodkit/metrics.hpp"
#include "oodkit/oe_head.hpp"
#include "oodkit/probs.hpp"
#include "oodkit/zshot.hpp"

namespace oodkit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Shared options of every subcommand.
struct Common {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool csv_labels = false;
  bool csv_query_labels = false;
  std::string report_format = "json";
};

struct FitArgs {
  std::string train;
  std::optional<double> epsilon;
  std::string model = "model.gau";
};

struct ScoreArgs {
  std::string method;
  std::string input;
  std::string model;
  std::string train;
  std::optional<double> epsilon;
  std::vector<std::size_t> in_indices;
  bool probabilities = false;
  std::string in_labels;
  std::string out_labels;
  bool raw = false;
  double temperature = 0.01;
  std::string output = "scores.csv";
};

struct EvalArgs {
  ScoreArgs score;
  std::string in;
  std::string out;
  double tpr_percent = 95.0;
  bool curves = false;
};

struct TrainOeArgs {
  std::string in_train;
  std::string oe_train;
  std::optional<std::size_t> shots;
  bool collapse = false;
  std::string head = "linear";
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> steps;
  std::optional<double> lr;
  std::optional<double> l2;
  std::optional<std::size_t> batch;
  std::optional<double> gamma;
  std::string in_val;
  std::string out_val;
  std::size_t eval_every = 100;
  std::string in_test;
  std::string out_test;
  std::string model = "head.hed";
};

struct ZshotArgs {
  std::string images;
  std::string ood_images;
  std::string in_labels;
  std::string out_labels;
  bool raw = false;
  double temperature = 0.01;
};

struct PcaArgs {
  std::string in;
  std::vector<std::string> ood;
  std::size_t components = 2;
  std::string model;
};

struct ServeArgs {
  std::string in_pool;
  std::string out_pool;
  std::vector<std::string> class_names;
  std::string data_dir = "bench_sessions";
  std::string static_dir;
  std::string host = "127.0.0.1";
  int port = bench::kDefaultPort;
};

EmbeddingSet LoadCsvAware(const std::string& path, bool label_column) {
  CsvOptions csv;
  csv.label_column = label_column;
  return LoadEmbeddings(path, DetectFormat(path), csv);
}

// Query-side inputs: test sets, label text embeddings, PCA inputs.
EmbeddingSet Load(const std::string& path, const Common& c) {
  return LoadCsvAware(path, c.csv_query_labels);
}

// Training inputs, which must carry labels.
EmbeddingSet LoadLabeled(const std::string& path, const Common& c) {
  EmbeddingSet set = LoadCsvAware(path, c.csv_labels);
  if (!set.labels) {
    throw Error(ErrorKind::kMissingLabels,
                "'" + path + "' has no label column (use --csv-labels for CSV input)");
  }
  return set;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
}

void WriteJson(const fs::path& path, const json& j) { WriteText(path, j.dump(2) + "\n"); }

void WriteScores(const fs::path& path, const std::vector<double>& scores) {
  std::string text;
  for (double s : scores) text += Num(s) + "\n";
  WriteText(path, text);
}

void WriteCurve(const fs::path& path, const char* header, const std::vector<CurvePoint>& curve) {
  std::string text = std::string(header) + "\n";
  for (const CurvePoint& p : curve) text += Num(p.x) + "," + Num(p.y) + "\n";
  WriteText(path, text);
}

std::vector<double> ReadScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      std::size_t used = 0;
      scores.push_back(std::stod(line, &used));
    } catch (...) {
      throw Error(ErrorKind::kMalformedHeader,
                  path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return scores;
}

LogitSet ToLogits(const EmbeddingSet& set, const std::string& path,
                  const std::vector<std::size_t>& in_indices, bool probabilities) {
  LogitSet logits;
  logits.logits = set.data.cast<double>();
  logits.class_ids.resize(set.dim());
  std::iota(logits.class_ids.begin(), logits.class_ids.end(), 0u);
  logits.in_indices = in_indices;
  if (logits.in_indices.empty() && DetectFormat(path) == FileFormat::kBinary) {
    const json header = ReadEmbeddingHeader(path);
    if (header.contains("in_indices")) {
      logits.in_indices = header["in_indices"].get<std::vector<std::size_t>>();
    }
  }
  logits.are_probabilities = probabilities;
  return logits;
}

fs::path OutPath(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

json CommonJson(const Common& c) {
  return {{"out_dir", c.out_dir},
          {"seed", c.seed},
          {"csv_labels", c.csv_labels},
          {"csv_query_labels", c.csv_query_labels},
          {"report_format", c.report_format}};
}

json Opt(const auto& v) { return v ? json(*v) : json(); }

// Scoring pipelines shared by `score` and `eval`. Each returns the scores of
// `targets` and records method details in `info`.
class Scorer {
 public:
  Scorer(const ScoreArgs& args, const Common& common) : args_(args), common_(common) {}

  std::vector<double> Score(const EmbeddingSet& set, const std::string& path, json& info) {
    const std::string& m = args_.method;
    info["method"] = m;
    if (m == "maha") return ScoreMaha(Gaussian(info), set);
    if (m == "msp" && !args_.model.empty()) {
      info["note"] = "msp over all outputs of an outlier-exposure head, not the K-way baseline";
      LogitSet logits;
      const OeHead& head = Head();
      logits.logits = HeadProbabilities(head, set);
      logits.are_probabilities = true;
      return ScoreMsp(logits);
    }
    if (m == "msp") return ScoreMsp(ToLogits(set, path, args_.in_indices, args_.probabilities));
    if (m == "inmass") {
      return ScoreInMass(ToLogits(set, path, args_.in_indices, args_.probabilities));
    }
    if (m == "oe") {
      const OeHead& head = Head();
      info["head_width"] = head.output_width();
      info["k_in"] = head.partition.k_in;
      return ScoreOe(head, set);
    }
    if (m == "zshot") {
      const CandidateLabels& labels = Labels();
      info["normalize"] = labels.normalize;
      info["temperature"] = labels.temperature;
      if (ZshotUsesMspFallback(labels)) info["method"] = "zshot_msp_baseline";
      return ScoreZshot(set, labels);
    }
    throw Error(ErrorKind::kInvalidArgument, "unknown method '" + m + "'");
  }

 private:
  const GaussianModel& Gaussian(json& info) {
    if (!gaussian_) {
      if (!args_.model.empty()) {
        gaussian_ = LoadGaussianModel(args_.model);
      } else if (!args_.train.empty()) {
        gaussian_ = FitGaussian(LoadLabeled(args_.train, common_), args_.epsilon);
      } else {
        throw Error(ErrorKind::kInvalidArgument, "method maha needs --model or --train");
      }
    }
    info["epsilon"] = gaussian_->epsilon;
    info["epsilon_escalations"] = gaussian_->escalations;
    info["classes"] = gaussian_->classes();
    return *gaussian_;
  }

  const OeHead& Head() {
    if (args_.model.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "method '" + args_.method + "' needs --model (an OE head file)");
    }
    if (!head_) head_ = LoadHead(args_.model);
    return *head_;
  }

  const CandidateLabels& Labels() {
    if (!labels_) {
      if (args_.in_labels.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "method zshot needs --in-labels");
      }
      const EmbeddingSet in = Load(args_.in_labels, common_);
      std::optional<EmbeddingSet> out;
      if (!args_.out_labels.empty()) out = Load(args_.out_labels, common_);
      labels_ = CandidateLabels::FromSets(in, out ? &*out : nullptr, !args_.raw,
                                          args_.raw ? 1.0 : args_.temperature);
    }
    return *labels_;
  }

  const ScoreArgs& args_;
  const Common& common_;
  std::optional<GaussianModel> gaussian_;
  std::optional<OeHead> head_;
  std::optional<CandidateLabels> labels_;
};

json MetricsReport(const ScoreSet& s, double tpr_percent) {
  return {{"auroc", Auroc(s)},
          {"auprc", Auprc(s)},
          {"fpr95", FprAtTpr(s, tpr_percent)},
          {"tpr_percent", tpr_percent},
          {"m", s.out_scores.size()},
          {"n", s.in_scores.size()}};
}

void WriteReport(const Common& c, const json& report) {
  if (c.report_format == "csv") {
    std::string text = "metric,value\n";
    for (const char* key : {"auroc", "auprc", "fpr95", "m", "n"}) {
      text += std::string(key) + "," + report.at(key).dump() + "\n";
    }
    WriteText(OutPath(c, "report.csv"), text);
  } else {
    WriteJson(OutPath(c, "report.json"), report);
  }
}

void PrintSummary(std::ostream& out, const json& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "AUROC %.2f%%  AUPRC %.2f%%  FPR%g %.2f%%  (m=%zu OOD, n=%zu in)\n",
                100 * report["auroc"].get<double>(), 100 * report["auprc"].get<double>(),
                report["tpr_percent"].get<double>(), 100 * report["fpr95"].get<double>(),
                report["m"].get<std::size_t>(), report["n"].get<std::size_t>());
  out << buf;
}

void AddScoreOptions(CLI::App* cmd, ScoreArgs& a) {
  cmd->add_option("--model", a.model, "Gaussian model (maha) or OE head file (oe, msp)");
  cmd->add_option("--train", a.train, "Labeled training embeddings to fit a Gaussian on the fly (maha)");
  cmd->add_option("--epsilon", a.epsilon, "Covariance ridge when fitting on the fly");
  cmd->add_option("--in-indices", a.in_indices, "In-distribution logit columns (inmass)")->delimiter(',');
  cmd->add_flag("--probabilities", a.probabilities, "Inputs already hold probabilities; skip softmax");
  cmd->add_option("--in-labels", a.in_labels, "In-distribution candidate label embeddings (zshot)");
  cmd->add_option("--out-labels", a.out_labels, "Out-of-distribution candidate label embeddings (zshot)");
  cmd->add_flag("--raw", a.raw, "Raw dot products: no normalization, temperature 1 (zshot)");
  cmd->add_option("--temperature", a.temperature, "Similarity temperature (zshot)")->check(CLI::PositiveNumber);
}

int CmdFit(const FitArgs& a, const Common& c, std::ostream& out) {
  const EmbeddingSet train = LoadLabeled(a.train, c);
  const GaussianModel model = FitGaussian(train, a.epsilon);
  const fs::path model_path = OutPath(c, a.model);
  SaveGaussianModel(model, model_path);
  WriteJson(OutPath(c, "manifest.json"),
            {{"subcommand", "fit"},
             {"common", CommonJson(c)},
             {"train", a.train},
             {"epsilon_requested", Opt(a.epsilon)},
             {"epsilon_used", model.epsilon},
             {"epsilon_escalations", model.escalations},
             {"classes", model.classes()},
             {"dim", model.dim()},
             {"rows", train.rows()},
             {"outputs", {model_path.string()}}});
  out << "fitted " << model.classes() << " classes, D=" << model.dim()
      << ", epsilon=" << Num(model.epsilon);
  if (model.escalations) out << " (escalated " << model.escalations << "x)";
  out << "\n";
  return 0;
}

int CmdScore(const ScoreArgs& a, const Common& c, std::ostream& out) {
  const EmbeddingSet input = Load(a.input, c);
  Scorer scorer(a, c);
  json info;
  const std::vector<double> scores = scorer.Score(input, a.input, info);
  const fs::path path = OutPath(c, a.output);
  WriteScores(path, scores);
  WriteJson(OutPath(c, "manifest.json"), {{"subcommand", "score"},
                                          {"common", CommonJson(c)},
                                          {"input", a.input},
                                          {"model", a.model},
                                          {"train", a.train},
                                          {"method_info", info},
                                          {"rows", scores.size()},
                                          {"outputs", {path.string()}}});
  out << "scored " << scores.size() << " rows with " << info["method"].get<std::string>() << "\n";
  return 0;
}

int CmdEval(const EvalArgs& a, const Common& c, std::ostream& out) {
  ScoreSet s;
  json info;
  if (a.score.method == "scores") {
    info["method"] = "scores";
    s.in_scores = ReadScores(a.in);
    s.out_scores = ReadScores(a.out);
  } else {
    Scorer scorer(a.score, c);
    s.in_scores = scorer.Score(Load(a.in, c), a.in, info);
    s.out_scores = scorer.Score(Load(a.out, c), a.out, info);
  }
  json report = MetricsReport(s, a.tpr_percent);
  report["method"] = info["method"];
  WriteReport(c, report);
  std::vector<std::string> outputs{(fs::path(c.out_dir) / ("report." + c.report_format)).string()};
  if (a.curves) {
    WriteCurve(OutPath(c, "roc.csv"), "fpr,tpr", RocPoints(s));
    WriteCurve(OutPath(c, "pr.csv"), "recall,precision", PrPoints(s));
    outputs.push_back(OutPath(c, "roc.csv").string());
    outputs.push_back(OutPath(c, "pr.csv").string());
  }
  WriteJson(OutPath(c, "manifest.json"), {{"subcommand", "eval"},
                                          {"common", CommonJson(c)},
                                          {"in", a.in},
                                          {"out", a.out},
                                          {"model", a.score.model},
                                          {"train", a.score.train},
                                          {"method_info", info},
                                          {"tpr_percent", a.tpr_percent},
                                          {"outputs", outputs}});
  PrintSummary(out, report);
  return 0;
}

int CmdTrainOe(const TrainOeArgs& a, const Common& c, std::ostream& out) {
  const EmbeddingSet in_train = LoadLabeled(a.in_train, c);
  EmbeddingSet oe_train = LoadLabeled(a.oe_train, c);
  if (a.shots) oe_train = SubsampleShots(oe_train, *a.shots, c.seed);

  OeConfig config = a.head == "mlp" ? OeConfig::MlpDefaults() : OeConfig::LinearDefaults();
  config.mode = a.collapse ? OutlierLabelMode::kCollapsedSingleClass
                           : OutlierLabelMode::kLabeledOutliers;
  config.seed = c.seed;
  if (a.hidden) config.hidden_units = *a.hidden;
  if (a.steps) config.max_steps = *a.steps;
  if (a.lr) config.learning_rate = *a.lr;
  if (a.l2) config.l2_penalty = *a.l2;
  if (a.batch) config.batch_size = *a.batch;
  config.oversample_override = a.gamma;
  config.eval_every = a.eval_every;

  std::optional<OeValidation> validation;
  if (!a.in_val.empty() || !a.out_val.empty()) {
    if (a.in_val.empty() || a.out_val.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "--in-val and --out-val must be given together");
    }
    validation = OeValidation{Load(a.in_val, c), Load(a.out_val, c)};
  }
  const OeHead head = TrainOeHead(in_train, oe_train, config, validation ? &*validation : nullptr);
  const fs::path head_path = OutPath(c, a.model);
  SaveHead(head, head_path);
  std::vector<std::string> outputs{head_path.string()};

  std::optional<json> report;
  if (!a.in_test.empty() || !a.out_test.empty()) {
    if (a.in_test.empty() || a.out_test.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "--in-test and --out-test must be given together");
    }
    const ScoreSet s{ScoreOe(head, Load(a.in_test, c)), ScoreOe(head, Load(a.out_test, c))};
    report = MetricsReport(s, 95.0);
    (*report)["method"] = "oe";
    WriteReport(c, *report);
    outputs.push_back((fs::path(c.out_dir) / ("report." + c.report_format)).string());
  }

  json oe_rows_per_class = json::object();
  for (const auto& [cls, rows] : SplitByLabel(oe_train)) {
    oe_rows_per_class[std::to_string(cls)] = rows.size();
  }
  WriteJson(OutPath(c, "manifest.json"),
            {{"subcommand", "train-oe"},
             {"common", CommonJson(c)},
             {"in_train", a.in_train},
             {"oe_train", a.oe_train},
             {"shots", Opt(a.shots)},
             {"oe_rows_per_class", oe_rows_per_class},
             {"head", a.head},
             {"hidden_units", config.head_kind == HeadKind::kMlpOneHidden ? json(config.hidden_units) : json()},
             {"collapse", a.collapse},
             {"k_in", head.partition.k_in},
             {"o_out", head.partition.o_out},
             {"head_width", head.output_width()},
             {"oversampling_factor", head.oversampling},
             {"oversampling_overridden", a.gamma.has_value()},
             {"batch_size", config.batch_size},
             {"learning_rate", config.learning_rate},
             {"l2_penalty", config.l2_penalty},
             {"max_steps", config.max_steps},
             {"checkpoint_selection", validation ? "best_validation_auroc" : "final_step"},
             {"selected_step", validation ? json(head.selected_step) : json(config.max_steps)},
             {"selected_validation_auroc", validation ? json(head.selected_auroc) : json()},
             {"initial_loss", head.training_log.front()},
             {"final_loss", head.training_log.back()},
             {"outputs", outputs}});
  out << "trained " << (a.head == "mlp" ? "mlp" : "linear") << " head, width "
      << head.output_width() << ", gamma " << Num(head.oversampling) << "\n";
  if (report) PrintSummary(out, *report);
  return 0;
}

int CmdZshot(const ZshotArgs& a, const Common& c, std::ostream& out) {
  ScoreArgs sa;
  sa.method = "zshot";
  sa.in_labels = a.in_labels;
  sa.out_labels = a.out_labels;
  sa.raw = a.raw;
  sa.temperature = a.temperature;
  Scorer scorer(sa, c);
  json info;
  const std::vector<double> in_scores = scorer.Score(Load(a.images, c), a.images, info);
  std::vector<std::string> outputs{OutPath(c, "scores_in.csv").string()};
  WriteScores(OutPath(c, "scores_in.csv"), in_scores);
  std::optional<json> report;
  if (!a.ood_images.empty()) {
    const std::vector<double> out_scores = scorer.Score(Load(a.ood_images, c), a.ood_images, info);
    WriteScores(OutPath(c, "scores_out.csv"), out_scores);
    outputs.push_back(OutPath(c, "scores_out.csv").string());
    report = MetricsReport({in_scores, out_scores}, 95.0);
    (*report)["method"] = info["method"];
    WriteReport(c, *report);
    outputs.push_back((fs::path(c.out_dir) / ("report." + c.report_format)).string());
  }
  WriteJson(OutPath(c, "manifest.json"), {{"subcommand", "zshot"},
                                          {"common", CommonJson(c)},
                                          {"images", a.images},
                                          {"ood_images", a.ood_images},
                                          {"in_labels", a.in_labels},
                                          {"out_labels", a.out_labels},
                                          {"raw", a.raw},
                                          {"method_info", info},
                                          {"outputs", outputs}});
  out << "zero-shot scored " << in_scores.size() << " images (" << info["method"].get<std::string>()
      << ")\n";
  if (report) PrintSummary(out, *report);
  return 0;
}

int CmdPca(const PcaArgs& a, const Common& c, std::ostream& out) {
  std::vector<EmbeddingSet> sets;
  std::vector<std::string> names;
  sets.push_back(Load(a.in, c));
  names.push_back("in");
  for (std::size_t i = 0; i < a.ood.size(); ++i) {
    sets.push_back(Load(a.ood[i], c));
    names.push_back(a.ood.size() == 1 ? "ood" : "ood" + std::to_string(i));
  }
  std::vector<const EmbeddingSet*> ptrs;
  for (const EmbeddingSet& s : sets) ptrs.push_back(&s);
  const PcaModel pca = FitPca(ptrs, a.components);

  std::optional<GaussianModel> gaussian;
  if (!a.model.empty()) gaussian = LoadGaussianModel(a.model);

  std::string text = "set,row,label";
  for (std::size_t k = 0; k < a.components; ++k) text += ",pc" + std::to_string(k + 1);
  if (gaussian) text += ",maha_score";
  text += "\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const RowMatrixD proj = ProjectPca(pca, sets[s]);
    std::vector<double> maha;
    if (gaussian) maha = ScoreMaha(*gaussian, sets[s]);
    for (Eigen::Index r = 0; r < proj.rows(); ++r) {
      text += names[s] + "," + std::to_string(r) + ",";
      if (sets[s].labels) text += std::to_string((*sets[s].labels)[static_cast<std::size_t>(r)]);
      for (Eigen::Index k = 0; k < proj.cols(); ++k) text += "," + Num(proj(r, k));
      if (gaussian) text += "," + Num(maha[static_cast<std::size_t>(r)]);
      text += "\n";
    }
  }
  WriteText(OutPath(c, "projection.csv"), text);
  WriteJson(OutPath(c, "pca_report.json"), {{"components", a.components},
                                            {"explained_variance", pca.explained_variance},
                                            {"explained_variance_ratio", pca.explained_ratio},
                                            {"fit_sets", names}});
  WriteJson(OutPath(c, "manifest.json"),
            {{"subcommand", "pca"},
             {"common", CommonJson(c)},
             {"in", a.in},
             {"ood", a.ood},
             {"components", a.components},
             {"model", a.model},
             {"fit_on", "concatenation of all supplied sets, in-distribution first"},
             {"outputs", {OutPath(c, "projection.csv").string(), OutPath(c, "pca_report.json").string()}}});
  out << "explained variance ratio:";
  for (double r : pca.explained_ratio) out << " " << Num(r);
  out << "\n";
  return 0;
}

int CmdServe(const ServeArgs& a, const Common& c, std::ostream& out) {
  bench::SessionStore store(bench::ScanImagePool(a.in_pool), bench::ScanImagePool(a.out_pool),
                            a.class_names, a.data_dir);
  std::optional<fs::path> static_dir;
  if (!a.static_dir.empty()) static_dir = a.static_dir;
  bench::BenchServer server(store, static_dir);
  if (!server.Bind(a.host, a.port)) {
    throw Error(ErrorKind::kIo, "cannot bind " + a.host + ":" + std::to_string(a.port));
  }
  WriteJson(OutPath(c, "manifest.json"), {{"subcommand", "serve-bench"},
                                          {"common", CommonJson(c)},
                                          {"in_pool", a.in_pool},
                                          {"out_pool", a.out_pool},
                                          {"class_names", store.class_names()},
                                          {"data_dir", a.data_dir},
                                          {"static_dir", a.static_dir},
                                          {"host", a.host},
                                          {"port", a.port}});
  out << "serving human benchmark on http://" << a.host << ":" << a.port << " ("
      << store.SessionIds().size() << " stored sessions)" << std::endl;
  server.ListenAfterBind();
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"oodkit: out-of-distribution scoring and evaluation on precomputed embeddings", "oodkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out-dir", common.out_dir, "Directory for outputs and manifest.json");
  app.add_option("--seed", common.seed, "Random seed");
  app.add_flag("--csv-labels", common.csv_labels, "CSV training inputs carry a final integer label column");
  app.add_flag("--csv-query-labels", common.csv_query_labels,
               "CSV test and query inputs carry a final integer label column");
  app.add_option("--report-format", common.report_format, "Metric report format")
      ->check(CLI::IsMember({"json", "csv"}));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the shared-covariance Gaussian (Mahalanobis) model");
  fit_cmd->add_option("--train", fit.train, "Labeled training embeddings")->required();
  fit_cmd->add_option("--epsilon", fit.epsilon, "Covariance ridge (default: 1e-6 * trace/D)");
  fit_cmd->add_option("--model", fit.model, "Output model file name");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Write one confidence score per input row");
  score_cmd->add_option("--method", score.method, "maha | msp | inmass | oe | zshot")
      ->required()
      ->check(CLI::IsMember({"maha", "msp", "inmass", "oe", "zshot"}));
  score_cmd->add_option("--input", score.input, "Embeddings or logits to score")->required();
  score_cmd->add_option("--output", score.output, "Score file name");
  AddScoreOptions(score_cmd, score);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "AUROC / AUPRC / FPR@TPR of in- vs out-distribution test sets");
  eval_cmd->add_option("--method", eval.score.method, "maha | msp | inmass | oe | zshot | scores")
      ->required()
      ->check(CLI::IsMember({"maha", "msp", "inmass", "oe", "zshot", "scores"}));
  eval_cmd->add_option("--in", eval.in, "In-distribution test inputs")->required();
  eval_cmd->add_option("--out", eval.out, "Out-of-distribution test inputs")->required();
  eval_cmd->add_option("--tpr", eval.tpr_percent, "Recall level N for FPR-at-N% TPR")
      ->check(CLI::Range(0.0, 100.0));
  eval_cmd->add_flag("--curves", eval.curves, "Also write roc.csv and pr.csv");
  AddScoreOptions(eval_cmd, eval.score);

  TrainOeArgs oe;
  auto* oe_cmd = app.add_subcommand("train-oe", "Few-shot outlier-exposure head training");
  oe_cmd->add_option("--in-train", oe.in_train, "Labeled in-distribution training embeddings")->required();
  oe_cmd->add_option("--oe-train", oe.oe_train, "Labeled known-outlier embeddings")->required();
  oe_cmd->add_option("--shots", oe.shots, "Keep this many outliers per class (seeded)")->check(CLI::PositiveNumber);
  oe_cmd->add_flag("--collapse", oe.collapse, "Collapse all outlier classes into one (K+1 outputs)");
  oe_cmd->add_option("--head", oe.head, "linear | mlp")->check(CLI::IsMember({"linear", "mlp"}));
  oe_cmd->add_option("--hidden", oe.hidden, "Hidden units of the mlp head")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--steps", oe.steps, "Training steps")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--lr", oe.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--l2", oe.l2, "L2 penalty on weights")->check(CLI::NonNegativeNumber);
  oe_cmd->add_option("--batch", oe.batch, "Batch size")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--gamma", oe.gamma, "Override the oversampling factor")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--in-val", oe.in_val, "In-distribution validation embeddings");
  oe_cmd->add_option("--out-val", oe.out_val, "OOD validation embeddings");
  oe_cmd->add_option("--eval-every", oe.eval_every, "Validation cadence in steps")->check(CLI::PositiveNumber);
  oe_cmd->add_option("--in-test", oe.in_test, "In-distribution test embeddings");
  oe_cmd->add_option("--out-test", oe.out_test, "OOD test embeddings");
  oe_cmd->add_option("--model", oe.model, "Output head file name");

  ZshotArgs zs;
  auto* zs_cmd = app.add_subcommand("zshot", "Zero-shot scoring with candidate-label text embeddings");
  zs_cmd->add_option("--images", zs.images, "In-distribution test image embeddings")->required();
  zs_cmd->add_option("--ood-images", zs.ood_images, "OOD test image embeddings (enables the report)");
  zs_cmd->add_option("--in-labels", zs.in_labels, "In-distribution label text embeddings")->required();
  zs_cmd->add_option("--out-labels", zs.out_labels, "OOD label text embeddings (omit for the MSP baseline)");
  zs_cmd->add_flag("--raw", zs.raw, "Raw dot products: no normalization, temperature 1");
  zs_cmd->add_option("--temperature", zs.temperature, "Similarity temperature")->check(CLI::PositiveNumber);

  PcaArgs pca;
  auto* pca_cmd = app.add_subcommand("pca", "2-D PCA projection of embedding sets for plotting");
  pca_cmd->add_option("--in", pca.in, "In-distribution embeddings")->required();
  pca_cmd->add_option("--ood", pca.ood, "OOD embeddings (repeatable)");
  pca_cmd->add_option("--components", pca.components, "Number of components")->check(CLI::PositiveNumber);
  pca_cmd->add_option("--model", pca.model, "Gaussian model; adds a Mahalanobis score column");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve-bench", "Human benchmark HTTP service");
  serve_cmd->add_option("--in-pool", serve.in_pool, "In-distribution image directory (class subdirs)")->required();
  serve_cmd->add_option("--out-pool", serve.out_pool, "OOD image directory (class subdirs)")->required();
  serve_cmd->add_option("--class-names", serve.class_names, "In-distribution class names (default: in-pool subdirs)")
      ->delimiter(',');
  serve_cmd->add_option("--data-dir", serve.data_dir, "Session log directory");
  serve_cmd->add_option("--static-dir", serve.static_dir, "Browser UI files to serve under /");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*fit_cmd) return CmdFit(fit, common, out);
    if (*score_cmd) return CmdScore(score, common, out);
    if (*eval_cmd) return CmdEval(eval, common, out);
    if (*oe_cmd) return CmdTrainOe(oe, common, out);
    if (*zs_cmd) return CmdZshot(zs, common, out);
    if (*pca_cmd) return CmdPca(pca, common, out);
    if (*serve_cmd) return CmdServe(serve, common, out);
  } catch (const Error& e) {
    err << "error (" << ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace oodkit
