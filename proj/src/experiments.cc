// Copyright 2026 The qmodel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmodel/experiments.h"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>

#include <nlohmann/json.hpp>

#include "qmodel/error.h"
#include "qmodel/io.h"
#include "qmodel/random.h"

namespace qmodel {
namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void say(const ExperimentConfig& c, const std::string& msg) {
  if (c.log) c.log(msg);
}

std::string case_list(const std::vector<int>& cases) {
  std::string s;
  for (int c : cases) s += std::to_string(c);
  return s;
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

RegressionReport score(const Checkpoint& model, std::span<const Record> test, int n_states, double h_range,
                       double gamma_range) {
  const std::vector<ModelPrediction> preds = predict_all(model, test);
  return evaluate_regression(preds, test, n_states, h_range, gamma_range);
}

}  // namespace

RealizationSpec stage_spec(const ExperimentConfig& config, int n_states, std::vector<int> cases, int records,
                           const std::string& purpose, std::optional<double> gamma_bar) {
  RealizationSpec s;
  s.n_states = n_states;
  s.q_count = config.q_count;
  s.t_star = config.t_star;
  s.h_max = config.h_max;
  s.gamma_max = config.gamma_max;
  s.gamma_mean_override = gamma_bar;
  s.coupling_case_ids = std::move(cases);
  s.coupling_j = config.coupling_j;
  s.coupling_r_min = config.coupling_r_min;
  s.coupling_r_max = config.coupling_r_max;
  s.coupling_seed = config.coupling_seed;
  std::string key = purpose + "/N" + std::to_string(n_states) + "/cases" + case_list(s.coupling_case_ids);
  if (gamma_bar) key += "/gbar" + format_double(*gamma_bar);
  s.master_seed = derive_seed(config.master_seed, fnv1a(key));
  s.record_count = records;
  return s;
}

DatasetFile obtain_dataset(const RealizationSpec& spec, const ExperimentConfig& config) {
  std::filesystem::path path;
  if (!config.cache_dir.empty()) {
    RealizationSpec bare = spec;
    bare.record_count = 0;
    const std::uint64_t fingerprint =
        fnv1a(serialize_dataset(DatasetFile{bare, {}, {}}) + "/" + std::to_string(spec.record_count));
    const std::string id = "N" + std::to_string(spec.n_states) + "-c" + case_list(spec.coupling_case_ids) + "-" +
                           hex(fingerprint);
    path = config.cache_dir / ("data-" + id + ".jsonl");
    if (std::filesystem::exists(path)) {
      try {
        DatasetFile cached = load_dataset(path);
        if (cached.spec == spec) {
          say(config, "loaded cached dataset " + path.string());
          return cached;
        }
      } catch (const Error& e) {
        say(config, std::string("ignoring unreadable cache entry: ") + e.what());
      }
    }
  }
  const auto start = std::chrono::steady_clock::now();
  DatasetFile file = generate_dataset(spec, config.workers);
  say(config, "generated " + std::to_string(spec.record_count) + " records for N=" + std::to_string(spec.n_states) +
                  " cases " + case_list(spec.coupling_case_ids) + " in " + format_double(elapsed_s(start)) + " s");
  if (!path.empty()) save_dataset(file, path);
  return file;
}

std::vector<LabelledFeatures> labelled(const DatasetFile& file) {
  std::vector<LabelledFeatures> out;
  out.reserve(file.records.size());
  for (const Record& r : file.records) out.push_back({r.features, file.spec.n_states});
  return out;
}

ClassificationResult run_classification_experiment(const ExperimentConfig& config) {
  if (config.knn_k_values.empty()) throw InvalidArgument("classification: no k values");
  std::vector<LabelledFeatures> train, test;
  for (int n : config.classify_n_values) {
    const DatasetFile tr = obtain_dataset(
        stage_spec(config, n, config.coupling_case_ids, config.classify_train_per_n, "classify-train"), config);
    const DatasetFile te = obtain_dataset(
        stage_spec(config, n, config.coupling_case_ids, config.classify_test_per_n, "classify-test"), config);
    for (auto& r : labelled(tr)) train.push_back(std::move(r));
    for (auto& r : labelled(te)) test.push_back(std::move(r));
  }
  ClassificationResult res;
  res.train_size = static_cast<long>(train.size());
  double best = -1;
  for (int k : config.knn_k_values) {
    const KnnModel model = knn_fit(train, k);
    KnnEvaluation ev = knn_evaluate(model, test, config.workers);
    say(config, "k=" + std::to_string(k) + " accuracy " + format_double(ev.accuracy));
    res.k_values.push_back(k);
    res.accuracy.push_back(ev.accuracy);
    res.standard_error.push_back(ev.standard_error);
    if (ev.accuracy > best) {
      best = ev.accuracy;
      res.best_k = k;
      res.best = std::move(ev);
    }
  }
  return res;
}

void regression_matrices(std::span<const Record> records, int n_states, Eigen::MatrixXd& features,
                         Eigen::MatrixXd& targets) {
  if (records.empty()) throw InvalidArgument("regression: no records");
  const Eigen::Index q = static_cast<Eigen::Index>(records.front().features.size());
  const int outputs = MlpArchitecture::outputs_for_states(n_states);
  features.resize(q, static_cast<Eigen::Index>(records.size()));
  targets.resize(outputs, static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& r = records[i];
    if (static_cast<Eigen::Index>(r.features.size()) != q || static_cast<int>(r.label_gamma.size()) != n_states)
      throw InvalidArgument("regression: inconsistent record shapes");
    const auto col = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < q; ++k) features(k, col) = r.features[static_cast<std::size_t>(k)];
    for (int k = 0; k < n_states * n_states; ++k) targets(k, col) = r.label_h[static_cast<std::size_t>(k)];
    for (int k = 0; k < n_states; ++k) targets(n_states * n_states + k, col) = r.label_gamma[static_cast<std::size_t>(k)];
  }
}

std::vector<ModelPrediction> predict_all(const Checkpoint& model, std::span<const Record> records) {
  const int n = model.params.arch.n_states();
  std::vector<ModelPrediction> out;
  if (records.empty()) return out;
  Eigen::MatrixXd x, t;
  regression_matrices(records, n, x, t);
  const Eigen::MatrixXd y =
      model.standardizer.inverse_targets(mlp_forward_batch(model.params, model.standardizer.transform_features(x)));
  out.reserve(records.size());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    ModelPrediction p{Eigen::MatrixXd(n, n), y.col(c).tail(n)};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) p.h(a, b) = y(a * n + b, c);
    out.push_back(std::move(p));
  }
  return out;
}

RegressionRun train_and_evaluate(std::span<const Record> train, std::span<const Record> test, int n_states,
                                 double gamma_range, const ExperimentConfig& config, const std::string& tag) {
  Eigen::MatrixXd x, t;
  regression_matrices(train, n_states, x, t);
  MlpArchitecture arch;
  arch.input_dim = static_cast<int>(x.rows());
  arch.hidden_dims = config.hidden_dims;
  arch.output_dim = MlpArchitecture::outputs_for_states(n_states);

  std::filesystem::path ckpt_path, loss_path;
  if (!config.cache_dir.empty()) {
    std::uint64_t h = fnv1a(x.data(), static_cast<std::size_t>(x.size()) * sizeof(double));
    h = fnv1a(t.data(), static_cast<std::size_t>(t.size()) * sizeof(double), h);
    const TrainConfig& c = config.train;
    std::string cfg = format_double(c.learning_rate) + "," + format_double(c.beta1) + "," + format_double(c.beta2) +
                      "," + format_double(c.epsilon) + "," + std::to_string(c.batch_size) + "," +
                      std::to_string(c.epochs) + "," + format_double(c.validation_fraction) + "," +
                      std::to_string(c.seed) + "," + (c.standardize_targets ? "s" : "r");
    for (int w : arch.hidden_dims) cfg += "," + std::to_string(w);
    h = fnv1a(cfg, h);
    ckpt_path = config.cache_dir / ("model-" + tag + "-" + hex(h) + ".ckpt");
    loss_path = ckpt_path;
    loss_path += ".loss.json";
  }

  RegressionRun run;
  bool cached = false;
  if (!ckpt_path.empty() && std::filesystem::exists(ckpt_path) && std::filesystem::exists(loss_path)) {
    try {
      run.model = checkpoint_load(ckpt_path);
      const auto j = nlohmann::json::parse(read_file(loss_path));
      run.train_loss = j.at("train").get<std::vector<double>>();
      run.validation_loss = j.at("validation").get<std::vector<double>>();
      run.best_epoch = j.at("best_epoch").get<int>();
      cached = true;
      say(config, "loaded cached model " + ckpt_path.string());
    } catch (const std::exception& e) {
      say(config, std::string("retraining, cache entry unusable: ") + e.what());
    }
  }
  if (!cached) {
    const auto start = std::chrono::steady_clock::now();
    const int every = std::max(1, config.train.epochs / 10);
    TrainResult tr = mlp_train(x, t, arch, config.train, [&](int epoch, double tl, double vl) {
      if ((epoch + 1) % every == 0)
        say(config, tag + " epoch " + std::to_string(epoch + 1) + " train " + format_double(tl) + " val " +
                        format_double(vl) + " (" + format_double(elapsed_s(start)) + " s)");
    });
    run.model = Checkpoint{std::move(tr.params), std::move(tr.standardizer)};
    run.train_loss = std::move(tr.train_loss);
    run.validation_loss = std::move(tr.validation_loss);
    run.best_epoch = tr.best_epoch;
    if (!ckpt_path.empty()) {
      checkpoint_save(run.model.params, run.model.standardizer, ckpt_path);
      nlohmann::json j{{"train", run.train_loss}, {"validation", run.validation_loss}, {"best_epoch", run.best_epoch}};
      write_file_atomic(loss_path, j.dump());
    }
  }
  run.report = score(run.model, test, n_states, config.h_max, gamma_range);
  say(config, tag + ": MRE(H) " + format_double(run.report.h.mre) + " restricted " +
                  format_double(run.report.h.restricted_mre) + ", MRE(gamma) " + format_double(run.report.gamma.mre) +
                  " restricted " + format_double(run.report.gamma.restricted_mre));
  return run;
}

RegressionRun run_regression_experiment(int n_states, const ExperimentConfig& config,
                                        std::optional<double> gamma_bar) {
  const DatasetFile train = obtain_dataset(
      stage_spec(config, n_states, config.coupling_case_ids, config.train_records, "regress-train", gamma_bar), config);
  const DatasetFile test = obtain_dataset(
      stage_spec(config, n_states, config.coupling_case_ids, config.test_records, "regress-test", gamma_bar), config);
  const double gamma_range = gamma_bar ? 2.0 * *gamma_bar : config.gamma_max;
  std::string tag = "regress-N" + std::to_string(n_states);
  if (gamma_bar) tag += "-gbar" + format_double(*gamma_bar);
  return train_and_evaluate(train.records, test.records, n_states, gamma_range, config, tag);
}

SweepReport run_dephasing_sweep(int n_states, const std::vector<double>& gamma_bar_grid,
                                const ExperimentConfig& config) {
  SweepReport rep;
  double prev = 0;
  for (double g : gamma_bar_grid) {
    if (!(g > prev)) throw InvalidArgument("dephasing sweep: grid must be ascending and positive");
    if (g < 1e-1 || g > 1e4) throw InvalidArgument("dephasing sweep: grid values must lie in [0.1, 1e4] MHz");
    prev = g;
  }
  for (double g : gamma_bar_grid) {
    rep.gamma_bars.push_back(g);
    rep.reports.push_back(run_regression_experiment(n_states, config, g).report);
  }
  return rep;
}

CaseStudyReport run_coupling_case_study(int n_states, const ExperimentConfig& config) {
  CaseStudyReport rep;
  rep.n_states = n_states;
  rep.case_ids = config.case_study_cases;
  rep.mixed_train_cases = config.mixed_train_cases;
  for (int c : config.mixed_train_cases) {
    if (std::find(config.case_study_cases.begin(), config.case_study_cases.end(), c) == config.case_study_cases.end())
      throw InvalidArgument("case study: mixed training case " + std::to_string(c) + " is not among the studied cases");
  }
  std::map<int, DatasetFile> train_sets, test_sets;
  for (int c : config.case_study_cases) {
    train_sets[c] = obtain_dataset(stage_spec(config, n_states, {c}, config.train_records, "case-train"), config);
    test_sets[c] = obtain_dataset(stage_spec(config, n_states, {c}, config.test_records, "case-test"), config);
    rep.per_case.push_back(train_and_evaluate(train_sets[c].records, test_sets[c].records, n_states,
                                              config.gamma_max, config,
                                              "case-N" + std::to_string(n_states) + "-c" + std::to_string(c))
                               .report);
  }

  // Interleave the per-case training sets: record i comes from case
  // mixed_train_cases[i % m], taking that case's records in order.
  std::vector<Record> mixed_train;
  const std::size_t m = config.mixed_train_cases.size();
  for (int i = 0; i < config.train_records; ++i) {
    const DatasetFile& src = train_sets[config.mixed_train_cases[static_cast<std::size_t>(i) % m]];
    mixed_train.push_back(src.records[static_cast<std::size_t>(i) / m]);
  }
  std::vector<Record> all, seen, unseen;
  for (int c : config.case_study_cases) {
    const bool in_train =
        std::find(config.mixed_train_cases.begin(), config.mixed_train_cases.end(), c) != config.mixed_train_cases.end();
    for (const Record& r : test_sets[c].records) {
      all.push_back(r);
      (in_train ? seen : unseen).push_back(r);
    }
  }
  const RegressionRun mixed = train_and_evaluate(mixed_train, all, n_states, config.gamma_max, config,
                                                 "case-N" + std::to_string(n_states) + "-mixed" +
                                                     case_list(config.mixed_train_cases));
  rep.mixed_all = mixed.report;
  rep.mixed_seen = score(mixed.model, seen, n_states, config.h_max, config.gamma_max);
  rep.mixed_unseen = unseen.empty() ? RegressionReport{} : score(mixed.model, unseen, n_states, config.h_max, config.gamma_max);
  for (int c : config.case_study_cases) {
    rep.mixed_per_case.push_back(score(mixed.model, test_sets[c].records, n_states, config.h_max, config.gamma_max));
  }
  return rep;
}

}  // namespace qmodel
