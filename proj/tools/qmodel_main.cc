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

// qmodel: command-line driver for data generation, training and reports.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmodel/config.h"
#include "qmodel/coupling.h"
#include "qmodel/dataset.h"
#include "qmodel/error.h"
#include "qmodel/experiments.h"
#include "qmodel/io.h"
#include "qmodel/lindblad.h"
#include "qmodel/metrics.h"
#include "qmodel/mlp.h"
#include "qmodel/random.h"
#include "qmodel/report.h"

namespace fs = std::filesystem;
using namespace qmodel;

namespace {

const auto kStart = std::chrono::steady_clock::now();

void log_line(const std::string& msg) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - kStart).count();
  std::fprintf(stderr, "[%8.1fs] %s\n", s, msg.c_str());
}

// Wraps errors so the message names the failing stage.
template <typename Fn>
void stage(const std::string& name, Fn&& fn) {
  log_line(name + ": start");
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.category(), name + ": " + e.what());
  }
  log_line(name + ": done");
}

void emit(const fs::path& path, const std::string& content) {
  write_file_atomic(path, content);
  log_line("wrote " + path.string());
}

void require_file(const fs::path& path, const std::string& key) {
  if (path.empty()) throw ConfigError("config key '" + key + "' must name a file");
  if (!fs::is_regular_file(path)) throw IoError("config key '" + key + "': no such file " + path.string());
}

void prepare_dir(const fs::path& dir, const std::string& key) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("config key '" + key + "': cannot create directory " + dir.string());
}

void prepare_parent(const fs::path& file, const std::string& key) {
  if (file.empty()) throw ConfigError("config key '" + key + "' must name a file");
  prepare_dir(file.parent_path(), key);
}

std::string ntag(int n) { return "N" + std::to_string(n); }

RealizationSpec data_spec(const PipelineConfig& c) {
  const ExperimentConfig& e = c.experiment;
  RealizationSpec s;
  s.n_states = c.n_states;
  s.q_count = e.q_count;
  s.t_star = e.t_star;
  s.h_max = e.h_max;
  s.gamma_max = e.gamma_max;
  s.gamma_mean_override = c.gamma_mean;
  s.coupling_case_ids = e.coupling_case_ids;
  s.coupling_j = e.coupling_j;
  s.coupling_r_min = e.coupling_r_min;
  s.coupling_r_max = e.coupling_r_max;
  s.coupling_seed = e.coupling_seed;
  s.master_seed = e.master_seed;
  s.record_count = c.record_count;
  s.validate();
  return s;
}

double gamma_range_of(const RealizationSpec& s) {
  return s.gamma_mean_override ? 2.0 * *s.gamma_mean_override : s.gamma_max;
}

std::vector<std::string> bin_labels(const std::vector<ErrorBin>& bins) {
  std::vector<std::string> out;
  for (const ErrorBin& b : bins) out.push_back(format_double(0.5 * (b.lo + b.hi)));
  return out;
}

void write_regression(const fs::path& dir, const std::string& stem, const RegressionReport& r) {
  emit(dir / (stem + "-summary.csv"), regression_summary_csv(r));
  emit(dir / (stem + "-bins.csv"), regression_bins_csv(r));
  auto chart = [&](const ParameterErrors& p, const std::string& what, const std::string& file) {
    Series mre_s{"MRE", {}}, mae_s{"MAE (MHz)", {}};
    for (const ErrorBin& b : p.bins) {
      mre_s.values.push_back(b.mre);
      mae_s.values.push_back(b.mae);
    }
    ChartOptions o{what + " errors by actual value, N=" + std::to_string(r.n_states), "actual value (MHz)", "error",
                   false, false};
    emit(dir / file, svg_bar_chart(bin_labels(p.bins), {mre_s, mae_s}, o));
  };
  chart(r.h, "Hamiltonian", stem + "-h-bins.svg");
  chart(r.gamma, "Dephasing", stem + "-gamma-bins.svg");
}

// ---- commands -------------------------------------------------------------

void cmd_gen_couplings(const PipelineConfig& c) {
  const ExperimentConfig& e = c.experiment;
  prepare_dir(c.out_dir, "out_dir");
  std::string stats = "case_id,alpha,n_states,q_count,sigma,mu3_central,skew_standardized\n";
  for (int id : e.coupling_case_ids) {
    const CouplingCase cc = standard_case(id, e.coupling_seed, e.coupling_j, e.coupling_r_min, e.coupling_r_max);
    const OutputCouplingSet set = generate_coupling_set(cc, c.n_states, e.q_count);
    const CouplingStats st = coupling_stats(set);
    emit(c.out_dir / ("couplings-" + ntag(c.n_states) + "-case" + std::to_string(id) + ".csv"), couplings_csv(set));
    stats += std::to_string(id) + ",";
    append_double(stats, cc.alpha);
    stats += "," + std::to_string(c.n_states) + "," + std::to_string(e.q_count) + ",";
    append_double(stats, st.sigma);
    stats += ",";
    append_double(stats, st.mu3_central);
    stats += ",";
    append_double(stats, st.skew_standardized);
    stats += "\n";
  }
  emit(c.out_dir / ("coupling-stats-" + ntag(c.n_states) + ".csv"), stats);
}

fs::path dataset_path(const PipelineConfig& c) {
  return c.dataset.empty() ? c.out_dir / ("dataset-" + ntag(c.n_states) + ".jsonl") : c.dataset;
}

void cmd_gen_data(const PipelineConfig& c) {
  const fs::path out = dataset_path(c);
  prepare_parent(out, "dataset");
  const RealizationSpec spec = data_spec(c);
  const DatasetFile file = generate_dataset(spec, c.experiment.workers);
  save_dataset(file, out);
  log_line("wrote " + out.string() + " (" + std::to_string(file.records.size()) + " records)");
}

void cmd_classify(const PipelineConfig& c) {
  prepare_dir(c.out_dir, "out_dir");
  prepare_dir(c.experiment.cache_dir, "cache_dir");
  const ClassificationResult r = run_classification_experiment(c.experiment);
  std::string csv = "k,accuracy,standard_error\n";
  for (std::size_t i = 0; i < r.k_values.size(); ++i) {
    csv += std::to_string(r.k_values[i]) + ",";
    append_double(csv, r.accuracy[i]);
    csv += ",";
    append_double(csv, r.standard_error[i]);
    csv += "\n";
  }
  emit(c.out_dir / "classification.csv", csv);
  emit(c.out_dir / "confusion.csv", confusion_csv(r.best.confusion));
  emit(c.out_dir / "confusion.svg",
       svg_confusion(r.best.confusion, "K-NN confusion, k=" + std::to_string(r.best_k) + ", accuracy " +
                                           format_double(r.best.accuracy)));
  std::printf("classification: best k=%d accuracy %.4f +- %.4f\n", r.best_k, r.best.accuracy,
              r.best.standard_error);
}

void cmd_train(const PipelineConfig& c) {
  require_file(c.dataset, "dataset");
  prepare_parent(c.checkpoint, "checkpoint");
  const DatasetFile data = load_dataset(c.dataset);
  const int n = data.spec.n_states;
  Eigen::MatrixXd x, t;
  regression_matrices(data.records, n, x, t);
  MlpArchitecture arch;
  arch.input_dim = static_cast<int>(x.rows());
  arch.hidden_dims = c.experiment.hidden_dims;
  arch.output_dim = MlpArchitecture::outputs_for_states(n);
  const int every = std::max(1, c.experiment.train.epochs / 10);
  const TrainResult r = mlp_train(x, t, arch, c.experiment.train, [&](int epoch, double tl, double vl) {
    if ((epoch + 1) % every == 0)
      log_line("epoch " + std::to_string(epoch + 1) + " train " + format_double(tl) + " val " + format_double(vl));
  });
  checkpoint_save(r.params, r.standardizer, c.checkpoint);
  log_line("wrote " + c.checkpoint.string() + " (best epoch " + std::to_string(r.best_epoch + 1) + ")");
  std::string csv = "epoch,train_loss,validation_loss\n";
  for (std::size_t i = 0; i < r.train_loss.size(); ++i) {
    csv += std::to_string(i + 1) + ",";
    append_double(csv, r.train_loss[i]);
    csv += ",";
    append_double(csv, r.validation_loss[i]);
    csv += "\n";
  }
  fs::path loss = c.checkpoint;
  loss += ".loss.csv";
  emit(loss, csv);
}

void cmd_eval(const PipelineConfig& c) {
  const fs::path test_path = c.test_dataset.empty() ? c.dataset : c.test_dataset;
  require_file(c.checkpoint, "checkpoint");
  require_file(test_path, c.test_dataset.empty() ? "dataset" : "test_dataset");
  prepare_dir(c.out_dir, "out_dir");
  const Checkpoint model = checkpoint_load(c.checkpoint);
  const DatasetFile data = load_dataset(test_path);
  const int n = data.spec.n_states;
  require_states(model, n);
  const std::vector<ModelPrediction> preds = predict_all(model, data.records);
  const RegressionReport r = evaluate_regression(preds, data.records, n, data.spec.h_max, gamma_range_of(data.spec));
  write_regression(c.out_dir, "eval-" + ntag(n), r);
  std::printf("eval N=%d: MRE(H) %.4f restricted %.4f MAE %.4g | MRE(gamma) %.4f restricted %.4f MAE %.4g\n", n,
              r.h.mre, r.h.restricted_mre, r.h.mae, r.gamma.mre, r.gamma.restricted_mre, r.gamma.mae);
}

void cmd_regress(const PipelineConfig& c) {
  prepare_dir(c.out_dir, "out_dir");
  prepare_dir(c.experiment.cache_dir, "cache_dir");
  for (int n : c.regression_n_values) {
    const RegressionRun run = run_regression_experiment(n, c.experiment);
    write_regression(c.out_dir, "regression-" + ntag(n), run.report);
    std::vector<double> epochs;
    for (std::size_t i = 0; i < run.train_loss.size(); ++i) epochs.push_back(static_cast<double>(i + 1));
    emit(c.out_dir / ("regression-" + ntag(n) + "-loss.svg"),
         svg_line_chart(epochs, {{"train", run.train_loss}, {"validation", run.validation_loss}},
                        {"Training loss, N=" + std::to_string(n), "epoch", "MSE (standardized)", false, true}));
    std::printf("regression N=%d: restricted MRE(H) %.4f MRE(gamma) %.4f\n", n, run.report.h.restricted_mre,
                run.report.gamma.restricted_mre);
  }
}

std::string sweep_csv(const SweepReport& s) {
  std::string csv =
      "gamma_bar,mre_h,restricted_mre_h,mae_h,mre_gamma,restricted_mre_gamma,mae_gamma\n";
  for (std::size_t i = 0; i < s.gamma_bars.size(); ++i) {
    const RegressionReport& r = s.reports[i];
    for (double v : {s.gamma_bars[i], r.h.mre, r.h.restricted_mre, r.h.mae, r.gamma.mre, r.gamma.restricted_mre}) {
      append_double(csv, v);
      csv += ",";
    }
    append_double(csv, r.gamma.mae);
    csv += "\n";
  }
  return csv;
}

void cmd_sweep(const PipelineConfig& c) {
  prepare_dir(c.out_dir, "out_dir");
  prepare_dir(c.experiment.cache_dir, "cache_dir");
  const int n = c.sweep_n_states;
  const SweepReport s = run_dephasing_sweep(n, c.experiment.sweep_gamma_bars, c.experiment);
  emit(c.out_dir / ("sweep-" + ntag(n) + ".csv"), sweep_csv(s));
  Series h{"MRE(H)", {}}, g{"MRE(gamma)", {}};
  for (const RegressionReport& r : s.reports) {
    h.values.push_back(r.h.restricted_mre);
    g.values.push_back(r.gamma.restricted_mre);
  }
  emit(c.out_dir / ("sweep-" + ntag(n) + ".svg"),
       svg_line_chart(s.gamma_bars, {h, g},
                      {"Restricted MRE vs mean dephasing, N=" + std::to_string(n), "mean dephasing rate (MHz)", "MRE",
                       true, true}));
}

void append_report_row(std::string& csv, const std::string& label, const RegressionReport& r) {
  csv += label + ",";
  for (double v : {r.h.mre, r.h.restricted_mre, r.h.mae, r.gamma.mre, r.gamma.restricted_mre}) {
    append_double(csv, v);
    csv += ",";
  }
  append_double(csv, r.gamma.mae);
  csv += "\n";
}

void cmd_case_study(const PipelineConfig& c) {
  prepare_dir(c.out_dir, "out_dir");
  prepare_dir(c.experiment.cache_dir, "cache_dir");
  for (int n : c.case_study_n_values) {
    const CaseStudyReport s = run_coupling_case_study(n, c.experiment);
    std::string csv = "run,mre_h,restricted_mre_h,mae_h,mre_gamma,restricted_mre_gamma,mae_gamma\n";
    std::vector<std::string> cats;
    Series single{"single case", {}}, mixed{"mixed training", {}};
    for (std::size_t i = 0; i < s.case_ids.size(); ++i) {
      const std::string id = std::to_string(s.case_ids[i]);
      append_report_row(csv, "case" + id, s.per_case[i]);
      append_report_row(csv, "mixed-case" + id, s.mixed_per_case[i]);
      cats.push_back("case " + id);
      single.values.push_back(s.per_case[i].h.restricted_mre);
      mixed.values.push_back(s.mixed_per_case[i].h.restricted_mre);
    }
    append_report_row(csv, "mixed-all", s.mixed_all);
    append_report_row(csv, "mixed-seen", s.mixed_seen);
    append_report_row(csv, "mixed-unseen", s.mixed_unseen);
    emit(c.out_dir / ("case-study-" + ntag(n) + ".csv"), csv);
    emit(c.out_dir / ("case-study-" + ntag(n) + ".svg"),
         svg_bar_chart(cats, {single, mixed},
                       {"Restricted MRE(H) by coupling case, N=" + std::to_string(n), "coupling case", "MRE", false,
                        false}));
  }
}

void cmd_trajectory(const PipelineConfig& c) {
  const ExperimentConfig& e = c.experiment;
  if (c.trajectory_points < 2) throw ConfigError("config key 'trajectory_points' must be at least 2");
  if (!(c.trajectory_t_max > 0)) throw ConfigError("config key 'trajectory_t_max' must be positive");
  prepare_dir(c.out_dir, "out_dir");
  Rng rng(c.trajectory_seed);
  const EffectiveModel model = c.gamma_mean
                                   ? sample_model_with_mean_gamma(rng, c.n_states, e.h_max, *c.gamma_mean)
                                   : sample_model(rng, c.n_states, e.h_max, e.gamma_max);
  const CouplingCase cc =
      standard_case(e.coupling_case_ids.front(), e.coupling_seed, e.coupling_j, e.coupling_r_min, e.coupling_r_max);
  const OutputCouplingSet set = generate_coupling_set(cc, c.n_states, e.q_count);
  std::vector<double> times(static_cast<std::size_t>(c.trajectory_points));
  for (int i = 0; i < c.trajectory_points; ++i) times[i] = c.trajectory_t_max * i / (c.trajectory_points - 1);
  const Eigen::MatrixXd pops = populations_trajectory(model, set.row(0), DensityMatrix::basis_state(
                                                                              c.n_states + 1,
                                                                              initial_state_index(c.n_states)),
                                                      times);
  emit(c.out_dir / ("trajectory-" + ntag(c.n_states) + ".csv"), trajectory_csv(times, pops));
  std::vector<Series> series;
  for (Eigen::Index k = 0; k < pops.cols(); ++k) {
    Series s{k + 1 == pops.cols() ? std::string("out") : "state " + std::to_string(k), {}};
    for (Eigen::Index i = 0; i < pops.rows(); ++i) s.values.push_back(pops(i, k));
    series.push_back(std::move(s));
  }
  emit(c.out_dir / ("trajectory-" + ntag(c.n_states) + ".svg"),
       svg_line_chart(times, series,
                      {"Populations, N=" + std::to_string(c.n_states), "time (us)", "population", false, false}));
}

void cmd_full_pipeline(const PipelineConfig& c) {
  stage("trajectory", [&] { cmd_trajectory(c); });
  stage("gen-couplings", [&] { cmd_gen_couplings(c); });
  stage("classify", [&] { cmd_classify(c); });
  stage("regress", [&] { cmd_regress(c); });
  stage("sweep-dephasing", [&] { cmd_sweep(c); });
  stage("case-study", [&] { cmd_case_study(c); });
  emit(c.out_dir / "config.used", dump_config(c));
}

void cmd_show_config(const PipelineConfig& c) {
  std::cout << dump_config(c);
}

void cmd_keys() {
  for (const auto& [k, d] : config_keys()) std::cout << k << "\t" << d << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmodel: learn effective open-system models from output-state populations"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file, profile;
  std::vector<std::string> overrides;
  int workers = 0;
  app.add_option("-c,--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "override one key, e.g. --set epochs=200");
  app.add_option("-p,--profile", profile, "preset: default, full or smoke");
  app.add_option("-j,--workers", workers, "threads for data generation (default: all cores)");

  using Command = std::function<void(const PipelineConfig&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"gen-couplings", "write the output-coupling sets and their statistics", cmd_gen_couplings},
      {"gen-data", "simulate a dataset of population feature vectors", cmd_gen_data},
      {"classify", "K-NN classification of the state count", cmd_classify},
      {"train", "fit the regression network on a dataset", cmd_train},
      {"eval", "score a checkpoint on a dataset", cmd_eval},
      {"regress", "train and test the regression for each configured N", cmd_regress},
      {"sweep-dephasing", "regression across mean dephasing rates", cmd_sweep},
      {"case-study", "regression across output-coupling cases, single and mixed", cmd_case_study},
      {"trajectory", "population dynamics of one sampled model", cmd_trajectory},
      {"full-pipeline", "every stage end to end", cmd_full_pipeline},
      {"show-config", "print the resolved configuration", cmd_show_config},
  };
  std::map<CLI::App*, Command> handlers;
  for (const auto& [name, help, fn] : commands) handlers[app.add_subcommand(name, help)] = fn;
  CLI::App* keys = app.add_subcommand("keys", "list configuration keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::kConfig);
  }

  try {
    if (keys->parsed()) {
      cmd_keys();
      return 0;
    }
    KeyValues kv;
    if (!config_file.empty()) kv = parse_key_values(read_file(config_file));
    if (!profile.empty()) kv.emplace_back("profile", profile);
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
      kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    PipelineConfig config = build_config(kv);
    if (workers > 0) config.experiment.workers = workers;
    if (config.experiment.workers <= 0) throw ConfigError("config key 'workers' must be positive");
    config.experiment.log = log_line;
    for (const auto& [sub, fn] : handlers) {
      if (sub->parsed()) stage(sub->get_name(), [&] { fn(config); });
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "qmodel: error: %s\n", e.what());
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qmodel: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
