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

#ifndef QMODEL_EXPERIMENTS_H_
#define QMODEL_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmodel/dataset.h"
#include "qmodel/knn.h"
#include "qmodel/metrics.h"
#include "qmodel/mlp.h"

namespace qmodel {

using Logger = std::function<void(const std::string&)>;

/// Settings shared by the experiment drivers.
struct ExperimentConfig {
  // Measurement protocol and model sampling.
  int q_count = 200;
  double t_star = 0.15;
  double h_max = 1.0;
  double gamma_max = 1.0;
  std::vector<int> coupling_case_ids{3};
  double coupling_j = 50.0;
  double coupling_r_min = 0.5;
  double coupling_r_max = 3.0;
  std::uint64_t coupling_seed = 20240601;
  std::uint64_t master_seed = 1;

  // Classification.
  std::vector<int> classify_n_values{2, 3, 4, 5};
  int classify_train_per_n = 2500;
  int classify_test_per_n = 300;
  std::vector<int> knn_k_values{1, 3, 5, 7};

  // Regression.
  int train_records = 10000;
  int test_records = 1000;
  std::vector<int> hidden_dims{1024, 512, 256};
  TrainConfig train;

  // Dephasing sweep and coupling-case study.
  std::vector<double> sweep_gamma_bars{1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  std::vector<int> case_study_cases{1, 2, 3, 4, 5, 6};
  std::vector<int> mixed_train_cases{4, 5, 6};

  int workers = 1;
  /// When set, datasets and trained checkpoints are stored here and reused
  /// when their full specification matches.
  std::filesystem::path cache_dir;
  Logger log;
};

/// Dataset spec for one experiment stage. `purpose` separates the random
/// streams of different stages (training vs test, different N, ...).
RealizationSpec stage_spec(const ExperimentConfig& config, int n_states, std::vector<int> cases,
                           int records, const std::string& purpose,
                           std::optional<double> gamma_bar = std::nullopt);

/// Generates the dataset, or loads it from the cache when present.
DatasetFile obtain_dataset(const RealizationSpec& spec, const ExperimentConfig& config);

std::vector<LabelledFeatures> labelled(const DatasetFile& file);

struct ClassificationResult {
  std::vector<int> k_values;
  std::vector<double> accuracy;  // per k
  std::vector<double> standard_error;
  int best_k = 0;
  KnnEvaluation best;
  long train_size = 0;
};

ClassificationResult run_classification_experiment(const ExperimentConfig& config);

struct RegressionRun {
  RegressionReport report;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int best_epoch = -1;
  Checkpoint model;
};

/// Feature matrix (Q x D) and target matrix ((N^2 + N) x D) of a record set.
void regression_matrices(std::span<const Record> records, int n_states, Eigen::MatrixXd& features,
                         Eigen::MatrixXd& targets);

/// Trains on `train` and scores on `test`; uses the checkpoint cache when
/// enabled. `tag` names the cached checkpoint.
RegressionRun train_and_evaluate(std::span<const Record> train, std::span<const Record> test, int n_states,
                                 double gamma_range, const ExperimentConfig& config, const std::string& tag);

std::vector<ModelPrediction> predict_all(const Checkpoint& model, std::span<const Record> records);

RegressionRun run_regression_experiment(int n_states, const ExperimentConfig& config,
                                        std::optional<double> gamma_bar = std::nullopt);

struct SweepReport {
  std::vector<double> gamma_bars;
  std::vector<RegressionReport> reports;
};

SweepReport run_dephasing_sweep(int n_states, const std::vector<double>& gamma_bar_grid,
                                const ExperimentConfig& config);

struct CaseStudyReport {
  int n_states = 0;
  std::vector<int> case_ids;
  std::vector<RegressionReport> per_case;  // trained and tested on one case
  std::vector<int> mixed_train_cases;
  RegressionReport mixed_all;     // test records from every case
  RegressionReport mixed_seen;    // test cases included in training
  RegressionReport mixed_unseen;  // test cases never seen in training
  std::vector<RegressionReport> mixed_per_case;
};

CaseStudyReport run_coupling_case_study(int n_states, const ExperimentConfig& config);

}  // namespace qmodel

#endif  // QMODEL_EXPERIMENTS_H_
