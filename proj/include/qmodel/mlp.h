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

#ifndef QMODEL_MLP_H_
#define QMODEL_MLP_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmodel {

/// Fully connected regressor: ReLU hidden layers, linear output layer.
struct MlpArchitecture {
  int input_dim = 200;
  std::vector<int> hidden_dims{1024, 512, 256};
  int output_dim = 6;

  /// Output width for N^2 Hamiltonian entries plus N dephasing rates.
  static int outputs_for_states(int n_states) { return n_states * n_states + n_states; }
  /// Inverse of outputs_for_states; -1 when output_dim is not of that form.
  int n_states() const;
  void validate() const;
  bool operator==(const MlpArchitecture&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

struct MlpParams {
  MlpArchitecture arch;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
};

/// Same shapes as MlpParams::layers.
using MlpGradients = std::vector<DenseLayer>;

struct AdamState {
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;
  long step = 0;

  static AdamState zeros_like(const MlpParams& params);
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 64;
  int epochs = 1000;
  double validation_fraction = 0.1;
  std::uint64_t seed = 7;
  /// Scale each regression target to zero mean / unit variance over the
  /// training split. Targets of very different magnitude (e.g. large
  /// dephasing rates next to sub-MHz matrix elements) otherwise dominate the
  /// loss.
  bool standardize_targets = true;

  void validate() const;
};

/// Per-dimension affine maps fitted on the training split.
struct Standardizer {
  Eigen::VectorXd feature_mean, feature_std;
  Eigen::VectorXd target_mean, target_std;  // identity (0, 1) when targets are not standardised

  /// Columns of `samples` are examples.
  static Standardizer fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                          bool standardize_targets);
  Eigen::MatrixXd transform_features(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd transform_targets(const Eigen::MatrixXd& targets) const;
  Eigen::MatrixXd inverse_targets(const Eigen::MatrixXd& scaled) const;
};

/// He-normal weights (variance 2 / fan_in), zero biases.
MlpParams mlp_init(const MlpArchitecture& arch, std::uint64_t seed);

Eigen::VectorXd mlp_forward(const MlpParams& params, std::span<const double> features);
/// Columns of `inputs` are examples.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs);

struct LossAndGradients {
  double loss = 0;  // mean over samples and output dimensions
  MlpGradients gradients;
};

/// Exact gradients of the batch-mean squared error. ReLU'(0) = 0.
LossAndGradients mlp_backward(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::MatrixXd& targets);

/// One bias-corrected ADAM update.
void adam_step(MlpParams& params, const MlpGradients& grads, AdamState& state, const TrainConfig& config);

struct TrainResult {
  MlpParams params;  // snapshot at the best validation loss
  Standardizer standardizer;
  std::vector<double> train_loss;  // per epoch, sample-weighted mean over mini-batches
  std::vector<double> validation_loss;
  int best_epoch = -1;
  double best_validation_loss = 0;
};

using EpochCallback = std::function<void(int epoch, double train_loss, double validation_loss)>;

/// Mini-batch ADAM on standardised data. Columns of `features` / `targets`
/// are examples. The validation split is a seeded random subset.
TrainResult mlp_train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                      const MlpArchitecture& arch, const TrainConfig& config,
                      const EpochCallback& on_epoch = {});

struct ModelPrediction {
  Eigen::MatrixXd h;  // N x N, raw network output
  Eigen::VectorXd gamma;
};

ModelPrediction mlp_predict(const MlpParams& params, const Standardizer& standardizer,
                            std::span<const double> features);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  MlpParams params;
  Standardizer standardizer;
};

/// Binary container: magic "QMODELCK", u32 version, u64 header length, JSON
/// header (architecture and tensor shapes), little-endian f64 payload, u64
/// FNV-1a checksum of the payload.
void checkpoint_save(const MlpParams& params, const Standardizer& standardizer,
                     const std::filesystem::path& path);
Checkpoint checkpoint_load(const std::filesystem::path& path);
/// Throws InvalidArgument unless the checkpoint regresses an N-state model.
void require_states(const Checkpoint& checkpoint, int n_states);

}  // namespace qmodel

#endif  // QMODEL_MLP_H_
