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

#include "qmodel/mlp.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstring>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "qmodel/error.h"
#include "qmodel/io.h"
#include "qmodel/random.h"

namespace qmodel {
namespace {

using nlohmann::json;

// Activations and pre-activations of one batch; index 0 of `act` is the input.
struct Workspace {
  std::vector<Eigen::MatrixXd> act;
  std::vector<Eigen::MatrixXd> pre;
  Eigen::MatrixXd delta;
  Eigen::MatrixXd delta_prev;
};

void forward_into(const MlpParams& p, const Eigen::MatrixXd& inputs, Workspace& ws) {
  const std::size_t layers = p.layers.size();
  ws.act.resize(layers + 1);
  ws.pre.resize(layers + 1);
  ws.act[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    const DenseLayer& layer = p.layers[l];
    Eigen::MatrixXd& z = ws.pre[l + 1];
    z.resize(layer.weight.rows(), inputs.cols());
    z.noalias() = layer.weight * ws.act[l];
    z.colwise() += layer.bias;
    if (l + 1 < layers) {
      ws.act[l + 1] = z.cwiseMax(0.0);
    } else {
      ws.act[l + 1] = z;
    }
  }
}

// Gradients of mean((output - targets)^2) given a completed forward pass.
double backward_into(const MlpParams& p, const Eigen::MatrixXd& targets, Workspace& ws, MlpGradients& grads) {
  const std::size_t layers = p.layers.size();
  const Eigen::MatrixXd& out = ws.act[layers];
  const double scale = 1.0 / static_cast<double>(out.size());
  ws.delta = out - targets;
  const double loss = ws.delta.squaredNorm() * scale;
  ws.delta *= 2.0 * scale;

  grads.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    DenseLayer& g = grads[l];
    g.weight.resize(p.layers[l].weight.rows(), p.layers[l].weight.cols());
    g.weight.noalias() = ws.delta * ws.act[l].transpose();
    g.bias = ws.delta.rowwise().sum();
    if (l > 0) {
      ws.delta_prev.resize(p.layers[l].weight.cols(), ws.delta.cols());
      ws.delta_prev.noalias() = p.layers[l].weight.transpose() * ws.delta;
      ws.delta_prev.array() *= (ws.pre[l].array() > 0.0).cast<double>();
      ws.delta.swap(ws.delta_prev);
    }
  }
  return loss;
}

void check_input_rows(const MlpParams& p, Eigen::Index rows, const char* who) {
  if (rows != p.arch.input_dim)
    throw InvalidArgument(std::string(who) + ": input has " + std::to_string(rows) + " features, network expects " +
                          std::to_string(p.arch.input_dim));
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const int> cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  return out;
}

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.index(i));
    std::swap(v[i - 1], v[j]);
  }
}

double mean_squared_error(const MlpParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
  if (x.cols() == 0) return 0.0;
  return (mlp_forward_batch(p, x) - t).squaredNorm() / static_cast<double>(t.size());
}

// --- checkpoint encoding ---

constexpr char kMagic[8] = {'Q', 'M', 'O', 'D', 'E', 'L', 'C', 'K'};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_values(std::string& out, const double* data, Eigen::Index n) {
  out.append(reinterpret_cast<const char*>(data), static_cast<std::size_t>(n) * sizeof(double));
}

class Reader {
 public:
  Reader(std::string_view bytes, std::string path) : bytes_(bytes), path_(std::move(path)) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void values(double* dst, Eigen::Index n) {
    const std::string_view s = take(static_cast<std::size_t>(n) * sizeof(double));
    std::memcpy(dst, s.data(), s.size());
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("checkpoint " + path_ + ": " + what);
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("truncated at byte " + std::to_string(pos_));
  }
  std::string_view bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

int MlpArchitecture::n_states() const {
  for (int n = 1; n * n + n <= output_dim; ++n) {
    if (n * n + n == output_dim) return n;
  }
  return -1;
}

void MlpArchitecture::validate() const {
  if (input_dim < 1 || output_dim < 1) throw InvalidArgument("architecture: dimensions must be >= 1");
  for (int h : hidden_dims) {
    if (h < 1) throw InvalidArgument("architecture: hidden layer widths must be >= 1");
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

AdamState AdamState::zeros_like(const MlpParams& params) {
  AdamState s;
  for (const auto& l : params.layers) {
    DenseLayer z{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())};
    s.first_moment.push_back(z);
    s.second_moment.push_back(std::move(z));
  }
  return s;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw InvalidArgument("train config: learning_rate must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
    throw InvalidArgument("train config: betas must lie in [0, 1)");
  if (!(epsilon > 0)) throw InvalidArgument("train config: epsilon must be positive");
  if (batch_size < 1) throw InvalidArgument("train config: batch_size must be >= 1");
  if (epochs < 1) throw InvalidArgument("train config: epochs must be >= 1");
  if (!(validation_fraction > 0 && validation_fraction < 1))
    throw InvalidArgument("train config: validation_fraction must lie in (0, 1)");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                               bool standardize_targets) {
  auto moments = [](const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
    const double n = static_cast<double>(m.cols());
    mean = m.rowwise().mean();
    sd = ((m.colwise() - mean).array().square().rowwise().sum() / n).sqrt().matrix();
    // Rounding leaves a constant row with a spread of a few ulps; dividing
    // by it would blow that noise up to unit scale.
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
      if (!(sd[i] > 64 * std::numeric_limits<double>::epsilon() * std::abs(mean[i]))) sd[i] = 1.0;
    }
  };
  if (features.cols() == 0) throw InvalidArgument("standardizer: no samples");
  Standardizer s;
  moments(features, s.feature_mean, s.feature_std);
  if (standardize_targets) {
    moments(targets, s.target_mean, s.target_std);
  } else {
    s.target_mean = Eigen::VectorXd::Zero(targets.rows());
    s.target_std = Eigen::VectorXd::Ones(targets.rows());
  }
  return s;
}

Eigen::MatrixXd Standardizer::transform_features(const Eigen::MatrixXd& features) const {
  return ((features.colwise() - feature_mean).array().colwise() / feature_std.array()).matrix();
}

Eigen::MatrixXd Standardizer::transform_targets(const Eigen::MatrixXd& targets) const {
  return ((targets.colwise() - target_mean).array().colwise() / target_std.array()).matrix();
}

Eigen::MatrixXd Standardizer::inverse_targets(const Eigen::MatrixXd& scaled) const {
  return ((scaled.array().colwise() * target_std.array()).matrix().colwise() + target_mean);
}

MlpParams mlp_init(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  MlpParams p;
  p.arch = arch;
  Rng rng(seed);
  int fan_in = arch.input_dim;
  std::vector<int> widths = arch.hidden_dims;
  widths.push_back(arch.output_dim);
  for (int width : widths) {
    DenseLayer l{Eigen::MatrixXd(width, fan_in), Eigen::VectorXd::Zero(width)};
    const double sd = std::sqrt(2.0 / fan_in);
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = sd * rng.normal();
    }
    p.layers.push_back(std::move(l));
    fan_in = width;
  }
  return p;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input_rows(params, inputs.rows(), "mlp_forward");
  Workspace ws;
  forward_into(params, inputs, ws);
  return std::move(ws.act.back());
}

Eigen::VectorXd mlp_forward(const MlpParams& params, std::span<const double> features) {
  const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  return mlp_forward_batch(params, Eigen::MatrixXd(x));
}

LossAndGradients mlp_backward(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::MatrixXd& targets) {
  check_input_rows(params, inputs.rows(), "mlp_backward");
  if (targets.rows() != params.arch.output_dim || targets.cols() != inputs.cols())
    throw InvalidArgument("mlp_backward: target shape does not match network output");
  Workspace ws;
  forward_into(params, inputs, ws);
  LossAndGradients out;
  out.loss = backward_into(params, targets, ws, out.gradients);
  return out;
}

void adam_step(MlpParams& params, const MlpGradients& grads, AdamState& state, const TrainConfig& config) {
  if (grads.size() != params.layers.size() || state.first_moment.size() != params.layers.size())
    throw InvalidArgument("adam_step: layer count mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 / (1.0 - std::pow(config.beta1, t));
  const double c2 = 1.0 / (1.0 - std::pow(config.beta2, t));
  const double b1 = config.beta1, b2 = config.beta2, lr = config.learning_rate, eps = config.epsilon;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    if (param.size() != g.size()) throw InvalidArgument("adam_step: gradient shape mismatch");
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    param.array() -= lr * (m.array() * c1) / ((v.array() * c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads[l].weight, state.first_moment[l].weight, state.second_moment[l].weight);
    update(params.layers[l].bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
  }
}

TrainResult mlp_train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                      const MlpArchitecture& arch, const TrainConfig& config, const EpochCallback& on_epoch) {
  arch.validate();
  config.validate();
  const int total = static_cast<int>(features.cols());
  if (total < 1) throw InvalidArgument("mlp_train: empty dataset");
  if (features.rows() != arch.input_dim)
    throw InvalidArgument("mlp_train: feature length " + std::to_string(features.rows()) +
                          " does not match input_dim " + std::to_string(arch.input_dim));
  if (targets.rows() != arch.output_dim || targets.cols() != total)
    throw InvalidArgument("mlp_train: target shape does not match architecture output_dim " +
                          std::to_string(arch.output_dim));

  Rng rng(config.seed);
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  int n_val = total >= 2 ? static_cast<int>(std::lround(config.validation_fraction * total)) : 0;
  if (total >= 2) n_val = std::clamp(n_val, 1, total - 1);
  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  TrainResult result;
  const Eigen::MatrixXd raw_train_x = gather_columns(features, train_idx);
  const Eigen::MatrixXd raw_train_t = gather_columns(targets, train_idx);
  result.standardizer = Standardizer::fit(raw_train_x, raw_train_t, config.standardize_targets);
  const Eigen::MatrixXd train_x = result.standardizer.transform_features(raw_train_x);
  const Eigen::MatrixXd train_t = result.standardizer.transform_targets(raw_train_t);
  const Eigen::MatrixXd val_x = result.standardizer.transform_features(gather_columns(features, val_idx));
  const Eigen::MatrixXd val_t = result.standardizer.transform_targets(gather_columns(targets, val_idx));

  MlpParams params = mlp_init(arch, derive_seed(config.seed, 1));
  AdamState adam = AdamState::zeros_like(params);
  Workspace ws;
  MlpGradients grads;
  const int n_train = static_cast<int>(train_idx.size());
  std::vector<int> perm(static_cast<std::size_t>(n_train));
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::MatrixXd batch_x, batch_t;

  result.best_validation_loss = HUGE_VAL;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(perm, rng);
    double loss_sum = 0;
    for (int start = 0; start < n_train; start += config.batch_size) {
      const int stop = std::min(n_train, start + config.batch_size);
      const std::span<const int> cols(perm.data() + start, static_cast<std::size_t>(stop - start));
      batch_x = gather_columns(train_x, cols);
      batch_t = gather_columns(train_t, cols);
      forward_into(params, batch_x, ws);
      const double loss = backward_into(params, batch_t, ws, grads);
      if (!std::isfinite(loss)) throw TrainingError("training diverged: non-finite loss", epoch);
      loss_sum += loss * (stop - start);
      adam_step(params, grads, adam, config);
    }
    const double train_loss = loss_sum / n_train;
    const double val_loss = n_val > 0 ? mean_squared_error(params, val_x, val_t) : train_loss;
    if (!std::isfinite(val_loss)) throw TrainingError("training diverged: non-finite validation loss", epoch);
    result.train_loss.push_back(train_loss);
    result.validation_loss.push_back(val_loss);
    if (val_loss < result.best_validation_loss) {
      result.best_validation_loss = val_loss;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss);
  }
  return result;
}

ModelPrediction mlp_predict(const MlpParams& params, const Standardizer& standardizer,
                            std::span<const double> features) {
  const int n = params.arch.n_states();
  if (n < 1) throw InvalidArgument("mlp_predict: output width is not N^2 + N");
  if (static_cast<Eigen::Index>(features.size()) != standardizer.feature_mean.size())
    throw InvalidArgument("mlp_predict: feature length does not match the standardizer");
  const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  const Eigen::MatrixXd scaled = standardizer.transform_features(Eigen::MatrixXd(x));
  const Eigen::VectorXd out = standardizer.inverse_targets(mlp_forward_batch(params, scaled));
  ModelPrediction pred{Eigen::MatrixXd(n, n), out.tail(n)};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) pred.h(a, b) = out[a * n + b];
  }
  return pred;
}

void checkpoint_save(const MlpParams& params, const Standardizer& standardizer,
                     const std::filesystem::path& path) {
  json header;
  header["format"] = "qmodel-checkpoint";
  header["input_dim"] = params.arch.input_dim;
  header["hidden_dims"] = params.arch.hidden_dims;
  header["output_dim"] = params.arch.output_dim;
  json shapes = json::array();
  for (const auto& l : params.layers) shapes.push_back({l.weight.rows(), l.weight.cols()});
  header["layer_shapes"] = shapes;
  header["payload_order"] = "feature_mean, feature_std, target_mean, target_std, then per layer weight (column-major) and bias";
  const std::string header_text = header.dump();

  std::string payload;
  put_values(payload, standardizer.feature_mean.data(), standardizer.feature_mean.size());
  put_values(payload, standardizer.feature_std.data(), standardizer.feature_std.size());
  put_values(payload, standardizer.target_mean.data(), standardizer.target_mean.size());
  put_values(payload, standardizer.target_std.data(), standardizer.target_std.size());
  for (const auto& l : params.layers) {
    put_values(payload, l.weight.data(), l.weight.size());
    put_values(payload, l.bias.data(), l.bias.size());
  }

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  out += payload;
  put<std::uint64_t>(out, fnv1a(payload));
  write_file_atomic(path, out);
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path.string());
  if (r.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) r.fail("bad magic, not a qmodel checkpoint");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    r.fail("version " + std::to_string(version) + " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  const auto header_len = r.get<std::uint64_t>();
  if (header_len > r.remaining()) r.fail("header length exceeds file size");
  json header;
  Checkpoint ck;
  try {
    header = json::parse(r.take(header_len));
    ck.params.arch.input_dim = header.at("input_dim").get<int>();
    ck.params.arch.hidden_dims = header.at("hidden_dims").get<std::vector<int>>();
    ck.params.arch.output_dim = header.at("output_dim").get<int>();
  } catch (const json::exception& e) {
    r.fail(std::string("header: ") + e.what());
  }
  try {
    ck.params.arch.validate();
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }

  const std::size_t payload_start = r.pos();
  const int in = ck.params.arch.input_dim, out = ck.params.arch.output_dim;
  ck.standardizer.feature_mean.resize(in);
  ck.standardizer.feature_std.resize(in);
  ck.standardizer.target_mean.resize(out);
  ck.standardizer.target_std.resize(out);
  r.values(ck.standardizer.feature_mean.data(), in);
  r.values(ck.standardizer.feature_std.data(), in);
  r.values(ck.standardizer.target_mean.data(), out);
  r.values(ck.standardizer.target_std.data(), out);
  int fan_in = in;
  std::vector<int> widths = ck.params.arch.hidden_dims;
  widths.push_back(out);
  for (int w : widths) {
    DenseLayer l{Eigen::MatrixXd(w, fan_in), Eigen::VectorXd(w)};
    r.values(l.weight.data(), l.weight.size());
    r.values(l.bias.data(), l.bias.size());
    ck.params.layers.push_back(std::move(l));
    fan_in = w;
  }
  const std::string_view payload(bytes.data() + payload_start, r.pos() - payload_start);
  const auto checksum = r.get<std::uint64_t>();
  if (r.remaining() != 0) r.fail("trailing bytes after checksum");
  if (checksum != fnv1a(payload)) r.fail("checksum mismatch, file is corrupted");
  return ck;
}

void require_states(const Checkpoint& checkpoint, int n_states) {
  const int have = checkpoint.params.arch.n_states();
  if (have != n_states)
    throw InvalidArgument("checkpoint regresses N = " + std::to_string(have) + " but the data has N = " +
                          std::to_string(n_states));
}

}  // namespace qmodel
