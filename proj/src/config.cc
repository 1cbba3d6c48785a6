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

#include "qmodel/config.h"

#include <charconv>
#include <functional>
#include <sstream>

#include "qmodel/error.h"
#include "qmodel/io.h"
#include "qmodel/parallel.h"

namespace qmodel {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) bad_value(key, v, "an unsigned integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) bad_value(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(static_cast<int>(to_int(key, s)));
  if (out.empty()) bad_value(key, v, "a nonempty comma-separated integer list");
  return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  if (out.empty()) bad_value(key, v, "a nonempty comma-separated number list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct Field {
  std::string key;
  std::string description;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define QM_INT(name, expr, desc)                                                                            \
  Field {                                                                                                   \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = static_cast<int>(to_int(name, v)); }, \
        [](const PipelineConfig& c) { return std::to_string(expr); }                                        \
  }
#define QM_U64(name, expr, desc)                                                                   \
  Field {                                                                                          \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = to_u64(name, v); },           \
        [](const PipelineConfig& c) { return std::to_string(expr); }                               \
  }
#define QM_DBL(name, expr, desc)                                                                   \
  Field {                                                                                          \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = to_double(name, v); },        \
        [](const PipelineConfig& c) { return format_double(expr); }                                \
  }
#define QM_INTS(name, expr, desc)                                                                  \
  Field {                                                                                          \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = to_int_list(name, v); },      \
        [](const PipelineConfig& c) { return join(expr); }                                         \
  }
#define QM_DBLS(name, expr, desc)                                                                  \
  Field {                                                                                          \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = to_double_list(name, v); },   \
        [](const PipelineConfig& c) { return join(expr); }                                         \
  }
#define QM_PATH(name, expr, desc)                                                                  \
  Field {                                                                                          \
    name, desc, [](PipelineConfig& c, const std::string& v) { expr = v; },                         \
        [](const PipelineConfig& c) { return expr.string(); }                                      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      Field{"profile", "preset applied before all other keys: default, full or smoke",
            [](PipelineConfig& c, const std::string& v) { c.profile = v; },
            [](const PipelineConfig& c) { return c.profile; }},
      QM_INT("n_states", c.n_states, "effective state count N for gen-data/train/eval/trajectory"),
      QM_INT("q_count", c.experiment.q_count, "coupling configurations Q per record"),
      QM_DBL("t_star", c.experiment.t_star, "measurement time in us"),
      QM_DBL("h_max", c.experiment.h_max, "upper bound of Hamiltonian matrix elements, MHz"),
      QM_DBL("gamma_max", c.experiment.gamma_max, "upper bound of dephasing rates, MHz"),
      Field{"gamma_mean", "mean dephasing rate for gen-data (empty: use gamma_max)",
            [](PipelineConfig& c, const std::string& v) {
              if (v.empty() || v == "none") {
                c.gamma_mean.reset();
              } else {
                c.gamma_mean = to_double("gamma_mean", v);
              }
            },
            [](const PipelineConfig& c) { return c.gamma_mean ? format_double(*c.gamma_mean) : std::string("none"); }},
      QM_INTS("coupling_cases", c.experiment.coupling_case_ids, "coupling case ids (1..6) used round-robin"),
      QM_DBL("coupling_j", c.experiment.coupling_j, "coupling strength J, MHz * length^alpha"),
      QM_DBL("coupling_r_min", c.experiment.coupling_r_min, "smallest output offset"),
      QM_DBL("coupling_r_max", c.experiment.coupling_r_max, "largest output offset"),
      QM_U64("coupling_seed", c.experiment.coupling_seed, "base seed of the coupling sets"),
      QM_U64("master_seed", c.experiment.master_seed, "base seed of all sampled models"),
      QM_INT("record_count", c.record_count, "records written by gen-data"),
      QM_INT("train_records", c.experiment.train_records, "training records D per regression run"),
      QM_INT("test_records", c.experiment.test_records, "fresh test records per regression run"),
      QM_INTS("classify_n_values", c.experiment.classify_n_values, "state counts in the classification task"),
      QM_INT("classify_train_per_n", c.experiment.classify_train_per_n, "training records per N for K-NN"),
      QM_INT("classify_test_per_n", c.experiment.classify_test_per_n, "test records per N for K-NN"),
      QM_INTS("knn_k", c.experiment.knn_k_values, "neighbour counts tried; the best is reported"),
      QM_INTS("hidden_dims", c.experiment.hidden_dims, "hidden layer widths"),
      QM_DBL("learning_rate", c.experiment.train.learning_rate, "ADAM step size"),
      QM_DBL("beta1", c.experiment.train.beta1, "ADAM first-moment decay"),
      QM_DBL("beta2", c.experiment.train.beta2, "ADAM second-moment decay"),
      QM_DBL("epsilon", c.experiment.train.epsilon, "ADAM denominator offset"),
      QM_INT("batch_size", c.experiment.train.batch_size, "mini-batch size"),
      QM_INT("epochs", c.experiment.train.epochs, "training epochs"),
      QM_DBL("validation_fraction", c.experiment.train.validation_fraction, "held-out share of training records"),
      QM_U64("train_seed", c.experiment.train.seed, "seed for initialisation, split and shuffling"),
      Field{"standardize_targets", "scale regression targets to unit variance during training",
            [](PipelineConfig& c, const std::string& v) {
              c.experiment.train.standardize_targets = to_bool("standardize_targets", v);
            },
            [](const PipelineConfig& c) { return std::string(c.experiment.train.standardize_targets ? "true" : "false"); }},
      QM_INTS("regression_n_values", c.regression_n_values, "state counts for the regression experiment"),
      QM_INT("sweep_n_states", c.sweep_n_states, "state count for the dephasing sweep"),
      QM_DBLS("sweep_gamma_bars", c.experiment.sweep_gamma_bars, "mean dephasing rates of the sweep, MHz"),
      QM_INTS("case_study_n_values", c.case_study_n_values, "state counts for the coupling-case study"),
      QM_INTS("case_study_cases", c.experiment.case_study_cases, "cases trained and tested one at a time"),
      QM_INTS("mixed_train_cases", c.experiment.mixed_train_cases, "cases pooled for the mixed training run"),
      QM_INT("workers", c.experiment.workers, "threads for data generation and K-NN"),
      QM_PATH("out_dir", c.out_dir, "directory receiving reports"),
      QM_PATH("cache_dir", c.experiment.cache_dir, "dataset/checkpoint cache for experiments (empty: off)"),
      QM_PATH("dataset", c.dataset, "dataset file (gen-data output, train/eval input)"),
      QM_PATH("test_dataset", c.test_dataset, "dataset scored by eval"),
      QM_PATH("checkpoint", c.checkpoint, "checkpoint file (train output, eval input)"),
      QM_DBL("trajectory_t_max", c.trajectory_t_max, "end time of the trajectory, us"),
      QM_INT("trajectory_points", c.trajectory_points, "time points in the trajectory"),
      QM_U64("trajectory_seed", c.trajectory_seed, "seed of the model shown by trajectory"),
  };
  return f;
}

#undef QM_INT
#undef QM_U64
#undef QM_DBL
#undef QM_INTS
#undef QM_DBLS
#undef QM_PATH

const Field& field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_profile(PipelineConfig& c, const std::string& profile) {
  if (profile == "default" || profile == "full") {
    c.profile = profile;
    return;
  }
  if (profile != "smoke") throw ConfigError("config key 'profile': unknown profile '" + profile + "'");
  c.profile = profile;
  ExperimentConfig& e = c.experiment;
  e.classify_train_per_n = 50;
  e.classify_test_per_n = 10;
  e.train_records = 200;
  e.test_records = 50;
  e.train.epochs = 50;
  e.hidden_dims = {64, 32, 16};
  e.sweep_gamma_bars = {1e-1, 1.0, 1e1};
  e.case_study_cases = {1, 4, 5, 6};
  c.record_count = 200;
  c.regression_n_values = {2};
  c.case_study_n_values = {2};
}

PipelineConfig build_config(const KeyValues& values) {
  PipelineConfig c;
  c.experiment.workers = default_workers();
  std::string profile = "default";
  for (const auto& [k, v] : values) {
    if (k == "profile") profile = v;
  }
  apply_profile(c, profile);
  for (const auto& [k, v] : values) {
    if (k == "profile") continue;
    field(k).set(c, v);
  }
  return c;
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const auto keys = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Field& f : fields()) out.emplace_back(f.key, f.description);
    return out;
  }();
  return keys;
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace qmodel
