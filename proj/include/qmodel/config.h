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

#ifndef QMODEL_CONFIG_H_
#define QMODEL_CONFIG_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmodel/experiments.h"

namespace qmodel {

/// Every setting of the pipeline as one flat record. Read from `key = value`
/// files; command-line overrides are applied on top.
struct PipelineConfig {
  std::string profile = "default";
  ExperimentConfig experiment;

  // Single-dataset commands (gen-data, train, eval, trajectory).
  int n_states = 2;
  int record_count = 1000;
  std::optional<double> gamma_mean;
  std::vector<int> regression_n_values{2, 3, 4};
  std::vector<int> case_study_n_values{2, 3};
  int sweep_n_states = 3;

  std::filesystem::path out_dir = "qmodel-out";
  std::filesystem::path dataset;
  std::filesystem::path test_dataset;
  std::filesystem::path checkpoint;

  double trajectory_t_max = 0.5;
  int trajectory_points = 101;
  std::uint64_t trajectory_seed = 1;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError with
/// the line number on malformed lines.
KeyValues parse_key_values(const std::string& text);

/// Applies `profile` first (wherever it appears), then every other pair in
/// order. Unknown keys and unparsable values throw ConfigError naming the key.
PipelineConfig build_config(const KeyValues& values);

/// Presets: "default" (paper scale), "paper" (alias) and "smoke" (tiny CI run).
void apply_profile(PipelineConfig& config, const std::string& profile);

/// Documented key list, one "key: description" per entry.
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Canonical `key = value` dump that build_config reads back unchanged.
std::string dump_config(const PipelineConfig& config);

}  // namespace qmodel

#endif  // QMODEL_CONFIG_H_
