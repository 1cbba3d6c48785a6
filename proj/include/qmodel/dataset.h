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

#ifndef QMODEL_DATASET_H_
#define QMODEL_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmodel/coupling.h"
#include "qmodel/lindblad.h"
#include "qmodel/random.h"

namespace qmodel {

inline constexpr int kDatasetFormatVersion = 1;

/// Everything needed to regenerate a dataset bit for bit.
struct RealizationSpec {
  int n_states = 2;
  int q_count = 200;
  double t_star = 0.15;  // us
  double h_max = 1.0;    // MHz
  double gamma_max = 1.0;
  /// When set, dephasing rates are drawn Uniform(0, 2 * mean) instead.
  std::optional<double> gamma_mean_override;
  std::vector<int> coupling_case_ids{3};
  double coupling_j = 50.0;
  double coupling_r_min = 0.5;
  double coupling_r_max = 3.0;
  std::uint64_t coupling_seed = 20240601;
  std::uint64_t master_seed = 1;
  int record_count = 1;

  void validate() const;
  bool operator==(const RealizationSpec&) const = default;
};

/// Coupling sets for the spec's cases, in coupling_case_ids order. Depends
/// only on the coupling fields, n_states and q_count, so training and test
/// specs that differ in master_seed share them.
std::vector<OutputCouplingSet> coupling_sets_for(const RealizationSpec& spec);

struct Record {
  int record_id = 0;
  int coupling_case_id = 0;
  std::vector<double> label_h;  // N*N, row-major, MHz
  std::vector<double> label_gamma;
  std::vector<double> features;  // P(q), q = 0..Q-1

  bool operator==(const Record&) const = default;
};

struct DatasetFile {
  RealizationSpec spec;
  std::vector<OutputCouplingSet> coupling_sets;
  std::vector<Record> records;

  int n_states() const { return spec.n_states; }
  int q_count() const { return spec.q_count; }
};

EffectiveModel sample_model(Rng& rng, int n_states, double h_max, double gamma_max);
EffectiveModel sample_model_with_mean_gamma(Rng& rng, int n_states, double h_max, double gamma_bar);

/// P(q) = P_out(t_star) for every row q of the coupling set, starting from
/// |initial_state_index(N)>.
std::vector<double> generate_record(const EffectiveModel& model, const OutputCouplingSet& couplings,
                                    double t_star);

/// Record `index` of the dataset described by spec. Pure in (spec, index).
Record make_record(const RealizationSpec& spec, std::span<const OutputCouplingSet> coupling_sets,
                   int index);

/// Parallel map over record indices; output is independent of `workers`.
DatasetFile generate_dataset(const RealizationSpec& spec, int workers = 1);

/// JSON Lines: a metadata line followed by one record per line.
std::string serialize_dataset(const DatasetFile& file);
DatasetFile parse_dataset(std::istream& in);

/// Writes to a temporary file and renames it over `path`.
void save_dataset(const DatasetFile& file, const std::filesystem::path& path);
DatasetFile load_dataset(const std::filesystem::path& path);

/// Ground-truth model carried by a record.
EffectiveModel record_model(const Record& record, int n_states);

}  // namespace qmodel

#endif  // QMODEL_DATASET_H_
