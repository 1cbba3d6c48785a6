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

#ifndef QMODEL_METRICS_H_
#define QMODEL_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "qmodel/dataset.h"
#include "qmodel/mlp.h"

namespace qmodel {

/// Entries with actual value below this (MHz) are left out of the
/// restricted MRE.
inline constexpr double kRestrictedMreFloor = 0.1;
inline constexpr int kErrorBins = 10;

struct RelativeError {
  double value = 0;       // mean |pred - actual| / actual over used entries
  std::size_t used = 0;
  std::size_t excluded = 0;  // actual <= 0, or below the floor
};

/// Mean relative error of one realization. Entries whose actual value is
/// not positive, or is below `floor`, are excluded and counted.
RelativeError mre(std::span<const double> pred, std::span<const double> actual, double floor = 0.0);

/// Mean absolute error.
double mae(std::span<const double> pred, std::span<const double> actual);

struct ErrorBin {
  double lo = 0, hi = 0;
  long count = 0;
  double mre = 0;  // pooled over entries in the bin with actual > 0
  double mae = 0;
};

/// Errors for one parameter family (Hamiltonian entries or dephasing rates)
/// over a test set.
struct ParameterErrors {
  double mre = 0;             // mean over realizations of the per-realization MRE
  double restricted_mre = 0;  // same, entries with actual < kRestrictedMreFloor left out
  double mae = 0;
  long entries = 0;
  long zero_actual_excluded = 0;
  long restricted_excluded = 0;
  std::vector<ErrorBin> bins;
};

struct RegressionReport {
  int n_states = 0;
  long realizations = 0;
  ParameterErrors h;
  ParameterErrors gamma;
};

/// Equal-width bins over [0, range]; values at or beyond `range` fall in the
/// last bin.
std::vector<ErrorBin> bin_errors(std::span<const double> pred, std::span<const double> actual, double range,
                                 int bins = kErrorBins);

/// Compares predictions with the labels of `records` (same order).
RegressionReport evaluate_regression(std::span<const ModelPrediction> predictions,
                                     std::span<const Record> records, int n_states, double h_range,
                                     double gamma_range);

}  // namespace qmodel

#endif  // QMODEL_METRICS_H_
