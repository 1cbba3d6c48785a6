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

#include "qmodel/metrics.h"

#include <algorithm>
#include <cmath>

#include "qmodel/error.h"

namespace qmodel {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* who) {
  if (a != b) throw InvalidArgument(std::string(who) + ": prediction and actual lengths differ");
}

ParameterErrors family_errors(const std::vector<std::vector<double>>& pred,
                              const std::vector<std::vector<double>>& actual, double range) {
  ParameterErrors e;
  double mre_sum = 0, restricted_sum = 0, abs_sum = 0;
  long mre_count = 0, restricted_count = 0;
  std::vector<double> flat_pred, flat_actual;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    const RelativeError all = mre(pred[r], actual[r]);
    const RelativeError restricted = mre(pred[r], actual[r], kRestrictedMreFloor);
    e.zero_actual_excluded += static_cast<long>(all.excluded);
    e.restricted_excluded += static_cast<long>(restricted.excluded);
    if (all.used > 0) {
      mre_sum += all.value;
      ++mre_count;
    }
    if (restricted.used > 0) {
      restricted_sum += restricted.value;
      ++restricted_count;
    }
    for (std::size_t i = 0; i < pred[r].size(); ++i) abs_sum += std::abs(pred[r][i] - actual[r][i]);
    e.entries += static_cast<long>(pred[r].size());
    flat_pred.insert(flat_pred.end(), pred[r].begin(), pred[r].end());
    flat_actual.insert(flat_actual.end(), actual[r].begin(), actual[r].end());
  }
  e.mre = mre_count ? mre_sum / mre_count : 0.0;
  e.restricted_mre = restricted_count ? restricted_sum / restricted_count : 0.0;
  e.mae = e.entries ? abs_sum / e.entries : 0.0;
  e.bins = bin_errors(flat_pred, flat_actual, range);
  return e;
}

}  // namespace

RelativeError mre(std::span<const double> pred, std::span<const double> actual, double floor) {
  check_lengths(pred.size(), actual.size(), "mre");
  RelativeError r;
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(actual[i] > 0) || actual[i] < floor) {
      ++r.excluded;
      continue;
    }
    sum += std::abs(pred[i] - actual[i]) / actual[i];
    ++r.used;
  }
  r.value = r.used ? sum / static_cast<double>(r.used) : 0.0;
  return r;
}

double mae(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred.size(), actual.size(), "mae");
  if (pred.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
  return sum / static_cast<double>(pred.size());
}

std::vector<ErrorBin> bin_errors(std::span<const double> pred, std::span<const double> actual, double range,
                                 int bins) {
  check_lengths(pred.size(), actual.size(), "bin_errors");
  if (!(range > 0) || bins < 1) throw InvalidArgument("bin_errors: need positive range and bin count");
  std::vector<ErrorBin> out(static_cast<std::size_t>(bins));
  std::vector<long> rel_count(out.size(), 0);
  const double width = range / bins;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = b * width;
    out[static_cast<std::size_t>(b)].hi = (b + 1) * width;
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int b = std::clamp(static_cast<int>(std::floor(actual[i] / width)), 0, bins - 1);
    ErrorBin& bin = out[static_cast<std::size_t>(b)];
    const double err = std::abs(pred[i] - actual[i]);
    ++bin.count;
    bin.mae += err;
    if (actual[i] > 0) {
      bin.mre += err / actual[i];
      ++rel_count[static_cast<std::size_t>(b)];
    }
  }
  for (std::size_t b = 0; b < out.size(); ++b) {
    if (out[b].count) out[b].mae /= static_cast<double>(out[b].count);
    if (rel_count[b]) out[b].mre /= static_cast<double>(rel_count[b]);
  }
  return out;
}

RegressionReport evaluate_regression(std::span<const ModelPrediction> predictions,
                                     std::span<const Record> records, int n_states, double h_range,
                                     double gamma_range) {
  if (predictions.size() != records.size())
    throw InvalidArgument("evaluate_regression: prediction count differs from record count");
  std::vector<std::vector<double>> ph, ah, pg, ag;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const ModelPrediction& p = predictions[r];
    if (p.h.rows() != n_states || p.gamma.size() != n_states)
      throw InvalidArgument("evaluate_regression: prediction has the wrong N");
    std::vector<double> h(static_cast<std::size_t>(n_states * n_states));
    for (int a = 0; a < n_states; ++a)
      for (int b = 0; b < n_states; ++b) h[static_cast<std::size_t>(a * n_states + b)] = p.h(a, b);
    ph.push_back(std::move(h));
    ah.push_back(records[r].label_h);
    pg.emplace_back(p.gamma.data(), p.gamma.data() + n_states);
    ag.push_back(records[r].label_gamma);
  }
  RegressionReport rep;
  rep.n_states = n_states;
  rep.realizations = static_cast<long>(records.size());
  rep.h = family_errors(ph, ah, h_range);
  rep.gamma = family_errors(pg, ag, gamma_range);
  return rep;
}

}  // namespace qmodel
