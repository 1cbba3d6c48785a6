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

#include "qmodel/knn.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "qmodel/error.h"
#include "qmodel/parallel.h"

namespace qmodel {

KnnModel knn_fit(std::span<const LabelledFeatures> train, int k) {
  if (train.empty()) throw InvalidArgument("knn_fit: empty training set");
  const std::size_t q = train.front().features.size();
  if (k < 1 || k > static_cast<int>(train.size()))
    throw InvalidArgument("knn_fit: k = " + std::to_string(k) + " outside [1, " + std::to_string(train.size()) + "]");
  KnnModel model;
  model.k = k;
  model.features.resize(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(q));
  model.labels.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].features.size() != q) throw InvalidArgument("knn_fit: training rows have different lengths");
    for (std::size_t j = 0; j < q; ++j) model.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = train[i].features[j];
    model.labels.push_back(train[i].label);
  }
  return model;
}

int knn_predict(const KnnModel& model, std::span<const double> query) {
  if (static_cast<int>(query.size()) != model.dim())
    throw InvalidArgument("knn_predict: query length " + std::to_string(query.size()) + " != " +
                          std::to_string(model.dim()));
  const Eigen::Map<const Eigen::RowVectorXd> x(query.data(), static_cast<Eigen::Index>(query.size()));
  const Eigen::VectorXd dist2 = (model.features.rowwise() - x).rowwise().squaredNorm();

  std::vector<int> order(static_cast<std::size_t>(model.size()));
  std::iota(order.begin(), order.end(), 0);
  const auto closer = [&](int a, int b) {
    return dist2[a] < dist2[b] || (dist2[a] == dist2[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + model.k, order.end(), closer);

  std::map<int, int> votes;  // ordered by label, so ties resolve to the smaller N
  for (int i = 0; i < model.k; ++i) ++votes[model.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]];
  int best_label = 0;
  int best_votes = -1;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best_votes = count;
      best_label = label;
    }
  }
  return best_label;
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

KnnEvaluation knn_evaluate(const KnnModel& model, std::span<const LabelledFeatures> test, int workers) {
  if (test.empty()) throw InvalidArgument("knn_evaluate: empty test set");
  KnnEvaluation ev;
  ev.predictions.resize(test.size());
  parallel_for(test.size(), workers, [&](std::size_t i) { ev.predictions[i] = knn_predict(model, test[i].features); });

  std::set<int> classes(model.labels.begin(), model.labels.end());
  for (const auto& t : test) classes.insert(t.label);
  for (int p : ev.predictions) classes.insert(p);
  ev.confusion.class_values.assign(classes.begin(), classes.end());
  const std::size_t c = classes.size();
  ev.confusion.counts.assign(c, std::vector<long>(c, 0));
  auto slot = [&](int label) {
    return static_cast<std::size_t>(std::lower_bound(ev.confusion.class_values.begin(), ev.confusion.class_values.end(), label) -
                                    ev.confusion.class_values.begin());
  };
  long correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ++ev.confusion.counts[slot(test[i].label)][slot(ev.predictions[i])];
    if (test[i].label == ev.predictions[i]) ++correct;
  }
  const double total = static_cast<double>(test.size());
  ev.accuracy = static_cast<double>(correct) / total;
  ev.standard_error = std::sqrt(ev.accuracy * (1.0 - ev.accuracy) / total);
  return ev;
}

}  // namespace qmodel
