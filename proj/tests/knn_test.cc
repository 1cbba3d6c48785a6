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
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "qmodel/error.h"
#include "qmodel/random.h"

namespace qmodel {
namespace {

std::vector<LabelledFeatures> random_set(Rng& rng, int count, int dim, int classes) {
  std::vector<LabelledFeatures> out;
  for (int i = 0; i < count; ++i) {
    LabelledFeatures lf;
    lf.label = 2 + static_cast<int>(rng.index(classes));
    for (int d = 0; d < dim; ++d) lf.features.push_back(0.3 * lf.label + rng.normal());
    out.push_back(std::move(lf));
  }
  return out;
}

// Exhaustive reference: sort every training index by (distance, index) and
// count votes among the first k.
int brute_force(const std::vector<LabelledFeatures>& train, const std::vector<double>& q, int k) {
  std::vector<std::pair<double, int>> d;
  for (int i = 0; i < static_cast<int>(train.size()); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < q.size(); ++j) s += (train[i].features[j] - q[j]) * (train[i].features[j] - q[j]);
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (int i = 0; i < k; ++i) ++votes[train[d[i].second].label];
  int best = 0, best_votes = -1;
  for (const auto& [label, v] : votes) {
    if (v > best_votes) {
      best = label;
      best_votes = v;
    }
  }
  return best;
}

TEST(KnnFit, StoresTrainingSetVerbatim) {
  const std::vector<LabelledFeatures> train{{{1, 2}, 3}, {{3, 4}, 5}, {{5, 6}, 2}};
  const KnnModel m = knn_fit(train, 1);
  EXPECT_EQ(m.size(), 3);
  EXPECT_EQ(m.dim(), 2);
  EXPECT_EQ(m.labels, (std::vector<int>{3, 5, 2}));
  EXPECT_EQ(m.features(1, 1), 4.0);
  const KnnModel single = knn_fit(std::vector<LabelledFeatures>{{{0.5}, 2}}, 1);
  EXPECT_EQ(single.size(), 1);
}

TEST(KnnFit, RejectsBadInput) {
  EXPECT_THROW(knn_fit(std::vector<LabelledFeatures>{}, 1), InvalidArgument);
  const std::vector<LabelledFeatures> ragged{{{1, 2}, 2}, {{1}, 3}};
  EXPECT_THROW(knn_fit(ragged, 1), InvalidArgument);
  const std::vector<LabelledFeatures> two{{{1}, 2}, {{2}, 3}};
  EXPECT_THROW(knn_fit(two, 3), InvalidArgument);
  EXPECT_THROW(knn_fit(two, 0), InvalidArgument);
}

TEST(KnnPredict, ExactMatchWithKOne) {
  Rng rng(1);
  const auto train = random_set(rng, 30, 5, 4);
  const KnnModel m = knn_fit(train, 1);
  for (const auto& r : train) EXPECT_EQ(knn_predict(m, r.features), r.label);
}

TEST(KnnPredict, FourPointHandComputed) {
  // Squared distances from the origin: 1, 4, 9, 16.
  const std::vector<LabelledFeatures> train{{{0, 3}, 4}, {{1, 0}, 2}, {{0, 2}, 3}, {{0, 4}, 2}};
  const KnnModel m = knn_fit(train, 3);
  // Nearest three: labels 2 (d=1), 3 (d=4), 4 (d=9): three-way tie goes to the smallest.
  EXPECT_EQ(knn_predict(m, std::vector<double>{0, 0}), 2);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0, 0}), brute_force(train, {0, 0}, 3));
  // Query at (0, 3.4): nearest are (0,3) d=.16, (0,4) d=.36, (0,2) d=1.96 -> 4, 2, 3.
  EXPECT_EQ(knn_predict(m, std::vector<double>{0, 3.4}), 2);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0, 3.4}), brute_force(train, {0, 3.4}, 3));
}

TEST(KnnPredict, IdenticalRowsVoteTieGoesToSmallestLabel) {
  const std::vector<LabelledFeatures> train{{{1, 1}, 5}, {{1, 1}, 3}, {{1, 1}, 4}, {{1, 1}, 2}};
  const KnnModel m = knn_fit(train, 4);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0, 0}), 2);
}

TEST(KnnPredict, DistanceTieUsesTrainingIndex) {
  // Two rows equidistant from the query; k=1 must pick the lower index.
  const std::vector<LabelledFeatures> train{{{1}, 4}, {{-1}, 2}};
  EXPECT_EQ(knn_predict(knn_fit(train, 1), std::vector<double>{0}), 4);
  const std::vector<LabelledFeatures> swapped{{{-1}, 2}, {{1}, 4}};
  EXPECT_EQ(knn_predict(knn_fit(swapped, 1), std::vector<double>{0}), 2);
}

TEST(KnnPredict, RejectsLengthMismatch) {
  const KnnModel m = knn_fit(std::vector<LabelledFeatures>{{{1, 2}, 2}}, 1);
  EXPECT_THROW(knn_predict(m, std::vector<double>{1}), InvalidArgument);
}

TEST(KnnPredict, MatchesBruteForceOnFiftyPoints) {
  Rng rng(2024);
  const auto train = random_set(rng, 50, 6, 4);
  const auto queries = random_set(rng, 200, 6, 4);
  for (int k : {1, 3, 5, 7, 50}) {
    const KnnModel m = knn_fit(train, k);
    for (const auto& q : queries) EXPECT_EQ(knn_predict(m, q.features), brute_force(train, q.features, k)) << k;
  }
}

TEST(KnnPredict, PermutationInvariantForDistinctDistances) {
  Rng rng(5);
  auto train = random_set(rng, 40, 4, 3);
  const auto queries = random_set(rng, 50, 4, 3);
  const KnnModel a = knn_fit(train, 5);
  std::vector<int> before;
  for (const auto& q : queries) before.push_back(knn_predict(a, q.features));
  std::reverse(train.begin(), train.end());
  std::rotate(train.begin(), train.begin() + 13, train.end());
  const KnnModel b = knn_fit(train, 5);
  for (std::size_t i = 0; i < queries.size(); ++i) EXPECT_EQ(knn_predict(b, queries[i].features), before[i]);
}

TEST(KnnEvaluate, TrainingSetWithKOneIsPerfect) {
  Rng rng(3);
  const auto train = random_set(rng, 60, 5, 4);
  const KnnEvaluation e = knn_evaluate(knn_fit(train, 1), train, 4);
  EXPECT_EQ(e.accuracy, 1.0);
  EXPECT_EQ(e.standard_error, 0.0);
}

TEST(KnnEvaluate, AccuracyAndConfusionArithmetic) {
  const std::vector<LabelledFeatures> train{{{0}, 2}, {{10}, 3}};
  const std::vector<LabelledFeatures> test{{{0.1}, 2}, {{9.9}, 3}, {{10.2}, 3}, {{0.3}, 3}};
  const KnnEvaluation e = knn_evaluate(knn_fit(train, 1), test);
  EXPECT_DOUBLE_EQ(e.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(e.standard_error, std::sqrt(0.75 * 0.25 / 4));
  EXPECT_EQ(e.confusion.class_values, (std::vector<int>{2, 3}));
  EXPECT_EQ(e.confusion.counts[0][0], 1);
  EXPECT_EQ(e.confusion.counts[1][0], 1);
  EXPECT_EQ(e.confusion.counts[1][1], 2);
  EXPECT_EQ(e.confusion.total(), 4);
  EXPECT_EQ(e.predictions, (std::vector<int>{2, 3, 3, 2}));
}

TEST(KnnEvaluate, RowSumsEqualClassCountsAndWorkerIndependent) {
  Rng rng(4);
  const auto train = random_set(rng, 100, 5, 4);
  const auto test = random_set(rng, 80, 5, 4);
  const KnnModel m = knn_fit(train, 5);
  const KnnEvaluation a = knn_evaluate(m, test, 1);
  const KnnEvaluation b = knn_evaluate(m, test, 6);
  EXPECT_EQ(a.predictions, b.predictions);
  std::map<int, long> per_class;
  for (const auto& t : test) ++per_class[t.label];
  for (std::size_t i = 0; i < a.confusion.class_values.size(); ++i) {
    const auto& row = a.confusion.counts[i];
    EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0L), per_class[a.confusion.class_values[i]]);
  }
  EXPECT_EQ(a.confusion.total(), 80);
}

TEST(KnnEvaluate, SingleClassIsPerfect) {
  Rng rng(6);
  auto train = random_set(rng, 20, 3, 1);
  const auto test = random_set(rng, 10, 3, 1);
  EXPECT_EQ(knn_evaluate(knn_fit(train, 5), test).accuracy, 1.0);
}

TEST(KnnEvaluate, RejectsEmptyTestSet) {
  const KnnModel m = knn_fit(std::vector<LabelledFeatures>{{{1}, 2}}, 1);
  EXPECT_THROW(knn_evaluate(m, std::vector<LabelledFeatures>{}), InvalidArgument);
}

}  // namespace
}  // namespace qmodel
