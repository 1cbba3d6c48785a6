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

#ifndef QMODEL_KNN_H_
#define QMODEL_KNN_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qmodel {

/// A labelled feature vector for classification; label is the state count N.
struct LabelledFeatures {
  std::vector<double> features;
  int label = 0;
};

/// Lazy K-NN learner: stores the training set verbatim.
struct KnnModel {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> features;  // D x Q
  std::vector<int> labels;
  int k = 5;

  int size() const { return static_cast<int>(labels.size()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

/// Throws InvalidArgument for an empty set, ragged rows or k outside [1, D].
KnnModel knn_fit(std::span<const LabelledFeatures> train, int k);

/// Majority vote among the k nearest rows by Euclidean distance. Equal
/// distances are ordered by training index; equal vote counts go to the
/// smaller label.
int knn_predict(const KnnModel& model, std::span<const double> query);

struct ConfusionMatrix {
  std::vector<int> class_values;  // sorted
  std::vector<std::vector<long>> counts;  // [actual][predicted]

  long total() const;
};

struct KnnEvaluation {
  double accuracy = 0;
  double standard_error = 0;  // sqrt(p (1 - p) / total)
  ConfusionMatrix confusion;
  std::vector<int> predictions;
};

KnnEvaluation knn_evaluate(const KnnModel& model, std::span<const LabelledFeatures> test, int workers = 1);

}  // namespace qmodel

#endif  // QMODEL_KNN_H_
