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

#ifndef QMODEL_REPORT_H_
#define QMODEL_REPORT_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmodel/coupling.h"
#include "qmodel/knn.h"
#include "qmodel/metrics.h"

namespace qmodel {

// CSV tables. Every table starts with a header row; numbers use %.17g.

std::string confusion_csv(const ConfusionMatrix& confusion);
std::string regression_summary_csv(const RegressionReport& report);
std::string regression_bins_csv(const RegressionReport& report);
std::string trajectory_csv(const std::vector<double>& times, const Eigen::MatrixXd& populations);
std::string couplings_csv(const OutputCouplingSet& set);

// Minimal SVG charts.

struct Series {
  std::string name;
  std::vector<double> values;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Grouped bars: one group per category, one bar per series.
std::string svg_bar_chart(const std::vector<std::string>& categories, const std::vector<Series>& series,
                          const ChartOptions& options);
/// Polylines with markers over shared x values.
std::string svg_line_chart(const std::vector<double>& x, const std::vector<Series>& series,
                           const ChartOptions& options);
/// Count matrix with shaded cells, rows = actual class, columns = predicted.
std::string svg_confusion(const ConfusionMatrix& confusion, const std::string& title);

}  // namespace qmodel

#endif  // QMODEL_REPORT_H_
