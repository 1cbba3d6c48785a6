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

#include "qmodel/report.h"

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace qmodel {
namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

// Minimal tag matcher: every element opened is closed in order, nothing is
// left open, and the document is a single <svg> root.
::testing::AssertionResult well_formed(const std::string& svg) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  int roots = 0;
  while ((pos = svg.find('<', pos)) != std::string::npos) {
    const std::size_t end = svg.find('>', pos);
    if (end == std::string::npos) return ::testing::AssertionFailure() << "unterminated tag";
    std::string tag = svg.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return ::testing::AssertionFailure() << "empty tag";
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1))
        return ::testing::AssertionFailure() << "mismatched </" << tag.substr(1) << ">";
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (stack.empty() && ++roots > 1) return ::testing::AssertionFailure() << "second root <" << name << ">";
    if (stack.empty() && name != "svg") return ::testing::AssertionFailure() << "root is <" << name << ">";
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return ::testing::AssertionFailure() << "<" << stack.back() << "> left open";
  if (svg.find("nan") != std::string::npos || svg.find("inf") != std::string::npos)
    return ::testing::AssertionFailure() << "non-finite coordinate";
  return ::testing::AssertionSuccess();
}

ConfusionMatrix sample_confusion() {
  ConfusionMatrix c;
  c.class_values = {2, 3};
  c.counts = {{5, 1}, {0, 4}};
  return c;
}

RegressionReport sample_report() {
  RegressionReport r;
  r.h.mre = 0.125;
  r.h.restricted_mre = 0.0625;
  r.h.mae = 0.01;
  r.h.entries = 8;
  r.h.bins = {ErrorBin{0.0, 0.5, 3, 0.2, 0.05}, ErrorBin{0.5, 1.0, 5, 0.1, 0.02}};
  r.gamma.mre = 0.5;
  r.gamma.entries = 4;
  return r;
}

TEST(Csv, Confusion) {
  EXPECT_EQ(confusion_csv(sample_confusion()), "actual_n,predicted_2,predicted_3\n2,5,1\n3,0,4\n");
}

TEST(Csv, RegressionSummaryAndBins) {
  const auto summary = lines(regression_summary_csv(sample_report()));
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[0], "family,mre,restricted_mre,mae,entries,zero_actual_excluded,restricted_excluded");
  EXPECT_EQ(summary[1].substr(0, 16), "h,0.125,0.0625,0");
  EXPECT_EQ(summary[2].substr(0, 9), "gamma,0.5");
  const auto bins = lines(regression_bins_csv(sample_report()));
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0], "family,bin_lo,bin_hi,count,mre,mae");
  EXPECT_EQ(bins[2].substr(0, 10), "h,0.5,1,5,");
}

TEST(Csv, TrajectoryColumns) {
  Eigen::MatrixXd p(2, 3);
  p << 1, 0, 0, 0.5, 0.25, 0.25;
  const auto rows = lines(trajectory_csv({0.0, 0.1}, p));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "t_us,p_0,p_1,p_out");
  EXPECT_EQ(rows[2], "0.10000000000000001,0.5,0.25,0.25");  // 17 significant digits
}

TEST(Svg, ChartsAreWellFormed) {
  const std::vector<Series> s{{"train <a&b>", {1.0, 0.5, 0.25, 0.1}}, {"val", {1.2, 0.6, 0.3, 0.2}}};
  ChartOptions o{"Loss & \"stuff\"", "epoch", "loss", false, true};
  const std::string line = svg_line_chart({1, 2, 3, 4}, s, o);
  EXPECT_TRUE(well_formed(line));
  EXPECT_NE(line.find("&lt;a&amp;b&gt;"), std::string::npos);
  EXPECT_TRUE(well_formed(svg_bar_chart({"i", "ii", "iii", "iv"}, s, ChartOptions{"MRE", "case", "MRE"})));
  EXPECT_TRUE(well_formed(svg_confusion(sample_confusion(), "K-NN")));
}

TEST(Svg, DegenerateInputsStayFinite) {
  ChartOptions log{"t", "x", "y", true, true};
  EXPECT_TRUE(well_formed(svg_line_chart({1, 10}, {{"z", {0.0, 0.0}}}, log)));
  EXPECT_TRUE(well_formed(svg_line_chart({5}, {{"one", {3.0}}}, ChartOptions{})));
  EXPECT_TRUE(well_formed(svg_bar_chart({"a"}, {{"neg", {-1.0}}}, log)));
  EXPECT_TRUE(well_formed(svg_confusion(ConfusionMatrix{}, "empty")));
}

}  // namespace
}  // namespace qmodel
