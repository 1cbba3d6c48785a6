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

#include "qmodel/coupling.h"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qmodel/error.h"

namespace qmodel {
namespace {

// Reference generator written against the documented construction only:
// splitmix64 seed derivation, mt19937_64, 53-bit uniform, power law.
std::uint64_t ref_splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<std::vector<double>> ref_couplings(std::uint64_t base_seed, int alpha, int n, int q_count,
                                               double j, double r_min, double r_max) {
  std::mt19937_64 eng(ref_splitmix(base_seed ^ ref_splitmix(static_cast<std::uint64_t>(alpha) + 1)));
  std::vector<std::vector<double>> out;
  for (int q = 0; q < q_count; ++q) {
    const double u = r_min + (r_max - r_min) * (static_cast<double>(eng() >> 11) / 9007199254740992.0);
    std::vector<double> row;
    for (int k = 0; k < n; ++k) row.push_back(j / std::pow((n - 1) + u - k, alpha));
    out.push_back(row);
  }
  return out;
}

OutputCouplingSet from_values(std::vector<double> v) {
  OutputCouplingSet s;
  s.kappa = Eigen::Map<RowMatrixXd>(v.data(), static_cast<Eigen::Index>(v.size()), 1);
  return s;
}

TEST(Couplings, PowerLawExamples) {
  const std::vector<double> u{2.0};
  CouplingCase c;
  c.alpha = 1;
  c.j_strength = 50;
  EXPECT_DOUBLE_EQ(couplings_from_offsets(c, 1, u).kappa(0, 0), 25.0);
  c.alpha = 2;
  EXPECT_DOUBLE_EQ(couplings_from_offsets(c, 1, u).kappa(0, 0), 12.5);
}

TEST(Couplings, ChainGeometry) {
  CouplingCase c;
  c.alpha = 1;
  c.j_strength = 6;
  const OutputCouplingSet s = couplings_from_offsets(c, 3, std::vector<double>{1.0});
  // Distances 3, 2, 1 from states 0, 1, 2.
  EXPECT_DOUBLE_EQ(s.kappa(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.kappa(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(s.kappa(0, 2), 6.0);
}

TEST(Couplings, DefaultCaseMatchesReference) {
  const std::uint64_t base = 20240601;
  const CouplingCase c = standard_case(3, base);
  const OutputCouplingSet s = generate_coupling_set(c, 3, 200);
  const auto ref = ref_couplings(base, 3, 3, 200, 50.0, 0.5, 3.0);
  ASSERT_EQ(s.q_count(), 200);
  ASSERT_EQ(s.n_states(), 3);
  for (int q = 0; q < 200; ++q)
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(s.kappa(q, n), ref[q][n], 1e-12 * ref[q][n]) << q << "," << n;
}

TEST(Couplings, DeterministicAndPositive) {
  for (int id = 1; id <= 6; ++id) {
    const CouplingCase c = standard_case(id, 99);
    const OutputCouplingSet a = generate_coupling_set(c, 4, 300);
    const OutputCouplingSet b = generate_coupling_set(c, 4, 300);
    EXPECT_EQ(a.kappa, b.kappa);
    EXPECT_GT(a.kappa.minCoeff(), 0.0);
    EXPECT_TRUE(a.kappa.allFinite());
    EXPECT_EQ(a.case_id, id);
  }
}

TEST(Couplings, RowSpanMatchesMatrix) {
  const OutputCouplingSet s = generate_coupling_set(standard_case(2, 5), 3, 10);
  for (int q = 0; q < 10; ++q) {
    const auto row = s.row(q);
    ASSERT_EQ(row.size(), 3u);
    for (int n = 0; n < 3; ++n) EXPECT_EQ(row[n], s.kappa(q, n));
  }
}

TEST(Couplings, ValidateRejectsBadCases) {
  CouplingCase c;
  c.alpha = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.alpha = 7;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.alpha = 2;
  c.r_min = 2.0;
  c.r_max = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.r_min = 0.0;
  c.r_max = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_THROW(generate_coupling_set(standard_case(1, 1), 0, 10), InvalidArgument);
  EXPECT_THROW(generate_coupling_set(standard_case(1, 1), 2, 0), InvalidArgument);
}

TEST(CouplingStats, ConstantSet) {
  const CouplingStats s = coupling_stats(from_values({4, 4, 4, 4}));
  EXPECT_EQ(s.sigma, 0.0);
  EXPECT_EQ(s.mu3_central, 0.0);
}

TEST(CouplingStats, SymmetricTriple) {
  const CouplingStats s = coupling_stats(from_values({1, 2, 3}));
  EXPECT_DOUBLE_EQ(s.sigma, 1.0);
  EXPECT_DOUBLE_EQ(s.mu3_central, 0.0);
  EXPECT_DOUBLE_EQ(s.skew_standardized, 0.0);
}

TEST(CouplingStats, MatchesIndependentMoments) {
  const OutputCouplingSet set = generate_coupling_set(standard_case(4, 20240601), 3, 200);
  long double sum = 0;
  const long double count = static_cast<long double>(set.kappa.size());
  for (Eigen::Index i = 0; i < set.kappa.size(); ++i) sum += set.kappa.data()[i];
  const long double mean = sum / count;
  long double m2 = 0, m3 = 0;
  for (Eigen::Index i = 0; i < set.kappa.size(); ++i) {
    const long double d = set.kappa.data()[i] - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double sigma = static_cast<double>(std::sqrt(m2 / (count - 1)));
  const double mu3 = static_cast<double>(m3 / count);
  const CouplingStats s = coupling_stats(set);
  EXPECT_NEAR(s.sigma, sigma, 1e-12 * sigma);
  EXPECT_NEAR(s.mu3_central, mu3, 1e-10 * std::abs(mu3));
  EXPECT_NEAR(s.skew_standardized, mu3 / (sigma * sigma * sigma), 1e-10 * std::abs(mu3 / (sigma * sigma * sigma)));
}

TEST(CouplingStats, NeedsTwoEntries) { EXPECT_THROW(coupling_stats(from_values({1})), InvalidArgument); }

TEST(CouplingStats, SpreadGrowsWithExponent) {
  double prev = 0;
  for (int alpha = 1; alpha <= 6; ++alpha) {
    const CouplingStats s = coupling_stats(generate_coupling_set(standard_case(alpha, 20240601), 2, 5000));
    EXPECT_GT(s.sigma, prev) << "alpha " << alpha;
    prev = s.sigma;
  }
}

}  // namespace
}  // namespace qmodel
