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

#include "qmodel/expm.h"

#include <cmath>
#include <complex>
#include <limits>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmodel/error.h"
#include "qmodel/random.h"

namespace qmodel {
namespace {

using cd = std::complex<double>;

Eigen::MatrixXcd random_matrix(Rng& rng, int n, double scale) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = scale * cd(rng.normal(), rng.normal());
  return a;
}

TEST(Expm, ZeroIsIdentity) {
  const Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(5, 5);
  EXPECT_EQ(expm(z), Eigen::MatrixXcd::Identity(5, 5));
}

TEST(Expm, Diagonal) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3);
  a(0, 0) = -2.0;
  a(1, 1) = cd(0, 1.5);
  a(2, 2) = cd(0.3, -4.0);
  const Eigen::MatrixXcd e = expm(a);
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(e(i, i) - std::exp(a(i, i))), 1e-14);
  EXPECT_LT((e - Eigen::MatrixXcd(e.diagonal().asDiagonal())).norm(), 1e-300);
}

TEST(Expm, Nilpotent) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 1) = 7.0;
  const Eigen::MatrixXcd e = expm(a);
  EXPECT_NEAR(std::abs(e(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(0, 1) - 7.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(e(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(Expm, RotationGenerator) {
  for (double theta : {0.1, 1.0, 3.0, 40.0}) {
    Eigen::MatrixXd a(2, 2);
    a << 0, -theta, theta, 0;
    const Eigen::MatrixXd e = expm(a);
    EXPECT_NEAR(e(0, 0), std::cos(theta), 1e-13 * std::max(1.0, theta));
    EXPECT_NEAR(e(1, 0), std::sin(theta), 1e-13 * std::max(1.0, theta));
  }
}

// Independent Pade-based implementation as the oracle.
TEST(Expm, MatchesReferenceImplementation) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(12));
    const double scale = std::pow(10.0, rng.uniform(-3, 1.3));
    const Eigen::MatrixXcd a = random_matrix(rng, n, scale);
    const Eigen::MatrixXcd ours = expm(a);
    const Eigen::MatrixXcd ref = a.exp();
    EXPECT_LT((ours - ref).norm() / ref.norm(), 1e-11) << "trial " << trial << " n " << n << " scale " << scale;
  }
}

TEST(Expm, RealOverloadAgreesWithComplex) {
  Rng rng(5);
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = 3 * rng.normal();
  const Eigen::MatrixXd r = expm(a);
  const Eigen::MatrixXcd c = expm(Eigen::MatrixXcd(a.cast<cd>()));
  EXPECT_LT((r.cast<cd>() - c).norm() / r.norm(), 1e-13);
}

TEST(Expm, InverseAndSemigroup) {
  Rng rng(3);
  const Eigen::MatrixXcd a = random_matrix(rng, 8, 0.7);
  const Eigen::MatrixXcd e = expm(a);
  const Eigen::MatrixXcd einv = expm(Eigen::MatrixXcd(-a));
  EXPECT_LT((e * einv - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-12);
  const Eigen::MatrixXcd e2 = expm(Eigen::MatrixXcd(2.0 * a));
  EXPECT_LT((e2 - e * e).norm() / e2.norm(), 1e-12);
}

TEST(Expm, TruncationBoundWithinTolerance) {
  Rng rng(9);
  for (double scale : {1e-4, 0.3, 5.0, 1e3}) {
    const Eigen::MatrixXcd a = random_matrix(rng, 6, scale);
    ExpmInfo info;
    expm(a, kExpmDefaultTolerance, &info);
    EXPECT_LE(info.scaled_norm, 1.0);
    EXPECT_LE(info.truncation_bound, kExpmDefaultTolerance);
    EXPECT_GE(info.degree, 1);
    ExpmInfo loose;
    expm(a, 1e-12, &loose);
    EXPECT_LE(loose.truncation_bound, 1e-12);
    EXPECT_LE(loose.degree, info.degree);
  }
}

TEST(Expm, RejectsBadInput) {
  EXPECT_THROW(expm(Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(2, 3))), InvalidArgument);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(expm(a), NumericDomainError);
  a(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(expm(a), NumericDomainError);
}

}  // namespace
}  // namespace qmodel
