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
#include <vector>

#include "qmodel/error.h"

namespace qmodel {
namespace {

constexpr double kScaledNormTarget = 1.0;
constexpr int kMaxDegree = 30;

template <typename M>
double one_norm(const M& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

int taylor_degree(double norm, double tolerance, double* bound) {
  // term = norm^(m+1) / (m+1)!
  double term = norm;
  for (int m = 0; m <= kMaxDegree; ++m) {
    const double tail = (norm < m + 2) ? term / (1.0 - norm / (m + 2)) : HUGE_VAL;
    if (tail <= tolerance) {
      *bound = tail;
      return m;
    }
    term *= norm / (m + 2);
  }
  *bound = HUGE_VAL;
  return kMaxDegree;
}

template <typename Matrix>
Matrix expm_impl(const Matrix& a, double tolerance, ExpmInfo* info) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm: matrix is not square");
  if (!a.allFinite()) throw NumericDomainError("expm: non-finite matrix entry");
  const Eigen::Index n = a.rows();

  const double norm = one_norm(a);
  int s = 0;
  if (norm > kScaledNormTarget) s = static_cast<int>(std::ceil(std::log2(norm / kScaledNormTarget)));
  const Matrix x = a * std::ldexp(1.0, -s);
  const double xnorm = norm * std::ldexp(1.0, -s);

  double bound = 0;
  const int m = taylor_degree(xnorm, tolerance, &bound);

  // Paterson-Stockmeyer: p(X) = sum_j B_j (X^p)^j with B_j of degree < p.
  const int p = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m + 1)))));
  std::vector<Matrix> powers;  // powers[k] = X^k, k = 0..p
  powers.reserve(p + 1);
  powers.push_back(Matrix::Identity(n, n));
  powers.push_back(x);
  for (int k = 2; k <= p; ++k) powers.push_back(powers[k - 1] * x);

  std::vector<double> coeff(m + 1);
  coeff[0] = 1.0;
  for (int k = 1; k <= m; ++k) coeff[k] = coeff[k - 1] / k;

  const int blocks = m / p;  // highest block index
  auto block = [&](int j) {
    Matrix b = Matrix::Zero(n, n);
    for (int k = 0; k < p; ++k) {
      const int deg = j * p + k;
      if (deg > m) break;
      b += coeff[deg] * powers[k];
    }
    return b;
  };

  Matrix result = block(blocks);
  for (int j = blocks - 1; j >= 0; --j) {
    Matrix next = result * powers[p];
    next += block(j);
    result = std::move(next);
  }

  Matrix tmp(n, n);
  for (int k = 0; k < s; ++k) {
    tmp.noalias() = result * result;
    result.swap(tmp);
  }

  if (info) {
    info->squarings = s;
    info->degree = m;
    info->scaled_norm = xnorm;
    info->truncation_bound = bound;
  }
  return result;
}

}  // namespace

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a, double tolerance, ExpmInfo* info) {
  return expm_impl(a, tolerance, info);
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double tolerance, ExpmInfo* info) {
  return expm_impl(a, tolerance, info);
}

}  // namespace qmodel
