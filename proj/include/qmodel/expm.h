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

#ifndef QMODEL_EXPM_H_
#define QMODEL_EXPM_H_

#include <Eigen/Dense>

namespace qmodel {

/// Diagnostics from one matrix exponential evaluation.
struct ExpmInfo {
  int squarings = 0;       // s: the argument was scaled by 2^-s
  int degree = 0;          // Taylor degree used on the scaled argument
  double scaled_norm = 0;  // ||A / 2^s||_1
  double truncation_bound = 0;
};

/// Dense matrix exponential by scaling and squaring with a truncated Taylor
/// series evaluated in Paterson-Stockmeyer form.
///
/// The argument is scaled until its 1-norm is at most 1, and the Taylor degree
/// m is the smallest with remainder bound
///   ||X||^(m+1) / (m+1)! / (1 - ||X|| / (m+2)) <= tolerance
/// on the scaled matrix X. The default tolerance is the double unit
/// roundoff: each of the s squarings can double the truncation error, so a
/// looser per-step bound shows up as trace drift after many squarings.
inline constexpr double kExpmDefaultTolerance = 0x1.0p-53;

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a, double tolerance = kExpmDefaultTolerance,
                      ExpmInfo* info = nullptr);
Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double tolerance = kExpmDefaultTolerance,
                     ExpmInfo* info = nullptr);

}  // namespace qmodel

#endif  // QMODEL_EXPM_H_
