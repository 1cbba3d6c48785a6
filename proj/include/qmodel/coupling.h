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

#ifndef QMODEL_COUPLING_H_
#define QMODEL_COUPLING_H_

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace qmodel {

/// One family of output couplings kappa_n^(q) = j / r_{n,q}^alpha.
///
/// Fictitious 1-D geometry: state n sits at x_n = n, the output state at
/// x_out(q) = (N - 1) + u_q with u_q ~ Uniform(r_min, r_max).
struct CouplingCase {
  int case_id = 3;     // 1..6 (i..vi)
  int alpha = 3;       // power-law exponent, equal to case_id for standard cases
  double j_strength = 50.0;  // MHz * length^alpha
  double r_min = 0.5;
  double r_max = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Standard case `case_id` (alpha = case_id) with default geometry; the seed
/// is derived from base_seed and the case id.
CouplingCase standard_case(int case_id, std::uint64_t base_seed,
                           double j_strength = 50.0, double r_min = 0.5, double r_max = 3.0);

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Q x N couplings in MHz; row q holds kappa_n^(q).
struct OutputCouplingSet {
  int case_id = 0;
  RowMatrixXd kappa;

  int q_count() const { return static_cast<int>(kappa.rows()); }
  int n_states() const { return static_cast<int>(kappa.cols()); }
  std::span<const double> row(int q) const {
    return {kappa.data() + static_cast<Eigen::Index>(q) * kappa.cols(),
            static_cast<std::size_t>(kappa.cols())};
  }
};

/// Couplings for explicit output offsets u_q (one per row).
OutputCouplingSet couplings_from_offsets(const CouplingCase& c, int n_states,
                                         std::span<const double> offsets);

/// Deterministic in (case, n_states, q_count).
OutputCouplingSet generate_coupling_set(const CouplingCase& c, int n_states, int q_count);

struct CouplingStats {
  double sigma = 0;              // sample standard deviation, MHz
  double mu3_central = 0;        // mean cubed deviation, MHz^3
  double skew_standardized = 0;  // mu3_central / sigma^3
};

CouplingStats coupling_stats(const OutputCouplingSet& set);

}  // namespace qmodel

#endif  // QMODEL_COUPLING_H_
