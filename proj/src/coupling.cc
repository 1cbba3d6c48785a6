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
#include <string>
#include <vector>

#include "qmodel/error.h"
#include "qmodel/random.h"

namespace qmodel {

void CouplingCase::validate() const {
  if (alpha < 1 || alpha > 6) throw InvalidArgument("coupling case: alpha must be in 1..6");
  if (!(r_min > 0) || !(r_min < r_max)) throw InvalidArgument("coupling case: need 0 < r_min < r_max");
  if (!(j_strength > 0) || !std::isfinite(j_strength))
    throw InvalidArgument("coupling case: j_strength must be positive and finite");
}

CouplingCase standard_case(int case_id, std::uint64_t base_seed, double j_strength,
                           double r_min, double r_max) {
  CouplingCase c;
  c.case_id = case_id;
  c.alpha = case_id;
  c.j_strength = j_strength;
  c.r_min = r_min;
  c.r_max = r_max;
  c.seed = derive_seed(base_seed, static_cast<std::uint64_t>(case_id));
  c.validate();
  return c;
}

OutputCouplingSet couplings_from_offsets(const CouplingCase& c, int n_states,
                                         std::span<const double> offsets) {
  c.validate();
  if (n_states < 1) throw InvalidArgument("coupling set: n_states must be >= 1");
  if (offsets.empty()) throw InvalidArgument("coupling set: q_count must be >= 1");
  OutputCouplingSet set;
  set.case_id = c.case_id;
  RowMatrixXd& kappa = set.kappa;
  kappa.resize(static_cast<Eigen::Index>(offsets.size()), n_states);
  for (std::size_t q = 0; q < offsets.size(); ++q) {
    const double x_out = (n_states - 1) + offsets[q];
    for (int n = 0; n < n_states; ++n) {
      kappa(static_cast<Eigen::Index>(q), n) = c.j_strength / std::pow(x_out - n, c.alpha);
    }
  }
  return set;
}

OutputCouplingSet generate_coupling_set(const CouplingCase& c, int n_states, int q_count) {
  if (q_count < 1) throw InvalidArgument("coupling set: q_count must be >= 1");
  Rng rng(c.seed);
  std::vector<double> offsets(static_cast<std::size_t>(q_count));
  for (double& u : offsets) u = rng.uniform(c.r_min, c.r_max);
  return couplings_from_offsets(c, n_states, offsets);
}

CouplingStats coupling_stats(const OutputCouplingSet& set) {
  const Eigen::Index count = set.kappa.size();
  if (count < 2) throw InvalidArgument("coupling_stats: need at least 2 entries");
  const Eigen::ArrayXd v = set.kappa.reshaped().array();
  const double mean = v.mean();
  const Eigen::ArrayXd dev = v - mean;
  CouplingStats s;
  s.sigma = std::sqrt(dev.square().sum() / static_cast<double>(count - 1));
  s.mu3_central = dev.cube().sum() / static_cast<double>(count);
  s.skew_standardized = s.sigma > 0 ? s.mu3_central / (s.sigma * s.sigma * s.sigma) : 0.0;
  return s;
}

}  // namespace qmodel
