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

#ifndef QMODEL_LINDBLAD_H_
#define QMODEL_LINDBLAD_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qmodel {

// Units: energies and rates in MHz, times in microseconds. A value of 1 MHz
// advances a phase by 1 rad per microsecond (hbar = 1, no 2*pi).

/// Ground-truth few-state model: real symmetric Hamiltonian block plus one
/// dephasing rate per black-box state.
struct EffectiveModel {
  Eigen::MatrixXd h;
  Eigen::VectorXd gamma;

  int n_states() const { return static_cast<int>(h.rows()); }
  /// Throws InvalidArgument on shape, symmetry or sign violations.
  void validate() const;
};

/// (N+1)x(N+1) Hamiltonian in the basis |0>, ..., |N-1>, |out>.
struct FullHamiltonian {
  Eigen::MatrixXd matrix;
  int dim() const { return static_cast<int>(matrix.rows()); }
};

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }
  /// |index><index| in a space of dimension dim.
  static DensityMatrix basis_state(int dim, int index);
};

/// Superoperator acting on column-stacked vec(rho): entry rho(a, b) sits at
/// a + dim * b.
struct Liouvillian {
  Eigen::MatrixXcd matrix;
  int state_dim = 0;
};

/// Deviations of a density matrix from the physical constraints.
struct DensityDiagnostics {
  double hermiticity = 0;   // max |rho - rho^dagger|
  double trace_real = 0;    // |Re Tr rho - 1|
  double trace_imag = 0;    // |Im Tr rho|
  double min_eigenvalue = 0;
};

inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kTraceImagTol = 1e-12;
inline constexpr double kPositivityTol = 1e-8;
inline constexpr double kPopulationTol = 1e-9;

DensityDiagnostics diagnose(const DensityMatrix& rho);
/// Throws InvariantViolation when any diagnostic exceeds its tolerance.
void validate_density_matrix(const DensityMatrix& rho);

FullHamiltonian assemble_hamiltonian(const EffectiveModel& model,
                                     std::span<const double> coupling_row);

/// Liouvillian of -i[H, rho] + sum_n D[L_n] rho with L_n = gamma_n |n><n|.
/// The dissipator therefore scales with gamma_n^2; |out> is not dephased.
Liouvillian build_liouvillian(const FullHamiltonian& full_h, std::span<const double> gamma);

/// Orthonormal Hermitian operator basis (identity/sqrt(d) first, then the
/// generalized Gell-Mann matrices). Column k is vec(B_k), column-stacked.
Eigen::MatrixXcd hermitian_basis(int dim);

/// Real generator in hermitian_basis coordinates. Row 0 (the trace) is zero.
Eigen::MatrixXd real_generator(const Liouvillian& liou);

/// rho(t) = unvec(exp(M t) vec(rho0)), evaluated in hermitian_basis
/// coordinates so the trace is carried exactly.
DensityMatrix propagate_expm(const Liouvillian& liou, const DensityMatrix& rho0, double t);

/// Fixed-step classical RK4 on the matrix form of the master equation. Takes
/// ceil(t / dt) equal steps. Independent of build_liouvillian; used as a
/// cross-check oracle.
DensityMatrix propagate_rk4(const EffectiveModel& model, std::span<const double> coupling_row,
                            const DensityMatrix& rho0, double t, double dt);

/// Re rho(N, N), clamped into [0, 1] when within kPopulationTol outside.
double output_population(const DensityMatrix& rho);

/// One row per time in t_grid, one column per state (|out> last).
Eigen::MatrixXd populations_trajectory(const EffectiveModel& model,
                                       std::span<const double> coupling_row,
                                       const DensityMatrix& rho0,
                                       std::span<const double> t_grid);

/// Preparation index used by every pipeline stage: |1>, or |0> when N = 1.
int initial_state_index(int n_states);

}  // namespace qmodel

#endif  // QMODEL_LINDBLAD_H_
