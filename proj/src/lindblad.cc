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

#include "qmodel/lindblad.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "qmodel/error.h"
#include "qmodel/expm.h"

namespace qmodel {
namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Adds the superoperator of L rho L^dagger - {L^dagger L / 2, rho}.
void add_dissipator(Eigen::MatrixXcd& m, const Eigen::MatrixXcd& l) {
  const Eigen::Index d = l.rows();
  const Eigen::MatrixXcd k = l.adjoint() * l;
  auto idx = [d](Eigen::Index a, Eigen::Index b) { return a + d * b; };
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const Eigen::Index row = idx(a, b);
      for (Eigen::Index c = 0; c < d; ++c) {
        if (l(a, c) == cd{}) continue;
        for (Eigen::Index e = 0; e < d; ++e) {
          m(row, idx(c, e)) += l(a, c) * std::conj(l(b, e));
        }
      }
      for (Eigen::Index c = 0; c < d; ++c) {
        m(row, idx(c, b)) -= 0.5 * k(a, c);
        m(row, idx(a, c)) -= 0.5 * k(c, b);
      }
    }
  }
}

Eigen::MatrixXcd dephasing_operator(int dim, int n, double rate) {
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
  l(n, n) = rate;
  return l;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_state(const DensityMatrix& rho, int dim, const char* who) {
  if (rho.dim() != dim || rho.rho.cols() != dim) {
    throw InvalidArgument(std::string(who) + ": density matrix has dimension " +
                          std::to_string(rho.dim()) + ", expected " + std::to_string(dim));
  }
  if (!rho.rho.allFinite()) throw NumericDomainError(std::string(who) + ": non-finite density matrix");
}

}  // namespace

void EffectiveModel::validate() const {
  const int n = n_states();
  if (n < 1 || h.cols() != n) throw InvalidArgument("EffectiveModel: h must be square with N >= 1");
  if (gamma.size() != n) throw InvalidArgument("EffectiveModel: gamma length differs from N");
  if (!h.allFinite() || !gamma.allFinite()) throw NumericDomainError("EffectiveModel: non-finite entry");
  for (int a = 0; a < n; ++a) {
    if (gamma[a] < 0) throw InvalidArgument("EffectiveModel: negative dephasing rate");
    for (int b = 0; b < n; ++b) {
      if (h(a, b) != h(b, a)) throw InvalidArgument("EffectiveModel: h is not symmetric");
      if (h(a, b) < 0) throw InvalidArgument("EffectiveModel: negative matrix element");
    }
  }
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  if (index < 0 || index >= dim) throw InvalidArgument("basis_state: index out of range");
  DensityMatrix out{Eigen::MatrixXcd::Zero(dim, dim)};
  out.rho(index, index) = 1.0;
  return out;
}

DensityDiagnostics diagnose(const DensityMatrix& rho) {
  DensityDiagnostics d;
  d.hermiticity = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
  const cd tr = rho.rho.trace();
  d.trace_real = std::abs(tr.real() - 1.0);
  d.trace_imag = std::abs(tr.imag());
  // Hermitian part only; the anti-Hermitian residue is reported above.
  const Eigen::MatrixXcd herm = 0.5 * (rho.rho + rho.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

void validate_density_matrix(const DensityMatrix& rho) {
  if (!rho.rho.allFinite()) throw InvariantViolation("density matrix has non-finite entries");
  const DensityDiagnostics d = diagnose(rho);
  if (d.hermiticity > kHermiticityTol)
    throw InvariantViolation("density matrix not Hermitian: deviation " + sci(d.hermiticity));
  if (d.trace_real > kTraceTol || d.trace_imag > kTraceImagTol)
    throw InvariantViolation("density matrix trace deviates from 1 by " +
                             sci(std::max(d.trace_real, d.trace_imag)));
  if (d.min_eigenvalue < -kPositivityTol)
    throw InvariantViolation("density matrix has negative eigenvalue " + sci(d.min_eigenvalue));
}

FullHamiltonian assemble_hamiltonian(const EffectiveModel& model,
                                     std::span<const double> coupling_row) {
  const int n = model.n_states();
  if (static_cast<int>(coupling_row.size()) != n) {
    throw InvalidArgument("assemble_hamiltonian: coupling row has " +
                          std::to_string(coupling_row.size()) + " entries for N = " + std::to_string(n));
  }
  FullHamiltonian full{Eigen::MatrixXd::Zero(n + 1, n + 1)};
  full.matrix.topLeftCorner(n, n) = model.h;
  for (int k = 0; k < n; ++k) {
    full.matrix(k, n) = coupling_row[k];
    full.matrix(n, k) = coupling_row[k];
  }
  return full;
}

Liouvillian build_liouvillian(const FullHamiltonian& full_h, std::span<const double> gamma) {
  const int d = full_h.dim();
  if (full_h.matrix.cols() != d || d < 1) throw InvalidArgument("build_liouvillian: Hamiltonian not square");
  if (static_cast<int>(gamma.size()) != d - 1) {
    throw InvalidArgument("build_liouvillian: expected " + std::to_string(d - 1) +
                          " dephasing rates, got " + std::to_string(gamma.size()));
  }
  if (!full_h.matrix.allFinite() || !all_finite(gamma))
    throw NumericDomainError("build_liouvillian: non-finite input");

  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  Liouvillian liou{Eigen::MatrixXcd::Zero(dd, dd), d};
  Eigen::MatrixXcd& m = liou.matrix;
  auto idx = [d](int a, int b) { return a + d * b; };

  // -i (H rho - rho H)
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        m(idx(a, b), idx(c, b)) += -kI * full_h.matrix(a, c);
        m(idx(a, b), idx(a, c)) += kI * full_h.matrix(c, b);
      }
    }
  }
  for (int n = 0; n < d - 1; ++n) {
    if (gamma[n] != 0.0) add_dissipator(m, dephasing_operator(d, n, gamma[n]));
  }
  return liou;
}

Eigen::MatrixXcd hermitian_basis(int dim) {
  if (dim < 1) throw InvalidArgument("hermitian_basis: dimension must be positive");
  const Eigen::Index d = dim;
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d * d, d * d);
  auto at = [d](Eigen::Index a, Eigen::Index b) { return a + d * b; };
  Eigen::Index col = 0;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index a = 0; a < d; ++a) t(at(a, a), col) = inv_sqrt_d;
  ++col;
  const double r2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      t(at(a, b), col) = r2;
      t(at(b, a), col) = r2;
      ++col;
      t(at(a, b), col) = cd(0, -r2);
      t(at(b, a), col) = cd(0, r2);
      ++col;
    }
  }
  for (Eigen::Index l = 1; l < d; ++l) {
    const double c = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) t(at(j, j), col) = c;
    t(at(l, l), col) = -static_cast<double>(l) * c;
    ++col;
  }
  return t;
}

Eigen::MatrixXd real_generator(const Liouvillian& liou) {
  const Eigen::MatrixXcd t = hermitian_basis(liou.state_dim);
  if (liou.matrix.rows() != t.rows() || liou.matrix.cols() != t.rows())
    throw InvalidArgument("real_generator: Liouvillian dimension inconsistent");
  Eigen::MatrixXd r = (t.adjoint() * liou.matrix * t).real();
  // The generator is trace-annihilating; pin that row so every power and
  // squaring keeps the trace coordinate exactly fixed.
  r.row(0).setZero();
  return r;
}

DensityMatrix propagate_expm(const Liouvillian& liou, const DensityMatrix& rho0, double t) {
  const int d = liou.state_dim;
  if (liou.matrix.rows() != static_cast<Eigen::Index>(d) * d)
    throw InvalidArgument("propagate_expm: Liouvillian dimension inconsistent");
  check_state(rho0, d, "propagate_expm");
  if (!std::isfinite(t)) throw NumericDomainError("propagate_expm: non-finite time");
  if (t < 0) throw InvalidArgument("propagate_expm: negative time");
  if (!liou.matrix.allFinite()) throw NumericDomainError("propagate_expm: non-finite Liouvillian");
  if (t == 0.0) return rho0;

  // Propagate real coordinates in a Hermitian basis: trace and Hermiticity
  // then survive the repeated squarings that large dephasing rates require.
  const Eigen::MatrixXcd basis = hermitian_basis(d);
  const Eigen::MatrixXd gen = real_generator(liou);
  const Eigen::Map<const Eigen::VectorXcd> v0(rho0.rho.data(), static_cast<Eigen::Index>(d) * d);
  const Eigen::VectorXd c0 = (basis.adjoint() * v0).real();
  const Eigen::VectorXd c = expm(Eigen::MatrixXd(gen * t)) * c0;
  Eigen::VectorXcd v = basis * c.cast<cd>();
  DensityMatrix out{Eigen::Map<Eigen::MatrixXcd>(v.data(), d, d)};
  return out;
}

DensityMatrix propagate_rk4(const EffectiveModel& model, std::span<const double> coupling_row,
                            const DensityMatrix& rho0, double t, double dt) {
  if (!(dt > 0)) throw InvalidArgument("propagate_rk4: dt must be positive");
  if (!std::isfinite(t) || !std::isfinite(dt)) throw NumericDomainError("propagate_rk4: non-finite time");
  if (t < 0) throw InvalidArgument("propagate_rk4: negative time");
  const FullHamiltonian full = assemble_hamiltonian(model, coupling_row);
  const int d = full.dim();
  check_state(rho0, d, "propagate_rk4");

  const Eigen::MatrixXcd h = full.matrix.cast<cd>();
  std::vector<Eigen::MatrixXcd> ops;
  std::vector<Eigen::MatrixXcd> half_ldl;
  for (int n = 0; n < d - 1; ++n) {
    ops.push_back(dephasing_operator(d, n, model.gamma[n]));
    half_ldl.push_back(0.5 * ops.back().adjoint() * ops.back());
  }
  auto rhs = [&](const Eigen::MatrixXcd& r) {
    Eigen::MatrixXcd out = -kI * (h * r - r * h);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      out += ops[k] * r * ops[k].adjoint() - half_ldl[k] * r - r * half_ldl[k];
    }
    return out;
  };

  const long steps = static_cast<long>(std::ceil(t / dt - 1e-12));
  if (steps <= 0) return rho0;
  const double step = t / static_cast<double>(steps);
  Eigen::MatrixXcd r = rho0.rho;
  for (long s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd k1 = rhs(r);
    const Eigen::MatrixXcd k2 = rhs(r + 0.5 * step * k1);
    const Eigen::MatrixXcd k3 = rhs(r + 0.5 * step * k2);
    const Eigen::MatrixXcd k4 = rhs(r + step * k3);
    r += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix{std::move(r)};
}

double output_population(const DensityMatrix& rho) {
  const int d = rho.dim();
  if (d < 1) throw InvalidArgument("output_population: empty density matrix");
  const double p = rho.rho(d - 1, d - 1).real();
  if (!std::isfinite(p) || p < -kPopulationTol || p > 1.0 + kPopulationTol) {
    throw InvariantViolation("output population " + sci(p) + " outside [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

Eigen::MatrixXd populations_trajectory(const EffectiveModel& model,
                                       std::span<const double> coupling_row,
                                       const DensityMatrix& rho0,
                                       std::span<const double> t_grid) {
  const Liouvillian liou = build_liouvillian(assemble_hamiltonian(model, coupling_row),
                                             std::span<const double>(model.gamma.data(), model.gamma.size()));
  const int d = liou.state_dim;
  Eigen::MatrixXd pops(static_cast<Eigen::Index>(t_grid.size()), d);
  double prev = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0 || t_grid[i] < prev)
      throw InvalidArgument("populations_trajectory: time grid must be ascending and nonnegative");
    prev = t_grid[i];
    const DensityMatrix rho = propagate_expm(liou, rho0, t_grid[i]);
    for (int k = 0; k < d; ++k) pops(static_cast<Eigen::Index>(i), k) = rho.rho(k, k).real();
  }
  return pops;
}

int initial_state_index(int n_states) { return n_states >= 2 ? 1 : 0; }

}  // namespace qmodel
