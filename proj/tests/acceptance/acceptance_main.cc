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

// Acceptance harness. Prints one PASS/FAIL line per criterion, preceded by
// indented detail lines, and exits non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmodel/dataset.h"
#include "qmodel/experiments.h"
#include "qmodel/io.h"
#include "qmodel/knn.h"
#include "qmodel/lindblad.h"
#include "qmodel/mlp.h"
#include "qmodel/parallel.h"
#include "qmodel/random.h"

namespace qmodel {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void detail(const std::string& s) { std::cout << "  " << s << std::endl; }

bool verdict(int id, const std::string& name, bool ok, const std::string& summary) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << summary << std::endl;
  return ok;
}

// ---- criterion 6: property suite ------------------------------------------------

std::span<const double> rates(const EffectiveModel& m) {
  return {m.gamma.data(), static_cast<std::size_t>(m.gamma.size())};
}

DensityMatrix evolve(const EffectiveModel& m, std::span<const double> row, const DensityMatrix& rho0, double t) {
  return propagate_expm(build_liouvillian(assemble_hamiltonian(m, row), rates(m)), rho0, t);
}

struct Check {
  std::string name;
  bool ok;
  std::string value;
};

Check invariants_check() {
  double worst_trace = 0, worst_herm = 0, worst_eig = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 5;
    Rng rng(derive_seed(6001, static_cast<std::uint64_t>(i)));
    const EffectiveModel m = sample_model(rng, n, 1.0, 1.0 + 9.0 * (i % 3));
    std::vector<double> row;
    for (int k = 0; k < n; ++k) row.push_back(rng.uniform(0.0, 25.0));
    const DensityMatrix rho = evolve(m, row, DensityMatrix::basis_state(n + 1, initial_state_index(n)),
                                     rng.uniform(0.01, 1.0));
    const DensityDiagnostics d = diagnose(rho);
    worst_trace = std::max({worst_trace, d.trace_real, d.trace_imag});
    worst_herm = std::max(worst_herm, d.hermiticity);
    worst_eig = std::min(worst_eig, d.min_eigenvalue);
  }
  const bool ok = worst_trace <= kTraceTol && worst_herm <= kHermiticityTol && worst_eig >= -kPositivityTol;
  return {"invariants on 100 propagations", ok,
          "trace err " + fmt(worst_trace) + ", hermiticity " + fmt(worst_herm) + ", min eigenvalue " + fmt(worst_eig)};
}

Check rk4_check() {
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 5;
    Rng rng(derive_seed(6002, static_cast<std::uint64_t>(i)));
    const EffectiveModel m = sample_model(rng, n, 1.0, 1.0);
    std::vector<double> row;
    for (int k = 0; k < n; ++k) row.push_back(rng.uniform(0.0, 5.0));
    const DensityMatrix rho0 = DensityMatrix::basis_state(n + 1, initial_state_index(n));
    const double t = 0.15;
    const DensityMatrix a = evolve(m, row, rho0, t);
    const DensityMatrix b = propagate_rk4(m, row, rho0, t, 1e-4);
    worst = std::max(worst, (a.rho - b.rho).cwiseAbs().maxCoeff());
  }
  return {"expm vs RK4", worst <= 1e-6, "max |diff| " + fmt(worst)};
}

Check rabi_check() {
  double worst = 0;
  for (double delta : {0.0, 0.4, 1.0, 3.0}) {
    for (double kappa : {0.5, 1.0, 2.0}) {
      EffectiveModel m;
      m.h = Eigen::MatrixXd::Constant(1, 1, delta);
      m.gamma = Eigen::VectorXd::Zero(1);
      const std::vector<double> row{kappa};
      for (double t : {0.05, 0.15, 0.7, 2.3}) {
        const double omega = std::sqrt(kappa * kappa + delta * delta / 4);
        const double expected = kappa * kappa / (omega * omega) * std::pow(std::sin(omega * t), 2);
        const double got = output_population(evolve(m, row, DensityMatrix::basis_state(2, 0), t));
        worst = std::max(worst, std::abs(got - expected));
      }
    }
  }
  return {"Rabi and detuned Rabi", worst <= 1e-8, "max |diff| " + fmt(worst)};
}

Check dephasing_check() {
  double worst = 0;
  for (double g : {0.2, 1.0, 3.0}) {
    EffectiveModel m;
    m.h = Eigen::MatrixXd::Zero(1, 1);
    m.gamma = Eigen::VectorXd::Constant(1, g);
    DensityMatrix rho0{Eigen::MatrixXcd::Constant(2, 2, 0.5)};
    const std::vector<double> row{0.0};
    for (double t : {0.1, 0.5}) {
      const double c = std::abs(evolve(m, row, rho0, t).rho(0, 1));
      const double rate = -std::log(c / 0.5) / t;
      worst = std::max(worst, std::abs(rate - g * g / 2) / (g * g / 2));
    }
  }
  return {"pure-dephasing decay rate", worst <= 1e-6, "max relative err " + fmt(worst)};
}

Eigen::MatrixXd normal_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Check gradient_check() {
  MlpArchitecture arch;
  arch.input_dim = 20;
  arch.hidden_dims = {16, 8};
  arch.output_dim = 6;
  Rng rng(6003);
  MlpParams p = mlp_init(arch, 6003);
  for (auto& l : p.layers)
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * rng.normal();
  const Eigen::MatrixXd x = normal_matrix(rng, 20, 5);
  const Eigen::MatrixXd t = normal_matrix(rng, 6, 5);
  const LossAndGradients lg = mlp_backward(p, x, t);
  auto loss = [&] { return (mlp_forward_batch(p, x) - t).squaredNorm() / static_cast<double>(t.size()); };
  constexpr double h = 1e-5;
  double worst = 0;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto probe = [&](double* param, const double* grad, Eigen::Index count) {
      for (Eigen::Index i = 0; i < count; ++i) {
        const double saved = param[i];
        param[i] = saved + h;
        const double up = loss();
        param[i] = saved - h;
        const double down = loss();
        param[i] = saved;
        const double numeric = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(numeric - grad[i]) / std::max({std::abs(numeric), std::abs(grad[i]), 1e-7}));
      }
    };
    probe(p.layers[l].weight.data(), lg.gradients[l].weight.data(), p.layers[l].weight.size());
    probe(p.layers[l].bias.data(), lg.gradients[l].bias.data(), p.layers[l].bias.size());
  }
  return {"finite-difference gradients", worst <= 1e-4, "max relative err " + fmt(worst)};
}

Check overfit_check() {
  RealizationSpec spec;
  spec.n_states = 2;
  spec.record_count = 10;
  spec.master_seed = 6004;
  const DatasetFile data = generate_dataset(spec, 1);
  Eigen::MatrixXd x, t;
  regression_matrices(data.records, 2, x, t);
  // Every sample appears twice so the held-out validation column is also a
  // training column.
  Eigen::MatrixXd x2(x.rows(), 20), t2(t.rows(), 20);
  x2 << x, x;
  t2 << t, t;
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.validation_fraction = 0.05;
  const TrainResult r = mlp_train(x2, t2, MlpArchitecture{}, cfg);
  const Eigen::MatrixXd y =
      r.standardizer.inverse_targets(mlp_forward_batch(r.params, r.standardizer.transform_features(x)));
  const double mse = (y - t).squaredNorm() / static_cast<double>(t.size());
  return {"10-sample overfit", mse <= 1e-6, "MSE " + fmt(mse)};
}

Check determinism_check() {
  RealizationSpec spec;
  spec.n_states = 3;
  spec.coupling_case_ids = {1, 4, 6};
  spec.record_count = 48;
  spec.master_seed = 6005;
  const std::string reference = serialize_dataset(generate_dataset(spec, 1));
  bool ok = true;
  for (int w : {2, 3, 8}) ok = ok && serialize_dataset(generate_dataset(spec, w)) == reference;
  return {"dataset byte determinism", ok, ok ? "1/2/3/8 workers identical" : "outputs differ"};
}

int brute_force_label(const std::vector<LabelledFeatures>& train, const std::vector<double>& q, int k) {
  std::vector<std::pair<double, int>> d;
  for (int i = 0; i < static_cast<int>(train.size()); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < q.size(); ++j) s += (train[i].features[j] - q[j]) * (train[i].features[j] - q[j]);
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (int i = 0; i < k; ++i) ++votes[train[d[i].second].label];
  int best = 0, most = -1;
  for (const auto& [label, v] : votes) {
    if (v > most) {
      best = label;
      most = v;
    }
  }
  return best;
}

Check knn_check() {
  Rng rng(6006);
  auto points = [&](int count) {
    std::vector<LabelledFeatures> out;
    for (int i = 0; i < count; ++i) {
      LabelledFeatures lf;
      lf.label = 2 + static_cast<int>(rng.index(4));
      for (int d = 0; d < 8; ++d) lf.features.push_back(0.25 * lf.label + rng.normal());
      out.push_back(std::move(lf));
    }
    return out;
  };
  const auto train = points(50);
  const auto queries = points(200);
  int mismatches = 0;
  for (int k : {1, 3, 5, 7}) {
    const KnnModel m = knn_fit(train, k);
    for (const auto& q : queries) mismatches += knn_predict(m, q.features) != brute_force_label(train, q.features, k);
  }
  return {"K-NN brute-force equivalence", mismatches == 0, std::to_string(mismatches) + " mismatches in 800 queries"};
}

bool criterion_properties() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (auto fn : {invariants_check, rk4_check, rabi_check, dephasing_check, gradient_check, overfit_check,
                  determinism_check, knn_check}) {
    const Check c = fn();
    detail(std::string(c.ok ? "ok   " : "FAIL ") + c.name + ": " + c.value);
    ok = ok && c.ok;
  }
  const double elapsed = seconds_since(t0);
  const bool fast = elapsed < 300;
  return verdict(6, "property suite", ok && fast, std::string(ok ? "all checks hold" : "a check failed") + " in " +
                                                      fmt(elapsed, 3) + " s (limit 300 s)");
}

// ---- criteria 1-5: experiments -------------------------------------------------------

bool criterion_classification(const ExperimentConfig& base) {
  ExperimentConfig c = base;
  c.classify_n_values = {2, 3, 4, 5};
  c.classify_train_per_n = 2500;
  c.classify_test_per_n = 300;
  c.knn_k_values = {1, 3, 5, 7};
  const ClassificationResult r = run_classification_experiment(c);
  for (std::size_t i = 0; i < r.k_values.size(); ++i)
    detail("k=" + std::to_string(r.k_values[i]) + " accuracy " + fmt(r.accuracy[i]) + " +/- " +
           fmt(r.standard_error[i], 2));
  const double best = r.best.accuracy;
  std::ostringstream cm;
  for (std::size_t a = 0; a < r.best.confusion.class_values.size(); ++a) {
    cm << "N=" << r.best.confusion.class_values[a] << ":";
    for (long v : r.best.confusion.counts[a]) cm << ' ' << v;
    cm << (a + 1 < r.best.confusion.class_values.size() ? "; " : "");
  }
  detail("confusion (rows actual N): " + cm.str());
  return verdict(1, "classification", best >= 0.90,
                 "best k=" + std::to_string(r.best_k) + " accuracy " + fmt(best) + " (need >= 0.90)");
}

ExperimentConfig regression_config(const ExperimentConfig& base) {
  ExperimentConfig c = base;
  c.train_records = 10000;
  c.test_records = 1000;
  c.hidden_dims = {1024, 512, 256};
  return c;
}

std::map<int, RegressionReport> regression_reports;

const RegressionReport& regression_report(int n, const ExperimentConfig& base) {
  auto it = regression_reports.find(n);
  if (it == regression_reports.end())
    it = regression_reports.emplace(n, run_regression_experiment(n, regression_config(base)).report).first;
  return it->second;
}

bool criterion_regression(const ExperimentConfig& base) {
  const RegressionReport& r2 = regression_report(2, base);
  const RegressionReport& r3 = regression_report(3, base);
  const RegressionReport& r4 = regression_report(4, base);
  for (const auto& [n, r] : regression_reports)
    detail("N=" + std::to_string(n) + ": restricted MRE(H) " + fmt(r.h.restricted_mre) + ", MRE(gamma) " +
           fmt(r.gamma.restricted_mre) + "; as-written MRE(H) " + fmt(r.h.mre) + ", MRE(gamma) " + fmt(r.gamma.mre));
  const bool ok = r2.h.restricted_mre <= 0.10 && r2.gamma.restricted_mre <= 0.06 && r3.h.restricted_mre <= 0.14 &&
                  r4.h.restricted_mre <= 0.28;
  return verdict(2, "regression MRE", ok,
                 "N=2 H " + fmt(r2.h.restricted_mre) + " (<= 0.10), gamma " + fmt(r2.gamma.restricted_mre) +
                     " (<= 0.06); N=3 H " + fmt(r3.h.restricted_mre) + " (<= 0.14); N=4 H " +
                     fmt(r4.h.restricted_mre) + " (<= 0.28)");
}

bool criterion_flatness(const ExperimentConfig& base) {
  const RegressionReport& r = regression_report(2, base);
  double lo = HUGE_VAL, hi = 0;
  std::string row;
  for (const ErrorBin& b : r.h.bins) {
    row += " " + fmt(b.mae, 3);
    if (b.count == 0) continue;
    lo = std::min(lo, b.mae);
    hi = std::max(hi, b.mae);
  }
  detail("N=2 per-bin MAE(H):" + row);
  const double ratio = hi / lo;
  return verdict(3, "MAE flatness", ratio < 2.0, "max/min bin MAE " + fmt(ratio) + " (need < 2)");
}

bool criterion_sweep(const ExperimentConfig& base) {
  const std::vector<double> grid{1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  const SweepReport s = run_dephasing_sweep(3, grid, regression_config(base));
  std::map<double, const RegressionReport*> at;
  for (std::size_t i = 0; i < s.gamma_bars.size(); ++i) {
    at[s.gamma_bars[i]] = &s.reports[i];
    detail("gamma_bar " + fmt(s.gamma_bars[i]) + ": restricted MRE(H) " + fmt(s.reports[i].h.restricted_mre) +
           ", MRE(gamma) " + fmt(s.reports[i].gamma.restricted_mre));
  }
  const double h1 = at[1.0]->h.restricted_mre, h1e3 = at[1e3]->h.restricted_mre;
  const double g1e2 = at[1e2]->gamma.restricted_mre, g1e4 = at[1e4]->gamma.restricted_mre;
  const bool h_ok = h1e3 >= 3 * h1, g_ok = g1e2 < g1e4;
  return verdict(4, "dephasing sweep", h_ok && g_ok,
                 "MRE(H)@1e3 / MRE(H)@1 = " + fmt(h1e3 / h1) + " (need >= 3, " + (h_ok ? "ok" : "fails") +
                     "); MRE(gamma)@1e2 " + fmt(g1e2) + " < @1e4 " + fmt(g1e4) + " (" + (g_ok ? "ok" : "fails") + ")");
}

bool criterion_case_study(const ExperimentConfig& base) {
  ExperimentConfig c = regression_config(base);
  c.case_study_cases = {1, 2, 3, 4, 5, 6};
  c.mixed_train_cases = {4, 5, 6};
  bool ok = true;
  std::string summary;
  for (int n : {2, 3}) {
    const CaseStudyReport r = run_coupling_case_study(n, c);
    std::string seq;
    int inversions = 0;
    for (std::size_t i = 0; i < r.per_case.size(); ++i) {
      seq += " " + fmt(r.per_case[i].h.restricted_mre);
      if (i > 0 && r.per_case[i].h.restricted_mre > r.per_case[i - 1].h.restricted_mre) ++inversions;
    }
    const double all = r.mixed_all.h.restricted_mre;
    const double seen = r.mixed_seen.h.restricted_mre, unseen = r.mixed_unseen.h.restricted_mre;
    detail("N=" + std::to_string(n) + " per-case MRE(H), cases i..vi:" + seq);
    detail("N=" + std::to_string(n) + " mixed {iv,v,vi}: full " + fmt(all) + ", seen " + fmt(seen) + ", unseen " +
           fmt(unseen));
    const bool n_ok = inversions <= 1 && all <= 0.20 && unseen <= 3 * seen;
    ok = ok && n_ok;
    summary += (summary.empty() ? "" : "; ") + std::string("N=") + std::to_string(n) + " inversions " +
               std::to_string(inversions) + " (<= 1), mixed " + fmt(all) + " (<= 0.20), unseen/seen " +
               fmt(unseen / seen) + " (<= 3)";
  }
  return verdict(5, "coupling-case study", ok, summary);
}

}  // namespace
}  // namespace qmodel

int main(int argc, char** argv) {
  using namespace qmodel;
  CLI::App app{"qmodel acceptance harness"};
  std::vector<int> criteria;
  std::string cache_dir;
  int epochs = 200;
  int workers = default_workers();
  bool quiet = false;
  app.add_option("criteria", criteria, "criteria to run (1-6); default: all")->check(CLI::Range(1, 6));
  app.add_option("--cache", cache_dir, "dataset and checkpoint cache directory");
  app.add_option("--epochs", epochs, "training epochs for regression criteria")->check(CLI::PositiveNumber);
  app.add_option("-j,--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "suppress progress on stderr");
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6};

  ExperimentConfig base;
  base.workers = workers;
  base.train.epochs = epochs;
  base.cache_dir = cache_dir;
  const auto t0 = Clock::now();
  if (!quiet) {
    base.log = [t0](const std::string& msg) {
      std::fprintf(stderr, "[%9.1fs] %s\n", seconds_since(t0), msg.c_str());
    };
  }

  bool all = true;
  for (int id : criteria) {
    try {
      switch (id) {
        case 1: all = criterion_classification(base) && all; break;
        case 2: all = criterion_regression(base) && all; break;
        case 3: all = criterion_flatness(base) && all; break;
        case 4: all = criterion_sweep(base) && all; break;
        case 5: all = criterion_case_study(base) && all; break;
        case 6: all = criterion_properties() && all; break;
      }
    } catch (const std::exception& e) {
      verdict(id, "error", false, e.what());
      all = false;
    }
  }
  return all ? 0 : 1;
}
