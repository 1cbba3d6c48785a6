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

#include "qmodel/dataset.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qmodel/error.h"
#include "qmodel/io.h"
#include "qmodel/parallel.h"

namespace qmodel {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "qmodel-dataset";

void append_array(std::string& out, std::span<const double> v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    append_double(out, v[i]);
  }
  out += ']';
}

void append_key(std::string& out, const char* key) {
  out += '"';
  out += key;
  out += "\":";
}

std::string spec_json(const RealizationSpec& s) {
  std::string out = "{";
  append_key(out, "n_states");
  out += std::to_string(s.n_states);
  out += ',';
  append_key(out, "q_count");
  out += std::to_string(s.q_count);
  out += ',';
  append_key(out, "t_star");
  append_double(out, s.t_star);
  out += ',';
  append_key(out, "h_max");
  append_double(out, s.h_max);
  out += ',';
  append_key(out, "gamma_max");
  append_double(out, s.gamma_max);
  out += ',';
  append_key(out, "gamma_mean_override");
  if (s.gamma_mean_override) {
    append_double(out, *s.gamma_mean_override);
  } else {
    out += "null";
  }
  out += ',';
  append_key(out, "coupling_case_ids");
  out += '[';
  for (std::size_t i = 0; i < s.coupling_case_ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.coupling_case_ids[i]);
  }
  out += "],";
  append_key(out, "coupling_j");
  append_double(out, s.coupling_j);
  out += ',';
  append_key(out, "coupling_r_min");
  append_double(out, s.coupling_r_min);
  out += ',';
  append_key(out, "coupling_r_max");
  append_double(out, s.coupling_r_max);
  out += ',';
  append_key(out, "coupling_seed");
  out += std::to_string(s.coupling_seed);
  out += ',';
  append_key(out, "master_seed");
  out += std::to_string(s.master_seed);
  out += ',';
  append_key(out, "record_count");
  out += std::to_string(s.record_count);
  out += '}';
  return out;
}

RealizationSpec spec_from_json(const json& j) {
  RealizationSpec s;
  s.n_states = j.at("n_states").get<int>();
  s.q_count = j.at("q_count").get<int>();
  s.t_star = j.at("t_star").get<double>();
  s.h_max = j.at("h_max").get<double>();
  s.gamma_max = j.at("gamma_max").get<double>();
  if (!j.at("gamma_mean_override").is_null()) s.gamma_mean_override = j.at("gamma_mean_override").get<double>();
  s.coupling_case_ids = j.at("coupling_case_ids").get<std::vector<int>>();
  s.coupling_j = j.at("coupling_j").get<double>();
  s.coupling_r_min = j.at("coupling_r_min").get<double>();
  s.coupling_r_max = j.at("coupling_r_max").get<double>();
  s.coupling_seed = j.at("coupling_seed").get<std::uint64_t>();
  s.master_seed = j.at("master_seed").get<std::uint64_t>();
  s.record_count = j.at("record_count").get<int>();
  return s;
}

std::string header_line(const DatasetFile& file) {
  std::string out = "{";
  append_key(out, "format");
  out += '"';
  out += kFormatName;
  out += "\",";
  append_key(out, "version");
  out += std::to_string(kDatasetFormatVersion);
  out += ',';
  append_key(out, "creation_seed");
  out += std::to_string(file.spec.master_seed);
  out += ',';
  append_key(out, "spec");
  out += spec_json(file.spec);
  out += ',';
  append_key(out, "coupling_sets");
  out += '[';
  for (std::size_t c = 0; c < file.coupling_sets.size(); ++c) {
    const OutputCouplingSet& set = file.coupling_sets[c];
    if (c) out += ',';
    out += '{';
    append_key(out, "case_id");
    out += std::to_string(set.case_id);
    out += ',';
    append_key(out, "kappa");
    out += '[';
    for (int q = 0; q < set.q_count(); ++q) {
      if (q) out += ',';
      append_array(out, set.row(q));
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

std::string record_line(const Record& r) {
  std::string out = "{";
  append_key(out, "id");
  out += std::to_string(r.record_id);
  out += ',';
  append_key(out, "case");
  out += std::to_string(r.coupling_case_id);
  out += ',';
  append_key(out, "h");
  append_array(out, r.label_h);
  out += ',';
  append_key(out, "gamma");
  append_array(out, r.label_gamma);
  out += ',';
  append_key(out, "p");
  append_array(out, r.features);
  out += '}';
  return out;
}

void check_record(const Record& r, int n, int q, const std::string& where) {
  if (static_cast<int>(r.features.size()) != q)
    throw ParseError(where + ": expected " + std::to_string(q) + " features, got " + std::to_string(r.features.size()));
  if (static_cast<int>(r.label_h.size()) != n * n || static_cast<int>(r.label_gamma.size()) != n)
    throw ParseError(where + ": label sizes do not match N = " + std::to_string(n));
  for (double p : r.features) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw ParseError(where + ": feature outside [0, 1]");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (r.label_h[a * n + b] != r.label_h[b * n + a]) throw ParseError(where + ": label_h not symmetric");
    }
  }
}

}  // namespace

void RealizationSpec::validate() const {
  if (n_states < 1) throw InvalidArgument("spec: n_states must be >= 1");
  if (q_count < 1) throw InvalidArgument("spec: q_count must be >= 1");
  if (!(t_star > 0)) throw InvalidArgument("spec: t_star must be positive");
  if (!(h_max > 0)) throw InvalidArgument("spec: h_max must be positive");
  if (!(gamma_max >= 0)) throw InvalidArgument("spec: gamma_max must be nonnegative");
  if (gamma_mean_override && !(*gamma_mean_override > 0))
    throw InvalidArgument("spec: gamma_mean_override must be positive");
  if (record_count < 0) throw InvalidArgument("spec: record_count must be nonnegative");
  if (coupling_case_ids.empty()) throw InvalidArgument("spec: coupling_case_ids is empty");
  for (int c : coupling_case_ids) {
    if (c < 1 || c > 6) throw InvalidArgument("spec: coupling case ids must be in 1..6");
  }
}

std::vector<OutputCouplingSet> coupling_sets_for(const RealizationSpec& spec) {
  std::vector<OutputCouplingSet> sets;
  for (int id : spec.coupling_case_ids) {
    const CouplingCase c =
        standard_case(id, spec.coupling_seed, spec.coupling_j, spec.coupling_r_min, spec.coupling_r_max);
    sets.push_back(generate_coupling_set(c, spec.n_states, spec.q_count));
  }
  return sets;
}

EffectiveModel sample_model(Rng& rng, int n_states, double h_max, double gamma_max) {
  if (n_states < 1) throw InvalidArgument("sample_model: n_states must be >= 1");
  EffectiveModel m{Eigen::MatrixXd::Zero(n_states, n_states), Eigen::VectorXd::Zero(n_states)};
  for (int a = 0; a < n_states; ++a) {
    for (int b = a; b < n_states; ++b) {
      const double v = h_max * rng.uniform();
      m.h(a, b) = v;
      m.h(b, a) = v;
    }
  }
  for (int a = 0; a < n_states; ++a) m.gamma[a] = gamma_max * rng.uniform();
  return m;
}

EffectiveModel sample_model_with_mean_gamma(Rng& rng, int n_states, double h_max, double gamma_bar) {
  if (!(gamma_bar > 0)) throw InvalidArgument("sample_model_with_mean_gamma: gamma_bar must be positive");
  return sample_model(rng, n_states, h_max, 2.0 * gamma_bar);
}

std::vector<double> generate_record(const EffectiveModel& model, const OutputCouplingSet& couplings,
                                    double t_star) {
  model.validate();
  const int n = model.n_states();
  if (couplings.n_states() != n) throw InvalidArgument("generate_record: coupling set is for a different N");
  const DensityMatrix rho0 = DensityMatrix::basis_state(n + 1, initial_state_index(n));
  const std::span<const double> gamma(model.gamma.data(), static_cast<std::size_t>(n));
  std::vector<double> features(static_cast<std::size_t>(couplings.q_count()));
  for (int q = 0; q < couplings.q_count(); ++q) {
    const Liouvillian liou = build_liouvillian(assemble_hamiltonian(model, couplings.row(q)), gamma);
    const DensityMatrix rho = propagate_expm(liou, rho0, t_star);
    try {
      validate_density_matrix(rho);
      features[static_cast<std::size_t>(q)] = output_population(rho);
    } catch (const Error& e) {
      throw Error(e.category(), "coupling row " + std::to_string(q) + ": " + e.what());
    }
  }
  return features;
}

Record make_record(const RealizationSpec& spec, std::span<const OutputCouplingSet> coupling_sets,
                   int index) {
  const std::size_t case_slot = static_cast<std::size_t>(index) % spec.coupling_case_ids.size();
  const OutputCouplingSet& couplings = coupling_sets[case_slot];
  Rng rng(derive_seed(spec.master_seed, static_cast<std::uint64_t>(index)));
  const EffectiveModel model =
      spec.gamma_mean_override
          ? sample_model_with_mean_gamma(rng, spec.n_states, spec.h_max, *spec.gamma_mean_override)
          : sample_model(rng, spec.n_states, spec.h_max, spec.gamma_max);
  Record r;
  r.record_id = index;
  r.coupling_case_id = couplings.case_id;
  try {
    r.features = generate_record(model, couplings, spec.t_star);
  } catch (const Error& e) {
    throw Error(e.category(), "record " + std::to_string(index) + ": " + e.what());
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h = model.h;
  r.label_h.assign(h.data(), h.data() + h.size());
  r.label_gamma.assign(model.gamma.data(), model.gamma.data() + model.gamma.size());
  return r;
}

DatasetFile generate_dataset(const RealizationSpec& spec, int workers) {
  spec.validate();
  DatasetFile file;
  file.spec = spec;
  file.coupling_sets = coupling_sets_for(spec);
  file.records.resize(static_cast<std::size_t>(spec.record_count));
  parallel_for(file.records.size(), workers, [&](std::size_t i) {
    file.records[i] = make_record(spec, file.coupling_sets, static_cast<int>(i));
  });
  return file;
}

std::string serialize_dataset(const DatasetFile& file) {
  if (static_cast<int>(file.records.size()) != file.spec.record_count)
    throw InvalidArgument("serialize_dataset: record count differs from spec.record_count");
  std::string out = header_line(file);
  out += '\n';
  for (const Record& r : file.records) {
    out += record_line(r);
    out += '\n';
  }
  return out;
}

DatasetFile parse_dataset(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto parse_line = [&](const std::string& text) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  };

  if (!std::getline(in, line)) throw ParseError("dataset line 1: missing header");
  ++line_no;
  const json header = parse_line(line);
  DatasetFile file;
  try {
    if (header.at("format").get<std::string>() != kFormatName) throw ParseError("dataset line 1: not a qmodel dataset");
    const int version = header.at("version").get<int>();
    if (version != kDatasetFormatVersion)
      throw ParseError("dataset version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kDatasetFormatVersion) + ")");
    file.spec = spec_from_json(header.at("spec"));
    file.spec.validate();
    for (const json& cj : header.at("coupling_sets")) {
      OutputCouplingSet set;
      set.case_id = cj.at("case_id").get<int>();
      const auto rows = cj.at("kappa").get<std::vector<std::vector<double>>>();
      set.kappa.resize(static_cast<Eigen::Index>(rows.size()), file.spec.n_states);
      for (std::size_t q = 0; q < rows.size(); ++q) {
        if (static_cast<int>(rows[q].size()) != file.spec.n_states)
          throw ParseError("dataset line 1: coupling row has wrong length");
        for (int n = 0; n < file.spec.n_states; ++n) set.kappa(static_cast<Eigen::Index>(q), n) = rows[q][n];
      }
      if (set.q_count() != file.spec.q_count) throw ParseError("dataset line 1: coupling set has wrong Q");
      file.coupling_sets.push_back(std::move(set));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset line 1: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("dataset line 1: ") + e.what());
  }

  const int n = file.spec.n_states;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = parse_line(line);
    Record r;
    const std::string where = "dataset line " + std::to_string(line_no);
    try {
      r.record_id = j.at("id").get<int>();
      r.coupling_case_id = j.at("case").get<int>();
      r.label_h = j.at("h").get<std::vector<double>>();
      r.label_gamma = j.at("gamma").get<std::vector<double>>();
      r.features = j.at("p").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    check_record(r, n, file.spec.q_count, where);
    file.records.push_back(std::move(r));
  }
  if (static_cast<int>(file.records.size()) != file.spec.record_count) {
    throw ParseError("dataset truncated: header declares " + std::to_string(file.spec.record_count) +
                     " records, found " + std::to_string(file.records.size()));
  }
  return file;
}

void save_dataset(const DatasetFile& file, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dataset(file));
}

DatasetFile load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  try {
    return parse_dataset(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

EffectiveModel record_model(const Record& record, int n_states) {
  EffectiveModel m{Eigen::MatrixXd(n_states, n_states), Eigen::VectorXd(n_states)};
  for (int a = 0; a < n_states; ++a) {
    for (int b = 0; b < n_states; ++b) m.h(a, b) = record.label_h[static_cast<std::size_t>(a * n_states + b)];
    m.gamma[a] = record.label_gamma[static_cast<std::size_t>(a)];
  }
  return m;
}

}  // namespace qmodel
