// Copyright 2026 The hqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hqem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <gsl/gsl_version.h>
#include <toml.hpp>

#include "hqem/analysis.hpp"
#include "hqem/bench.hpp"
#include "hqem/errors.hpp"
#include "hqem/propagate.hpp"

#ifndef HQEM_VERSION
#define HQEM_VERSION "0.0.0"
#endif

namespace hqem {

using json = nlohmann::json;

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Vqe: return "vqe";
    case ExperimentKind::Overhead: return "overhead";
    case ExperimentKind::Infidelity: return "infidelity";
    case ExperimentKind::Cb: return "cb";
    case ExperimentKind::TwirlBench: return "twirl-bench";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (auto k : {ExperimentKind::Vqe, ExperimentKind::Overhead, ExperimentKind::Infidelity,
                 ExperimentKind::Cb, ExperimentKind::TwirlBench}) {
    if (experiment_name(k) == name) return k;
  }
  throw ValidationError(fmt::format(
      "experiment: unknown experiment '{}' (expected vqe, overhead, infidelity, cb or twirl-bench)",
      name));
}

namespace {

std::string section_key(ExperimentKind kind) {
  return kind == ExperimentKind::TwirlBench ? "twirl_bench" : experiment_name(kind);
}

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  const auto& src = node.source();
  throw ParseError(fmt::format("line {}: date and time values are not supported", src.begin.line),
                   src.begin.line);
}

// Reads fields of one JSON object, remembering which keys were consumed so leftovers can be
// reported as unknown fields.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(fmt::format("{}: expected a table", where()));
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key, std::optional<double> def, double lo, double hi) {
    const json* v = take(key, def.has_value());
    if (v == nullptr) return *def;
    if (!v->is_number()) throw bad(key, "expected a number");
    const double x = v->get<double>();
    if (!(x >= lo && x <= hi)) throw bad(key, fmt::format("{} outside [{}, {}]", x, lo, hi));
    return x;
  }

  std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> def, std::uint64_t lo,
                        std::uint64_t hi) {
    const json* v = take(key, def.has_value());
    if (v == nullptr) return *def;
    return as_integer(*v, key, lo, hi);
  }

  std::string text(const std::string& key, std::optional<std::string> def,
                   const std::vector<std::string>& allowed = {}) {
    const json* v = take(key, def.has_value());
    if (v == nullptr) return *def;
    if (!v->is_string()) throw bad(key, "expected a string");
    std::string s = v->get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      throw bad(key, fmt::format("'{}' is not one of {}", s, fmt::join(allowed, ", ")));
    }
    return s;
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = take(key, true);
    if (v == nullptr) return def;
    if (!v->is_boolean()) throw bad(key, "expected true or false");
    return v->get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def, double lo, double hi) {
    const json* v = take(key, true);
    if (v == nullptr) return def;
    if (!v->is_array() || v->empty()) throw bad(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number()) throw bad(fmt::format("{}[{}]", key, i), "expected a number");
      const double x = e.get<double>();
      if (!(x >= lo && x <= hi)) {
        throw bad(fmt::format("{}[{}]", key, i), fmt::format("{} outside [{}, {}]", x, lo, hi));
      }
      out.push_back(x);
    }
    return out;
  }

  std::vector<std::uint64_t> integers(const std::string& key, std::vector<std::uint64_t> def,
                                      std::uint64_t lo, std::uint64_t hi) {
    const json* v = take(key, true);
    if (v == nullptr) return def;
    if (!v->is_array() || v->empty()) throw bad(key, "expected a non-empty array of integers");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(as_integer((*v)[i], fmt::format("{}[{}]", key, i), lo, hi));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> def,
                                   const std::vector<std::string>& allowed) {
    const json* v = take(key, true);
    if (v == nullptr) return def;
    if (!v->is_array() || v->empty()) throw bad(key, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string k = fmt::format("{}[{}]", key, i);
      if (!e.is_string()) throw bad(k, "expected a string");
      std::string s = e.get<std::string>();
      if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        throw bad(k, fmt::format("'{}' is not one of {}", s, fmt::join(allowed, ", ")));
      }
      if (std::find(out.begin(), out.end(), s) != out.end()) throw bad(k, "duplicate entry");
      out.push_back(std::move(s));
    }
    return out;
  }

  // Map of Pauli label to rate.
  std::map<std::string, double> rate_table(const std::string& key,
                                           std::map<std::string, double> def) {
    const json* v = take(key, true);
    if (v == nullptr) return def;
    if (!v->is_object() || v->empty()) throw bad(key, "expected a table of Pauli label = rate");
    std::map<std::string, double> out;
    for (const auto& [label, rate] : v->items()) {
      const std::string k = fmt::format("{}.{}", key, label);
      if (!rate.is_number()) throw bad(k, "expected a number");
      const double r = rate.get<double>();
      if (!(r >= 0.0 && r <= 1.0)) throw bad(k, fmt::format("{} outside [0, 1]", r));
      out[label] = r;
    }
    return out;
  }

  Fields section(const std::string& key) {
    static const json empty = json::object();
    const json* v = take(key, true);
    return Fields(v == nullptr ? empty : *v, path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.count(k)) throw bad(k, "unknown field");
    }
  }

  ValidationError bad(const std::string& key, const std::string& what) const {
    return ValidationError(fmt::format("{}: {}", path_.empty() ? key : path_ + "." + key, what));
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json* take(const std::string& key, bool optional) {
    used_.insert(key);
    if (!obj_.contains(key)) {
      if (!optional) throw bad(key, "missing required field");
      return nullptr;
    }
    return &obj_.at(key);
  }

  std::uint64_t as_integer(const json& v, const std::string& key, std::uint64_t lo,
                           std::uint64_t hi) const {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw bad(key, "expected a non-negative integer");
    }
    const std::uint64_t x = v.get<std::uint64_t>();
    if (x < lo || x > hi) throw bad(key, fmt::format("{} outside [{}, {}]", x, lo, hi));
    return x;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

constexpr std::uint64_t kMaxU64 = std::numeric_limits<std::uint64_t>::max();

const std::vector<std::string> kVqeModes{"noisy", "qedc", "hybrid"};
const std::vector<std::string> kTwirlModes{"none", "full", "partial"};

std::vector<std::string> pauli_letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::uint64_t j = 0; j < pauli_count(n); ++j) out.push_back(label_letters(n, PauliLabel(j)));
  return out;
}

json validate_vqe(Fields& f) {
  json p;
  p["p"] = f.number("p", 0.01, 0.0, 1.0);
  p["repetitions"] = f.integer("repetitions", 100, 1, 1000000);
  p["thetas"] = f.numbers("thetas", default_theta_grid(), -4.0 * std::numbers::pi, 4.0 * std::numbers::pi);
  p["modes"] = f.strings("modes", kVqeModes, kVqeModes);
  p["readout_flip"] = f.number("readout_flip", 0.0, 0.0, 0.5);
  p["ibu_iterations"] = f.integer("ibu_iterations", 2, 0, 1000);
  p["probability_floor"] = f.number("probability_floor", 1e-12, 0.0, 1e-3);
  p["rz_qubit"] = f.text("rz_qubit", "last", {"last", "first"});
  p["pes"] = f.boolean("pes", true);
  p["pes_grid_points"] = f.integer("pes_grid_points", 2000, 2, 1000000);
  const auto& th = p["thetas"];
  for (std::size_t i = 1; i < th.size(); ++i) {
    if (!(th[i].get<double>() > th[i - 1].get<double>())) {
      throw f.bad(fmt::format("thetas[{}]", i), "theta grid must be strictly increasing");
    }
  }
  if (p["pes"].get<bool>() && th.size() < 4) throw f.bad("thetas", "PES spline needs at least 4 points");
  return p;
}

json validate_overhead(Fields& f) {
  json p;
  p["n_unencoded"] = f.integer("n_unencoded", 4, 1, 8);
  p["n_encoded"] = f.integer("n_encoded", 6, 4, 8);
  if (p["n_encoded"].get<std::uint64_t>() % 2 != 0) throw f.bad("n_encoded", "must be even");
  p["layers"] = f.integers("layers", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1, 10000);
  p["error_rates"] = f.numbers("error_rates", {0.001, 0.002, 0.005, 0.01, 0.015, 0.02}, 0.0, 0.5);
  return p;
}

json validate_infidelity(Fields& f) {
  json p;
  p["points"] = f.integer("points", 50, 2, 100000);
  p["omega_min"] = f.number("omega_min", 0.0, -2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  p["omega_max"] = f.number("omega_max", std::numbers::pi / 2, -2.0 * std::numbers::pi,
                            2.0 * std::numbers::pi);
  if (!(p["omega_max"].get<double>() > p["omega_min"].get<double>())) {
    throw f.bad("omega_max", "must exceed omega_min");
  }
  return p;
}

json validate_cb(Fields& f) {
  json p;
  p["gate"] = f.text("gate", "ECR", {"ECR", "CX", "CZ", "ISWAP"});
  const auto rates = f.rate_table("noise", {{"XI", 0.004}, {"IZ", 0.003}, {"ZZ", 0.002}, {"YX", 0.001}});
  const auto labels = pauli_letters(2);
  double mass = 0.0;
  for (const auto& [label, r] : rates) {
    if (label == "II" || std::find(labels.begin(), labels.end(), label) == labels.end()) {
      throw f.bad("noise." + label, "expected a non-identity two-letter Pauli label");
    }
    mass += r;
  }
  if (mass >= 1.0) throw f.bad("noise", "error rates must sum to less than 1");
  p["noise"] = rates;
  std::vector<std::uint64_t> dd(kDefaultCbDepths.begin(), kDefaultCbDepths.end());
  p["depths"] = f.integers("depths", dd, 1, 100000);
  p["instances"] = f.integer("instances", 4, 1, 100000);
  p["readout_flip"] = f.number("readout_flip", 0.0, 0.0, 0.5);
  return p;
}

json validate_twirl_bench(Fields& f) {
  json p;
  p["eps"] = f.number("eps", 0.05, -std::numbers::pi, std::numbers::pi);
  p["depths"] = f.integers("depths", {1, 2, 4, 8, 16}, 1, 10000);
  p["modes"] = f.strings("modes", kTwirlModes, kTwirlModes);
  p["partial_max_size"] = f.integer("partial_max_size", 8, 1, 64);
  return p;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment_name(kind);
  j["seed"] = seed;
  j["shots"] = shots;
  j["output"] = output;
  j[section_key(kind)] = params;
  return j;
}

json parse_config_document(std::string_view text, ConfigFormat format) {
  if (format == ConfigFormat::Auto) {
    const auto first = text.find_first_not_of(" \t\r\n");
    format = first != std::string_view::npos && text[first] == '{' ? ConfigFormat::Json
                                                                   : ConfigFormat::Toml;
  }
  if (format == ConfigFormat::Json) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("invalid JSON config: {}", e.what()), e.byte);
    }
  }
  try {
    const toml::table t = toml::parse(text);
    return toml_to_json(t);
  } catch (const toml::parse_error& e) {
    throw ParseError(fmt::format("invalid TOML config at line {}: {}", e.source().begin.line,
                                 e.description()),
                     e.source().begin.line);
  }
}

ExperimentConfig validate_config(const json& doc) {
  Fields top(doc, "");
  ExperimentConfig c;
  c.kind = experiment_kind_from_name(top.text("experiment", std::nullopt));
  c.seed = top.integer("seed", 1, 0, kMaxU64);
  const bool sampled = c.kind == ExperimentKind::Vqe || c.kind == ExperimentKind::Cb ||
                       c.kind == ExperimentKind::TwirlBench;
  c.shots = sampled ? top.integer("shots", std::nullopt, 1, std::uint64_t{1} << 40)
                    : top.integer("shots", 0, 0, std::uint64_t{1} << 40);
  c.output = top.text("output", "out/" + experiment_name(c.kind));
  Fields sec = top.section(section_key(c.kind));
  switch (c.kind) {
    case ExperimentKind::Vqe: c.params = validate_vqe(sec); break;
    case ExperimentKind::Overhead: c.params = validate_overhead(sec); break;
    case ExperimentKind::Infidelity: c.params = validate_infidelity(sec); break;
    case ExperimentKind::Cb: c.params = validate_cb(sec); break;
    case ExperimentKind::TwirlBench: c.params = validate_twirl_bench(sec); break;
  }
  sec.finish();
  top.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigFormat format = ConfigFormat::Auto;
  if (path.extension() == ".json") format = ConfigFormat::Json;
  if (path.extension() == ".toml") format = ConfigFormat::Toml;
  return validate_config(parse_config_document(ss.str(), format));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

json version_info() {
  json v;
  v["hqem"] = HQEM_VERSION;
  v["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  v["fmt"] = fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
  v["nlohmann_json"] = fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                   NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH);
  v["tomlplusplus"] = fmt::format("{}.{}.{}", TOML_LIB_MAJOR, TOML_LIB_MINOR, TOML_LIB_PATCH);
  v["gsl"] = GSL_VERSION;
  v["boost"] = BOOST_LIB_VERSION;
  v["compiler"] = __VERSION__;
  return v;
}

namespace {

ReadoutModel flip_readout(std::size_t n, double flip) { return ReadoutModel::symmetric(n, flip); }

Gate two_qubit_gate(const std::string& name) {
  if (name == "ECR") return Gate::ecr(0, 1);
  if (name == "CX") return Gate::cx(0, 1);
  if (name == "CZ") return Gate::cz(0, 1);
  return Gate::iswap(0, 1);
}

RunResult run_vqe(const ExperimentConfig& c) {
  const json& p = c.params;
  VqeConfig vc;
  vc.thetas = p["thetas"].get<std::vector<double>>();
  vc.p = p["p"].get<double>();
  vc.shots = c.shots;
  vc.repetitions = p["repetitions"].get<std::size_t>();
  vc.modes.clear();
  for (const auto& m : p["modes"]) {
    const std::string s = m.get<std::string>();
    vc.modes.push_back(s == "noisy" ? VqeMode::Noisy : s == "qedc" ? VqeMode::Qedc : VqeMode::Hybrid);
  }
  const double flip = p["readout_flip"].get<double>();
  if (flip > 0.0) vc.readout = flip_readout(4, flip);
  vc.ibu_iterations = p["ibu_iterations"].get<std::size_t>();
  vc.probability_floor = p["probability_floor"].get<double>();
  vc.rotation = p["rz_qubit"].get<std::string>() == "first" ? RotationQubit::First : RotationQubit::Last;
  vc.seed = c.seed;

  const VqeResult res = run_vqe_experiment(vc);
  RunResult out;
  out.artifacts.push_back({"expectations.csv", expectations_csv(res)});

  json info = json::array();
  for (const auto& t : res.info) {
    json row;
    row["theta"] = t.theta;
    row["acceptance"] = t.acceptance;
    row["gamma"] = t.gamma;
    row["offdiagonal_bias"] = t.offdiagonal_bias;
    row["reduced_channel"] = to_json(t.reduced);
    info.push_back(row);
  }
  out.artifacts.push_back({"vqe_theta_info.json", info.dump(2) + "\n"});

  for (VqeMode m : vc.modes) {
    out.notes.push_back(fmt::format("max |bias| {}: {:.6f}", vqe_mode_name(m), res.max_bias(m)));
  }

  if (p["pes"].get<bool>()) {
    PesOptions po;
    po.grid_points = p["pes_grid_points"].get<std::size_t>();
    std::vector<std::pair<std::string, std::vector<PesRow>>> curves;
    std::vector<H2Expectations> ideal;
    for (double t : vc.thetas) ideal.push_back(ucc_expectations(t));
    curves.emplace_back("ideal", pes_curve(vc.thetas, ideal, h2_table(), po));
    for (VqeMode m : vc.modes) {
      curves.emplace_back(vqe_mode_name(m),
                          pes_curve(vc.thetas, vqe_expectation_table(res, m), h2_table(), po));
    }
    for (const auto& [name, rows] : curves) {
      const auto best = std::min_element(rows.begin(), rows.end(),
                                         [](const PesRow& a, const PesRow& b) { return a.energy < b.energy; });
      out.notes.push_back(fmt::format("PES minimum {}: E = {:.6f} Ha at R = {}", name, best->energy, best->r));
    }
    out.artifacts.push_back({"pes.csv", pes_csv(curves)});
  }
  return out;
}

RunResult run_overhead(const ExperimentConfig& c) {
  const json& p = c.params;
  OverheadConfig oc;
  oc.n_unencoded = p["n_unencoded"].get<std::size_t>();
  oc.n_encoded = p["n_encoded"].get<std::size_t>();
  oc.layers = p["layers"].get<std::vector<std::size_t>>();
  oc.error_rates = p["error_rates"].get<std::vector<double>>();
  const auto rows = overhead_study(oc);
  RunResult out;
  out.artifacts.push_back({"overhead.csv", overhead_csv(rows)});
  std::size_t ordered = 0;
  for (const auto& r : rows) {
    if (r.gamma2_hybrid <= r.gamma2_end && r.gamma2_end <= r.gamma2_layer) ++ordered;
  }
  out.notes.push_back(fmt::format("rows with gamma2_hybrid <= gamma2_end <= gamma2_layer: {}/{}",
                                  ordered, rows.size()));
  return out;
}

RunResult run_infidelity(const ExperimentConfig& c) {
  const json& p = c.params;
  const std::size_t n = p["points"].get<std::size_t>();
  const double lo = p["omega_min"].get<double>();
  const double hi = p["omega_max"].get<double>();
  std::vector<double> omegas(n);
  for (std::size_t i = 0; i < n; ++i) omegas[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  const auto rows = infidelity_curves(omegas);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.stats.r_bar - r.closed_form));
  RunResult out;
  out.artifacts.push_back({"infidelity.csv", infidelity_csv(rows)});
  out.notes.push_back(fmt::format("max |chi-numeric - closed form|: {:.3g}", worst));
  return out;
}

RunResult run_cb(const ExperimentConfig& c) {
  const json& p = c.params;
  const Gate gate = two_qubit_gate(p["gate"].get<std::string>());
  std::vector<double> rates(16, 0.0);
  double mass = 0.0;
  for (const auto& [label, r] : p["noise"].items()) {
    rates[PauliString::parse(label).label().value()] = r.get<double>();
    mass += r.get<double>();
  }
  rates[0] = 1.0 - mass;
  const PauliChannel noise(2, rates);
  CbOptions o;
  o.depths = p["depths"].get<std::vector<std::size_t>>();
  o.shots = c.shots;
  o.instances = p["instances"].get<std::size_t>();
  const double flip = p["readout_flip"].get<double>();
  if (flip > 0.0) o.readout = flip_readout(2, flip);
  o.seed = c.seed;
  const auto records = learn_pauli_fidelities(gate, noise, o);

  json doc;
  doc["gate"] = p["gate"];
  doc["injected"] = to_json(noise);
  doc["injected_fidelities"] = to_json(fidelities_from_rates(noise));
  json recs = json::array();
  for (const auto& r : records) recs.push_back(to_json(r));
  doc["records"] = recs;
  doc["partition"] = learnability_partition(gate);

  RunResult out;
  out.artifacts.push_back({"cb_fidelities.json", doc.dump(2) + "\n"});
  out.artifacts.push_back({"cb_points.csv", cb_points_csv(records)});
  return out;
}

RunResult run_twirl_bench(const ExperimentConfig& c) {
  const json& p = c.params;
  TwirlBenchmarkConfig tc;
  tc.gate_sequence = default_twirl_benchmark_sequence();
  tc.noise = coherent_rx_noise(3, p["eps"].get<double>());
  tc.depths = p["depths"].get<std::vector<std::size_t>>();
  tc.modes.clear();
  for (const auto& m : p["modes"]) {
    const std::string s = m.get<std::string>();
    tc.modes.push_back(s == "none" ? TwirlMode::None : s == "full" ? TwirlMode::Full : TwirlMode::Partial);
  }
  tc.partial_max_size = p["partial_max_size"].get<std::size_t>();
  tc.shots = c.shots;
  tc.seed = c.seed;
  const auto res = run_twirl_benchmark(tc);

  json doc;
  doc["order"] = res.order;
  doc["partial_set"] = to_json(res.partial_set);
  doc["partial_set_pre_gate"] = to_json(res.partial_set_pre_gate);
  doc["objective"] = res.partial_report.objective;
  doc["offdiagonal_before"] = res.partial_report.offdiagonal_before;
  doc["offdiagonal_after"] = res.partial_report.offdiagonal_after;

  RunResult out;
  out.artifacts.push_back({"twirl_bench.csv", twirl_benchmark_csv(res)});
  out.artifacts.push_back({"twirl_bench.json", doc.dump(2) + "\n"});
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  RunResult out;
  try {
    switch (config.kind) {
      case ExperimentKind::Vqe: out = run_vqe(config); break;
      case ExperimentKind::Overhead: out = run_overhead(config); break;
      case ExperimentKind::Infidelity: out = run_infidelity(config); break;
      case ExperimentKind::Cb: out = run_cb(config); break;
      case ExperimentKind::TwirlBench: out = run_twirl_bench(config); break;
    }
  } catch (const Error& e) {
    throw ConsistencyError(fmt::format("{} experiment failed: {}", experiment_name(config.kind), e.what()));
  }
  const json cfg = config.to_json();
  json m;
  m["experiment"] = experiment_name(config.kind);
  m["seed"] = config.seed;
  m["config"] = cfg;
  m["config_hash"] = fnv1a_hex(cfg.dump());
  m["versions"] = version_info();
  json arts = json::array();
  for (const auto& a : out.artifacts) {
    arts.push_back({{"name", a.name}, {"fnv1a", fnv1a_hex(a.content)}, {"bytes", a.content.size()}});
  }
  m["artifacts"] = arts;
  m["notes"] = out.notes;
  out.manifest = m;
  return out;
}

void write_run(const RunResult& result, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(directory / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError(fmt::format("cannot write {}", (directory / name).string()));
    f << content;
  };
  for (const auto& a : result.artifacts) write(a.name, a.content);
  write("manifest.json", result.manifest.dump(2) + "\n");
}

json noise_report(const Circuit& circuit, const std::optional<CodeSpec>& code,
                  double probability_floor) {
  AccumulateOptions opts;
  opts.probability_floor = probability_floor;
  const ErrorEnsemble total = accumulate_total_noise(circuit, opts);
  json j;
  j["total"] = to_json(total);
  if (code) {
    const ErrorEnsemble filtered = filter_detectable(total, *code, DetectionFrame::Decoded);
    j["filtered"] = to_json(filtered);
    j["acceptance"] = filtered.acceptance;
    j["reduced"] = to_json(reduce_to_pauli(filtered));
  } else {
    j["reduced"] = to_json(reduce_to_pauli(total));
  }
  return j;
}

std::string h2_table_slice(double r_min, double r_max) {
  std::string out = "R,g1,g2,g5,g3,g4\n";
  for (const auto& r : h2_table()) {
    if (r.r + 1e-12 < r_min || r.r - 1e-12 > r_max) continue;
    out += fmt::format("{},{},{},{},{},{}\n", r.r, r.g1, r.g2, r.g5, r.g3, r.g4);
  }
  return out;
}

}  // namespace hqem
