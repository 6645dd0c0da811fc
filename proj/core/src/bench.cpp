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

#include "hqem/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>

#include "hqem/codes.hpp"
#include "hqem/errors.hpp"
#include "hqem/parallel.hpp"
#include "hqem/propagate.hpp"

namespace hqem {

namespace {

constexpr std::array<const char*, 9> kCbBases = {"XX", "XY", "XZ", "YX", "YY",
                                                 "YZ", "ZX", "ZY", "ZZ"};

void add_prep(Circuit& c, const PauliString& basis) {
  std::vector<Gate> h;
  std::vector<Gate> s;
  for (std::size_t q = 0; q < basis.n_qubits(); ++q) {
    const char l = basis.letter(q);
    if (l == 'X' || l == 'Y') h.push_back(Gate::h(q));
    if (l == 'Y') s.push_back(Gate::s(q));
  }
  if (!h.empty()) c.add_layer(std::move(h));
  if (!s.empty()) c.add_layer(std::move(s));
}

void add_unprep(Circuit& c, const PauliString& basis) {
  std::vector<Gate> sdg;
  std::vector<Gate> h;
  for (std::size_t q = 0; q < basis.n_qubits(); ++q) {
    const char l = basis.letter(q);
    if (l == 'Y') sdg.push_back(Gate::sdg(q));
    if (l == 'X' || l == 'Y') h.push_back(Gate::h(q));
  }
  if (!sdg.empty()) c.add_layer(std::move(sdg));
  if (!h.empty()) c.add_layer(std::move(h));
}

void add_random_frame(Circuit& c, std::mt19937_64& rng) {
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<Gate> layer;
  for (std::size_t q = 0; q < c.n_qubits(); ++q) {
    const char l = kLetters[pick(rng)];
    if (l != 'I') layer.push_back(Gate::pauli_letter(l, q));
  }
  if (!layer.empty()) c.add_layer(std::move(layer));
}

PauliString track(const Circuit& c, PauliString p) {
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer.gates) p = conjugate_clifford(g, p);
  }
  return p;
}

std::vector<PauliString> sub_strings(const PauliString& basis) {
  std::vector<PauliString> out;
  const std::size_t n = basis.n_qubits();
  const std::uint64_t support = basis.support_mask();
  for (std::uint64_t sub = support; sub != 0; sub = (sub - 1) & support) {
    out.emplace_back(n, basis.x_mask() & sub, basis.z_mask() & sub, 0);
  }
  std::sort(out.begin(), out.end(),
            [](const PauliString& a, const PauliString& b) { return a.letters() < b.letters(); });
  return out;
}

double signed_parity(const std::vector<double>& probs, const PauliString& measured) {
  double acc = 0.0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    acc += (std::popcount(b & measured.z_mask()) & 1) ? -probs[b] : probs[b];
  }
  return measured.phase_exponent() == 2 ? -acc : acc;
}

PauliString conjugate_by_inverse(const Circuit& c, const PauliString& p) {
  return track(c.inverse(), p);
}

}  // namespace

std::size_t unitary_order(const Eigen::MatrixXcd& u, std::size_t max_order) {
  Eigen::MatrixXcd power = u;
  const double d = static_cast<double>(u.rows());
  for (std::size_t k = 1; k <= max_order; ++k) {
    const std::complex<double> tr = power.trace() / d;
    if (std::abs(std::abs(tr) - 1.0) < 1e-10 &&
        (power - tr * Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() < 1e-9) {
      return k;
    }
    power = u * power;
  }
  return 0;
}

void CbDesign::validate() const {
  if (gate.arity() != 2 || gate.targets[0] > 1 || gate.targets[1] > 1) {
    throw ValidationError("cycle benchmarking needs a gate on qubits {0, 1}");
  }
  if (!gate.is_clifford()) throw ValidationError("cycle benchmarking needs a Clifford gate");
  if (basis.n_qubits() != 2 || basis.is_identity()) {
    throw ValidationError("basis must be a non-identity 2-qubit Pauli");
  }
  if (depths.empty()) throw ValidationError("no depths");
  Circuit g(2);
  g.add_gate(gate);
  const std::size_t k = unitary_order(circuit_unitary(g));
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw ValidationError("depths must be strictly increasing");
    }
    if (k != 0 && depths[i] % k != 0) {
      throw ValidationError(fmt::format("depth {} is not a multiple of the gate order {}",
                                        depths[i], k));
    }
  }
  if (shots == 0 || instances == 0) throw ValidationError("need shots and instances");
  if (noise && noise->n_qubits() != 2) throw ValidationError("noise must act on 2 qubits");
}

CbCircuit build_cb_circuit(const CbDesign& design, std::size_t depth, std::uint64_t seed) {
  design.validate();
  std::mt19937_64 rng(seed);
  CbCircuit out;
  out.circuit = Circuit(2);
  Circuit& c = out.circuit;
  add_prep(c, design.basis);
  const std::size_t prep_layers = c.depth();
  for (std::size_t i = 0; i < depth; ++i) {
    if (design.random_frames) add_random_frame(c, rng);
    std::vector<NoiseAttachment> noise;
    if (design.noise) noise.push_back({{0, 1}, *design.noise});
    c.add_layer({design.gate}, std::move(noise));
  }
  if (design.random_frames) add_random_frame(c, rng);
  add_unprep(c, design.basis);

  Circuit body(2);
  for (std::size_t l = prep_layers; l < c.depth(); ++l) body.add_layer(c.layers()[l].gates);
  for (const auto& q : sub_strings(design.basis)) {
    const PauliString m = track(body, q);
    if (m.x_mask() != 0) {
      throw ConsistencyError(fmt::format("{} does not return to its basis after depth {}",
                                         q.letters(), depth));
    }
    out.observables.push_back(q);
    out.measured.push_back(m);
  }
  return out;
}

ExponentialFit fit_exponential(const std::vector<CbPoint>& all_points) {
  if (all_points.size() < 3) throw ValidationError("exponential fit needs at least 3 depths");
  if (all_points.front().value == 0.0) throw ValidationError("exponential fit needs a nonzero leading value");
  auto fail = [&](const std::string& what) {
    std::vector<double> vals;
    for (const auto& q : all_points) vals.push_back(q.value);
    throw FitQualityError(what, vals);
  };
  const bool negative = all_points.front().value < 0.0;
  std::vector<CbPoint> points;
  std::size_t excluded = 0;
  for (const auto& p : all_points) {
    if (p.value != 0.0 && (p.value < 0.0) == negative) {
      points.push_back(p);
    } else if (p.std_error > 0.0 && std::abs(p.value) <= kCbNoiseFloorSigmas * p.std_error) {
      ++excluded;
    } else {
      fail("CB values change sign; no exponential decay");
    }
  }
  if (points.size() < 3) fail("fewer than 3 CB points above the noise floor");
  const bool weighted = std::all_of(points.begin(), points.end(),
                                    [](const CbPoint& p) { return p.std_error > 0.0; });
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = p.depth;
    y(i) = std::log(std::abs(p.value));
    w(i) = weighted ? (p.value * p.value) / (p.std_error * p.std_error) : 1.0;
  }
  const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
  const Eigen::Matrix2d normal = xtw * x;
  const Eigen::Vector2d beta = normal.ldlt().solve(xtw * y);
  const Eigen::VectorXd r = y - x * beta;
  ExponentialFit fit;
  fit.residuals.assign(r.data(), r.data() + r.size());
  const Eigen::Matrix2d inv = normal.inverse();
  if (weighted) {
    fit.covariance = inv;
  } else {
    const double s2 = n > 2 ? r.squaredNorm() / static_cast<double>(n - 2) : 0.0;
    fit.covariance = s2 * inv;
  }
  fit.excluded = excluded;
  fit.amplitude = (negative ? -1.0 : 1.0) * std::exp(beta(0));
  fit.fidelity = std::exp(beta(1));
  if (fit.fidelity > 1.05) {
    throw FitQualityError(fmt::format("CB values grow with depth (f = {:.6f})", fit.fidelity),
                          fit.residuals);
  }
  if (fit.fidelity > 1.0) {
    fit.fidelity = 1.0;
    fit.clamped = true;
  }
  return fit;
}

std::vector<std::vector<std::string>> learnability_partition(const Gate& gate) {
  if (!gate.is_clifford() || gate.arity() != 2) {
    throw ValidationError("learnability partition needs a 2-qubit Clifford gate");
  }
  std::vector<std::vector<std::string>> orbits;
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 1; a < 16; ++a) {
    if (seen.count(a) != 0) continue;
    std::vector<std::string> orbit;
    PauliString p = PauliString::from_label(2, PauliLabel(a));
    while (seen.insert(p.label().value()).second) {
      orbit.push_back(p.letters());
      p = conjugate_clifford(gate, p).unsigned_part();
    }
    std::sort(orbit.begin(), orbit.end());
    orbits.push_back(std::move(orbit));
  }
  std::sort(orbits.begin(), orbits.end());
  return orbits;
}

std::vector<FidelityRecord> learn_pauli_fidelities(const Gate& gate, const PauliChannel& noise,
                                                   const CbOptions& options) {
  struct Task {
    std::size_t basis;
    std::size_t depth;
    std::size_t instance;
  };
  std::vector<Task> tasks;
  for (std::size_t b = 0; b < kCbBases.size(); ++b) {
    for (std::size_t d = 0; d < options.depths.size(); ++d) {
      for (std::size_t i = 0; i < options.instances; ++i) tasks.push_back({b, d, i});
    }
  }
  const std::uint64_t shots_each = std::max<std::uint64_t>(1, options.shots / options.instances);
  // values[task][observable] summed parity estimates.
  std::vector<std::vector<std::pair<std::string, double>>> values(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    CbDesign design;
    design.gate = gate;
    design.basis = PauliString::parse(kCbBases[task.basis]);
    design.depths = options.depths;
    design.noise = noise;
    design.readout = options.readout;
    const std::string label = fmt::format("cb/{}/{}/{}", kCbBases[task.basis],
                                          options.depths[task.depth], task.instance);
    const CbCircuit cb = build_cb_circuit(design, options.depths[task.depth],
                                          stream_seed(options.seed, label + "/frames"));
    const DensityMatrix rho = run_density(cb.circuit, DensityMatrix::zero_state(2));
    std::mt19937_64 rng(stream_seed(options.seed, label + "/shots"));
    auto hist = sample_histogram(rho.probabilities(), shots_each, rng);
    if (options.readout) hist = apply_readout(hist, *options.readout, rng);
    std::vector<double> freq(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) {
      freq[i] = static_cast<double>(hist[i]) / static_cast<double>(shots_each);
    }
    for (std::size_t o = 0; o < cb.observables.size(); ++o) {
      values[t].emplace_back(cb.observables[o].letters(), signed_parity(freq, cb.measured[o]));
    }
  });

  // Designated source basis per observable: the first basis containing it.
  std::map<std::string, std::size_t> source;
  for (std::size_t b = 0; b < kCbBases.size(); ++b) {
    for (const auto& q : sub_strings(PauliString::parse(kCbBases[b]))) {
      source.emplace(q.letters(), b);
    }
  }
  std::map<std::string, std::vector<CbPoint>> curves;
  for (const auto& [obs, b] : source) {
    std::vector<CbPoint> pts;
    for (std::size_t d = 0; d < options.depths.size(); ++d) {
      double sum = 0.0;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].basis != b || tasks[t].depth != d) continue;
        for (const auto& [name, v] : values[t]) {
          if (name == obs) sum += v;
        }
      }
      const double mean = sum / static_cast<double>(options.instances);
      const double total = static_cast<double>(shots_each * options.instances);
      pts.push_back({static_cast<double>(options.depths[d]), mean,
                     std::sqrt(std::max(1.0 - mean * mean, 1.0 / total) / total)});
    }
    curves.emplace(obs, std::move(pts));
  }

  std::vector<FidelityRecord> records;
  for (const auto& orbit : learnability_partition(gate)) {
    FidelityRecord r;
    r.labels = orbit;
    r.learnable = orbit.size() == 1;
    r.points = curves.at(orbit.front());
    const ExponentialFit fit = fit_exponential(r.points);
    r.split_value = fit.fidelity;
    r.value = std::pow(fit.fidelity, static_cast<double>(orbit.size()));
    r.amplitude = fit.amplitude;
    double rr = 0.0;
    for (double e : fit.residuals) rr += e * e;
    r.residual = std::sqrt(rr);
    records.push_back(std::move(r));
  }
  return records;
}

FidelityVector fidelity_vector_from_records(const std::vector<FidelityRecord>& records) {
  std::vector<double> f(16, 1.0);
  for (const auto& r : records) {
    for (const auto& l : r.labels) f[PauliString::parse(l).label().value()] = r.split_value;
  }
  return FidelityVector(2, std::move(f));
}

std::string twirl_mode_name(TwirlMode mode) {
  switch (mode) {
    case TwirlMode::None: return "none";
    case TwirlMode::Full: return "full";
    case TwirlMode::Partial: return "partial";
  }
  return "unknown";
}

ChiMatrix coherent_rx_noise(std::size_t n_qubits, double eps) {
  Gate g = Gate::rx(0, eps);
  const ChiMatrix one = chi_of_kraus(std::vector<KrausTerm>{{1.0, g.matrix()}});
  ChiMatrix out = one;
  for (std::size_t q = 1; q < n_qubits; ++q) out = tensor(out, one);
  return out;
}

Circuit default_twirl_benchmark_sequence() {
  Circuit c(3);
  c.add_gate(Gate::cx(0, 1));
  c.add_gate(Gate::cx(1, 2));
  return c;
}

TwirlBenchmarkResult run_twirl_benchmark(const TwirlBenchmarkConfig& config) {
  const Circuit& seq = config.gate_sequence;
  if (seq.n_qubits() != 3 || config.noise.n_qubits() != 3) {
    throw ValidationError("twirl benchmark acts on three data qubits");
  }
  if (config.depths.empty() || config.shots == 0) throw ValidationError("need depths and shots");
  for (std::size_t i = 1; i < config.depths.size(); ++i) {
    if (config.depths[i] <= config.depths[i - 1]) {
      throw ValidationError("depths must be strictly increasing");
    }
  }
  const Eigen::MatrixXcd u = circuit_unitary(seq);
  TwirlBenchmarkResult result;
  result.order = unitary_order(u);
  if (result.order == 0) throw ValidationError("gate sequence has no finite order");

  auto x_type = [](const PauliString& p) { return p.z_mask() == 0; };
  if (config.partial_set) {
    result.partial_set = *config.partial_set;
    result.partial_report.objective =
        twirl_objective(twirl_channel(config.noise, result.partial_set), x_type);
    result.partial_report.offdiagonal_before = config.noise.offdiagonal_norm();
    result.partial_report.offdiagonal_after =
        twirl_channel(config.noise, result.partial_set).offdiagonal_norm();
  } else {
    std::vector<PauliString> pool;
    for (std::uint64_t a = 0; a < 64; ++a) {
      const PauliString p = PauliString::from_label(3, PauliLabel(a));
      if (p.letters().find('Y') == std::string::npos) pool.push_back(p);
    }
    auto [set, report] = search_partial_set(config.noise, x_type, pool, config.partial_max_size);
    result.partial_set = std::move(set);
    result.partial_report = report;
  }
  std::vector<PauliString> pre;
  for (const auto& m : result.partial_set.members) {
    pre.push_back(conjugate_by_inverse(seq, m).unsigned_part());
  }
  result.partial_set_pre_gate = TwirlSet::from_paulis(3, std::move(pre));

  Circuit ghz(3);
  ghz.add_gate(Gate::h(0));
  ghz.add_gate(Gate::cx(0, 1));
  ghz.add_gate(Gate::cx(1, 2));
  const BitflipCode code = bitflip_code();
  const std::vector<std::string> stabilizers{"XXX", "IZZ"};

  struct Cell {
    std::size_t mode;
    std::size_t stab;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    for (std::size_t s = 0; s < stabilizers.size(); ++s) cells.push_back({m, s});
  }
  std::vector<std::vector<TwirlBenchmarkRow>> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const TwirlMode mode = config.modes[cells[c].mode];
    const std::string& stab = stabilizers[cells[c].stab];
    TwirlSet set = TwirlSet::identity(3);
    if (mode == TwirlMode::Full) set = TwirlSet::full(3);
    if (mode == TwirlMode::Partial) set = result.partial_set;
    const ChiMatrix lambda = twirl_channel(config.noise, set);
    DensityMatrix rho = run_density(ghz, DensityMatrix::zero_state(3));
    rho.apply_pauli(PauliString::parse(stab));
    std::size_t done = 0;
    for (std::size_t depth : config.depths) {
      const std::size_t reps = result.order * depth;
      Eigen::MatrixXcd m = rho.matrix();
      for (; done < reps; ++done) m = lambda.apply(u * m * u.adjoint());
      rho = DensityMatrix(3, m);
      Eigen::MatrixXcd anc = Eigen::MatrixXcd::Zero(4, 4);
      anc(0, 0) = 1.0;
      Eigen::MatrixXcd full(32, 32);
      for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 8; ++j) full.block(4 * i, 4 * j, 4, 4) = m(i, j) * anc;
      }
      DensityMatrix five(5, full);
      code.syndrome_and_correct(five);
      const double f = expectation(five, PauliString::parse(stab + "II"));
      std::mt19937_64 rng(stream_seed(
          config.seed, fmt::format("twirl-bench/{}/{}/{}", twirl_mode_name(mode), stab, depth)));
      std::binomial_distribution<std::uint64_t> draw(config.shots,
                                                     std::clamp((1.0 + f) / 2.0, 0.0, 1.0));
      const double est = 2.0 * static_cast<double>(draw(rng)) / config.shots - 1.0;
      rows[c].push_back({mode, stab, depth, reps, f, est,
                         std::sqrt(std::max(0.0, 1.0 - est * est) / config.shots)});
    }
  });
  for (auto& r : rows) {
    for (auto& row : r) result.rows.push_back(std::move(row));
  }
  return result;
}

nlohmann::json to_json(const FidelityRecord& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"depth", p.depth}, {"mean", p.value}, {"stderr", p.std_error}});
  }
  return {{"labels", r.labels},       {"learnable", r.learnable}, {"value", r.value},
          {"split_value", r.split_value}, {"amplitude", r.amplitude}, {"residual", r.residual},
          {"points", pts}};
}

std::string cb_points_csv(const std::vector<FidelityRecord>& records) {
  std::string out = "basis,depth,mean,stderr\n";
  for (const auto& r : records) {
    std::string name;
    for (const auto& l : r.labels) name += (name.empty() ? "" : "-") + l;
    for (const auto& p : r.points) {
      out += fmt::format("{},{},{:.10g},{:.10g}\n", name, p.depth, p.value, p.std_error);
    }
  }
  return out;
}

std::string twirl_benchmark_csv(const TwirlBenchmarkResult& result) {
  std::string out = "mode,stabilizer,depth,repetitions,fidelity,estimate,stderr\n";
  for (const auto& r : result.rows) {
    out += fmt::format("{},{},{},{},{:.10g},{:.10g},{:.10g}\n", twirl_mode_name(r.mode),
                       r.stabilizer, r.depth, r.repetitions, r.fidelity, r.estimate, r.std_error);
  }
  return out;
}

}  // namespace hqem
