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

#include "hqem/propagate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "hqem/errors.hpp"
#include "hqem/parallel.hpp"

namespace hqem {

namespace {

using cd = std::complex<double>;

// Images U P U^dagger of every local Pauli, indexed by local label.
std::vector<PauliString> clifford_table(GateKind kind) {
  Gate g;
  g.kind = kind;
  const std::size_t arity = (kind == GateKind::CX || kind == GateKind::CZ ||
                             kind == GateKind::ECR || kind == GateKind::ISWAP ||
                             kind == GateKind::ISWAPdg)
                                ? 2
                                : 1;
  for (std::size_t q = 0; q < arity; ++q) g.targets.push_back(q);
  const Eigen::MatrixXcd u = g.matrix();
  const double dim = static_cast<double>(std::size_t{1} << arity);
  std::vector<PauliString> table;
  for (std::uint64_t a = 0; a < pauli_count(arity); ++a) {
    const Eigen::MatrixXcd img = u * PauliString::from_label(arity, PauliLabel(a)).matrix() *
                                 u.adjoint();
    bool found = false;
    for (std::uint64_t b = 0; b < pauli_count(arity) && !found; ++b) {
      const PauliString p = PauliString::from_label(arity, PauliLabel(b));
      const cd t = trace_with(p, img) / dim;
      if (std::abs(t) < 0.5) continue;
      if (std::abs(std::abs(t) - 1.0) > 1e-12) {
        throw ConsistencyError(fmt::format("{} does not map Paulis to Paulis", gate_name(kind)));
      }
      const long k = std::lround(std::arg(t) / (std::numbers::pi / 2));
      table.push_back(p.with_phase(static_cast<unsigned>((k % 4 + 4) % 4)));
      found = true;
    }
    if (!found) throw ConsistencyError("Clifford image not found");
  }
  return table;
}

const std::vector<PauliString>& cached_table(GateKind kind) {
  static const std::map<GateKind, std::vector<PauliString>> tables = [] {
    std::map<GateKind, std::vector<PauliString>> t;
    for (GateKind k : {GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Y,
                       GateKind::Z, GateKind::CX, GateKind::CZ, GateKind::ECR, GateKind::ISWAP,
                       GateKind::ISWAPdg}) {
      t.emplace(k, clifford_table(k));
    }
    return t;
  }();
  return tables.at(kind);
}

std::uint64_t target_mask(std::size_t n, const std::vector<std::size_t>& targets) {
  std::uint64_t m = 0;
  for (std::size_t q : targets) m |= std::uint64_t{1} << (n - 1 - q);
  return m;
}

// Generator G of a rotation exp(-i theta G / 2) on the full register.
PauliString rotation_generator(const Gate& g, std::size_t n) {
  switch (g.kind) {
    case GateKind::RX: return PauliString::single(n, g.targets.at(0), 'X');
    case GateKind::RY: return PauliString::single(n, g.targets.at(0), 'Y');
    case GateKind::RZ: return PauliString::single(n, g.targets.at(0), 'Z');
    case GateKind::PauliExp: return g.register_pauli(n);
    default: throw DispatchError(fmt::format("{} is not a rotation", gate_name(g.kind)));
  }
}

// exp(-i theta G/2) Q exp(i theta G/2) = cos(theta) Q + i sin(theta) Q G when {Q, G} = 0.
void push_rotation(const PauliString& gen, double theta, const PauliString& q, cd coeff,
                   std::vector<GeneralizedError::Term>& out) {
  if (commutes(gen, q)) {
    out.push_back({q.unsigned_part(), coeff * q.phase()});
    return;
  }
  out.push_back({q.unsigned_part(), coeff * q.phase() * std::cos(theta)});
  const PauliString qg = q * gen;
  out.push_back({qg.unsigned_part(), coeff * qg.phase() * cd(0.0, std::sin(theta))});
}

std::string entry_key(const GeneralizedError& e, int order_bucket) {
  const GeneralizedError c = e.phase_canonical();
  std::string key;
  key.reserve(c.size() * 24 + 1);
  key.push_back(static_cast<char>('0' + order_bucket));
  for (const auto& t : c.terms()) {
    const std::uint64_t lbl = t.op.label().value();
    const long long re = std::llround(t.coeff.real() * 1e12);
    const long long im = std::llround(t.coeff.imag() * 1e12);
    key.append(reinterpret_cast<const char*>(&lbl), sizeof lbl);
    key.append(reinterpret_cast<const char*>(&re), sizeof re);
    key.append(reinterpret_cast<const char*>(&im), sizeof im);
  }
  return key;
}

struct Merger {
  bool keep_order = false;
  std::map<std::string, std::size_t> index;
  std::vector<ErrorEnsemble::Entry> entries;
  std::vector<std::string> keys;

  void add(double p, GeneralizedError e, int order) {
    const std::string key = entry_key(e, keep_order ? order : 0);
    auto [it, inserted] = index.emplace(key, entries.size());
    if (inserted) {
      entries.push_back({p, std::move(e), order});
      keys.push_back(key);
    } else {
      auto& entry = entries[it->second];
      entry.probability += p;
      entry.order = std::min(entry.order, order);
    }
  }

  // Deterministic output order: probability descending, then key.
  std::vector<ErrorEnsemble::Entry> sorted() && {
    std::vector<std::size_t> idx(entries.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (entries[a].probability != entries[b].probability) {
        return entries[a].probability > entries[b].probability;
      }
      return keys[a] < keys[b];
    });
    std::vector<ErrorEnsemble::Entry> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(std::move(entries[i]));
    return out;
  }
};

}  // namespace

ErrorEnsemble ErrorEnsemble::identity(std::size_t n_qubits) {
  ErrorEnsemble e;
  e.n_qubits = n_qubits;
  e.entries.push_back({1.0, GeneralizedError::identity(n_qubits), 0});
  return e;
}

double ErrorEnsemble::total_probability() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

void ErrorEnsemble::validate(double tol) const {
  if (std::abs(total_probability() - 1.0) > tol) {
    throw ConsistencyError(fmt::format("ensemble probabilities sum to {}", total_probability()));
  }
  for (const auto& e : entries) {
    if (e.probability < 0.0) throw ConsistencyError("negative ensemble probability");
    if (std::abs(e.error.norm_squared() - 1.0) > tol) {
      throw ConsistencyError(fmt::format("error {} is not normalized", e.error.str()));
    }
  }
}

DensityMatrix ErrorEnsemble::apply(const DensityMatrix& rho) const {
  if (rho.n_qubits() != n_qubits) throw DimensionError("ensemble and state sizes differ");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& e : entries) {
    const Eigen::MatrixXcd k = e.error.matrix();
    out += e.probability * k * rho.matrix() * k.adjoint();
  }
  return DensityMatrix(n_qubits, std::move(out));
}

PauliString conjugate_clifford(const Gate& gate, const PauliString& p) {
  if (!gate.is_clifford()) {
    throw DispatchError(fmt::format("{} is not Clifford", gate_name(gate.kind)));
  }
  const std::size_t n = p.n_qubits();
  const std::uint64_t m = target_mask(n, gate.targets);
  if (((p.x_mask() | p.z_mask()) & m) == 0) return p;
  const PauliString local = p.restrict_to(gate.targets).unsigned_part();
  const PauliString& img = cached_table(gate.kind).at(local.label().value());
  const PauliString rest(n, p.x_mask() & ~m, p.z_mask() & ~m, p.phase_exponent());
  return rest * img.embed(n, gate.targets);
}

GeneralizedError conjugate_rotation(char axis, std::size_t qubit, double theta,
                                    const PauliString& p) {
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(axis)));
  if (letter != 'X' && letter != 'Y' && letter != 'Z') {
    throw DispatchError(fmt::format("unknown rotation axis '{}'", axis));
  }
  std::vector<GeneralizedError::Term> terms;
  push_rotation(PauliString::single(p.n_qubits(), qubit, letter), theta, p, 1.0, terms);
  return GeneralizedError::from_terms(p.n_qubits(), std::move(terms));
}

GeneralizedError conjugate(const Gate& gate, const GeneralizedError& e) {
  const std::size_t n = e.n_qubits();
  std::vector<GeneralizedError::Term> terms;
  terms.reserve(e.size() * 2);
  if (gate.is_clifford()) {
    for (const auto& t : e.terms()) {
      const PauliString img = conjugate_clifford(gate, t.op);
      terms.push_back({img.unsigned_part(), t.coeff * img.phase()});
    }
  } else {
    const PauliString gen = rotation_generator(gate, n);
    for (const auto& t : e.terms()) push_rotation(gen, gate.theta, t.op, t.coeff, terms);
  }
  return GeneralizedError::from_terms(n, std::move(terms));
}

GeneralizedError conjugate(const std::vector<Gate>& layer, const GeneralizedError& e) {
  GeneralizedError out = e;
  for (const auto& g : layer) out = conjugate(g, out);
  return out;
}

GeneralizedError propagate_to_end(const Circuit& circuit, std::size_t layer_index,
                                  const GeneralizedError& error, std::size_t max_terms,
                                  PropagationReport* report) {
  if (layer_index >= circuit.depth()) {
    throw DimensionError(fmt::format("layer {} outside circuit of depth {}", layer_index,
                                     circuit.depth()));
  }
  if (error.n_qubits() != circuit.n_qubits()) throw DimensionError("error and circuit sizes differ");
  GeneralizedError e = error;
  std::size_t seen = e.size();
  double truncated = 0.0;
  for (std::size_t l = layer_index + 1; l < circuit.depth(); ++l) {
    e = conjugate(circuit.layers()[l].gates, e);
    seen = std::max(seen, e.size());
    if (e.size() > max_terms) {
      std::vector<double> mags;
      for (const auto& t : e.terms()) mags.push_back(std::abs(t.coeff));
      const double mx = *std::max_element(mags.begin(), mags.end());
      std::nth_element(mags.begin(), mags.begin() + static_cast<long>(max_terms - 1), mags.end(),
                       std::greater<>());
      const double before = e.norm_squared();
      e = e.pruned(mags[max_terms - 1] / mx * (1.0 - 1e-12));
      truncated += before - e.norm_squared();
    }
  }
  if (report != nullptr) {
    report->max_terms_seen = seen;
    report->truncated_weight = truncated;
  }
  return e.normalized();
}

ErrorEnsemble accumulate_total_noise(const Circuit& circuit, const AccumulateOptions& options) {
  const std::size_t n = circuit.n_qubits();
  ErrorEnsemble ens = ErrorEnsemble::identity(n);
  for (const auto& layer : circuit.layers()) {
    auto& entries = ens.entries;
    parallel_for(entries.size(), [&](std::size_t i) {
      entries[i].error = conjugate(layer.gates, entries[i].error);
    });
    for (const auto& att : layer.noise) {
      const auto& rates = att.channel.rates();
      std::vector<std::pair<std::size_t, PauliString>> picks;
      for (std::uint64_t j = 0; j < rates.size(); ++j) {
        if (rates[j] <= 0.0) continue;
        picks.emplace_back(j, PauliString::from_label(att.qubits.size(), PauliLabel(j))
                                  .embed(n, att.qubits));
      }
      std::vector<std::vector<ErrorEnsemble::Entry>> branches(entries.size());
      parallel_for(entries.size(), [&](std::size_t i) {
        const auto& src = entries[i];
        for (const auto& [j, pj] : picks) {
          const int order = std::min(2, src.order + (j != 0 ? 1 : 0));
          if (options.first_order && order > 1) continue;
          branches[i].push_back({src.probability * rates[j],
                                 j == 0 ? src.error : src.error.left_multiplied(pj), order});
        }
      });
      Merger merger;
      merger.keep_order = options.first_order;
      double kept = 0.0;
      for (auto& b : branches) {
        for (auto& e : b) {
          kept += e.probability;
          merger.add(e.probability, std::move(e.error), e.order);
        }
      }
      double before = 0.0;
      for (const auto& e : entries) before += e.probability;
      ens.dropped_mass += std::max(0.0, before - kept);
      entries = std::move(merger).sorted();
      std::erase_if(entries, [&](const ErrorEnsemble::Entry& e) {
        if (e.probability >= options.probability_floor) return false;
        ens.dropped_mass += e.probability;
        return true;
      });
    }
  }
  const double total = ens.total_probability();
  if (total <= 0.0) throw ConsistencyError("probability floor removed every error");
  for (auto& e : ens.entries) e.probability /= total;
  return ens;
}

bool survives_detection(const PauliString& p, const CodeSpec& code, DetectionFrame frame) {
  if (frame == DetectionFrame::Encoded) return !code.detects(p);
  const auto checks = code.check_positions();
  const char cx = p.letter(checks[0]);
  const char cz = p.letter(checks[1]);
  const bool x_ok = frame == DetectionFrame::Decoded ? (cx == 'I' || cx == 'X')
                                                     : (cx == 'I' || cx == 'Z');
  return x_ok && (cz == 'I' || cz == 'Z');
}

ErrorEnsemble filter_detectable(const ErrorEnsemble& ensemble, const CodeSpec& code,
                                DetectionFrame frame) {
  if (ensemble.n_qubits != code.n_physical) throw DimensionError("ensemble does not span the code");
  const bool project = frame != DetectionFrame::Encoded;
  const std::size_t n_out = project ? code.k_logical : code.n_physical;
  const std::vector<std::size_t> data = project ? code.layout->data : std::vector<std::size_t>{};
  Merger merger;
  double kept = 0.0;
  for (const auto& entry : ensemble.entries) {
    std::vector<GeneralizedError::Term> terms;
    for (const auto& t : entry.error.terms()) {
      if (!survives_detection(t.op, code, frame)) continue;
      terms.push_back({project ? t.op.restrict_to(data) : t.op, t.coeff});
    }
    if (terms.empty()) continue;
    const GeneralizedError surv = GeneralizedError::from_terms(n_out, std::move(terms));
    const double w = surv.norm_squared();
    if (w <= 1e-300) continue;
    kept += entry.probability * w;
    merger.add(entry.probability * w, surv.normalized(), entry.order);
  }
  ErrorEnsemble out;
  out.n_qubits = n_out;
  out.acceptance = kept;
  out.dropped_mass = ensemble.dropped_mass;
  if (kept <= 0.0) {
    out.all_detected = true;
    return out;
  }
  out.entries = std::move(merger).sorted();
  for (auto& e : out.entries) e.probability /= kept;
  return out;
}

PauliChannel reduce_to_pauli(const ErrorEnsemble& ensemble) {
  if (ensemble.entries.empty()) throw ValidationError("cannot reduce an empty ensemble");
  std::vector<double> rates(pauli_count(ensemble.n_qubits), 0.0);
  double total = 0.0;
  for (const auto& e : ensemble.entries) {
    for (const auto& t : e.error.terms()) {
      const double w = e.probability * std::norm(t.coeff);
      rates[t.op.label().value()] += w;
      total += w;
    }
  }
  for (double& r : rates) r /= total;
  return PauliChannel(ensemble.n_qubits, std::move(rates));
}

double offdiagonal_bias_bound(const ErrorEnsemble& ensemble, const PauliString& observable,
                              const DensityMatrix& state) {
  if (observable.n_qubits() != ensemble.n_qubits || state.n_qubits() != ensemble.n_qubits) {
    throw DimensionError("observable, state and ensemble sizes differ");
  }
  double bias = 0.0;
  for (const auto& entry : ensemble.entries) {
    const auto& terms = entry.error.terms();
    double cross = 0.0;
    for (std::size_t r = 0; r < terms.size(); ++r) {
      for (std::size_t s = r + 1; s < terms.size(); ++s) {
        const cd a = terms[r].coeff * std::conj(terms[s].coeff);
        const PauliString sar = terms[s].op * observable * terms[r].op;
        const PauliString ras = terms[r].op * observable * terms[s].op;
        if (sar == ras.negated() && std::abs(a.imag()) <= 1e-15 * std::abs(a)) continue;
        cross += 2.0 * (a * trace_with(sar, state.matrix())).real();
      }
    }
    bias += entry.probability * cross;
  }
  return bias;
}

nlohmann::json to_json(const GeneralizedError& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : e.terms()) {
    terms.push_back({{"pauli", t.op.letters()}, {"re", t.coeff.real()}, {"im", t.coeff.imag()}});
  }
  return terms;
}

nlohmann::json to_json(const ErrorEnsemble& e) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& en : e.entries) {
    entries.push_back({{"p", en.probability}, {"order", en.order}, {"terms", to_json(en.error)}});
  }
  return {{"n", e.n_qubits},
          {"dropped_mass", e.dropped_mass},
          {"acceptance", e.acceptance},
          {"all_detected", e.all_detected},
          {"entries", entries}};
}

}  // namespace hqem
