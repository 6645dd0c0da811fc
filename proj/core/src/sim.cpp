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

#include "hqem/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hqem/errors.hpp"

namespace hqem {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

struct GateInfo {
  GateKind kind;
  const char* name;
  std::size_t arity;  // 0 means variable
  bool clifford;
  bool rotation;
};

constexpr GateInfo kGateTable[] = {
    {GateKind::H, "H", 1, true, false},        {GateKind::S, "S", 1, true, false},
    {GateKind::Sdg, "Sdg", 1, true, false},    {GateKind::X, "X", 1, true, false},
    {GateKind::Y, "Y", 1, true, false},        {GateKind::Z, "Z", 1, true, false},
    {GateKind::CX, "CX", 2, true, false},      {GateKind::CZ, "CZ", 2, true, false},
    {GateKind::ECR, "ECR", 2, true, false},    {GateKind::ISWAP, "iSWAP", 2, true, false},
    {GateKind::ISWAPdg, "iSWAPdg", 2, true, false}, {GateKind::RX, "Rx", 1, false, true},
    {GateKind::RY, "Ry", 1, false, true},      {GateKind::RZ, "Rz", 1, false, true},
    {GateKind::PauliExp, "PauliExp", 0, false, false},
};

const GateInfo& info(GateKind kind) {
  for (const auto& g : kGateTable) {
    if (g.kind == kind) return g;
  }
  throw DispatchError("unknown gate kind");
}

Eigen::MatrixXcd rotation(double theta, const Eigen::MatrixXcd& p) {
  const auto dim = p.rows();
  return std::cos(theta / 2) * Eigen::MatrixXcd::Identity(dim, dim) -
         kI * std::sin(theta / 2) * p;
}

// Applies u (acting on `targets`) to every column of m from the left.
void apply_left(Eigen::MatrixXcd& m, const Eigen::MatrixXcd& u,
                const std::vector<std::size_t>& targets, std::size_t n) {
  const std::size_t k = targets.size();
  const std::size_t local = std::size_t{1} << k;
  std::vector<std::size_t> offsets(local, 0);
  std::size_t tmask = 0;
  for (std::size_t l = 0; l < local; ++l) {
    for (std::size_t i = 0; i < k; ++i) {
      if ((l >> (k - 1 - i)) & 1U) offsets[l] |= std::size_t{1} << (n - 1 - targets[i]);
    }
  }
  for (std::size_t i = 0; i < k; ++i) tmask |= std::size_t{1} << (n - 1 - targets[i]);
  const std::size_t dim = std::size_t{1} << n;
  std::vector<cd> buf(local);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    cd* col = m.col(c).data();
    for (std::size_t base = 0; base < dim; ++base) {
      if ((base & tmask) != 0) continue;
      for (std::size_t l = 0; l < local; ++l) buf[l] = col[base | offsets[l]];
      for (std::size_t r = 0; r < local; ++r) {
        cd acc = 0.0;
        for (std::size_t l = 0; l < local; ++l) acc += u(r, l) * buf[l];
        col[base | offsets[r]] = acc;
      }
    }
  }
}

void check_targets(const std::vector<std::size_t>& targets, std::size_t n) {
  std::size_t seen = 0;
  for (std::size_t t : targets) {
    if (t >= n) throw DimensionError(fmt::format("qubit {} outside {}-qubit register", t, n));
    if ((seen >> t) & 1U) throw DimensionError(fmt::format("qubit {} repeated in targets", t));
    seen |= std::size_t{1} << t;
  }
}

}  // namespace

std::string gate_name(GateKind kind) { return info(kind).name; }

GateKind gate_kind_from_name(const std::string& name) {
  for (const auto& g : kGateTable) {
    if (name == g.name) return g.kind;
  }
  throw ParseError(fmt::format("unknown gate '{}'", name), 0);
}

Gate Gate::pauli_exp(const PauliString& p, double theta) {
  if (!p.is_hermitian()) throw MappingError("PauliExp needs a Hermitian Pauli (phase +-1)");
  if (p.is_identity()) throw MappingError("PauliExp of the identity is a global phase");
  Gate g;
  g.kind = GateKind::PauliExp;
  g.theta = theta;
  for (std::size_t q = 0; q < p.n_qubits(); ++q) {
    if (p.letter(q) != 'I') g.targets.push_back(q);
  }
  g.pauli = p.restrict_to(g.targets);
  return g;
}

Gate Gate::pauli_letter(char letter, std::size_t q) {
  switch (letter) {
    case 'X': return x(q);
    case 'Y': return y(q);
    case 'Z': return z(q);
    default: throw DispatchError(fmt::format("no single-qubit Pauli gate for '{}'", letter));
  }
}

bool Gate::is_clifford() const { return info(kind).clifford; }
bool Gate::is_rotation() const { return info(kind).rotation; }

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::ISWAP: g.kind = GateKind::ISWAPdg; break;
    case GateKind::ISWAPdg: g.kind = GateKind::ISWAP; break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::PauliExp: g.theta = -theta; break;
    default: break;
  }
  return g;
}

Eigen::MatrixXcd Gate::matrix() const {
  const GateInfo& gi = info(kind);
  if (gi.arity != 0 && targets.size() != gi.arity) {
    throw DimensionError(fmt::format("{} acts on {} qubits, got {} targets", gi.name, gi.arity,
                                     targets.size()));
  }
  const double r = std::numbers::sqrt2 / 2;
  Eigen::MatrixXcd m;
  switch (kind) {
    case GateKind::H: m = Eigen::MatrixXcd(2, 2); m << r, r, r, -r; return m;
    case GateKind::S: m = Eigen::MatrixXcd(2, 2); m << 1, 0, 0, kI; return m;
    case GateKind::Sdg: m = Eigen::MatrixXcd(2, 2); m << 1, 0, 0, -kI; return m;
    case GateKind::X: return PauliString::parse("X").matrix();
    case GateKind::Y: return PauliString::parse("Y").matrix();
    case GateKind::Z: return PauliString::parse("Z").matrix();
    case GateKind::CX:
      m = Eigen::MatrixXcd::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    case GateKind::CZ:
      m = Eigen::MatrixXcd::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    case GateKind::ECR:
      // (IX - XY)/sqrt2 in little-endian spelling; big-endian here.
      return r * (PauliString::parse("XI").matrix() - PauliString::parse("YX").matrix());
    case GateKind::ISWAP:
    case GateKind::ISWAPdg: {
      const cd phase = kind == GateKind::ISWAP ? kI : -kI;
      m = Eigen::MatrixXcd::Zero(4, 4);
      m(0, 0) = m(3, 3) = 1;
      m(1, 2) = m(2, 1) = phase;
      return m;
    }
    case GateKind::RX: return rotation(theta, PauliString::parse("X").matrix());
    case GateKind::RY: return rotation(theta, PauliString::parse("Y").matrix());
    case GateKind::RZ: return rotation(theta, PauliString::parse("Z").matrix());
    case GateKind::PauliExp:
      if (pauli.n_qubits() != targets.size() || !pauli.is_hermitian()) {
        throw DimensionError("PauliExp Pauli does not match its targets");
      }
      return rotation(theta, pauli.matrix());
  }
  throw DispatchError("unhandled gate kind");
}

PauliString Gate::register_pauli(std::size_t n_qubits) const {
  if (kind != GateKind::PauliExp) throw DispatchError("register_pauli needs a PauliExp gate");
  return pauli.embed(n_qubits, targets);
}

Circuit::Circuit(std::size_t n_qubits) : n_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxPauliQubits) {
    throw DimensionError(fmt::format("unsupported register size {}", n_qubits));
  }
}

void Circuit::add_layer(std::vector<Gate> gates, std::vector<NoiseAttachment> noise) {
  std::vector<std::size_t> all;
  for (const auto& g : gates) {
    const GateInfo& gi = info(g.kind);
    if (gi.arity != 0 && g.targets.size() != gi.arity) {
      throw DimensionError(fmt::format("{} acts on {} qubits, got {}", gi.name, gi.arity,
                                       g.targets.size()));
    }
    if (g.kind == GateKind::PauliExp && g.pauli.n_qubits() != g.targets.size()) {
      throw DimensionError("PauliExp Pauli does not match its targets");
    }
    all.insert(all.end(), g.targets.begin(), g.targets.end());
  }
  check_targets(all, n_);
  Layer layer{std::move(gates), {}};
  layers_.push_back(std::move(layer));
  for (auto& a : noise) attach_noise(layers_.size() - 1, std::move(a));
}

void Circuit::attach_noise(std::size_t layer, NoiseAttachment noise) {
  check_targets(noise.qubits, n_);
  if (noise.qubits.size() != noise.channel.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit channel attached to {} qubits",
                                     noise.channel.n_qubits(), noise.qubits.size()));
  }
  layers_.at(layer).noise.push_back(std::move(noise));
}

void Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw DimensionError("appending circuit on a different register");
  layers_.insert(layers_.end(), other.layers_.begin(), other.layers_.end());
}

Circuit Circuit::without_noise() const {
  Circuit c = *this;
  for (auto& l : c.layers_) l.noise.clear();
  return c;
}

Circuit Circuit::inverse() const {
  Circuit c(n_);
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    std::vector<Gate> gates;
    for (const auto& g : it->gates) gates.push_back(g.inverse());
    c.add_layer(std::move(gates));
  }
  return c;
}

std::size_t Circuit::count_gates(GateKind kind) const {
  std::size_t count = 0;
  for (const auto& l : layers_) {
    for (const auto& g : l.gates) count += g.kind == kind ? 1 : 0;
  }
  return count;
}

DensityMatrix::DensityMatrix(std::size_t n_qubits, Eigen::MatrixXcd rho)
    : n_(n_qubits), rho_(std::move(rho)) {
  if (n_qubits == 0 || n_qubits > kMaxSimQubits) {
    throw DimensionError(fmt::format("density simulation supports 1..{} qubits, got {}",
                                     kMaxSimQubits, n_qubits));
  }
  const auto dim = Eigen::Index{1} << n_qubits;
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw DimensionError(fmt::format("density matrix must be {}x{}", dim, dim));
  }
}

DensityMatrix DensityMatrix::zero_state(std::size_t n_qubits) { return basis_state(n_qubits, 0); }

DensityMatrix DensityMatrix::basis_state(std::size_t n_qubits, std::uint64_t index) {
  const auto dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityMatrix(n_qubits, std::move(rho));
}

DensityMatrix DensityMatrix::from_statevector(const Eigen::VectorXcd& psi) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < psi.size()) ++n;
  const Eigen::VectorXcd v = psi / psi.norm();
  return DensityMatrix(n, v * v.adjoint());
}

void DensityMatrix::validate(double tol) const {
  if (std::abs(rho_.trace() - cd(1.0)) > tol) {
    throw ConsistencyError(fmt::format("density matrix trace {} deviates from 1",
                                       rho_.trace().real()));
  }
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw ConsistencyError("density matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw ConsistencyError(fmt::format("density matrix has eigenvalue {}",
                                       es.eigenvalues().minCoeff()));
  }
}

void DensityMatrix::apply_unitary(const Eigen::MatrixXcd& u,
                                  const std::vector<std::size_t>& targets) {
  check_targets(targets, n_);
  apply_left(rho_, u, targets, n_);
  rho_.adjointInPlace();
  apply_left(rho_, u, targets, n_);
  rho_.adjointInPlace();
}

void DensityMatrix::apply_gate(const Gate& g) { apply_unitary(g.matrix(), g.targets); }

void DensityMatrix::apply_pauli(const PauliString& p) {
  if (p.n_qubits() != n_) throw DimensionError("Pauli does not match register");
  const std::size_t dim = std::size_t{1} << n_;
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  Eigen::MatrixXcd out(rho_.rows(), rho_.cols());
  for (std::size_t c = 0; c < dim; ++c) {
    const int sc = std::popcount(z & c) & 1;
    for (std::size_t r = 0; r < dim; ++r) {
      const int s = sc ^ (std::popcount(z & r) & 1);
      const cd v = rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      out(static_cast<Eigen::Index>(r ^ x), static_cast<Eigen::Index>(c ^ x)) = s != 0 ? -v : v;
    }
  }
  rho_ = std::move(out);
}

void DensityMatrix::apply_pauli_channel(const PauliChannel& c,
                                        const std::vector<std::size_t>& qubits) {
  if (qubits.size() != c.n_qubits()) throw DimensionError("channel does not match qubit list");
  check_targets(qubits, n_);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho_.rows(), rho_.cols());
  const Eigen::MatrixXcd original = rho_;
  for (std::size_t j = 0; j < c.rates().size(); ++j) {
    const double w = c.rates()[j];
    if (w == 0.0) continue;
    rho_ = original;
    apply_pauli(PauliString::from_label(c.n_qubits(), PauliLabel(j)).embed(n_, qubits));
    acc += w * rho_;
  }
  rho_ = std::move(acc);
}

void DensityMatrix::apply_kraus(const std::vector<Eigen::MatrixXcd>& ops,
                                const std::vector<std::size_t>& targets) {
  check_targets(targets, n_);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho_.rows(), rho_.cols());
  for (const auto& k : ops) {
    Eigen::MatrixXcd m = rho_;
    apply_left(m, k, targets, n_);
    m.adjointInPlace();
    apply_left(m, k, targets, n_);
    m.adjointInPlace();
    acc += m;
  }
  rho_ = std::move(acc);
}

std::vector<double> DensityMatrix::probabilities() const {
  std::vector<double> p(static_cast<std::size_t>(rho_.rows()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::max(0.0, rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
  }
  return p;
}

DensityMatrix run_density(const Circuit& circuit, DensityMatrix input) {
  if (circuit.n_qubits() != input.n_qubits()) {
    throw DimensionError("circuit and state registers differ");
  }
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer.gates) input.apply_gate(g);
    for (const auto& a : layer.noise) input.apply_pauli_channel(a.channel, a.qubits);
#ifndef NDEBUG
    input.validate();
#endif
  }
  return input;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& circuit) {
  const std::size_t n = circuit.n_qubits();
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer.gates) apply_left(u, g.matrix(), g.targets, n);
  }
  return u;
}

double expectation(const DensityMatrix& state, const PauliString& observable) {
  if (!observable.is_hermitian()) {
    throw ValidationError("observable must be Hermitian (phase +-1)");
  }
  const cd v = trace_with(observable, state.matrix());
  if (std::abs(v.imag()) > 1e-10) {
    throw ConsistencyError(fmt::format("expectation of {} has imaginary part {}",
                                       observable.str(), v.imag()));
  }
  return v.real();
}

ReadoutModel ReadoutModel::ideal(std::size_t n_qubits) { return symmetric(n_qubits, 0.0); }

ReadoutModel ReadoutModel::symmetric(std::size_t n_qubits, double flip) {
  Eigen::Matrix2d m;
  m << 1 - flip, flip, flip, 1 - flip;
  return ReadoutModel{std::vector<Eigen::Matrix2d>(n_qubits, m)};
}

void ReadoutModel::validate() const {
  for (std::size_t q = 0; q < confusion.size(); ++q) {
    for (int j = 0; j < 2; ++j) {
      const double s = confusion[q].col(j).sum();
      if (std::abs(s - 1.0) > 1e-12 || confusion[q].col(j).minCoeff() < 0.0) {
        throw ValidationError(fmt::format("confusion column {} of qubit {} is not stochastic", j, q));
      }
    }
  }
}

double ReadoutModel::likelihood(std::uint64_t observed, std::uint64_t truth) const {
  const std::size_t n = confusion.size();
  double p = 1.0;
  for (std::size_t q = 0; q < n; ++q) {
    const int o = static_cast<int>((observed >> (n - 1 - q)) & 1U);
    const int t = static_cast<int>((truth >> (n - 1 - q)) & 1U);
    p *= confusion[q](o, t);
  }
  return p;
}

std::vector<std::uint64_t> sample_histogram(const std::vector<double>& probabilities,
                                            std::uint64_t shots, std::mt19937_64& rng) {
  std::vector<std::uint64_t> hist(probabilities.size(), 0);
  double remaining_mass = 0.0;
  for (double p : probabilities) remaining_mass += std::max(p, 0.0);
  std::uint64_t remaining = shots;
  for (std::size_t i = 0; i < probabilities.size() && remaining > 0; ++i) {
    const double p = std::max(probabilities[i], 0.0);
    if (i + 1 == probabilities.size() || p >= remaining_mass) {
      hist[i] = remaining;
      remaining = 0;
      break;
    }
    if (p > 0.0) {
      std::binomial_distribution<std::uint64_t> b(remaining, std::clamp(p / remaining_mass, 0.0, 1.0));
      hist[i] = b(rng);
      remaining -= hist[i];
    }
    remaining_mass -= p;
  }
  return hist;
}

std::vector<std::uint64_t> apply_readout(const std::vector<std::uint64_t>& histogram,
                                         const ReadoutModel& readout, std::mt19937_64& rng) {
  const std::size_t n = readout.n_qubits();
  if (histogram.size() != (std::size_t{1} << n)) {
    throw DimensionError("readout model does not match histogram register");
  }
  std::vector<std::uint64_t> current = histogram;
  for (std::size_t q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    std::vector<std::uint64_t> next(current.size(), 0);
    for (std::size_t idx = 0; idx < current.size(); ++idx) {
      const std::uint64_t k = current[idx];
      if (k == 0) continue;
      const int t = (idx & bit) != 0 ? 1 : 0;
      std::binomial_distribution<std::uint64_t> b(k, readout.confusion[q](0, t));
      const std::uint64_t zeros = b(rng);
      next[idx & ~bit] += zeros;
      next[idx | bit] += k - zeros;
    }
    current = std::move(next);
  }
  return current;
}

Counts sample_counts(const DensityMatrix& state, std::uint64_t shots,
                     const std::optional<ReadoutModel>& readout, std::uint64_t seed) {
  if (shots == 0) throw ValidationError("shots must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> hist = sample_histogram(state.probabilities(), shots, rng);
  if (readout) {
    readout->validate();
    hist = apply_readout(hist, *readout, rng);
  }
  return counts_from_histogram(hist, state.n_qubits());
}

std::string bitstring(std::uint64_t index, std::size_t n_qubits) {
  std::string s(n_qubits, '0');
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if ((index >> (n_qubits - 1 - q)) & 1U) s[q] = '1';
  }
  return s;
}

std::uint64_t bitstring_index(const std::string& bits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw ParseError(fmt::format("bitstring '{}' has illegal character at {}", bits, i), i);
    }
    v = (v << 1) | static_cast<std::uint64_t>(bits[i] == '1');
  }
  return v;
}

Counts counts_from_histogram(const std::vector<std::uint64_t>& histogram, std::size_t n_qubits) {
  Counts c;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    if (histogram[i] > 0) c[bitstring(i, n_qubits)] = histogram[i];
  }
  return c;
}

std::string counts_to_csv(const Counts& counts) {
  std::string out = "bitstring,count\n";
  for (const auto& [bits, k] : counts) out += fmt::format("{},{}\n", bits, k);
  return out;
}

nlohmann::json to_json(const Gate& g) {
  nlohmann::json j = {{"kind", gate_name(g.kind)}, {"targets", g.targets}};
  if (g.is_rotation() || g.kind == GateKind::PauliExp) j["theta"] = g.theta;
  if (g.kind == GateKind::PauliExp) j["pauli"] = g.pauli.str();
  return j;
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : c.layers()) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : l.gates) gates.push_back(to_json(g));
    nlohmann::json layer = {{"gates", gates}};
    if (!l.noise.empty()) {
      nlohmann::json noise = nlohmann::json::array();
      for (const auto& a : l.noise) {
        noise.push_back({{"qubits", a.qubits}, {"channel", to_json(a.channel)}});
      }
      layer["noise"] = noise;
    }
    layers.push_back(layer);
  }
  return {{"n_qubits", c.n_qubits()}, {"layers", layers}};
}

Gate gate_from_json(const nlohmann::json& j) {
  Gate g;
  g.kind = gate_kind_from_name(j.at("kind").get<std::string>());
  g.targets = j.at("targets").get<std::vector<std::size_t>>();
  if (j.contains("theta")) g.theta = j.at("theta").get<double>();
  if (g.kind == GateKind::PauliExp) g.pauli = PauliString::parse(j.at("pauli").get<std::string>());
  return g;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c(j.at("n_qubits").get<std::size_t>());
  for (const auto& layer : j.at("layers")) {
    std::vector<Gate> gates;
    for (const auto& g : layer.at("gates")) gates.push_back(gate_from_json(g));
    std::vector<NoiseAttachment> noise;
    if (layer.contains("noise")) {
      for (const auto& a : layer.at("noise")) {
        noise.push_back({a.at("qubits").get<std::vector<std::size_t>>(),
                         pauli_channel_from_json(a.at("channel"))});
      }
    }
    c.add_layer(std::move(gates), std::move(noise));
  }
  return c;
}

}  // namespace hqem
