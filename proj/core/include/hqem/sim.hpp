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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hqem/channel.hpp"
#include "hqem/pauli.hpp"

namespace hqem {

inline constexpr std::size_t kMaxSimQubits = 8;

enum class GateKind { H, S, Sdg, X, Y, Z, CX, CZ, ECR, ISWAP, ISWAPdg, RX, RY, RZ, PauliExp };

std::string gate_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<std::size_t> targets;
  double theta = 0.0;
  // PauliExp only: Hermitian Pauli on `targets` (local order), applied as exp(-i theta P / 2).
  PauliString pauli;

  static Gate h(std::size_t q) { return {GateKind::H, {q}, 0.0, {}}; }
  static Gate s(std::size_t q) { return {GateKind::S, {q}, 0.0, {}}; }
  static Gate sdg(std::size_t q) { return {GateKind::Sdg, {q}, 0.0, {}}; }
  static Gate x(std::size_t q) { return {GateKind::X, {q}, 0.0, {}}; }
  static Gate y(std::size_t q) { return {GateKind::Y, {q}, 0.0, {}}; }
  static Gate z(std::size_t q) { return {GateKind::Z, {q}, 0.0, {}}; }
  static Gate cx(std::size_t c, std::size_t t) { return {GateKind::CX, {c, t}, 0.0, {}}; }
  static Gate cz(std::size_t a, std::size_t b) { return {GateKind::CZ, {a, b}, 0.0, {}}; }
  static Gate ecr(std::size_t a, std::size_t b) { return {GateKind::ECR, {a, b}, 0.0, {}}; }
  static Gate iswap(std::size_t a, std::size_t b) { return {GateKind::ISWAP, {a, b}, 0.0, {}}; }
  static Gate rx(std::size_t q, double t) { return {GateKind::RX, {q}, t, {}}; }
  static Gate ry(std::size_t q, double t) { return {GateKind::RY, {q}, t, {}}; }
  static Gate rz(std::size_t q, double t) { return {GateKind::RZ, {q}, t, {}}; }
  // Builds a PauliExp from a full-register Hermitian Pauli; targets = its support.
  static Gate pauli_exp(const PauliString& p, double theta);
  // Single-qubit Pauli gate for letter in {X, Y, Z}.
  static Gate pauli_letter(char letter, std::size_t q);

  std::size_t arity() const { return targets.size(); }
  bool is_clifford() const;
  bool is_rotation() const;
  Gate inverse() const;
  // Local 2^k x 2^k matrix, targets[0] most significant.
  Eigen::MatrixXcd matrix() const;
  // PauliExp Pauli embedded in an n-qubit register.
  PauliString register_pauli(std::size_t n_qubits) const;
};

struct NoiseAttachment {
  std::vector<std::size_t> qubits;
  PauliChannel channel;
};

struct Layer {
  std::vector<Gate> gates;
  std::vector<NoiseAttachment> noise;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t depth() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }

  // Validates range and disjointness of targets.
  void add_layer(std::vector<Gate> gates, std::vector<NoiseAttachment> noise = {});
  void add_gate(Gate g) { add_layer({std::move(g)}); }
  void attach_noise(std::size_t layer, NoiseAttachment noise);
  void append(const Circuit& other);

  Circuit without_noise() const;
  // Noiseless inverse: layers reversed, gates inverted.
  Circuit inverse() const;
  std::size_t count_gates(GateKind kind) const;

 private:
  std::size_t n_ = 0;
  std::vector<Layer> layers_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(std::size_t n_qubits, Eigen::MatrixXcd rho);

  static DensityMatrix zero_state(std::size_t n_qubits);
  static DensityMatrix basis_state(std::size_t n_qubits, std::uint64_t index);
  static DensityMatrix from_statevector(const Eigen::VectorXcd& psi);

  std::size_t n_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  double trace() const { return rho_.trace().real(); }
  // Throws ConsistencyError if trace, Hermiticity or PSD checks fail.
  void validate(double tol = 1e-8) const;

  void apply_gate(const Gate& g);
  void apply_unitary(const Eigen::MatrixXcd& u, const std::vector<std::size_t>& targets);
  void apply_pauli(const PauliString& p);
  void apply_pauli_channel(const PauliChannel& c, const std::vector<std::size_t>& qubits);
  void apply_kraus(const std::vector<Eigen::MatrixXcd>& ops, const std::vector<std::size_t>& targets);

  std::vector<double> probabilities() const;

 private:
  std::size_t n_ = 0;
  Eigen::MatrixXcd rho_;
};

DensityMatrix run_density(const Circuit& circuit, DensityMatrix input);
// Dense unitary of the noiseless circuit.
Eigen::MatrixXcd circuit_unitary(const Circuit& circuit);
double expectation(const DensityMatrix& state, const PauliString& observable);

// Column j of each confusion matrix is the distribution of the observed bit given true bit j.
struct ReadoutModel {
  std::vector<Eigen::Matrix2d> confusion;

  static ReadoutModel ideal(std::size_t n_qubits);
  static ReadoutModel symmetric(std::size_t n_qubits, double flip);
  std::size_t n_qubits() const { return confusion.size(); }
  void validate() const;
  // P(observed | true) for basis indices.
  double likelihood(std::uint64_t observed, std::uint64_t truth) const;
};

using Counts = std::map<std::string, std::uint64_t>;

// Histogram over basis indices; multinomial draw from `probabilities`.
std::vector<std::uint64_t> sample_histogram(const std::vector<double>& probabilities,
                                            std::uint64_t shots, std::mt19937_64& rng);
std::vector<std::uint64_t> apply_readout(const std::vector<std::uint64_t>& histogram,
                                         const ReadoutModel& readout, std::mt19937_64& rng);
Counts sample_counts(const DensityMatrix& state, std::uint64_t shots,
                     const std::optional<ReadoutModel>& readout, std::uint64_t seed);

std::string bitstring(std::uint64_t index, std::size_t n_qubits);
std::uint64_t bitstring_index(const std::string& bits);
Counts counts_from_histogram(const std::vector<std::uint64_t>& histogram, std::size_t n_qubits);
std::string counts_to_csv(const Counts& counts);

nlohmann::json to_json(const Gate& g);
nlohmann::json to_json(const Circuit& c);
Gate gate_from_json(const nlohmann::json& j);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace hqem
