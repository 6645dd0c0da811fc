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

#include <complex>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hqem/generalized_error.hpp"
#include "hqem/pauli.hpp"

namespace hqem {

// Stochastic Pauli channel rho -> sum_j c_j P_j rho P_j, rates indexed by PauliLabel.
class PauliChannel {
 public:
  PauliChannel() = default;
  PauliChannel(std::size_t n_qubits, std::vector<double> rates);

  static PauliChannel identity(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  const std::vector<double>& rates() const { return rates_; }
  double rate(PauliLabel j) const { return rates_.at(j.value()); }
  double error_mass() const { return 1.0 - rates_.front(); }

 private:
  std::size_t n_ = 0;
  std::vector<double> rates_;
};

// PTM diagonal of a Pauli channel.
class FidelityVector {
 public:
  FidelityVector() = default;
  FidelityVector(std::size_t n_qubits, std::vector<double> f);

  std::size_t n_qubits() const { return n_; }
  const std::vector<double>& values() const { return f_; }
  double operator[](PauliLabel k) const { return f_.at(k.value()); }

 private:
  std::size_t n_ = 0;
  std::vector<double> f_;
};

// Signed decomposition sum_j eta_j P_j . P_j of an inverse channel.
class QuasiProbability {
 public:
  QuasiProbability() = default;
  QuasiProbability(std::size_t n_qubits, std::vector<double> eta);

  std::size_t n_qubits() const { return n_; }
  const std::vector<double>& eta() const { return eta_; }
  double gamma() const { return gamma_; }
  double probability(PauliLabel j) const { return std::abs(eta_.at(j.value())) / gamma_; }
  int sign(PauliLabel j) const { return eta_.at(j.value()) < 0.0 ? -1 : 1; }
  std::vector<double> probabilities() const;

  // Draws a label from q = |eta| / gamma.
  PauliLabel sample(std::mt19937_64& rng) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> eta_;
  double gamma_ = 1.0;
  std::vector<double> cumulative_;
};

// chi matrix over the phase-free Pauli basis: E(rho) = sum chi_mn P_m rho P_n.
class ChiMatrix {
 public:
  ChiMatrix() = default;
  ChiMatrix(std::size_t n_qubits, Eigen::MatrixXcd chi);

  static ChiMatrix from_pauli_channel(const PauliChannel& c);

  std::size_t n_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return chi_; }
  std::complex<double> operator()(std::uint64_t m, std::uint64_t n) const { return chi_(m, n); }

  Eigen::VectorXd diagonal() const { return chi_.diagonal().real(); }
  double offdiagonal_norm() const;
  bool is_hermitian(double tol = 1e-10) const;
  bool is_positive_semidefinite(double tol = 1e-10) const;

  // Pauli channel obtained by dropping off-diagonal entries.
  PauliChannel diagonal_channel() const;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  // R_ab = 2^-n Tr(P_a E(P_b)); dense, intended for n <= 3.
  Eigen::MatrixXd ptm() const;

 private:
  std::size_t n_ = 0;
  Eigen::MatrixXcd chi_;
};

struct KrausTerm {
  std::complex<double> weight{1.0, 0.0};
  Eigen::MatrixXcd op;
};

// f_k = sum_j (-1)^<j,k> v_j, in place, O(n 4^n).
void walsh_hadamard(std::vector<double>& v, std::size_t n_qubits);

FidelityVector fidelities_from_rates(const PauliChannel& c);
PauliChannel rates_from_fidelities(const FidelityVector& f);
// Same transform without physicality checks; used for signed inverses.
std::vector<double> signed_rates_from_fidelities(const FidelityVector& f);

inline constexpr double kSingularFidelityTolerance = 1e-6;
QuasiProbability invert_pauli_channel(const FidelityVector& f);
inline QuasiProbability invert_pauli_channel(const PauliChannel& c) {
  return invert_pauli_channel(fidelities_from_rates(c));
}

// second o first.
PauliChannel compose(const PauliChannel& first, const PauliChannel& second);
// Direct Pauli-group convolution of rates; agrees with compose.
PauliChannel convolve_rates(const PauliChannel& first, const PauliChannel& second);

PauliChannel depolarizing(std::size_t n_qubits, double p);
// Tensor product a (x) b; a acts on the leading qubits.
PauliChannel tensor(const PauliChannel& a, const PauliChannel& b);
ChiMatrix tensor(const ChiMatrix& a, const ChiMatrix& b);

// Kraus operators K_i = weight_i * op_i.
ChiMatrix chi_of_kraus(const std::vector<KrausTerm>& operators);
ChiMatrix chi_of_kraus(const std::vector<std::pair<std::complex<double>, GeneralizedError>>& ops);

nlohmann::json to_json(const PauliChannel& c);
nlohmann::json to_json(const FidelityVector& f);
nlohmann::json to_json(const QuasiProbability& q);
PauliChannel pauli_channel_from_json(const nlohmann::json& j);
FidelityVector fidelity_vector_from_json(const nlohmann::json& j);

}  // namespace hqem
